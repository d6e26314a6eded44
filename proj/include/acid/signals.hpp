#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acid {

/// Boolean predicates computed from a commit's changed lines.
enum class Signal {
  ChangedInclude,
  ChangedComment,
  ChangedService,
  DataChanged,
  DataNetChanged,
  DataCredChanged,
  ChangedSecu,
};

inline constexpr std::array<Signal, 7> kAllSignals{
    Signal::ChangedInclude, Signal::ChangedComment,  Signal::ChangedService, Signal::DataChanged,
    Signal::DataNetChanged, Signal::DataCredChanged, Signal::ChangedSecu,
};

/// Function name as written in rule files.
constexpr std::string_view function_name(Signal s) {
  switch (s) {
    case Signal::ChangedInclude: return "changedInclude";
    case Signal::ChangedComment: return "changedComment";
    case Signal::ChangedService: return "changedService";
    case Signal::DataChanged: return "dataChanged";
    case Signal::DataNetChanged: return "dataNetChanged";
    case Signal::DataCredChanged: return "dataCredChanged";
    case Signal::ChangedSecu: return "changedSecu";
  }
  return "";
}

/// Field name used in serialized output.
constexpr std::string_view field_name(Signal s) {
  switch (s) {
    case Signal::ChangedInclude: return "changed_include";
    case Signal::ChangedComment: return "changed_comment";
    case Signal::ChangedService: return "changed_service";
    case Signal::DataChanged: return "data_changed";
    case Signal::DataNetChanged: return "data_net_changed";
    case Signal::DataCredChanged: return "data_cred_changed";
    case Signal::ChangedSecu: return "changed_secu";
  }
  return "";
}

inline std::optional<Signal> parse_signal_function(std::string_view name) {
  if (name == "changedComments") return Signal::ChangedComment;
  for (Signal s : kAllSignals)
    if (function_name(s) == name || field_name(s) == name) return s;
  return std::nullopt;
}

struct DiffEvidence {
  std::string path;
  std::string line;

  friend bool operator==(const DiffEvidence&, const DiffEvidence&) = default;
};

/// Signal values plus the lines that triggered each one. A signal is true
/// exactly when it has at least one evidence entry, unless it was set
/// directly with `force` (used when signals come from elsewhere).
class DiffSignals {
 public:
  bool get(Signal s) const { return values_[idx(s)]; }
  const std::vector<DiffEvidence>& evidence(Signal s) const { return evidence_[idx(s)]; }

  void record(Signal s, std::string path, std::string line) {
    values_[idx(s)] = true;
    evidence_[idx(s)].push_back({std::move(path), std::move(line)});
  }

  void force(Signal s, bool value) {
    values_[idx(s)] = value;
    if (!value) evidence_[idx(s)].clear();
  }

  bool any() const {
    for (bool v : values_)
      if (v) return true;
    return false;
  }

  bool changed_include() const { return get(Signal::ChangedInclude); }
  bool changed_comment() const { return get(Signal::ChangedComment); }
  bool changed_service() const { return get(Signal::ChangedService); }
  bool data_changed() const { return get(Signal::DataChanged); }
  bool data_net_changed() const { return get(Signal::DataNetChanged); }
  bool data_cred_changed() const { return get(Signal::DataCredChanged); }
  bool changed_secu() const { return get(Signal::ChangedSecu); }

  friend bool operator==(const DiffSignals&, const DiffSignals&) = default;

 private:
  static constexpr std::size_t idx(Signal s) { return static_cast<std::size_t>(s); }
  std::array<bool, 7> values_{};
  std::array<std::vector<DiffEvidence>, 7> evidence_{};
};

}  // namespace acid
