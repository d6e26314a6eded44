#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acid {

/// A list of lower-case prefixes. A token matches when one of the prefixes
/// is a prefix of it, so "issu" covers "issue", "issues" and "issued" while
/// "security" does not cover "secure".
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<std::string> prefixes) : prefixes_(std::move(prefixes)) {
    for (auto& p : prefixes_)
      std::transform(p.begin(), p.end(), p.begin(), [](unsigned char c) { return std::tolower(c); });
  }

  const std::vector<std::string>& prefixes() const { return prefixes_; }

  /// First prefix matching `token`, if any.
  std::optional<std::string_view> match(std::string_view token) const {
    for (const auto& p : prefixes_) {
      if (p.empty() || p.size() > token.size()) continue;
      bool ok = true;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(token[i])) != p[i]) {
          ok = false;
          break;
        }
      }
      if (ok) return std::string_view(p);
    }
    return std::nullopt;
  }

  bool matches(std::string_view token) const { return match(token).has_value(); }

  friend bool operator==(const Lexicon&, const Lexicon&) = default;

 private:
  std::vector<std::string> prefixes_;
};

/// True iff some term has some lexicon entry as a prefix.
template <typename Range>
bool match_pattern(const Range& terms, const Lexicon& lexicon) {
  return std::any_of(std::begin(terms), std::end(terms),
                     [&](const auto& term) { return lexicon.matches(term); });
}

}  // namespace acid
