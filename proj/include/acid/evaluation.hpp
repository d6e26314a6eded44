#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "acid/classify.hpp"
#include "acid/error.hpp"
#include "acid/taxonomy.hpp"

namespace acid::evaluation {

struct OracleEntry {
  std::string commit_id;
  std::set<Category> true_labels;  // empty = No Defect
};

namespace detail {
inline std::string_view trim(std::string_view s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}
}  // namespace detail

/// Parses "Cat;Cat/Sub;..." into parent categories.
inline std::set<Category> parse_label_list(std::string_view text, int line_no) {
  std::set<Category> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto semi = text.find(';', start);
    if (semi == std::string_view::npos) semi = text.size();
    std::string_view name = detail::trim(text.substr(start, semi - start));
    start = semi + 1;
    if (name.empty()) continue;
    auto slash = name.find('/');
    std::string_view parent = slash == std::string_view::npos ? name : name.substr(0, slash);
    auto cat = parse_category(parent);
    if (!cat)
      throw Error(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": unknown category '" + std::string(name) + "'");
    if (slash != std::string_view::npos) {
      auto sub = parse_subcategory(name.substr(slash + 1));
      if (!sub || parent_of(*sub) != *cat)
        throw Error(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": unknown subcategory '" + std::string(name) + "'");
    }
    out.insert(*cat);
  }
  return out;
}

/// One record per line: `commit_id,Cat;Cat` (a tab also separates). An empty
/// label list means No Defect. '#' starts a comment line.
inline std::vector<OracleEntry> parse_oracle(std::string_view text) {
  std::vector<OracleEntry> out;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto sep = t.find_first_of(",\t");
    std::string_view id = detail::trim(t.substr(0, sep));
    if (id.empty()) throw Error(ErrorKind::FormatError, "line " + std::to_string(line_no) + ": missing commit id");
    OracleEntry e;
    e.commit_id = std::string(id);
    if (sep != std::string_view::npos) e.true_labels = parse_label_list(t.substr(sep + 1), line_no);
    if (!ids.insert(e.commit_id).second)
      throw Error(ErrorKind::DuplicateOracleEntry, e.commit_id + " (line " + std::to_string(line_no) + ")");
    out.push_back(std::move(e));
  }
  return out;
}

struct RowScore {
  std::string name;
  std::size_t support = 0;  // oracle occurrences
  std::size_t tp = 0, fp = 0, fn = 0;
  std::optional<double> precision;
  std::optional<double> recall;
};

enum class Averaging { Macro, Micro };

struct ScoreTable {
  std::vector<RowScore> rows;  // eight categories, then "No Defect"
  std::optional<double> average_precision;
  std::optional<double> average_recall;
  Averaging averaging = Averaging::Macro;

  const RowScore& row(std::string_view name) const {
    for (const auto& r : rows)
      if (r.name == name) return r;
    throw Error(ErrorKind::FormatError, "no score row " + std::string(name));
  }
  const RowScore& row(Category c) const { return rows.at(index_of(c)); }
  const RowScore& no_defect() const { return rows.back(); }
};

inline constexpr std::string_view kNoDefect = "No Defect";

inline RowScore finish_row(std::string name, std::size_t tp, std::size_t fp, std::size_t fn) {
  RowScore r{std::move(name), tp + fn, tp, fp, fn, std::nullopt, std::nullopt};
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return r;
}

/// Average row: macro is the unweighted mean of the defined values over rows
/// with support >= 1; micro pools the counts of every row.
inline void fill_average(ScoreTable& table) {
  table.average_precision.reset();
  table.average_recall.reset();
  if (table.averaging == Averaging::Macro) {
    double ps = 0, rs = 0;
    std::size_t pn = 0, rn = 0;
    for (const auto& r : table.rows) {
      if (r.support == 0) continue;
      if (r.precision) ps += *r.precision, ++pn;
      if (r.recall) rs += *r.recall, ++rn;
    }
    if (pn) table.average_precision = ps / static_cast<double>(pn);
    if (rn) table.average_recall = rs / static_cast<double>(rn);
  } else {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& r : table.rows) tp += r.tp, fp += r.fp, fn += r.fn;
    if (tp + fp) table.average_precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn) table.average_recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
}

/// Per-category binary precision/recall over the oracle's ECMs, a No Defect
/// row scored on the empty label set, and an average row.
inline ScoreTable score(const std::map<std::string, std::set<Category>>& predictions,
                        std::span<const OracleEntry> oracle, Averaging averaging = Averaging::Macro) {
  std::set<std::string_view> ids;
  for (const auto& e : oracle) {
    if (!ids.insert(e.commit_id).second) throw Error(ErrorKind::DuplicateOracleEntry, e.commit_id);
    if (!predictions.contains(e.commit_id)) throw Error(ErrorKind::MissingPrediction, e.commit_id);
  }

  ScoreTable table;
  table.averaging = averaging;
  auto tally = [&](auto&& truth_has, auto&& pred_has, std::string name) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& e : oracle) {
      const auto& predicted = predictions.at(e.commit_id);
      bool t = truth_has(e.true_labels), p = pred_has(predicted);
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    table.rows.push_back(finish_row(std::move(name), tp, fp, fn));
  };
  for (Category c : kAllCategories) {
    auto has = [c](const std::set<Category>& s) { return s.contains(c); };
    tally(has, has, std::string(display_name(c)));
  }
  auto none = [](const std::set<Category>& s) { return s.empty(); };
  tally(none, none, std::string(kNoDefect));

  fill_average(table);
  return table;
}

inline ScoreTable score(std::span<const ClassificationResult> predictions, std::span<const OracleEntry> oracle,
                        Averaging averaging = Averaging::Macro) {
  std::map<std::string, std::set<Category>> by_id;
  for (const auto& p : predictions) by_id[p.commit_id] = p.categories;
  return score(by_id, oracle, averaging);
}

inline std::string format_score(const std::optional<double>& v) {
  if (!v) return "\xE2\x80\x94";  // em dash
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

inline std::string to_csv(const ScoreTable& table) {
  std::ostringstream out;
  out << "Category,Occur.,Precision,Recall\n";
  for (const auto& r : table.rows)
    out << r.name << ',' << r.support << ',' << format_score(r.precision) << ',' << format_score(r.recall) << '\n';
  out << "Average,," << format_score(table.average_precision) << ',' << format_score(table.average_recall) << '\n';
  return out.str();
}

inline std::string to_text(const ScoreTable& table) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-20s %8s %10s %8s\n", "Category", "Occur.", "Precision", "Recall");
  out << buf << std::string(49, '-') << '\n';
  auto line = [&](const std::string& name, const std::string& occ, const std::string& p, const std::string& r) {
    // the dash is 3 bytes wide but one column
    auto pad = [](const std::string& s, int width) {
      int cols = static_cast<int>(s.size()) - (s == "\xE2\x80\x94" ? 2 : 0);
      return std::string(static_cast<std::size_t>(std::max(0, width - cols)), ' ') + s;
    };
    std::snprintf(buf, sizeof buf, "%-20s ", name.c_str());
    out << buf << pad(occ, 8) << ' ' << pad(p, 10) << ' ' << pad(r, 8) << '\n';
  };
  for (const auto& r : table.rows)
    line(r.name, std::to_string(r.support), format_score(r.precision), format_score(r.recall));
  out << std::string(49, '-') << '\n';
  line(table.averaging == Averaging::Macro ? "Average" : "Average (micro)", "", format_score(table.average_precision),
       format_score(table.average_recall));
  return out.str();
}

}  // namespace acid::evaluation
