#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "acid/classify.hpp"
#include "acid/ecm.hpp"
#include "acid/error.hpp"
#include "acid/evaluation.hpp"
#include "acid/iac.hpp"
#include "acid/metrics.hpp"
#include "acid/signals.hpp"
#include "acid/vcs.hpp"

namespace acid::io {

using json = nlohmann::json;

/// Compact single-line dump; invalid UTF-8 in commit data is replaced.
inline std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }
inline std::string dump_pretty(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// --- commits ---------------------------------------------------------------

inline json to_json(const vcs::FileChange& fc) {
  auto lines = [](const std::vector<vcs::NumberedLine>& v) {
    json arr = json::array();
    for (const auto& l : v) arr.push_back(json::array({l.line_no, l.text}));
    return arr;
  };
  return {{"path", fc.path},
          {"change_kind", std::string(vcs::to_string(fc.change_kind))},
          {"added_lines", lines(fc.added_lines)},
          {"removed_lines", lines(fc.removed_lines)}};
}

inline vcs::FileChange file_change_from_json(const json& j) {
  vcs::FileChange fc;
  fc.path = j.at("path").get<std::string>();
  const auto kind = j.at("change_kind").get<std::string>();
  for (auto k : {vcs::ChangeKind::Added, vcs::ChangeKind::Deleted, vcs::ChangeKind::Modified, vcs::ChangeKind::Renamed})
    if (vcs::to_string(k) == kind) fc.change_kind = k;
  for (const auto& l : j.at("added_lines")) fc.added_lines.push_back({l.at(0).get<std::uint32_t>(), l.at(1).get<std::string>()});
  for (const auto& l : j.at("removed_lines"))
    fc.removed_lines.push_back({l.at(0).get<std::uint32_t>(), l.at(1).get<std::string>()});
  return fc;
}

inline json to_json(const vcs::CommitRecord& c) {
  json changes = json::array();
  for (const auto& fc : c.file_changes) changes.push_back(to_json(fc));
  return {{"commit_id", c.commit_id},     {"message", c.message},          {"author_time", c.author_time},
          {"author_id", c.author_id},     {"parent_count", c.parent_count}, {"file_changes", std::move(changes)}};
}

inline vcs::CommitRecord commit_from_json(const json& j) {
  vcs::CommitRecord c;
  c.commit_id = j.at("commit_id").get<std::string>();
  c.message = j.at("message").get<std::string>();
  c.author_time = j.at("author_time").get<std::int64_t>();
  c.author_id = j.at("author_id").get<std::string>();
  c.parent_count = j.value("parent_count", 0u);
  for (const auto& fc : j.at("file_changes")) c.file_changes.push_back(file_change_from_json(fc));
  return c;
}

// --- IaC profile -----------------------------------------------------------

inline json to_json(const iac::RepoIacProfile& p) {
  json markers = json::object();
  for (const auto& [dir, platform] : p.markers) markers[dir] = std::string(iac::to_string(platform));
  return {{"total_files", p.total_files},
          {"iac_files", p.iac_files},
          {"iac_ratio", p.iac_ratio},
          {"program_paths", p.program_paths},
          {"markers", std::move(markers)}};
}

inline iac::RepoIacProfile profile_from_json(const json& j) {
  iac::RepoIacProfile p;
  p.total_files = j.at("total_files").get<std::size_t>();
  p.iac_files = j.at("iac_files").get<std::size_t>();
  p.iac_ratio = j.at("iac_ratio").get<double>();
  p.program_paths = j.at("program_paths").get<std::set<std::string>>();
  for (const auto& [dir, name] : j.at("markers").items())
    if (auto platform = iac::parse_platform(name.get<std::string>())) p.markers[dir] = *platform;
  return p;
}

// --- signals and classification ---------------------------------------------

inline json to_json(const DiffSignals& s) {
  json j = json::object();
  for (Signal sig : kAllSignals) j[std::string(field_name(sig))] = s.get(sig);
  return j;
}

inline json to_json(const ecm::IssueRef& r) {
  return {{"repo_slug", r.repo_slug}, {"issue_number", r.issue_number}};
}

inline json to_json(const ClassificationResult& r) {
  json categories = json::array(), subcategories = json::array();
  for (Category c : r.categories) categories.push_back(std::string(id_of(c)));
  for (Subcategory s : r.subcategories) subcategories.push_back(label_string(s));
  json evidence = json::object();
  for (const auto& [label, list] : r.evidence) {
    json arr = json::array();
    for (const auto& e : list) {
      json item = {{"source", e.source}, {"text", e.text}};
      if (!e.path.empty()) item["path"] = e.path;
      arr.push_back(std::move(item));
    }
    evidence[label] = std::move(arr);
  }
  return {{"commit_id", r.commit_id},
          {"labels", r.labels()},
          {"categories", std::move(categories)},
          {"subcategories", std::move(subcategories)},
          {"is_defect", r.is_defect},
          {"evidence", std::move(evidence)}};
}

inline ClassificationResult classification_from_json(const json& j) {
  ClassificationResult r;
  r.commit_id = j.at("commit_id").get<std::string>();
  auto absorb = [&](const std::string& label) {
    auto slash = label.find('/');
    if (auto c = parse_category(label.substr(0, slash))) r.categories.insert(*c);
    if (slash != std::string::npos)
      if (auto s = parse_subcategory(label.substr(slash + 1))) r.subcategories.insert(*s);
  };
  if (j.contains("categories"))
    for (const auto& c : j.at("categories")) absorb(c.get<std::string>());
  if (j.contains("subcategories"))
    for (const auto& s : j.at("subcategories")) absorb(s.get<std::string>());
  if (j.contains("labels"))
    for (const auto& l : j.at("labels")) absorb(l.get<std::string>());
  if (j.contains("evidence")) {
    for (const auto& [label, list] : j.at("evidence").items()) {
      auto& out = r.evidence[label];
      for (const auto& e : list)
        out.push_back({e.value("source", ""), e.value("text", ""), e.value("path", "")});
    }
  }
  r.is_defect = !r.categories.empty();
  return r;
}

// --- files -----------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Each non-blank line parsed as JSON; errors name the line.
inline std::vector<json> read_ndjson(const std::filesystem::path& path) {
  std::vector<json> out;
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error(ErrorKind::FormatError, path.string() + " line " + std::to_string(line_no) + ": invalid JSON");
    out.push_back(std::move(j));
  }
  return out;
}

/// Predictions as ndjson ClassificationResult lines, or in the oracle's
/// `commit_id,Cat;Cat` format.
inline std::map<std::string, std::set<Category>> read_predictions(const std::filesystem::path& path) {
  std::string text = read_file(path);
  auto first = text.find_first_not_of(" \t\r\n");
  std::map<std::string, std::set<Category>> out;
  if (first != std::string::npos && text[first] == '{') {
    int line_no = 0;
    for (const auto& j : read_ndjson(path)) {
      ++line_no;
      if (!j.contains("commit_id"))
        throw Error(ErrorKind::FormatError, path.string() + " record " + std::to_string(line_no) + ": missing commit_id");
      auto r = classification_from_json(j);
      out[r.commit_id] = r.categories;
    }
    return out;
  }
  for (auto& e : evaluation::parse_oracle(text)) out[e.commit_id] = std::move(e.true_labels);
  return out;
}

// --- metrics ---------------------------------------------------------------

inline json to_json(const metrics::Proportions& p) {
  json j = json::object();
  for (Category c : kAllCategories) j[std::string(id_of(c))] = round2(p[c]);
  j["Total"] = round2(p.total);
  return j;
}

inline json to_json(const metrics::MetricsReport& r) {
  json years = json::object();
  for (const auto& [cat, series] : r.defects_per_year) {
    json row = json::object();
    for (const auto& [y, n] : series) row[std::to_string(y)] = n;
    years[std::string(id_of(cat))] = std::move(row);
  }
  json colabel = json::object();
  for (const auto& [size, pct] : r.colabel_histogram) colabel[std::to_string(size)] = round2(pct);
  json shares = json::object();
  for (const auto& [cat, row] : r.subcategory_shares) {
    json sub = json::object();
    for (const auto& [s, pct] : row) sub[std::string(id_of(s))] = round2(pct);
    shares[std::string(id_of(cat))] = std::move(sub);
  }
  return {{"iac_commits", r.iac_commits},
          {"program_count", r.program_count},
          {"defect_proportion", to_json(r.defect_proportion)},
          {"script_proportion", to_json(r.script_proportion)},
          {"defects_per_year", std::move(years)},
          {"colabel_histogram", std::move(colabel)},
          {"subcategory_shares", std::move(shares)}};
}

/// Rows = categories + Total; columns = defect and script proportion (%).
inline std::string proportions_csv(const metrics::MetricsReport& r) {
  std::ostringstream out;
  out << "category,defect_proportion,script_proportion\n";
  for (Category c : kAllCategories)
    out << display_name(c) << ',' << fixed2(r.defect_proportion[c]) << ',' << fixed2(r.script_proportion[c]) << '\n';
  out << "Total," << fixed2(r.defect_proportion.total) << ',' << fixed2(r.script_proportion.total) << '\n';
  return out.str();
}

inline std::string defects_per_year_csv(const metrics::YearSeries& series) {
  std::ostringstream out;
  out << "category,year,count\n";
  for (const auto& [cat, years] : series)
    for (const auto& [y, n] : years) out << display_name(cat) << ',' << y << ',' << n << '\n';
  return out.str();
}

inline std::string colabel_csv(const metrics::ColabelHistogram& hist) {
  std::ostringstream out;
  out << "label_count,percentage\n";
  for (const auto& [size, pct] : hist) out << size << ',' << fixed2(pct) << '\n';
  return out.str();
}

inline std::string subcategory_csv(const metrics::SubcategoryShares& shares) {
  std::ostringstream out;
  out << "category,subcategory,percentage\n";
  for (const auto& [cat, row] : shares)
    for (const auto& [s, pct] : row) out << display_name(cat) << ',' << id_of(s) << ',' << fixed2(pct) << '\n';
  return out.str();
}

}  // namespace acid::io
