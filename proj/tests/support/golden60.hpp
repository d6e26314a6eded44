#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "acid/forge.hpp"
#include "acid/serialize.hpp"
#include "fixture_repo.hpp"

namespace fixture {

struct GoldenCase {
  std::string key;
  std::string date;
  std::string message;
  std::string file;
  std::vector<std::string> remove;
  std::vector<std::string> add;
  std::vector<std::string> labels;  // "Category" or "Category/Sub"
};

struct Golden {
  std::string slug;
  std::vector<GoldenCase> cases;
  nlohmann::json issues;
  nlohmann::json scaffold;
  std::map<std::string, std::string> commit_of;  // case key -> commit id
  std::string scaffold_commit;
};

inline std::string golden_dir() { return std::string(ACID_FIXTURE_DIR) + "/golden60"; }

inline Golden load_golden() {
  auto doc = nlohmann::json::parse(acid::io::read_file(golden_dir() + "/cases.json"));
  Golden g;
  g.slug = doc.at("slug");
  g.issues = doc.at("issues");
  g.scaffold = doc.at("scaffold");
  for (const auto& c : doc.at("cases"))
    g.cases.push_back({c.at("key"), c.at("date"), c.at("message"), c.at("file"), c.at("remove"), c.at("add"),
                       c.at("labels")});
  return g;
}

inline std::string header_for(const std::string& file) {
  if (file.ends_with(".ts")) return "import * as pulumi from \"@pulumi/pulumi\";";
  if (file.ends_with(".py")) return "import pulumi";
  return "terraform {}";
}

/// Scaffold commit with every file, then one commit per case that deletes the
/// case's `remove` lines and appends its `add` lines.
inline Golden build_golden(const fs::path& dir) {
  static const std::vector<std::string> authors{"ana", "ben", "cho", "dev", "eli", "fay",
                                                "gus", "hal", "ida", "jon", "kim", "lou"};
  Golden g = load_golden();
  Repo repo(dir);
  std::map<std::string, std::vector<std::string>> files;
  std::vector<std::string> order;
  std::map<std::string, std::set<std::string>> added_later;
  for (const auto& c : g.cases) {
    if (!files.contains(c.file)) {
      files[c.file] = {header_for(c.file)};
      order.push_back(c.file);
    }
    for (const auto& l : c.remove)
      if (!added_later[c.file].contains(l)) files[c.file].push_back(l);
    for (const auto& l : c.add) added_later[c.file].insert(l);
  }
  repo.write("Pulumi.yaml", "name: golden\nruntime: nodejs\n");
  for (const auto& f : order) repo.write(f, join_lines(files[f]));
  g.scaffold_commit = repo.commit(g.scaffold.at("message"), "ana", "ana@example.com", g.scaffold.at("date"));

  for (std::size_t i = 0; i < g.cases.size(); ++i) {
    const auto& c = g.cases[i];
    auto& lines = files[c.file];
    for (const auto& l : c.remove) {
      auto it = std::find(lines.begin(), lines.end(), l);
      if (it == lines.end()) throw std::runtime_error(c.key + ": line to remove is missing");
      lines.erase(it);
    }
    lines.insert(lines.end(), c.add.begin(), c.add.end());
    repo.write(c.file, join_lines(lines));
    const auto& who = authors[(i + 1) % authors.size()];
    g.commit_of[c.key] = repo.commit(c.message, who, who + "@example.com", c.date);
  }
  return g;
}

/// Issue payloads as the forge would return them.
inline void seed_issue_cache(const Golden& g, const fs::path& cache_dir) {
  acid::forge::IssueCache cache(cache_dir);
  for (const auto& [number, issue] : g.issues.items()) {
    nlohmann::json raw{{"number", std::stoi(number)}, {"title", issue.at("title")}, {"body", issue.at("body")}};
    cache.store(g.slug, std::stoull(number), raw.dump());
  }
}

/// Oracle file keyed by commit id.
inline std::string golden_oracle(const Golden& g) {
  std::string out;
  for (const auto& c : g.cases) {
    out += g.commit_of.at(c.key) + ",";
    for (std::size_t i = 0; i < c.labels.size(); ++i) out += (i ? ";" : "") + c.labels[i];
    out += "\n";
  }
  return out;
}

}  // namespace fixture
