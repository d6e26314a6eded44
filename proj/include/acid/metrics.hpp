#pragma once

#include <array>
#include <algorithm>
#include <chrono>
#include <limits>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "acid/classify.hpp"
#include "acid/error.hpp"
#include "acid/taxonomy.hpp"

namespace acid::metrics {

/// Percentages per category (taxonomy order) plus the any-category total.
struct Proportions {
  std::array<double, 8> per_category{};
  double total = 0.0;

  double operator[](Category c) const { return per_category[index_of(c)]; }
};

using YearSeries = std::map<Category, std::map<int, std::size_t>>;
using ColabelHistogram = std::map<std::size_t, double>;
using SubcategoryShares = std::map<Category, std::map<Subcategory, double>>;

struct MetricsReport {
  Proportions defect_proportion;
  Proportions script_proportion;
  YearSeries defects_per_year;
  ColabelHistogram colabel_histogram;
  SubcategoryShares subcategory_shares;
  std::size_t iac_commits = 0;
  std::size_t program_count = 0;
};

inline int utc_year(std::int64_t t) {
  using namespace std::chrono;
  return static_cast<int>(year_month_day{floor<days>(sys_seconds{seconds{t}})}.year());
}

inline double percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

/// Share of IaC commits carrying each category.
inline Proportions defect_proportion(std::span<const ClassificationResult> results,
                                     const std::set<std::string>& iac_commit_ids) {
  if (iac_commit_ids.empty()) throw Error(ErrorKind::EmptyDenominator, "no IaC commits");
  std::array<std::set<std::string_view>, 8> per;
  std::set<std::string_view> any;
  for (const auto& r : results) {
    if (!iac_commit_ids.contains(r.commit_id)) continue;
    for (Category c : r.categories) per[index_of(c)].insert(r.commit_id);
    if (!r.categories.empty()) any.insert(r.commit_id);
  }
  Proportions p;
  for (std::size_t i = 0; i < 8; ++i) p.per_category[i] = percent(per[i].size(), iac_commit_ids.size());
  p.total = percent(any.size(), iac_commit_ids.size());
  return p;
}

/// Share of IaC programs touched by at least one commit carrying each category.
inline Proportions script_proportion(std::span<const ClassificationResult> results,
                                     const std::map<std::string, std::set<std::string>>& commit_paths,
                                     const std::set<std::string>& all_program_paths) {
  if (all_program_paths.empty()) throw Error(ErrorKind::EmptyDenominator, "no IaC programs");
  std::array<std::set<std::string_view>, 8> per;
  std::set<std::string_view> any;
  for (const auto& r : results) {
    if (r.categories.empty()) continue;
    auto it = commit_paths.find(r.commit_id);
    if (it == commit_paths.end()) continue;
    for (const auto& path : it->second) {
      if (!all_program_paths.contains(path)) continue;
      any.insert(path);
      for (Category c : r.categories) per[index_of(c)].insert(path);
    }
  }
  Proportions p;
  for (std::size_t i = 0; i < 8; ++i) p.per_category[i] = percent(per[i].size(), all_program_paths.size());
  p.total = percent(any.size(), all_program_paths.size());
  return p;
}

/// Labeled commits per UTC year. Categories that occur get every year of the
/// corpus span, zero-filled.
inline YearSeries defects_per_year(std::span<const ClassificationResult> results,
                                   const std::map<std::string, std::int64_t>& commit_times) {
  YearSeries series;
  if (commit_times.empty()) return series;
  int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
  for (const auto& [id, t] : commit_times) {
    int y = utc_year(t);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  std::array<std::set<std::string_view>, 8> counted;
  for (const auto& r : results) {
    auto it = commit_times.find(r.commit_id);
    if (it == commit_times.end()) continue;
    int y = utc_year(it->second);
    for (Category c : r.categories) {
      if (!counted[index_of(c)].insert(r.commit_id).second) continue;
      auto& years = series[c];
      if (years.empty())
        for (int yy = lo; yy <= hi; ++yy) years[yy] = 0;
      ++years[y];
    }
  }
  return series;
}

/// Percentage of ECMs per label-set size (number of categories).
inline ColabelHistogram colabel_distribution(std::span<const ClassificationResult> results) {
  ColabelHistogram hist;
  if (results.empty()) return hist;
  std::map<std::size_t, std::size_t> counts;
  for (const auto& r : results) ++counts[r.categories.size()];
  for (const auto& [size, n] : counts) hist[size] = percent(n, results.size());
  return hist;
}

/// For each parent with subcategories: share of its ECMs carrying each
/// subcategory. Subcategories are not exclusive, so shares need not sum to 100.
inline SubcategoryShares subcategory_shares(std::span<const ClassificationResult> results) {
  SubcategoryShares shares;
  for (Category parent : {Category::ConfigurationData, Category::Service}) {
    std::size_t parent_count = 0;
    std::map<Subcategory, std::size_t> counts;
    for (const auto& r : results) {
      if (!r.categories.contains(parent)) continue;
      ++parent_count;
      for (Subcategory s : r.subcategories)
        if (parent_of(s) == parent) ++counts[s];
    }
    if (parent_count == 0) continue;
    auto& row = shares[parent];
    for (Subcategory s : kAllSubcategories)
      if (parent_of(s) == parent) row[s] = percent(counts[s], parent_count);
  }
  return shares;
}

/// One classified IaC commit with the context the metrics need.
struct ClassifiedCommit {
  ClassificationResult result;
  std::int64_t author_time = 0;
  std::set<std::string> iac_paths;
};

inline MetricsReport build_report(std::span<const ClassifiedCommit> corpus, const std::set<std::string>& program_paths) {
  MetricsReport report;
  std::vector<ClassificationResult> results;
  std::set<std::string> ids;
  std::map<std::string, std::set<std::string>> paths;
  std::map<std::string, std::int64_t> times;
  for (const auto& c : corpus) {
    results.push_back(c.result);
    ids.insert(c.result.commit_id);
    paths[c.result.commit_id].insert(c.iac_paths.begin(), c.iac_paths.end());
    times[c.result.commit_id] = c.author_time;
  }
  report.iac_commits = ids.size();
  report.program_count = program_paths.size();
  report.defect_proportion = defect_proportion(results, ids);
  report.script_proportion = script_proportion(results, paths, program_paths);
  report.defects_per_year = defects_per_year(results, times);
  report.colabel_histogram = colabel_distribution(results);
  report.subcategory_shares = subcategory_shares(results);
  return report;
}

}  // namespace acid::metrics
