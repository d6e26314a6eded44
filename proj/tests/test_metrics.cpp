#include <catch_amalgamated.hpp>

#include <random>

#include "acid/diff_signals.hpp"
#include "acid/metrics.hpp"
#include "support/synthetic_ten.hpp"

using namespace acid;
using namespace acid::metrics;

namespace {

ClassificationResult labeled(std::string id, std::set<Category> cats) {
  ClassificationResult r;
  r.commit_id = std::move(id);
  r.categories = std::move(cats);
  r.is_defect = !r.categories.empty();
  return r;
}

std::int64_t at_year(int y) {
  using namespace std::chrono;
  return sys_seconds{sys_days{year{y} / June / 1}}.time_since_epoch().count();
}

struct TenCorpus {
  std::vector<ClassifiedCommit> commits;
  std::set<std::string> programs;
};

// Mines and classifies the synthetic repository the way the pipeline does,
// without issue lookups.
TenCorpus classify_ten(const fixture::fs::path& dir) {
  fixture::build_synthetic_ten(dir);
  auto profile = iac::profile_repo(vcs::list_tree(dir));
  TenCorpus out;
  out.programs = profile.program_paths;
  for (const auto& commit : vcs::list_commits(dir)) {
    if (!iac::is_iac_commit(commit, profile)) continue;
    auto ecm = ecm::build_ecm(commit, nullptr);
    auto signals = signals::detect_diff_signals(commit.file_changes, profile);
    ClassifiedCommit c{classify_ecm(ecm, signals), commit.author_time, {}};
    for (const auto& fc : commit.file_changes)
      if (iac::classify_file(fc.path, profile.markers).is_iac()) c.iac_paths.insert(fc.path);
    out.commits.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TEST_CASE("defect and script proportion examples") {
  std::vector<ClassificationResult> results;
  std::set<std::string> ids;
  for (int i = 0; i < 10; ++i) {
    auto id = "c" + std::to_string(i);
    ids.insert(id);
    results.push_back(labeled(id, i < 4 ? std::set<Category>{Category::Syntax} : std::set<Category>{}));
  }
  CHECK(defect_proportion(results, ids).total == 40.0);

  std::vector<ClassificationResult> none;
  for (const auto& id : ids) none.push_back(labeled(id, {}));
  auto zero = defect_proportion(none, ids);
  for (double v : zero.per_category) CHECK(v == 0.0);
  CHECK(zero.total == 0.0);

  std::vector<ClassificationResult> one{labeled("s", {Category::Security})};
  std::map<std::string, std::set<std::string>> paths{{"s", {"a.ts", "b.ts"}}};
  std::set<std::string> programs{"a.ts", "b.ts", "c.ts", "d.ts"};
  auto sp = script_proportion(one, paths, programs);
  CHECK(sp[Category::Security] == 50.0);
  CHECK(sp.total == 50.0);
  CHECK(script_proportion(none, {}, programs).total == 0.0);
}

TEST_CASE("empty denominators") {
  auto kind = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind([] { defect_proportion({}, {}); }) == ErrorKind::EmptyDenominator);
  CHECK(kind([] { script_proportion({}, {}, {}); }) == ErrorKind::EmptyDenominator);
}

TEST_CASE("defects per year and co-labels") {
  std::vector<ClassificationResult> cd{labeled("a", {Category::ConfigurationData}),
                                       labeled("b", {Category::ConfigurationData}),
                                       labeled("c", {Category::ConfigurationData})};
  std::map<std::string, std::int64_t> times{{"a", at_year(2021)}, {"b", at_year(2021)}, {"c", at_year(2021)}};
  CHECK(defects_per_year(cd, times) == YearSeries{{Category::ConfigurationData, {{2021, 3}}}});
  CHECK(defects_per_year({}, {}).empty());

  // zero years inside the span are explicit
  times["d"] = at_year(2019);
  auto series = defects_per_year(cd, times);
  CHECK(series.at(Category::ConfigurationData) == std::map<int, std::size_t>{{2019, 0}, {2020, 0}, {2021, 3}});

  std::vector<ClassificationResult> two{labeled("x", {Category::Security, Category::Syntax}), labeled("y", {})};
  CHECK(colabel_distribution(two) == ColabelHistogram{{0, 50.0}, {2, 50.0}});
  std::vector<ClassificationResult> blank{labeled("x", {}), labeled("y", {})};
  CHECK(colabel_distribution(blank) == ColabelHistogram{{0, 100.0}});

  // year boundary is UTC
  CHECK(utc_year(1609459199) == 2020);
  CHECK(utc_year(1609459200) == 2021);
}

TEST_CASE("synthetic ten-commit repository") {
  fixture::TempDir tmp;
  auto corpus = classify_ten(tmp / "ten");
  auto report = build_report(corpus.commits, corpus.programs);

  CHECK(report.iac_commits == 8);
  CHECK(corpus.programs == std::set<std::string>{"index.ts", "main.tf", "network.ts", "storage.ts"});

  const auto& dp = report.defect_proportion;
  CHECK(dp.total == 50.0);
  CHECK(dp[Category::ConfigurationData] == 37.5);
  for (Category c : {Category::Security, Category::Syntax, Category::Documentation, Category::Dependency,
                     Category::Service})
    CHECK(dp[c] == 12.5);
  CHECK(dp[Category::Conditional] == 0.0);
  CHECK(dp[Category::Idempotency] == 0.0);

  const auto& sp = report.script_proportion;
  CHECK(sp.total == 75.0);
  CHECK(sp[Category::ConfigurationData] == 50.0);
  for (Category c : {Category::Security, Category::Syntax, Category::Documentation, Category::Dependency,
                     Category::Service})
    CHECK(sp[c] == 25.0);

  CHECK(report.colabel_histogram == ColabelHistogram{{0, 50.0}, {1, 12.5}, {2, 25.0}, {3, 12.5}});

  using Y = std::map<int, std::size_t>;
  CHECK(report.defects_per_year == YearSeries{
                                       {Category::ConfigurationData, Y{{2020, 1}, {2021, 1}, {2022, 1}}},
                                       {Category::Dependency, Y{{2020, 0}, {2021, 0}, {2022, 1}}},
                                       {Category::Documentation, Y{{2020, 0}, {2021, 1}, {2022, 0}}},
                                       {Category::Security, Y{{2020, 0}, {2021, 1}, {2022, 0}}},
                                       {Category::Service, Y{{2020, 0}, {2021, 0}, {2022, 1}}},
                                       {Category::Syntax, Y{{2020, 0}, {2021, 1}, {2022, 0}}},
                                   });
}

TEST_CASE("metric invariants on random corpora") {
  std::mt19937 rng(17);
  for (int round = 0; round < 300; ++round) {
    std::vector<ClassifiedCommit> corpus;
    std::set<std::string> programs;
    std::size_t n_prog = 1 + rng() % 8;
    for (std::size_t p = 0; p < n_prog; ++p) programs.insert("p" + std::to_string(p) + ".tf");
    std::size_t n = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      std::set<Category> cats;
      for (Category c : kAllCategories)
        if (rng() % 5 == 0) cats.insert(c);
      ClassifiedCommit c{labeled("c" + std::to_string(i), cats), at_year(2018 + static_cast<int>(rng() % 5)), {}};
      c.iac_paths.insert("p" + std::to_string(rng() % n_prog) + ".tf");
      corpus.push_back(std::move(c));
    }
    auto report = build_report(corpus, programs);

    double colabel_sum = 0;
    for (const auto& [size, pct] : report.colabel_histogram) {
      colabel_sum += pct;
      CHECK(size <= 8);
    }
    CHECK(colabel_sum == Catch::Approx(100.0).margin(0.01));
    double per_sum = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      for (double v : {report.defect_proportion.per_category[i], report.script_proportion.per_category[i]}) {
        CHECK(v >= 0.0);
        CHECK(v <= 100.0);
      }
      per_sum += report.defect_proportion.per_category[i];
    }
    CHECK(report.defect_proportion.total <= per_sum + 1e-9);

    // yearly counts add up to the proportion numerator
    for (Category c : kAllCategories) {
      std::size_t labelled = 0;
      for (const auto& cc : corpus) labelled += cc.result.categories.contains(c);
      std::size_t yearly = 0;
      if (report.defects_per_year.contains(c))
        for (const auto& [y, k] : report.defects_per_year.at(c)) yearly += k;
      CHECK(yearly == labelled);
      CHECK(report.defect_proportion[c] == Catch::Approx(100.0 * labelled / corpus.size()));
    }

    // duplicating the corpus under fresh ids changes nothing
    auto doubled = corpus;
    for (const auto& cc : corpus) {
      auto copy = cc;
      copy.result.commit_id += "-copy";
      doubled.push_back(copy);
    }
    auto again = build_report(doubled, programs);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(again.defect_proportion.per_category[i] == Catch::Approx(report.defect_proportion.per_category[i]));
      CHECK(again.script_proportion.per_category[i] == Catch::Approx(report.script_proportion.per_category[i]));
    }
    CHECK(again.defect_proportion.total == Catch::Approx(report.defect_proportion.total));
    for (const auto& [size, pct] : report.colabel_histogram)
      CHECK(again.colabel_histogram.at(size) == Catch::Approx(pct));
    for (const auto& [parent, row] : again.subcategory_shares)
      for (const auto& [sub, pct] : row) {
        CHECK(pct >= 0.0);
        CHECK(pct <= 100.0);
      }
  }
}
