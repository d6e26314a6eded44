#include <catch_amalgamated.hpp>

#include <random>

#include "acid/evaluation.hpp"
#include "acid/serialize.hpp"
#include "support/golden60.hpp"

using namespace acid;
using namespace acid::evaluation;
using Labels = std::map<std::string, std::set<Category>>;

namespace {

Labels as_map(const std::vector<OracleEntry>& entries) {
  Labels out;
  for (const auto& e : entries) out[e.commit_id] = e.true_labels;
  return out;
}

std::vector<OracleEntry> as_entries(const Labels& m) {
  std::vector<OracleEntry> out;
  for (const auto& [id, labels] : m) out.push_back({id, labels});
  return out;
}

ErrorKind error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

RowScore published_row(const char* name, std::size_t support, double p, double r) {
  RowScore row;
  row.name = name;
  row.support = support;
  row.precision = p;
  row.recall = r;
  return row;
}

}  // namespace

TEST_CASE("oracle file format") {
  auto entries = parse_oracle("# header\nabc,Security;ConfigurationData/Network\n\ndef,\nghi\tSyntax\njkl\n");
  REQUIRE(entries.size() == 4);
  CHECK(entries[0].true_labels == std::set<Category>{Category::Security, Category::ConfigurationData});
  CHECK(entries[1].true_labels.empty());
  CHECK(entries[2].true_labels == std::set<Category>{Category::Syntax});
  CHECK(entries[3].true_labels.empty());

  CHECK(error_of([] { parse_oracle("a,Syntax\na,\n"); }) == ErrorKind::DuplicateOracleEntry);
  CHECK(error_of([] { parse_oracle("a,Chaos\n"); }) == ErrorKind::FormatError);
  CHECK(error_of([] { parse_oracle("a,Service/Network\n"); }) == ErrorKind::FormatError);
  CHECK(error_of([] { parse_oracle(",Syntax\n"); }) == ErrorKind::FormatError);
}

TEST_CASE("perfect predictions") {
  auto oracle = parse_oracle(io::read_file(fixture::golden_dir() + "/golden.oracle"));
  REQUIRE(oracle.size() == 60);
  auto table = score(as_map(oracle), oracle);
  for (const auto& row : table.rows) {
    INFO(row.name);
    if (row.support > 0) {
      CHECK(row.precision == 1.0);
      CHECK(row.recall == 1.0);
    }
  }
  CHECK(table.average_precision == 1.0);
  CHECK(table.average_recall == 1.0);

  std::vector<OracleEntry> blank{{"a", {}}, {"b", {}}};
  auto nd = score(as_map(blank), blank);
  CHECK(nd.no_defect().precision == 1.0);
  CHECK(nd.no_defect().recall == 1.0);
  CHECK_FALSE(nd.row(Category::Security).precision);
  CHECK(format_score(nd.row(Category::Security).precision) == "\xE2\x80\x94");
}

TEST_CASE("perturbed golden predictions match the hand-computed confusion table") {
  auto oracle = parse_oracle(io::read_file(fixture::golden_dir() + "/golden.oracle"));
  auto predictions = io::read_predictions(fixture::golden_dir() + "/perturbed.predictions");
  auto table = score(predictions, oracle);

  CHECK(to_csv(table) == io::read_file(fixture::golden_dir() + "/perturbed.evaluation.expected.csv"));

  std::string confusion = "category,tp,fp,fn\n";
  for (const auto& r : table.rows)
    confusion += r.name + "," + std::to_string(r.tp) + "," + std::to_string(r.fp) + "," + std::to_string(r.fn) + "\n";
  CHECK(confusion == io::read_file(fixture::golden_dir() + "/perturbed.confusion.expected.csv"));

  std::size_t differing = 0;
  auto truth = as_map(oracle);
  for (const auto& [id, labels] : truth) differing += predictions.at(id) != labels;
  CHECK(differing == 6);
}

TEST_CASE("macro average over supported rows reproduces the published average") {
  ScoreTable t;
  t.rows = {published_row("Conditional", 86, 0.71, 1.00),     published_row("Configuration Data", 204, 0.93, 0.86),
            published_row("Dependency", 119, 0.92, 0.76),     published_row("Documentation", 103, 0.62, 0.96),
            published_row("Idempotency", 1, 1.00, 1.00),      published_row("Security", 8, 1.00, 0.80),
            published_row("Service", 70, 0.94, 0.81),         published_row("Syntax", 47, 0.87, 0.67),
            published_row("No Defect", 1362, 0.97, 0.98)};
  fill_average(t);
  CHECK(format_score(t.average_precision) == "0.88");
  CHECK(format_score(t.average_recall) == "0.87");

  // a row without support is left out
  t.rows.push_back(published_row("Extra", 0, 0.0, 0.0));
  fill_average(t);
  CHECK(format_score(t.average_precision) == "0.88");
}

TEST_CASE("micro average pools the counts") {
  std::vector<OracleEntry> oracle{{"a", {Category::Security}}, {"b", {Category::Security}}, {"c", {Category::Syntax}}};
  Labels pred{{"a", {Category::Security}}, {"b", {Category::Security}}, {"c", {Category::Security}}};
  // Security tp2 fp1; Syntax fn1 with no predictions, so its precision is undefined
  auto micro = score(pred, oracle, Averaging::Micro);
  CHECK(micro.average_precision == Catch::Approx(2.0 / 3.0));
  CHECK(micro.average_recall == Catch::Approx(2.0 / 3.0));
  auto macro = score(pred, oracle);
  CHECK(macro.average_precision == Catch::Approx(2.0 / 3.0));
  CHECK(macro.average_recall == Catch::Approx(0.5));
}

TEST_CASE("missing and duplicate entries") {
  std::vector<OracleEntry> oracle{{"a", {}}, {"b", {Category::Syntax}}};
  CHECK(error_of([&] { score(Labels{{"a", {}}}, oracle); }) == ErrorKind::MissingPrediction);
  std::vector<OracleEntry> dup{{"a", {}}, {"a", {}}};
  CHECK(error_of([&] { score(Labels{{"a", {}}}, dup); }) == ErrorKind::DuplicateOracleEntry);
  // extra predictions are ignored
  CHECK_NOTHROW(score(Labels{{"a", {}}, {"b", {}}, {"z", {Category::Security}}}, oracle));
}

TEST_CASE("swapping predictions and oracle swaps precision and recall") {
  std::mt19937 rng(23);
  for (int round = 0; round < 300; ++round) {
    Labels truth, pred;
    for (int i = 0; i < 25; ++i) {
      auto id = "c" + std::to_string(i);
      for (Labels* m : {&truth, &pred}) {
        auto& s = (*m)[id];
        for (Category c : kAllCategories)
          if (rng() % 6 == 0) s.insert(c);
      }
    }
    auto forward = score(pred, as_entries(truth));
    auto backward = score(truth, as_entries(pred));
    for (std::size_t i = 0; i < forward.rows.size(); ++i) {
      CHECK(forward.rows[i].precision == backward.rows[i].recall);
      CHECK(forward.rows[i].recall == backward.rows[i].precision);
      for (const auto& v : {forward.rows[i].precision, forward.rows[i].recall})
        if (v) {
          CHECK(*v >= 0.0);
          CHECK(*v <= 1.0);
        }
    }
  }
}

TEST_CASE("text rendering") {
  auto oracle = parse_oracle(io::read_file(fixture::golden_dir() + "/golden.oracle"));
  auto table = score(io::read_predictions(fixture::golden_dir() + "/perturbed.predictions"), oracle);
  auto text = to_text(table);
  CHECK(text.starts_with("Category               Occur.  Precision   Recall\n"));
  CHECK(text.find("Configuration Data         19       0.95     1.00\n") != std::string::npos);
  CHECK(text.find("Average                             0.94     0.90\n") != std::string::npos);
  table.averaging = Averaging::Micro;
  fill_average(table);
  CHECK(to_text(table).find("Average (micro)") != std::string::npos);
}
