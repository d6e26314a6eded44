#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acid/acid.hpp"

namespace fs = std::filesystem;
using namespace acid;
using pipeline::RunConfig;

namespace {

void add_out(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
}

void add_workdir(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--workdir", cfg.workdir, "Working directory for clones and caches")->capture_default_str();
}

void add_jobs(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--jobs,-j", cfg.jobs, "Repositories processed in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_languages(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--languages", cfg.language_file, "Language table overriding the built-in one")
      ->check(CLI::ExistingFile);
}

void add_curation(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--manifest", cfg.manifest, "Repository manifest")->required();
  cmd->add_option("--branch", cfg.branch, "Revision to analyze instead of each repository's HEAD");
  cmd->add_flag("--offline", cfg.offline, "Never touch the network");
  cmd->add_option("--min-iac-ratio", cfg.policy.min_iac_ratio)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--min-commits-per-month", cfg.policy.min_commits_per_month)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--min-contributors", cfg.policy.min_contributors)->capture_default_str();
  cmd->add_flag("--no-contributor-check{false}", cfg.policy.enforce_contributors,
                "Waive the contributor threshold (small or proprietary teams)");
  cmd->add_flag("--allow-forks{false}", cfg.policy.require_original, "Accept forks and clones");
}

void add_history(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_flag("--no-merges{false}", cfg.include_merges, "Skip merge commits");
}

void add_classification(CLI::App* cmd, RunConfig& cfg, bool& any_refs) {
  cmd->add_option("--rules", cfg.rule_file, "Rule file overriding the built-in rules")->check(CLI::ExistingFile);
  cmd->add_option("--cache-dir", cfg.cache_dir, "Issue cache directory (default <workdir>/issue-cache)");
  cmd->add_option("--forge-url", cfg.forge_url, "Forge API base URL")->capture_default_str();
  cmd->add_flag("--any-ref", any_refs, "Resolve every issue reference, not only closing ones");
}

void add_formats(CLI::App* cmd, std::vector<std::string>& formats) {
  cmd->add_option("--format", formats, "Report formats: csv, json, ndjson (repeat or comma separate)")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "ndjson"}));
}

void apply_formats(RunConfig& cfg, const std::vector<std::string>& formats) {
  if (formats.empty()) return;
  cfg.formats.clear();
  for (const auto& f : formats) cfg.formats.insert(*pipeline::parse_format(f));
}

std::vector<pipeline::RepoCuration> accepted(const std::vector<pipeline::RepoCuration>& all) {
  std::vector<pipeline::RepoCuration> out;
  for (const auto& c : all)
    if (c.error.empty() && c.verdict.accepted) out.push_back(c);
  return out;
}

int cmd_mine(const RunConfig& cfg) {
  auto ctx = pipeline::Context::load(cfg);
  auto repos = accepted(pipeline::read_curation(cfg));
  std::vector<std::string> errors(repos.size());
  pipeline::parallel_for(repos.size(), cfg.jobs, [&](std::size_t i) {
    try {
      fs::remove(pipeline::repo_dir(cfg, repos[i]) / ".complete");
      auto stats = pipeline::mine_one(cfg, ctx, repos[i]);
      cfg.say(repos[i].dir_name() + ": " + std::to_string(stats.commits_scanned) + " commits, " +
              std::to_string(stats.iac_commits) + " IaC");
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < repos.size(); ++i)
    if (!errors[i].empty()) cfg.say(repos[i].dir_name() + ": failed: " + errors[i]);
  return 0;
}

int cmd_classify(const RunConfig& cfg) {
  auto ctx = pipeline::Context::load(cfg);
  auto repos = accepted(pipeline::read_curation(cfg));
  auto client = pipeline::make_client(cfg);
  std::vector<std::string> errors(repos.size());
  pipeline::parallel_for(repos.size(), cfg.jobs, [&](std::size_t i) {
    try {
      auto stats = pipeline::classify_one(cfg, ctx, repos[i], &client);
      cfg.say(repos[i].dir_name() + ": " + std::to_string(stats.ecms_classified) + " ECMs, " +
              std::to_string(stats.defect_commits) + " defect-related");
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < repos.size(); ++i)
    if (!errors[i].empty()) cfg.say(repos[i].dir_name() + ": failed: " + errors[i]);
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  std::vector<pipeline::RepoCuration> ready;
  for (const auto& c : accepted(pipeline::read_curation(cfg))) {
    if (fs::exists(pipeline::repo_dir(cfg, c) / ".complete"))
      ready.push_back(c);
    else
      cfg.say(c.dir_name() + ": not classified, skipped");
  }
  auto [report, written] = pipeline::analyze(cfg, ready);
  for (const auto& w : written) std::cout << (cfg.out / w).string() << '\n';
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  auto summary = pipeline::run(cfg);
  std::printf("repositories: %zu accepted, %zu rejected, %zu failed\n", summary.accepted, summary.rejected,
              summary.failed);
  std::printf("commits scanned: %zu, IaC commits: %zu, ECMs classified: %zu\n", summary.commits_scanned,
              summary.iac_commits, summary.ecms_classified);
  if (!summary.metrics_error.empty()) std::printf("metrics: %s\n", summary.metrics_error.c_str());
  std::printf("summary: %s\n", (cfg.out / "summary.json").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine PL-IaC repositories and classify defect-related commits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "acid 1.0.0");

  RunConfig cfg;
  bool quiet = false, any_refs = false, micro = false;
  std::vector<std::string> formats;
  fs::path predictions, oracle, eval_out;
  app.add_flag("--quiet,-q", quiet, "Suppress progress messages");

  auto* curate = app.add_subcommand("curate", "Apply the inclusion criteria; writes curation.json");
  add_curation(curate, cfg);
  add_workdir(curate, cfg);
  add_out(curate, cfg);
  add_jobs(curate, cfg);
  add_history(curate, cfg);
  add_languages(curate, cfg);

  auto* mine = app.add_subcommand("mine", "Extract IaC commits of accepted repositories");
  add_out(mine, cfg);
  add_jobs(mine, cfg);
  add_history(mine, cfg);
  add_languages(mine, cfg);

  auto* classify = app.add_subcommand("classify", "Build ECMs and label mined commits");
  add_out(classify, cfg);
  add_workdir(classify, cfg);
  add_jobs(classify, cfg);
  add_languages(classify, cfg);
  add_classification(classify, cfg, any_refs);
  classify->add_flag("--offline", cfg.offline, "Use only cached issues");

  auto* analyze = app.add_subcommand("analyze", "Aggregate classifications into corpus metrics");
  add_out(analyze, cfg);
  add_formats(analyze, formats);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a labeled oracle");
  evaluate->add_option("--predictions", predictions, "classifications.ndjson or id,labels file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--oracle", oracle, "Oracle file (id,Cat;Cat per line)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", eval_out, "Directory for evaluation.csv and evaluation.txt");
  evaluate->add_flag("--micro", micro, "Micro-average instead of the per-row mean");

  auto* run = app.add_subcommand("run", "Full pipeline: curate, mine, classify, analyze");
  add_curation(run, cfg);
  add_workdir(run, cfg);
  add_out(run, cfg);
  add_jobs(run, cfg);
  add_history(run, cfg);
  add_languages(run, cfg);
  add_classification(run, cfg, any_refs);
  add_formats(run, formats);
  run->add_option("--oracle", cfg.oracle_file, "Also score the corpus against this oracle")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (!quiet) cfg.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
  if (any_refs) cfg.ref_mode = ecm::RefMode::Any;
  apply_formats(cfg, formats);

  try {
    cfg.validate();
    if (curate->parsed()) {
      auto ctx = pipeline::Context::load(cfg);
      auto repos = pipeline::curate(cfg, ctx);
      std::size_t n = accepted(repos).size();
      std::printf("%zu of %zu repositories accepted\n", n, repos.size());
      return 0;
    }
    if (mine->parsed()) return cmd_mine(cfg);
    if (classify->parsed()) return cmd_classify(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (evaluate->parsed()) {
      auto table = pipeline::evaluate(predictions, oracle, eval_out,
                                      micro ? evaluation::Averaging::Micro : evaluation::Averaging::Macro);
      std::cout << evaluation::to_text(table);
      return 0;
    }
    if (run->parsed()) return cmd_run(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
