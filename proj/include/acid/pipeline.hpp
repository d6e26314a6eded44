#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "acid/classify.hpp"
#include "acid/curation.hpp"
#include "acid/diff_signals.hpp"
#include "acid/ecm.hpp"
#include "acid/error.hpp"
#include "acid/evaluation.hpp"
#include "acid/forge.hpp"
#include "acid/iac.hpp"
#include "acid/metrics.hpp"
#include "acid/rules.hpp"
#include "acid/serialize.hpp"
#include "acid/text.hpp"
#include "acid/vcs.hpp"

namespace acid::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

// --- manifest --------------------------------------------------------------

struct ManifestEntry {
  std::string location;  // as written
  bool is_url = false;
  fs::path local_path;   // resolved against the manifest directory
  bool is_fork = false;
  std::optional<std::size_t> contributors;
  std::string slug;      // owner/name on the forge, may be empty
  std::string branch;
  std::string name;
};

namespace detail {

inline bool looks_like_url(std::string_view s) {
  return s.find("://") != std::string_view::npos || s.starts_with("git@");
}

inline std::optional<bool> parse_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  return std::nullopt;
}

inline std::string slug_from_url(const std::string& url) {
  static const std::regex re(R"(github\.com[:/]([A-Za-z0-9][A-Za-z0-9-]*)/([A-Za-z0-9._-]+?)(\.git)?/?$)");
  std::smatch m;
  if (std::regex_search(url, m, re)) return m[1].str() + "/" + m[2].str();
  return {};
}

inline std::string default_name(std::string location) {
  while (!location.empty() && (location.back() == '/' || location.back() == '\\')) location.pop_back();
  if (location.ends_with(".git")) location.resize(location.size() - 4);
  auto cut = location.find_last_of("/:\\");
  std::string base = cut == std::string::npos ? location : location.substr(cut + 1);
  std::string out;
  for (char c : base) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' ? c : '_');
  return out.empty() ? "repo" : out;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

/// One repository per line: `<path-or-url> [fork|original|fork=BOOL] [N |
/// contributors=N] [slug=owner/name] [branch=REV] [name=NAME]`. '#' starts a
/// comment. Relative paths resolve against `base_dir`.
inline std::vector<ManifestEntry> parse_manifest(std::string_view text, const fs::path& base_dir) {
  std::vector<ManifestEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::ManifestUnreadable, "line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos && (hash == 0 || std::isspace(static_cast<unsigned char>(line[hash - 1]))))
      line.erase(hash);
    std::istringstream words(line);
    std::string location;
    if (!(words >> location)) continue;

    ManifestEntry e;
    e.location = location;
    e.is_url = detail::looks_like_url(location);
    if (!e.is_url) {
      fs::path p(location);
      e.local_path = (p.is_absolute() ? p : base_dir / p).lexically_normal();
    }
    std::string word;
    while (words >> word) {
      auto eq = word.find('=');
      std::string key = word.substr(0, eq), value = eq == std::string::npos ? "" : word.substr(eq + 1);
      if (eq == std::string::npos) {
        if (word == "fork" || word == "clone") {
          e.is_fork = true;
        } else if (word == "original") {
          e.is_fork = false;
        } else if (std::all_of(word.begin(), word.end(), [](unsigned char c) { return std::isdigit(c); })) {
          e.contributors = std::stoull(word);
        } else {
          fail("unknown field '" + word + "'");
        }
      } else if (key == "fork") {
        auto b = detail::parse_bool(value);
        if (!b) fail("bad fork flag '" + value + "'");
        e.is_fork = *b;
      } else if (key == "contributors") {
        if (value.empty() || !std::all_of(value.begin(), value.end(), [](unsigned char c) { return std::isdigit(c); }))
          fail("bad contributor count '" + value + "'");
        e.contributors = std::stoull(value);
      } else if (key == "slug") {
        if (!forge::valid_slug(value)) fail("bad slug '" + value + "'");
        e.slug = value;
      } else if (key == "branch") {
        e.branch = value;
      } else if (key == "name") {
        e.name = detail::default_name(value);
      } else {
        fail("unknown field '" + key + "'");
      }
    }
    if (e.slug.empty() && e.is_url) e.slug = detail::slug_from_url(location);
    if (e.name.empty()) e.name = detail::default_name(location);
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::ManifestUnreadable, "cannot read " + path.string());
  }
  return parse_manifest(text, path.parent_path().empty() ? fs::current_path() : fs::absolute(path).parent_path());
}

// --- configuration -----------------------------------------------------------

enum class Format { Csv, Json, Ndjson };

inline std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  if (s == "ndjson") return Format::Ndjson;
  return std::nullopt;
}

struct RunConfig {
  fs::path manifest;
  fs::path workdir = ".acid-work";
  fs::path cache_dir;  // empty = <workdir>/issue-cache
  curation::CurationPolicy policy;
  std::optional<fs::path> rule_file;
  std::optional<fs::path> language_file;
  std::optional<fs::path> oracle_file;
  bool offline = false;
  unsigned jobs = 1;
  fs::path out = "acid-out";
  std::set<Format> formats{Format::Csv, Format::Json, Format::Ndjson};
  std::string branch;  // empty = each repository's HEAD
  bool include_merges = true;
  ecm::RefMode ref_mode = ecm::RefMode::ClosingKeyword;
  std::string forge_url = "https://api.github.com";
  std::function<void(const std::string&)> log;

  void validate() const {
    if (jobs < 1) throw Error(ErrorKind::FormatError, "jobs must be at least 1");
    if (formats.empty()) throw Error(ErrorKind::FormatError, "at least one output format is required");
  }

  fs::path issue_cache() const { return cache_dir.empty() ? workdir / "issue-cache" : cache_dir; }

  void say(const std::string& msg) const {
    if (log) log(msg);
  }
};

/// Rules and language table resolved once per invocation, plus a digest of
/// everything that changes classification output (used by completion markers).
struct Context {
  rules::RuleSet rules;
  iac::LanguageTable languages;
  std::string digest;

  static Context load(const RunConfig& cfg) {
    std::string rules_text = cfg.rule_file ? io::read_file(*cfg.rule_file) : std::string(rules::kDefaultRules);
    std::string lang_text =
        cfg.language_file ? io::read_file(*cfg.language_file) : std::string(iac::kDefaultLanguageTable);
    Context ctx{rules::RuleSet::parse(rules_text), iac::LanguageTable::parse(lang_text), {}};
    std::uint64_t h = detail::fnv1a(rules_text);
    h = detail::fnv1a(lang_text, h);
    h = detail::fnv1a(cfg.ref_mode == ecm::RefMode::Any ? "refs=any" : "refs=closing", h);
    h = detail::fnv1a(cfg.include_merges ? "merges" : "no-merges", h);
    h = detail::fnv1a(cfg.offline ? "offline" : "online", h);
    h = detail::fnv1a(cfg.forge_url, h);
    ctx.digest = detail::hex64(h);
    return ctx;
  }
};

/// Runs f(i) for i in [0, n) on at most `jobs` threads. f must not throw.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) f(i);
  };
  std::size_t threads = std::min<std::size_t>(std::max(1u, jobs), n);
  if (threads <= 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
}

// --- curate ------------------------------------------------------------------

struct RepoCuration {
  std::size_t index = 0;  // 1-based manifest position
  std::string name;
  std::string location;
  std::string slug;
  std::string revision;
  fs::path path;
  std::string head;
  curation::RepositoryProfile profile;
  std::size_t total_files = 0;
  std::size_t iac_files = 0;
  std::size_t commit_count = 0;
  curation::CurationVerdict verdict;
  std::string error;  // set when the repository could not be examined

  std::string dir_name() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu-", index);
    return buf + name;
  }
  std::string status() const { return !error.empty() ? "failed" : verdict.accepted ? "accepted" : "rejected"; }
};

inline json to_json(const RepoCuration& c) {
  return {{"index", c.index},
          {"name", c.name},
          {"location", c.location},
          {"slug", c.slug},
          {"revision", c.revision},
          {"path", c.path.string()},
          {"head", c.head},
          {"status", c.status()},
          {"accepted", c.verdict.accepted},
          {"failed_criteria", c.verdict.failed_criteria},
          {"error", c.error},
          {"profile",
           {{"iac_ratio", c.profile.iac_ratio},
            {"is_fork_or_clone", c.profile.is_fork_or_clone},
            {"commits_per_month", c.profile.commits_per_month},
            {"contributor_count", c.profile.contributor_count}}},
          {"total_files", c.total_files},
          {"iac_files", c.iac_files},
          {"commit_count", c.commit_count}};
}

inline RepoCuration curation_from_json(const json& j) {
  RepoCuration c;
  c.index = j.at("index").get<std::size_t>();
  c.name = j.at("name").get<std::string>();
  c.location = j.at("location").get<std::string>();
  c.slug = j.value("slug", "");
  c.revision = j.value("revision", "HEAD");
  c.path = j.at("path").get<std::string>();
  c.head = j.value("head", "");
  c.verdict.accepted = j.at("accepted").get<bool>();
  c.verdict.failed_criteria = j.value("failed_criteria", std::vector<std::string>{});
  c.error = j.value("error", "");
  const auto& p = j.at("profile");
  c.profile.iac_ratio = p.at("iac_ratio").get<double>();
  c.profile.is_fork_or_clone = p.at("is_fork_or_clone").get<bool>();
  c.profile.commits_per_month = p.at("commits_per_month").get<double>();
  c.profile.contributor_count = p.at("contributor_count").get<std::size_t>();
  c.total_files = j.value("total_files", std::size_t{0});
  c.iac_files = j.value("iac_files", std::size_t{0});
  c.commit_count = j.value("commit_count", std::size_t{0});
  return c;
}

inline json policy_json(const curation::CurationPolicy& p) {
  return {{"min_iac_ratio", p.min_iac_ratio},
          {"require_original", p.require_original},
          {"min_commits_per_month", p.min_commits_per_month},
          {"min_contributors", p.min_contributors},
          {"enforce_contributors", p.enforce_contributors}};
}

/// Local checkout for an entry; URLs are cloned (bare) into the workdir once.
inline fs::path locate(const ManifestEntry& e, std::size_t index, const RunConfig& cfg) {
  if (!e.is_url) return e.local_path;
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%02zu-", index);
  fs::path dest = fs::absolute(cfg.workdir) / "clones" / (prefix + e.name + ".git");
  if (fs::exists(dest / "HEAD")) return dest;
  if (cfg.offline) throw Error(ErrorKind::Io, "offline and no local clone of " + e.location);
  fs::create_directories(dest.parent_path());
  fs::path tmp = dest;
  tmp += ".partial";
  fs::remove_all(tmp);
  auto r = run_process({"git", "clone", "--bare", "--quiet", "--", e.location, tmp.string()},
                       ProcessOptions{std::nullopt, {{"GIT_TERMINAL_PROMPT", "0"}}});
  if (r.exit_code != 0) {
    fs::remove_all(tmp);
    throw Error(ErrorKind::ProcessFailed, "clone of " + e.location + " failed: " + r.err);
  }
  fs::rename(tmp, dest);
  return dest;
}

inline RepoCuration curate_one(const ManifestEntry& e, std::size_t index, const RunConfig& cfg, const Context& ctx) {
  RepoCuration c;
  c.index = index;
  c.name = e.name;
  c.location = e.location;
  c.slug = e.slug;
  c.revision = !e.branch.empty() ? e.branch : !cfg.branch.empty() ? cfg.branch : "HEAD";
  c.profile.is_fork_or_clone = e.is_fork;
  try {
    c.path = locate(e, index, cfg);
    vcs::require_repository(c.path);
    auto head = vcs::resolve_commit(c.path, c.revision);
    if (!head) throw Error(ErrorKind::EmptyHistory, "no commits at " + c.revision);
    c.head = *head;
    auto tree = vcs::list_tree(c.path, c.head);
    auto iac_profile = iac::profile_repo(tree, ctx.languages);
    c.total_files = iac_profile.total_files;
    c.iac_files = iac_profile.iac_files;
    c.profile.iac_ratio = iac_profile.iac_ratio;
    auto activity = vcs::commit_activity(c.path, {c.head, cfg.include_merges});
    c.commit_count = activity.author_times.size();
    c.profile.commits_per_month = vcs::commits_per_month(std::span<const std::int64_t>(activity.author_times));
    c.profile.contributor_count = e.contributors.value_or(activity.authors.size());
    c.verdict = curation::evaluate_repo(c.profile, cfg.policy);
  } catch (const std::exception& ex) {
    c.error = ex.what();
    c.verdict = {};
  }
  return c;
}

inline void write_curation(const RunConfig& cfg, const std::vector<RepoCuration>& repos) {
  json arr = json::array();
  for (const auto& r : repos) arr.push_back(to_json(r));
  io::write_file(cfg.out / "curation.json", io::dump_pretty({{"policy", policy_json(cfg.policy)}, {"repos", arr}}));
}

inline std::vector<RepoCuration> read_curation(const RunConfig& cfg) {
  auto j = json::parse(io::read_file(cfg.out / "curation.json"), nullptr, false);
  if (j.is_discarded() || !j.contains("repos"))
    throw Error(ErrorKind::FormatError, (cfg.out / "curation.json").string() + ": invalid curation file");
  std::vector<RepoCuration> out;
  for (const auto& r : j.at("repos")) out.push_back(curation_from_json(r));
  return out;
}

inline std::vector<RepoCuration> curate(const RunConfig& cfg, const Context& ctx) {
  auto manifest = load_manifest(cfg.manifest);
  std::vector<RepoCuration> repos(manifest.size());
  parallel_for(manifest.size(), cfg.jobs, [&](std::size_t i) { repos[i] = curate_one(manifest[i], i + 1, cfg, ctx); });
  for (const auto& r : repos) cfg.say(r.dir_name() + ": " + r.status() + (r.error.empty() ? "" : " (" + r.error + ")"));
  write_curation(cfg, repos);
  return repos;
}

// --- mine --------------------------------------------------------------------

inline fs::path repo_dir(const RunConfig& cfg, const RepoCuration& c) { return cfg.out / "repos" / c.dir_name(); }

struct MineStats {
  std::size_t commits_scanned = 0;
  std::size_t iac_commits = 0;
};

/// Writes profile.json (head-tree IaC profile) and commits.ndjson (IaC
/// commits only, parents first).
inline MineStats mine_one(const RunConfig& cfg, const Context& ctx, const RepoCuration& c) {
  auto tree = vcs::list_tree(c.path, c.head);
  auto profile = iac::profile_repo(tree, ctx.languages);
  auto commits = vcs::list_commits(c.path, {c.head, cfg.include_merges});
  MineStats stats;
  stats.commits_scanned = commits.size();
  std::string lines;
  for (const auto& commit : commits) {
    if (!iac::is_iac_commit(commit, profile, ctx.languages)) continue;
    ++stats.iac_commits;
    lines += io::dump_line(io::to_json(commit)) + "\n";
  }
  auto dir = repo_dir(cfg, c);
  io::write_file(dir / "commits.ndjson", lines);
  io::write_file(dir / "profile.json", io::dump_pretty({{"head", c.head},
                                                        {"commits_scanned", stats.commits_scanned},
                                                        {"iac_commits", stats.iac_commits},
                                                        {"iac", io::to_json(profile)}}));
  return stats;
}

// --- classify ----------------------------------------------------------------

struct ClassifyStats {
  std::size_t ecms_classified = 0;  // commits passing the prefilter
  std::size_t defect_commits = 0;
  std::size_t issues_resolved = 0;
};

inline std::string marker_text(const RepoCuration& c, const Context& ctx) {
  return "head " + c.head + "\nconfig " + ctx.digest + "\n";
}

inline bool is_complete(const RunConfig& cfg, const Context& ctx, const RepoCuration& c) {
  auto marker = repo_dir(cfg, c) / ".complete";
  if (!fs::exists(marker)) return false;
  try {
    return io::read_file(marker) == marker_text(c, ctx);
  } catch (const Error&) {
    return false;
  }
}

/// Classifies every mined IaC commit. Commits whose message misses the
/// prefilter lexicon are kept with an empty label set so they still count in
/// the denominators. Writes classifications.ndjson and, last, the marker.
inline ClassifyStats classify_one(const RunConfig& cfg, const Context& ctx, const RepoCuration& c,
                                  forge::ForgeClient* client) {
  auto dir = repo_dir(cfg, c);
  auto profile_doc = json::parse(io::read_file(dir / "profile.json"));
  auto profile = io::profile_from_json(profile_doc.at("iac"));
  ecm::IssueResolver resolver;
  if (client && !c.slug.empty()) resolver = client->resolver(c.slug);

  ClassifyStats stats;
  std::string lines;
  for (const auto& j : io::read_ndjson(dir / "commits.ndjson")) {
    auto commit = io::commit_from_json(j);
    std::set<std::string> iac_paths;
    for (const auto& fc : commit.file_changes)
      if (iac::is_iac_path(fc.path, profile, ctx.languages)) iac_paths.insert(fc.path);

    const bool candidate = match_pattern(text::normalize(commit.message), ctx.rules.prefilter_lexicon());
    ClassificationResult result;
    result.commit_id = commit.commit_id;
    json extra = {{"prefiltered", candidate}};
    if (candidate) {
      auto ecm = ecm::build_ecm(commit, resolver, cfg.ref_mode);
      auto signals = signals::detect_diff_signals(commit.file_changes, profile, ctx.rules, ctx.languages);
      result = classify_ecm(ecm, signals, ctx.rules);
      ++stats.ecms_classified;
      stats.issues_resolved += ecm.resolved_count;
      json refs = json::array();
      for (const auto& r : ecm.issue_refs) refs.push_back(io::to_json(r));
      extra["issue_refs"] = std::move(refs);
      extra["resolved_issues"] = ecm.resolved_count;
      extra["signals"] = io::to_json(signals);
    }
    if (result.is_defect) ++stats.defect_commits;
    json line = io::to_json(result);
    line["author_time"] = commit.author_time;
    line["iac_paths"] = iac_paths;
    line.update(extra);
    lines += io::dump_line(line) + "\n";
  }
  io::write_file(dir / "classifications.ndjson", lines);
  io::write_file(dir / ".complete", marker_text(c, ctx));
  return stats;
}

// --- analyze -----------------------------------------------------------------

struct Corpus {
  std::vector<metrics::ClassifiedCommit> commits;  // ids prefixed "<repo-dir>:"
  std::set<std::string> program_paths;             // paths prefixed "<repo-dir>/"
};

inline void load_repo_into(Corpus& corpus, const RunConfig& cfg, const RepoCuration& c) {
  auto dir = repo_dir(cfg, c);
  const std::string prefix = c.dir_name();
  auto profile_doc = json::parse(io::read_file(dir / "profile.json"));
  for (const auto& p : profile_doc.at("iac").at("program_paths")) corpus.program_paths.insert(prefix + "/" + p.get<std::string>());
  for (const auto& j : io::read_ndjson(dir / "classifications.ndjson")) {
    metrics::ClassifiedCommit cc;
    cc.result = io::classification_from_json(j);
    cc.result.commit_id = prefix + ":" + cc.result.commit_id;
    cc.author_time = j.at("author_time").get<std::int64_t>();
    for (const auto& p : j.at("iac_paths")) cc.iac_paths.insert(prefix + "/" + p.get<std::string>());
    corpus.commits.push_back(std::move(cc));
  }
}

/// Writes the corpus reports for the selected formats and returns their paths
/// relative to the output directory.
inline std::vector<std::string> write_reports(const RunConfig& cfg, const Corpus& corpus,
                                              const metrics::MetricsReport& report) {
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& contents) {
    io::write_file(cfg.out / name, contents);
    written.push_back(name);
  };
  if (cfg.formats.contains(Format::Json)) put("metrics.json", io::dump_pretty(io::to_json(report)));
  if (cfg.formats.contains(Format::Csv)) {
    put("proportions.csv", io::proportions_csv(report));
    put("defects_per_year.csv", io::defects_per_year_csv(report.defects_per_year));
    put("colabel.csv", io::colabel_csv(report.colabel_histogram));
    put("subcategories.csv", io::subcategory_csv(report.subcategory_shares));
  }
  if (cfg.formats.contains(Format::Ndjson)) {
    std::string lines;
    for (const auto& cc : corpus.commits) {
      json j = io::to_json(cc.result);
      j["author_time"] = cc.author_time;
      j["iac_paths"] = cc.iac_paths;
      lines += io::dump_line(j) + "\n";
    }
    put("classifications.ndjson", lines);
  }
  return written;
}

/// Aggregates the classified repositories. Throws EmptyDenominator when the
/// corpus has no IaC commits or programs.
inline std::pair<metrics::MetricsReport, std::vector<std::string>> analyze(const RunConfig& cfg,
                                                                           const std::vector<RepoCuration>& repos) {
  Corpus corpus;
  for (const auto& c : repos) load_repo_into(corpus, cfg, c);
  auto report = metrics::build_report(corpus.commits, corpus.program_paths);
  auto written = write_reports(cfg, corpus, report);
  return {std::move(report), std::move(written)};
}

// --- evaluate ----------------------------------------------------------------

/// Scores predictions against an oracle; writes evaluation.csv and
/// evaluation.txt into `out_dir` when it is non-empty.
inline evaluation::ScoreTable evaluate(const fs::path& predictions_path, const fs::path& oracle_path,
                                       const fs::path& out_dir, evaluation::Averaging averaging) {
  auto predictions = io::read_predictions(predictions_path);
  std::vector<evaluation::OracleEntry> oracle;
  try {
    oracle = evaluation::parse_oracle(io::read_file(oracle_path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FormatError) throw Error(ErrorKind::FormatError, oracle_path.string() + " " + e.what());
    throw;
  }
  auto table = evaluation::score(predictions, oracle, averaging);
  if (!out_dir.empty()) {
    io::write_file(out_dir / "evaluation.csv", evaluation::to_csv(table));
    io::write_file(out_dir / "evaluation.txt", evaluation::to_text(table));
  }
  return table;
}

// --- run ---------------------------------------------------------------------

struct RepoOutcome {
  RepoCuration curation;
  MineStats mined;
  ClassifyStats classified;
  bool resumed = false;
  std::string error;  // mining/classification failure after acceptance

  bool ok() const { return curation.error.empty() && curation.verdict.accepted && error.empty(); }
};

struct RunSummary {
  std::vector<RepoOutcome> repos;
  std::size_t accepted = 0, rejected = 0, failed = 0;
  std::size_t commits_scanned = 0, iac_commits = 0, ecms_classified = 0;
  std::vector<std::string> reports;
  std::string metrics_error;
};

inline json to_json(const RunSummary& s) {
  json repos = json::array();
  for (const auto& r : s.repos) {
    std::string status = !r.error.empty() ? "failed" : r.curation.status();
    std::string error = !r.curation.error.empty() ? r.curation.error : r.error;
    repos.push_back({{"name", r.curation.name},
                     {"location", r.curation.location},
                     {"status", status},
                     {"failed_criteria", r.curation.verdict.failed_criteria},
                     {"error", error},
                     {"commits_scanned", r.mined.commits_scanned},
                     {"iac_commits", r.mined.iac_commits},
                     {"ecms_classified", r.classified.ecms_classified},
                     {"defect_commits", r.classified.defect_commits},
                     {"issues_resolved", r.classified.issues_resolved}});
  }
  return {{"repos", std::move(repos)},
          {"totals",
           {{"repositories", s.repos.size()},
            {"accepted", s.accepted},
            {"rejected", s.rejected},
            {"failed", s.failed},
            {"commits_scanned", s.commits_scanned},
            {"iac_commits", s.iac_commits},
            {"ecms_classified", s.ecms_classified}}},
          {"reports", s.reports},
          {"metrics_error", s.metrics_error}};
}

/// Reads the counts of a repository finished by an earlier invocation.
inline void load_finished(const RunConfig& cfg, RepoOutcome& o) {
  auto dir = repo_dir(cfg, o.curation);
  auto profile_doc = json::parse(io::read_file(dir / "profile.json"));
  o.mined.commits_scanned = profile_doc.at("commits_scanned").get<std::size_t>();
  o.mined.iac_commits = profile_doc.at("iac_commits").get<std::size_t>();
  for (const auto& j : io::read_ndjson(dir / "classifications.ndjson")) {
    if (!j.value("prefiltered", false)) continue;
    ++o.classified.ecms_classified;
    o.classified.issues_resolved += j.value("resolved_issues", std::size_t{0});
    if (j.value("is_defect", false)) ++o.classified.defect_commits;
  }
  o.resumed = true;
}

inline forge::ForgeClient make_client(const RunConfig& cfg) {
  forge::ForgeOptions opts;
  opts.base_url = cfg.forge_url;
  opts.offline = cfg.offline;
  opts.cache_dir = cfg.issue_cache();
  return forge::ForgeClient(std::move(opts));
}

/// Full pipeline. Per-repository failures are recorded, never fatal; a
/// repository whose completion marker matches is not mined again.
inline RunSummary run(const RunConfig& cfg) {
  cfg.validate();
  auto manifest = load_manifest(cfg.manifest);
  auto ctx = Context::load(cfg);
  fs::create_directories(cfg.out);
  auto client = make_client(cfg);

  RunSummary summary;
  summary.repos.resize(manifest.size());
  parallel_for(manifest.size(), cfg.jobs, [&](std::size_t i) {
    RepoOutcome& o = summary.repos[i];
    o.curation = curate_one(manifest[i], i + 1, cfg, ctx);
    if (!o.curation.error.empty() || !o.curation.verdict.accepted) return;
    try {
      if (is_complete(cfg, ctx, o.curation)) {
        load_finished(cfg, o);
        return;
      }
      fs::remove(repo_dir(cfg, o.curation) / ".complete");
      o.mined = mine_one(cfg, ctx, o.curation);
      o.classified = classify_one(cfg, ctx, o.curation, &client);
    } catch (const std::exception& ex) {
      o.error = ex.what();
    }
  });

  std::vector<RepoCuration> curated, finished;
  for (const auto& o : summary.repos) {
    curated.push_back(o.curation);
    cfg.say(o.curation.dir_name() + ": " + (o.error.empty() ? o.curation.status() : "failed") +
            (o.resumed ? " (resumed)" : "") + (o.curation.error.empty() && o.error.empty() ? "" : " " + o.curation.error + o.error));
    if (o.ok()) {
      ++summary.accepted;
      finished.push_back(o.curation);
      summary.commits_scanned += o.mined.commits_scanned;
      summary.iac_commits += o.mined.iac_commits;
      summary.ecms_classified += o.classified.ecms_classified;
    } else if (!o.curation.error.empty() || !o.error.empty()) {
      ++summary.failed;
    } else {
      ++summary.rejected;
    }
  }
  write_curation(cfg, curated);
  summary.reports.push_back("curation.json");

  for (const auto& c : finished) {
    summary.reports.push_back("repos/" + c.dir_name() + "/classifications.ndjson");
  }
  if (!finished.empty()) {
    try {
      auto [report, written] = analyze(cfg, finished);
      summary.reports.insert(summary.reports.end(), written.begin(), written.end());
    } catch (const Error& e) {
      summary.metrics_error = e.what();
    }
  } else {
    summary.metrics_error = "no accepted repositories";
  }

  if (cfg.oracle_file) {
    // oracle ids are raw commit ids, so read the unprefixed per-repo results
    std::string lines;
    for (const auto& c : finished)
      for (const auto& j : io::read_ndjson(repo_dir(cfg, c) / "classifications.ndjson")) lines += io::dump_line(j) + "\n";
    auto tmp = cfg.out / "evaluation-predictions.ndjson";
    io::write_file(tmp, lines);
    evaluate(tmp, *cfg.oracle_file, cfg.out, evaluation::Averaging::Macro);
    fs::remove(tmp);
    summary.reports.push_back("evaluation.csv");
    summary.reports.push_back("evaluation.txt");
  }

  std::sort(summary.reports.begin(), summary.reports.end());
  io::write_file(cfg.out / "summary.json", io::dump_pretty(to_json(summary)));
  return summary;
}

}  // namespace acid::pipeline
