#pragma once

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <regex>
#include <semaphore>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "acid/ecm.hpp"
#include "acid/error.hpp"

namespace acid::forge {

inline constexpr const char* kTokenEnv = "ACID_FORGE_TOKEN";

inline bool valid_slug(std::string_view slug) {
  static const std::regex re(R"(^[A-Za-z0-9][A-Za-z0-9-]*/[A-Za-z0-9._-]+$)");
  return std::regex_match(slug.begin(), slug.end(), re) && slug.find("..") == std::string_view::npos;
}

/// Issue title/body from a GitHub-compatible issue payload; null body -> "".
inline std::optional<ecm::IssueText> parse_issue_json(std::string_view raw) {
  auto j = nlohmann::json::parse(raw, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  ecm::IssueText out;
  if (auto t = j.find("title"); t != j.end() && t->is_string()) out.title = t->get<std::string>();
  if (auto b = j.find("body"); b != j.end() && b->is_string()) out.body = b->get<std::string>();
  return out;
}

/// One file per issue: <dir>/<owner>/<name>/<number>.json holding the raw
/// API response. Writes go to a temporary file that is renamed into place.
class IssueCache {
 public:
  explicit IssueCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(std::string_view slug, std::uint64_t number) const {
    auto slash = slug.find('/');
    return dir_ / std::string(slug.substr(0, slash)) / std::string(slug.substr(slash + 1)) /
           (std::to_string(number) + ".json");
  }

  std::optional<std::string> load(std::string_view slug, std::uint64_t number) const {
    if (dir_.empty()) return std::nullopt;
    std::ifstream in(path_for(slug, number), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void store(std::string_view slug, std::uint64_t number, std::string_view raw) const {
    if (dir_.empty()) return;
    static std::atomic<unsigned long> counter{0};
    auto target = path_for(slug, number);
    std::filesystem::create_directories(target.parent_path());
    auto tmp = target;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::Io, "cannot write cache file " + tmp.string());
      out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
      if (!out) throw Error(ErrorKind::Io, "cannot write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct ForgeOptions {
  std::string base_url = "https://api.github.com";
  // Falls back to $ACID_FORGE_TOKEN when unset.
  std::optional<std::string> token;
  bool offline = false;
  std::filesystem::path cache_dir;
  std::ptrdiff_t max_concurrent = 4;
  int max_attempts = 3;
  std::chrono::seconds max_retry_delay{60};
  std::chrono::seconds timeout{30};
  std::function<void(std::chrono::milliseconds)> sleeper;
};

struct FetchStats {
  std::atomic<std::size_t> cache_hits{0};
  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> unavailable{0};
};

/// Cached issue lookups against `/repos/{owner}/{name}/issues/{number}`.
/// Safe for concurrent callers; at most `max_concurrent` requests in flight.
class ForgeClient {
 public:
  explicit ForgeClient(ForgeOptions options)
      : options_(std::move(options)),
        cache_(options_.cache_dir),
        slots_(std::clamp<std::ptrdiff_t>(options_.max_concurrent, 1, kMaxSlots)) {
    if (!options_.token) {
      if (const char* env = std::getenv(kTokenEnv); env && *env) options_.token = env;
    }
    if (!options_.sleeper) options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    auto scheme = options_.base_url.find("://");
    auto path_start = options_.base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
      host_ = options_.base_url;
    } else {
      host_ = options_.base_url.substr(0, path_start);
      prefix_ = options_.base_url.substr(path_start);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
  }

  /// Issue text, or nullopt when unavailable (offline miss, not found,
  /// network failure, or rate limited past the retry budget).
  /// Throws AuthRequired when the forge demands credentials and no token is set.
  std::optional<ecm::IssueText> fetch_issue(const ecm::IssueRef& ref, std::string_view default_slug) {
    std::string slug = ref.repo_slug.empty() ? std::string(default_slug) : ref.repo_slug;
    if (!valid_slug(slug) || ref.issue_number == 0) return unavailable();

    if (auto cached = cache_.load(slug, ref.issue_number)) {
      if (auto issue = parse_issue_json(*cached)) {
        ++stats_.cache_hits;
        return issue;
      }
    }
    if (options_.offline) return unavailable();

    const std::string path = prefix_ + "/repos/" + slug + "/issues/" + std::to_string(ref.issue_number);
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
      httplib::Result res = get(path);
      if (!res) return unavailable();
      const int status = res->status;
      if (status == 200) {
        auto issue = parse_issue_json(res->body);
        if (!issue) return unavailable();
        cache_.store(slug, ref.issue_number, res->body);
        return issue;
      }
      if (auto delay = rate_limit_delay(*res)) {
        if (attempt < options_.max_attempts) options_.sleeper(*delay);
        continue;
      }
      if (status == 401 && !options_.token)
        throw Error(ErrorKind::AuthRequired, slug + "#" + std::to_string(ref.issue_number) + " needs " + kTokenEnv);
      return unavailable();
    }
    return unavailable();
  }

  ecm::IssueResolver resolver(std::string default_slug) {
    return [this, slug = std::move(default_slug)](const ecm::IssueRef& ref) { return fetch_issue(ref, slug); };
  }

  const FetchStats& stats() const { return stats_; }
  const ForgeOptions& options() const { return options_; }

 private:
  static constexpr std::ptrdiff_t kMaxSlots = 64;

  std::optional<ecm::IssueText> unavailable() {
    ++stats_.unavailable;
    return std::nullopt;
  }

  httplib::Result get(const std::string& path) {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<kMaxSlots>& s;
      ~Release() { s.release(); }
    } release{slots_};
    ++stats_.requests;
    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_follow_location(true);
    httplib::Headers headers{{"Accept", "application/vnd.github+json"}, {"User-Agent", "acid-miner"}};
    if (options_.token) headers.emplace("Authorization", "Bearer " + *options_.token);
    return client.Get(path, headers);
  }

  std::optional<std::chrono::milliseconds> rate_limit_delay(const httplib::Response& res) const {
    using namespace std::chrono;
    const bool limited =
        res.status == 429 || (res.status == 403 && (res.get_header_value("X-RateLimit-Remaining") == "0" ||
                                                     res.has_header("Retry-After")));
    if (!limited) return std::nullopt;
    seconds wait{1};
    if (res.has_header("Retry-After")) {
      wait = seconds{std::atol(res.get_header_value("Retry-After").c_str())};
    } else if (res.has_header("X-RateLimit-Reset")) {
      auto reset = std::atoll(res.get_header_value("X-RateLimit-Reset").c_str());
      auto now = duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
      wait = seconds{std::max<long long>(0, reset - now)};
    }
    return duration_cast<milliseconds>(std::clamp(wait, seconds{0}, options_.max_retry_delay));
  }

  ForgeOptions options_;
  IssueCache cache_;
  std::string host_;
  std::string prefix_;
  std::counting_semaphore<kMaxSlots> slots_;
  FetchStats stats_;
};

}  // namespace acid::forge
