#pragma once

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "acid/error.hpp"
#include "acid/process.hpp"

namespace acid::vcs {

enum class ChangeKind { Added, Deleted, Modified, Renamed };

constexpr std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::Added: return "added";
    case ChangeKind::Deleted: return "deleted";
    case ChangeKind::Modified: return "modified";
    case ChangeKind::Renamed: return "renamed";
  }
  return "";
}

struct NumberedLine {
  std::uint32_t line_no = 0;
  std::string text;

  friend bool operator==(const NumberedLine&, const NumberedLine&) = default;
};

struct FileChange {
  std::string path;  // post-image path, '/'-separated
  ChangeKind change_kind = ChangeKind::Modified;
  std::vector<NumberedLine> added_lines;
  std::vector<NumberedLine> removed_lines;

  friend bool operator==(const FileChange&, const FileChange&) = default;
};

struct CommitRecord {
  std::string commit_id;
  std::string message;
  std::int64_t author_time = 0;  // seconds since epoch, UTC
  std::string author_id;
  std::vector<FileChange> file_changes;
  std::uint32_t parent_count = 0;

  friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

struct ListOptions {
  // Revision to walk; "HEAD" follows the repository's symbolic HEAD.
  std::string revision = "HEAD";
  bool include_merges = true;
};

namespace detail {

inline bool is_hex_id(std::string_view s) {
  return s.size() == 40 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

class TempFile {
 public:
  explicit TempFile(std::string_view contents) {
    std::string tmpl = (std::filesystem::temp_directory_path() / "acid-XXXXXX").string();
    int fd = ::mkstemp(tmpl.data());
    if (fd < 0) throw Error(ErrorKind::Io, "cannot create temporary file");
    path_ = tmpl;
    std::size_t off = 0;
    while (off < contents.size()) {
      ssize_t n = ::write(fd, contents.data() + off, contents.size() - off);
      if (n <= 0) {
        ::close(fd);
        throw Error(ErrorKind::Io, "cannot write temporary file " + path_);
      }
      off += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline ProcessResult git(const std::filesystem::path& repo, std::vector<std::string> args,
                         const ProcessOptions& opts = {}) {
  std::vector<std::string> argv{"git", "-C", repo.string(), "-c", "core.quotepath=off"};
  argv.insert(argv.end(), std::make_move_iterator(args.begin()), std::make_move_iterator(args.end()));
  return run_process(argv, opts);
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

/// Undoes git's C-style path quoting ("a/b\tc" -> a/b<TAB>c).
inline std::string unquote_path(std::string_view s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return std::string(s);
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c != '\\' || i + 2 >= s.size()) {
      out.push_back(c);
      continue;
    }
    char e = s[++i];
    switch (e) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case 'a': out.push_back('\a'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 'v': out.push_back('\v'); break;
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      default:
        if (e >= '0' && e <= '7' && i + 2 < s.size()) {
          int v = (e - '0') * 64 + (s[i + 1] - '0') * 8 + (s[i + 2] - '0');
          out.push_back(static_cast<char>(v));
          i += 2;
        } else {
          out.push_back(e);
        }
    }
  }
  return out;
}

inline std::string strip_prefix(std::string path, std::string_view prefix) {
  if (path.compare(0, prefix.size(), prefix) == 0) path.erase(0, prefix.size());
  return path;
}

// ---/+++ names; git appends a tab when the name contains a space.
inline std::string header_path(std::string_view rest) {
  if (!rest.empty() && rest.back() == '\t') rest.remove_suffix(1);
  return unquote_path(rest);
}

// "diff --git a/X b/X" when no ---/+++ or rename lines name the file.
inline std::string path_from_diff_header(std::string_view rest) {
  if (!rest.empty() && rest.front() == '"') {
    std::size_t end = 1;
    while (end < rest.size() && !(rest[end] == '"' && rest[end - 1] != '\\')) ++end;
    std::string_view second = rest.substr(std::min(rest.size(), end + 2));
    return strip_prefix(unquote_path(second), "b/");
  }
  if (rest.size() % 2 == 1) {
    std::size_t half = rest.size() / 2;
    std::string_view a = rest.substr(0, half), b = rest.substr(half + 1);
    if (a.substr(0, 2) == "a/" && b.substr(0, 2) == "b/" && a.substr(2) == b.substr(2))
      return std::string(b.substr(2));
  }
  auto pos = rest.rfind(" b/");
  return pos == std::string_view::npos ? std::string(rest) : std::string(rest.substr(pos + 3));
}

inline std::uint32_t parse_uint(std::string_view s) {
  std::uint32_t v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

// "-a[,b]" or "+c[,d]"
inline std::pair<std::uint32_t, std::uint32_t> parse_range(std::string_view s) {
  s.remove_prefix(1);
  auto comma = s.find(',');
  if (comma == std::string_view::npos) return {parse_uint(s), 1};
  return {parse_uint(s.substr(0, comma)), parse_uint(s.substr(comma + 1))};
}

}  // namespace detail

/// Parses the output of `git diff-tree --stdin --always -p --unified=0`
/// into commit id -> file changes. Lines inside a hunk are consumed by count,
/// so a changed line that happens to look like a header is never misread.
inline std::unordered_map<std::string, std::vector<FileChange>> parse_diff_tree(std::string_view text) {
  std::unordered_map<std::string, std::vector<FileChange>> out;
  std::vector<FileChange>* current = nullptr;
  FileChange* file = nullptr;
  std::uint32_t old_left = 0, new_left = 0, old_no = 0, new_no = 0;
  bool explicit_path = false;

  for (std::string_view line : detail::split_lines(text)) {
    if (old_left > 0 || new_left > 0) {
      if (line.empty()) continue;
      char tag = line.front();
      std::string body(line.substr(1));
      if (tag == '-' && old_left > 0) {
        file->removed_lines.push_back({old_no++, std::move(body)});
        --old_left;
      } else if (tag == '+' && new_left > 0) {
        file->added_lines.push_back({new_no++, std::move(body)});
        --new_left;
      } else if (tag == ' ') {
        ++old_no, ++new_no;
        if (old_left) --old_left;
        if (new_left) --new_left;
      }
      continue;
    }
    if (detail::is_hex_id(line)) {
      current = &out[std::string(line)];
      file = nullptr;
      continue;
    }
    if (!current) continue;
    if (line.starts_with("diff --git ")) {
      current->push_back(FileChange{});
      file = &current->back();
      file->path = detail::path_from_diff_header(line.substr(11));
      explicit_path = false;
      continue;
    }
    if (!file) continue;
    if (line.starts_with("new file mode")) {
      file->change_kind = ChangeKind::Added;
    } else if (line.starts_with("deleted file mode")) {
      file->change_kind = ChangeKind::Deleted;
    } else if (line.starts_with("rename to ")) {
      file->change_kind = ChangeKind::Renamed;
      file->path = detail::unquote_path(line.substr(10));
      explicit_path = true;
    } else if (line.starts_with("rename from ")) {
      file->change_kind = ChangeKind::Renamed;
    } else if (line.starts_with("--- ")) {
      std::string p = detail::header_path(line.substr(4));
      if (p != "/dev/null" && !explicit_path) file->path = detail::strip_prefix(p, "a/");
    } else if (line.starts_with("+++ ")) {
      std::string p = detail::header_path(line.substr(4));
      if (p != "/dev/null") {
        file->path = detail::strip_prefix(p, "b/");
        explicit_path = true;
      }
    } else if (line.starts_with("@@ ")) {
      auto space = line.find(' ', 3);
      auto end = line.find(' ', space + 1);
      auto [o_start, o_count] = detail::parse_range(line.substr(3, space - 3));
      auto [n_start, n_count] = detail::parse_range(line.substr(space + 1, end - space - 1));
      old_no = o_start, old_left = o_count;
      new_no = n_start, new_left = n_count;
    }
  }
  return out;
}

namespace detail {

struct CommitHeader {
  std::vector<std::string> parents;
  std::string author_id;
  std::int64_t author_time = 0;
  std::string message;
  bool has_author = false;
};

inline CommitHeader parse_commit_object(std::string_view body) {
  CommitHeader h;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t nl = body.find('\n', pos);
    if (nl == std::string_view::npos) nl = body.size();
    std::string_view line = body.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) {
      h.message = std::string(body.substr(std::min(pos, body.size())));
      return h;
    }
    if (line.starts_with("parent ")) {
      h.parents.emplace_back(line.substr(7));
    } else if (line.starts_with("author ")) {
      // author Name <email> 1234567890 +0000
      auto lt = line.find('<'), gt = line.rfind('>');
      if (lt != std::string_view::npos && gt != std::string_view::npos && gt > lt) {
        h.author_id = std::string(line.substr(lt + 1, gt - lt - 1));
        std::string_view rest = line.substr(gt + 1);
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        std::int64_t t = 0;
        auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), t);
        if (ec == std::errc{}) {
          h.author_time = t;
          h.has_author = true;
        }
      }
    }
  }
  return h;
}

}  // namespace detail

inline void require_repository(const std::filesystem::path& repo) {
  if (!std::filesystem::is_directory(repo))
    throw Error(ErrorKind::NotARepository, repo.string() + " is not a directory");
  auto r = detail::git(repo, {"rev-parse", "--git-dir"});
  if (r.exit_code != 0) throw Error(ErrorKind::NotARepository, repo.string());
}

/// Full commit id of `revision`; nullopt for an unborn HEAD. A name that
/// resolves to a missing, unreadable or non-commit object is CorruptObject.
inline std::optional<std::string> resolve_commit(const std::filesystem::path& repo, const std::string& revision) {
  auto trimmed = [](std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
  };
  auto name = detail::git(repo, {"rev-parse", "--verify", "-q", revision});
  if (name.exit_code != 0) {
    if (revision == "HEAD") return std::nullopt;
    throw Error(ErrorKind::CorruptObject, "cannot resolve revision " + revision);
  }
  auto r = detail::git(repo, {"rev-parse", "--verify", "-q", revision + "^{commit}"});
  if (r.exit_code != 0) throw Error(ErrorKind::CorruptObject, trimmed(name.out) + " is not a readable commit");
  return trimmed(r.out);
}

/// Commits reachable from `options.revision`, parents before children, each
/// diffed against its first parent (root commits against the empty tree).
inline std::vector<CommitRecord> list_commits(const std::filesystem::path& repo,
                                              const ListOptions& options = {}) {
  require_repository(repo);

  auto head = resolve_commit(repo, options.revision);
  if (!head) return {};  // unborn branch

  auto revs = detail::git(repo, {"rev-list", "--topo-order", "--reverse", *head});
  if (revs.exit_code != 0) throw Error(ErrorKind::CorruptObject, revs.err);
  std::vector<std::string> ids;
  for (auto line : detail::split_lines(revs.out))
    if (!line.empty()) ids.emplace_back(line);
  if (ids.empty()) return {};

  // Commit objects, one cat-file process for the whole history.
  std::string id_list;
  for (const auto& id : ids) id_list += id + "\n";
  detail::TempFile id_file(id_list);
  auto cat = detail::git(repo, {"cat-file", "--batch"}, {.stdin_path = id_file.path(), .env = {}});
  if (cat.exit_code != 0) throw Error(ErrorKind::CorruptObject, cat.err);

  std::vector<CommitRecord> records;
  records.reserve(ids.size());
  std::string diff_input;
  std::string_view stream = cat.out;
  for (const auto& id : ids) {
    auto nl = stream.find('\n');
    if (nl == std::string_view::npos) throw Error(ErrorKind::CorruptObject, id);
    std::string_view header = stream.substr(0, nl);
    stream.remove_prefix(nl + 1);
    // "<id> commit <size>" or "<id> missing"
    auto sp1 = header.find(' '), sp2 = header.rfind(' ');
    if (header.substr(0, sp1) != id || sp1 == sp2 || header.substr(sp1 + 1, sp2 - sp1 - 1) != "commit")
      throw Error(ErrorKind::CorruptObject, id);
    std::size_t size = detail::parse_uint(header.substr(sp2 + 1));
    if (stream.size() < size + 1) throw Error(ErrorKind::CorruptObject, id);
    auto parsed = detail::parse_commit_object(stream.substr(0, size));
    stream.remove_prefix(size + 1);
    if (!parsed.has_author || parsed.author_time < 0) throw Error(ErrorKind::CorruptObject, id);

    if (!options.include_merges && parsed.parents.size() > 1) continue;

    CommitRecord rec;
    rec.commit_id = id;
    rec.message = std::move(parsed.message);
    rec.author_time = parsed.author_time;
    rec.author_id = std::move(parsed.author_id);
    rec.parent_count = static_cast<std::uint32_t>(parsed.parents.size());
    diff_input += id;
    if (!parsed.parents.empty()) diff_input += " " + parsed.parents.front();
    diff_input += "\n";
    records.push_back(std::move(rec));
  }

  detail::TempFile diff_file(diff_input);
  auto diff = detail::git(repo,
                          {"diff-tree", "--stdin", "--always", "-r", "-p", "--unified=0", "-M", "--root",
                           "--no-color", "--no-ext-diff", "--no-textconv", "--src-prefix=a/",
                           "--dst-prefix=b/"},
                          {.stdin_path = diff_file.path(), .env = {}});
  if (diff.exit_code != 0) throw Error(ErrorKind::CorruptObject, diff.err);
  auto changes = parse_diff_tree(diff.out);
  for (auto& rec : records) {
    auto it = changes.find(rec.commit_id);
    if (it != changes.end()) rec.file_changes = std::move(it->second);
  }
  return records;
}

/// Tracked files at `revision`.
inline std::vector<std::string> list_tree(const std::filesystem::path& repo,
                                          const std::string& revision = "HEAD") {
  require_repository(repo);
  auto r = detail::git(repo, {"ls-tree", "-r", "-z", "--name-only", revision});
  if (r.exit_code != 0) return {};
  std::vector<std::string> paths;
  std::size_t start = 0;
  while (start < r.out.size()) {
    auto end = r.out.find('\0', start);
    if (end == std::string::npos) end = r.out.size();
    if (end > start) paths.emplace_back(r.out.substr(start, end - start));
    start = end + 1;
  }
  return paths;
}

/// Contents of `path` at `revision`, or nullopt when absent.
inline std::optional<std::string> show_file(const std::filesystem::path& repo, const std::string& revision,
                                            const std::string& path) {
  auto r = detail::git(repo, {"show", revision + ":" + path});
  if (r.exit_code != 0) return std::nullopt;
  return r.out;
}

/// Author times and ids only; far cheaper than list_commits for curation.
struct Activity {
  std::vector<std::int64_t> author_times;
  std::set<std::string> authors;
};

inline Activity commit_activity(const std::filesystem::path& repo, const ListOptions& options = {}) {
  require_repository(repo);
  Activity out;
  auto head = resolve_commit(repo, options.revision);
  if (!head) return out;
  std::vector<std::string> args{"log", "--format=%at%x09%ae"};
  if (!options.include_merges) args.emplace_back("--no-merges");
  args.push_back(*head);
  auto r = detail::git(repo, args);
  if (r.exit_code != 0) throw Error(ErrorKind::CorruptObject, r.err);
  for (auto line : detail::split_lines(r.out)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    std::int64_t t = -1;
    auto digits = line.substr(0, tab);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || t < 0)
      throw Error(ErrorKind::CorruptObject, "bad author time in " + repo.string());
    out.author_times.push_back(t);
    out.authors.emplace(tab == std::string_view::npos ? std::string_view{} : line.substr(tab + 1));
  }
  return out;
}

/// Number of calendar months touched by [first, last], rounded up; at least 1.
inline std::int64_t month_span(std::int64_t first, std::int64_t last) {
  using namespace std::chrono;
  if (last < first) std::swap(first, last);
  auto to_parts = [](std::int64_t t) {
    sys_seconds s{seconds{t}};
    auto day = floor<days>(s);
    year_month_day ymd{day};
    return std::tuple{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()), (s - day).count()};
  };
  auto [y0, m0, d0, s0] = to_parts(first);
  auto [y1, m1, d1, s1] = to_parts(last);
  std::int64_t months = (static_cast<std::int64_t>(y1) - y0) * 12 + (static_cast<std::int64_t>(m1) - m0);
  if (std::tie(d1, s1) > std::tie(d0, s0)) ++months;
  return std::max<std::int64_t>(1, months);
}

inline double commits_per_month(std::span<const std::int64_t> author_times) {
  if (author_times.empty()) throw Error(ErrorKind::EmptyHistory, "no commits");
  auto [lo, hi] = std::minmax_element(author_times.begin(), author_times.end());
  return static_cast<double>(author_times.size()) / static_cast<double>(month_span(*lo, *hi));
}

inline double commits_per_month(std::span<const CommitRecord> commits) {
  std::vector<std::int64_t> times;
  times.reserve(commits.size());
  for (const auto& c : commits) times.push_back(c.author_time);
  return commits_per_month(std::span<const std::int64_t>(times));
}

inline std::size_t contributor_count(std::span<const CommitRecord> commits) {
  std::set<std::string_view> ids;
  for (const auto& c : commits) ids.insert(c.author_id);
  return ids.size();
}

}  // namespace acid::vcs
