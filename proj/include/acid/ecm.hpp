#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <functional>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "acid/error.hpp"
#include "acid/vcs.hpp"

namespace acid::ecm {

struct IssueRef {
  std::string repo_slug;  // "owner/name"; empty means the commit's own repository
  std::uint64_t issue_number = 0;

  friend bool operator==(const IssueRef&, const IssueRef&) = default;
  friend auto operator<=>(const IssueRef&, const IssueRef&) = default;
};

struct IssueText {
  std::string title;
  std::string body;

  friend bool operator==(const IssueText&, const IssueText&) = default;
};

/// Commit message followed by the text of every issue it resolves.
struct EnhancedCommitMessage {
  std::string commit_id;
  std::string text;
  std::vector<IssueRef> issue_refs;
  std::size_t resolved_count = 0;
};

enum class RefMode {
  ClosingKeyword,  // only refs in a sentence with fix/close/resolve and friends
  Any,             // every #N / GH-N / owner/name#N
};

namespace detail {

// Reference sentences end at newlines, ';', '!', '?', or a '.' followed by
// whitespace, so dotted repository names ("acme/infra.js#3") stay intact.
inline std::vector<std::string_view> reference_sentences(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool end = c == '\n' || c == ';' || c == '!' || c == '?' ||
               (c == '.' && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]))));
    if (end) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < text.size()) out.push_back(text.substr(start));
  return out;
}

inline bool has_closing_keyword(std::string_view sentence) {
  static const std::regex kw(R"((^|[^A-Za-z0-9_])(fix|fixes|fixed|close|closes|closed|resolve|resolves|resolved)($|[^A-Za-z0-9_]))",
                             std::regex::icase);
  return std::regex_search(sentence.begin(), sentence.end(), kw);
}

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace detail

inline std::vector<IssueRef> extract_issue_refs(std::string_view message, RefMode mode = RefMode::ClosingKeyword) {
  static const std::regex ref(R"(([A-Za-z0-9][A-Za-z0-9-]*/[A-Za-z0-9._-]+)?#(\d+)|GH-(\d+))", std::regex::icase);
  std::vector<IssueRef> out;
  std::set<IssueRef> seen;
  for (std::string_view sentence : detail::reference_sentences(message)) {
    if (mode == RefMode::ClosingKeyword && !detail::has_closing_keyword(sentence)) continue;
    for (auto it = std::cregex_iterator(sentence.data(), sentence.data() + sentence.size(), ref);
         it != std::cregex_iterator(); ++it) {
      const auto& m = *it;
      auto begin = static_cast<std::size_t>(m.position(0));
      auto end = begin + static_cast<std::size_t>(m.length(0));
      if (begin > 0) {
        char before = sentence[begin - 1];
        if (detail::is_word_char(before) || before == '/' || before == '&' || before == '#' || before == '-') continue;
      }
      if (end < sentence.size() && detail::is_word_char(sentence[end])) continue;

      std::string digits = m[2].matched ? m[2].str() : m[3].str();
      std::uint64_t number = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), number);
      if (ec != std::errc{} || number == 0 || number > 0x7fffffffULL) continue;

      IssueRef r{m[1].matched ? m[1].str() : std::string{}, number};
      if (seen.insert(r).second) out.push_back(std::move(r));
    }
  }
  return out;
}

using IssueResolver = std::function<std::optional<IssueText>(const IssueRef&)>;

/// ECM text: message, then "\n\n" + title + "\n" + body per resolved issue.
/// Unresolved references stay listed but contribute no text.
inline EnhancedCommitMessage build_ecm(const vcs::CommitRecord& commit, const IssueResolver& resolver,
                                       RefMode mode = RefMode::ClosingKeyword) {
  EnhancedCommitMessage ecm;
  ecm.commit_id = commit.commit_id;
  ecm.text = commit.message;
  ecm.issue_refs = extract_issue_refs(commit.message, mode);
  if (!resolver) return ecm;
  for (const auto& r : ecm.issue_refs) {
    std::optional<IssueText> issue;
    try {
      issue = resolver(r);
    } catch (const Error& e) {
      // missing credentials is a setup problem, not an unavailable issue
      if (e.kind() == ErrorKind::AuthRequired) throw;
      issue.reset();
    } catch (const std::exception&) {
      issue.reset();
    }
    if (!issue) continue;
    ecm.text += "\n\n" + issue->title + "\n" + issue->body;
    ++ecm.resolved_count;
  }
  return ecm;
}

}  // namespace acid::ecm
