#pragma once

#include <cctype>
#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "acid/iac.hpp"
#include "acid/lexicon.hpp"
#include "acid/rules.hpp"
#include "acid/signals.hpp"
#include "acid/vcs.hpp"

namespace acid::signals {

using iac::Language;

/// Identifier-aware tokenization for code: splits on non-alphanumerics and on
/// camelCase boundaries ("serverSideEncryption" -> server side encryption,
/// "HTTPPort" -> http port).
inline std::vector<std::string> code_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  auto up = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  auto low = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (static_cast<unsigned char>(c) >= 0x80 || !std::isalnum(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (!cur.empty() && up(c)) {
      char prev = line[i - 1];
      bool next_low = i + 1 < line.size() && low(line[i + 1]);
      if (low(prev) || std::isdigit(static_cast<unsigned char>(prev)) || (up(prev) && next_low)) flush();
    }
    cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  flush();
  return out;
}

inline std::string_view trim(std::string_view s) {
  auto a = s.find_first_not_of(" \t\r\f\v");
  if (a == std::string_view::npos) return {};
  auto b = s.find_last_not_of(" \t\r\f\v");
  return s.substr(a, b - a + 1);
}

/// Whole line lies inside the language's comment syntax.
inline bool is_comment_line(std::string_view line, Language lang) {
  std::string_view t = trim(line);
  if (t.empty()) return false;
  auto c_like = [&] {
    return t.starts_with("//") || t.starts_with("/*") || t.starts_with("*/") ||
           (t.front() == '*' && (t.size() == 1 || t[1] == ' ' || t[1] == '/'));
  };
  switch (lang) {
    case Language::TypeScriptLike:
    case Language::GoLike:
    case Language::CSharpLike:
    case Language::JavaLike:
      return c_like();
    case Language::PythonLike:
      return t.front() == '#';
    case Language::HCL:
      return t.front() == '#' || c_like();
    case Language::FSharpLike:
      return t.starts_with("//") || t.starts_with("(*") || t.ends_with("*)");
    case Language::VBLike: {
      if (t.front() == '\'') return true;
      return t.size() >= 4 && (t.substr(0, 4) == "REM " || t.substr(0, 4) == "rem ");
    }
    case Language::Unknown:
      return false;
  }
  return false;
}

inline bool starts_with_word(std::string_view t, std::string_view word) {
  return t.starts_with(word) &&
         (t.size() == word.size() || !std::isalnum(static_cast<unsigned char>(t[word.size()])));
}

inline bool is_include_line(std::string_view line, Language lang) {
  std::string_view t = trim(line);
  if (t.empty()) return false;
  switch (lang) {
    case Language::TypeScriptLike:
      if (starts_with_word(t, "import")) return true;
      if (starts_with_word(t, "export") && t.find(" from ") != std::string_view::npos) return true;
      return t.find("require(") != std::string_view::npos;
    case Language::PythonLike:
      return starts_with_word(t, "import") || (starts_with_word(t, "from") && t.find(" import ") != std::string_view::npos);
    case Language::GoLike: {
      if (starts_with_word(t, "import")) return true;
      // A line inside an import block: optional alias, then a quoted path.
      static const std::regex block_entry(R"(^([A-Za-z_.]\w*\s+)?"[\w.\-~]+(/[\w.\-~]+)+")");
      return std::regex_search(t.begin(), t.end(), block_entry);
    }
    case Language::CSharpLike:
      return starts_with_word(t, "using") && t.back() == ';' && t.find('(') == std::string_view::npos &&
             t.find(" var ") == std::string_view::npos && t.find('=') == std::string_view::npos;
    case Language::JavaLike:
      return starts_with_word(t, "import");
    case Language::FSharpLike:
      return starts_with_word(t, "open");
    case Language::VBLike:
      return starts_with_word(t, "Imports");
    case Language::HCL: {
      static const std::regex hcl(R"(^(module\s+"|source\s*=))");
      return std::regex_search(t.begin(), t.end(), hcl);
    }
    case Language::Unknown:
      return false;
  }
  return false;
}

inline bool is_service_line(std::string_view line, Language lang, const Lexicon& namespaces) {
  std::string_view t = trim(line);
  if (lang == Language::HCL) {
    static const std::regex header(R"(^(resource|provider)\s+"[^"]+")");
    return std::regex_search(t.begin(), t.end(), header);
  }
  // Constructor invocation of a provider-qualified type: `new aws.s3.Bucket(`,
  // `aws.s3.Bucket(` or `new Pulumi.Aws.S3.Bucket(`.
  static const std::regex call(R"((^|[^\w.])(new\s+)?([A-Za-z_]\w*)((\.[A-Za-z_]\w*)+)\s*\()");
  std::string s(t);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), call); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    std::string root = m[3].str();
    std::transform(root.begin(), root.end(), root.begin(), [](unsigned char c) { return std::tolower(c); });
    bool known = false;
    for (const auto& p : namespaces.prefixes())
      if (root == p) known = true;
    if (!known) continue;
    std::string tail = m[4].str();
    auto last_dot = tail.rfind('.');
    bool type_like = last_dot + 1 < tail.size() && std::isupper(static_cast<unsigned char>(tail[last_dot + 1]));
    if (m[2].matched || type_like) return true;
  }
  return false;
}

/// Index of the assignment / key-value separator, skipping quoted text.
/// '=' is preferred over ':' so `const port: number = 1` splits at '='.
inline std::optional<std::size_t> separator_index(std::string_view line) {
  std::optional<std::size_t> colon;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'' || c == '`') {
      quote = c;
      continue;
    }
    char prev = i > 0 ? line[i - 1] : '\0';
    char next = i + 1 < line.size() ? line[i + 1] : '\0';
    if (c == '=') {
      if (next == '=' || next == '>' || prev == '=' || prev == '!' || prev == '<' || prev == '>' ||
          prev == '+' || prev == '-' || prev == '*' || prev == '/')
        continue;
      return i;
    }
    if (c == ':' && !colon && next != ':' && prev != ':') colon = i;
  }
  return colon;
}

/// Value text with trailing separators and line comments removed.
inline std::string value_text(std::string_view v) {
  char quote = 0;
  std::size_t end = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    char c = v[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'' || c == '`') quote = c;
    else if ((c == '/' && i + 1 < v.size() && v[i + 1] == '/') || c == '#') {
      end = i;
      break;
    }
  }
  std::string_view t = trim(v.substr(0, end));
  while (!t.empty() && (t.back() == ',' || t.back() == ';')) t = trim(t.substr(0, t.size() - 1));
  return std::string(t);
}

inline bool is_literal(std::string_view v) {
  v = trim(v);
  if (v.empty()) return false;
  static const std::regex number(R"(^[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?$)");
  if (std::regex_match(v.begin(), v.end(), number)) return true;
  for (std::string_view kw : {"true", "false", "True", "False", "null", "None", "nil"})
    if (v == kw) return true;
  char q = v.front();
  if ((q == '"' || q == '\'' || q == '`') && v.size() >= 2 && v.back() == q) {
    if (q == '`' && v.find("${") != std::string_view::npos) return false;
    return true;
  }
  if (v.front() == '[' && v.back() == ']') {
    std::string_view inner = trim(v.substr(1, v.size() - 2));
    if (inner.empty()) return true;
    std::size_t start = 0;
    char quote = 0;
    for (std::size_t i = 0; i <= inner.size(); ++i) {
      if (i < inner.size()) {
        char c = inner[i];
        if (quote) {
          if (c == '\\') ++i;
          else if (c == quote) quote = 0;
          continue;
        }
        if (c == '"' || c == '\'') {
          quote = c;
          continue;
        }
        if (c != ',') continue;
      }
      std::string_view item = trim(inner.substr(start, i - start));
      if (!item.empty() && !is_literal(item)) return false;
      start = i + 1;
    }
    return true;
  }
  return false;
}

inline std::string unquote(std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'' || v.front() == '`') && v.back() == v.front())
    return std::string(v.substr(1, v.size() - 2));
  return std::string(v);
}

inline bool looks_like_network_value(std::string_view value) {
  static const std::regex url(R"(^[a-zA-Z][a-zA-Z0-9+.\-]*://\S+$)");
  static const std::regex ipv4(R"(^(\d{1,3}\.){3}\d{1,3}(/\d{1,2})?$)");
  std::string v = unquote(trim(value));
  if (!v.empty() && v.front() == '[') {
    // list of addresses
    static const std::regex any_ip(R"((\d{1,3}\.){3}\d{1,3}(/\d{1,2})?)");
    return std::regex_search(v, any_ip) || v.find("://") != std::string::npos;
  }
  return std::regex_match(v, url) || std::regex_match(v, ipv4);
}

inline std::optional<long> integer_value(std::string_view v) {
  std::string s = unquote(trim(v));
  if (s.empty() || s.size() > 9) return std::nullopt;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  return std::stol(s);
}

struct Assignment {
  std::string key;    // raw text up to and including the separator
  std::string value;  // literal value text
  std::string line;
};

inline std::optional<Assignment> split_assignment(std::string_view line) {
  auto sep = separator_index(line);
  if (!sep) return std::nullopt;
  std::string_view key = line.substr(0, *sep + 1);
  if (std::none_of(key.begin(), key.end(), [](unsigned char c) { return std::isalnum(c); })) return std::nullopt;
  std::string value = value_text(line.substr(*sep + 1));
  if (!is_literal(value)) return std::nullopt;
  return Assignment{std::string(key), std::move(value), std::string(line)};
}

/// Runs every detector over the changed lines of IaC files.
inline DiffSignals detect_diff_signals(const std::vector<vcs::FileChange>& changes,
                                       const std::map<std::string, iac::IacProgramKind>& kinds,
                                       const rules::RuleSet& rules = rules::RuleSet::defaults()) {
  DiffSignals out;
  const Lexicon& net_keys = rules.detector("network_keys");
  const Lexicon& cred_keys = rules.detector("credential_keys");
  const Lexicon& secu_terms = rules.detector("security_terms");
  const Lexicon& namespaces = rules.detector("provider_namespaces");

  for (const auto& fc : changes) {
    auto kind_it = kinds.find(fc.path);
    if (kind_it == kinds.end() || !kind_it->second.is_iac()) continue;
    const Language lang = kind_it->second.language;

    std::vector<const vcs::NumberedLine*> code;
    auto scan = [&](const std::vector<vcs::NumberedLine>& lines) {
      for (const auto& nl : lines) {
        if (trim(nl.text).empty()) continue;
        if (is_comment_line(nl.text, lang)) {
          out.record(Signal::ChangedComment, fc.path, nl.text);
          continue;
        }
        code.push_back(&nl);
        if (is_include_line(nl.text, lang)) out.record(Signal::ChangedInclude, fc.path, nl.text);
        if (is_service_line(nl.text, lang, namespaces)) out.record(Signal::ChangedService, fc.path, nl.text);
        if (match_pattern(code_tokens(nl.text), secu_terms)) out.record(Signal::ChangedSecu, fc.path, nl.text);
      }
    };
    scan(fc.removed_lines);
    scan(fc.added_lines);

    // Value changes: a removed and an added line sharing everything up to the
    // separator, with differing literal values.
    std::multimap<std::string, Assignment> removed;
    for (const auto& nl : fc.removed_lines) {
      if (is_comment_line(nl.text, lang)) continue;
      if (auto a = split_assignment(nl.text)) removed.emplace(a->key, std::move(*a));
    }
    if (removed.empty()) continue;
    for (const auto& nl : fc.added_lines) {
      if (is_comment_line(nl.text, lang)) continue;
      auto added = split_assignment(nl.text);
      if (!added) continue;
      auto [lo, hi] = removed.equal_range(added->key);
      for (auto it = lo; it != hi; ++it) {
        const Assignment& before = it->second;
        if (before.value == added->value) continue;
        out.record(Signal::DataChanged, fc.path, added->line);

        std::string key_lower;
        for (char c : added->key) key_lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        auto key_tokens = code_tokens(added->key);
        bool net = match_pattern(key_tokens, net_keys) || looks_like_network_value(before.value) ||
                   looks_like_network_value(added->value);
        if (!net && key_lower.find("port") != std::string::npos) {
          auto port = integer_value(added->value);
          net = port && *port >= 1 && *port <= 65535;
        }
        if (net) out.record(Signal::DataNetChanged, fc.path, added->line);
        if (match_pattern(key_tokens, cred_keys)) out.record(Signal::DataCredChanged, fc.path, added->line);
        break;
      }
    }
  }
  return out;
}

/// Convenience overload classifying paths against head-tree markers.
inline DiffSignals detect_diff_signals(const std::vector<vcs::FileChange>& changes, const iac::RepoIacProfile& profile,
                                       const rules::RuleSet& rules = rules::RuleSet::defaults(),
                                       const iac::LanguageTable& languages = iac::LanguageTable::defaults()) {
  std::map<std::string, iac::IacProgramKind> kinds;
  for (const auto& fc : changes) kinds[fc.path] = iac::classify_file(fc.path, profile.markers, languages);
  return detect_diff_signals(changes, kinds, rules);
}

}  // namespace acid::signals
