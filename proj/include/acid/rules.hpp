#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "acid/error.hpp"
#include "acid/lexicon.hpp"
#include "acid/signals.hpp"
#include "acid/taxonomy.hpp"

namespace acid::rules {

// Rule-set file format
// --------------------
//   # comment
//   [lexicon hasDefect]          prefixes, whitespace/comma separated, quotes optional
//   error bug fix ...
//
//   [detector network_keys]      lexicons used by the diff-signal detectors
//   port host ...
//
//   [category Service]           gate AND (clause OR clause ...)
//   gate     = hasDefect(sen)
//   Resource = hasServResour(dep) OR changedService(diff)
//   Panic    = hasServPanic(dep)
//   *        = ...               clause without a subcategory
//
// Expressions: AND, OR, NOT, parentheses. A lexicon function is applied to
// `sen` (sentence tokens) or `dep` (dependent terms); a diff signal to `diff`.

enum class Scope { Sentence, Dependent, Diff };

struct Expr {
  enum class Op { Lexicon, Signal, And, Or, Not };
  Op op = Op::Lexicon;
  std::string lexicon;  // Op::Lexicon
  Scope scope = Scope::Sentence;
  Signal signal = Signal::DataChanged;  // Op::Signal
  std::vector<Expr> children;

  static Expr of(Op op) {
    Expr e;
    e.op = op;
    return e;
  }
};

struct Clause {
  std::optional<Subcategory> subcategory;
  Expr expr;
  std::string source;
};

struct CategoryRule {
  Category category = Category::Conditional;
  Expr gate;
  std::vector<Clause> clauses;
};

struct RuleSet {
  std::map<std::string, Lexicon, std::less<>> lexicons;
  std::map<std::string, Lexicon, std::less<>> detectors;
  std::vector<CategoryRule> rules;  // taxonomy order

  /// Lexicon that marks defect anchors.
  const Lexicon& defect_lexicon() const { return lexicon("hasDefect"); }

  /// Lexicon applied to commit messages before ECMs are built.
  const Lexicon& prefilter_lexicon() const {
    auto it = lexicons.find("prefilter");
    return it == lexicons.end() ? defect_lexicon() : it->second;
  }

  const Lexicon& lexicon(std::string_view name) const {
    auto it = lexicons.find(name);
    if (it == lexicons.end()) throw Error(ErrorKind::RuleSyntax, "unknown lexicon " + std::string(name));
    return it->second;
  }

  const Lexicon& detector(std::string_view name) const {
    static const Lexicon empty;
    auto it = detectors.find(name);
    return it == detectors.end() ? empty : it->second;
  }

  static RuleSet parse(std::string_view text);
  static RuleSet from_file(const std::string& path);
  static const RuleSet& defaults();
};

inline constexpr std::string_view kDefaultRules = R"RULES(# Default ACID rule set for PL-IaC repositories.

[lexicon hasDefect]
'error', 'bug', 'fix', 'issu', 'mistake', 'incorrect', 'fault', 'defect', 'flaw', 'solve'

[lexicon hasCond]
'logic', 'condition', 'boolean'

[lexicon hasStorConf]
'sql', 'db', 'databas', 'disk'

[lexicon hasFileConf]
'file', 'permiss'

[lexicon hasNetConf]
'network', 'port', 'tcp', 'dhcp', 'ssh', 'gateway', 'connect', 'rout'

[lexicon hasCredConf]
'user', 'usernam', 'password', 'polic', 'credential', 'iam', 'role', 'token'

[lexicon hasCachConf]
'cach', 'memory', 'buffer', 'evict', 'ttl'

[lexicon hasDepe]
'requir', 'depend', 'relation', 'order', 'sync', 'compatibil', 'ensure', 'inherit', 'version', 'deprecat', 'packag', 'path', 'modul', 'upgrad', 'updat'

[lexicon hasDoc]
'doc', 'comment', 'licens', 'copyright', 'notic', 'readm', 'descript'

[lexicon hasIdem]
'idempot', 'determin'

[lexicon hasSecu]
'vulner', 'ssl', 'secr', 'authent', 'password', 'security', 'cve', 'cert', 'firewall', 'encrypt', 'protect', 'access'

[lexicon hasServResour]
'servic', 'server', 'location', 'resourc', 'provi', 'cluster'

[lexicon hasServPanic]
'check', 'deploy', 'reboot', 'build', 'mount', 'kernel', 'extran', 'bypass'

# Syntax defects have no canonical pattern list; this default is a
# stand-in and can be replaced with an alternate rule file.
[lexicon hasSyntax]
'syntax', 'typo', 'lint', 'compil', 'pars', 'format', 'indent'

# Diff-signal detector vocabularies, matched against camelCase/snake_case
# split tokens of changed code.
[detector network_keys]
network port tcp udp dhcp ssh gateway connect rout host endpoint url uri cidr subnet vpc dns ingress egress listen ip

[detector credential_keys]
user usernam password passwd polic credential iam role token secret apikey auth login principal

[detector security_terms]
ssl tls https encrypt certificate firewall secret kms

[detector provider_namespaces]
aws gcp azure azuread google k8s kubernetes docker pulumi

[category Conditional]
gate = hasDefect(sen)
*    = hasCond(dep)

[category ConfigurationData]
gate       = hasDefect(sen)
Storage    = hasStorConf(dep)
FileSystem = hasFileConf(dep)
Network    = hasNetConf(dep) OR dataNetChanged(diff)
Credential = hasCredConf(dep) OR dataCredChanged(diff)
Cache      = hasCachConf(dep)
*          = dataChanged(diff)

[category Dependency]
gate = hasDefect(sen)
*    = hasDepe(dep) OR changedInclude(diff)

[category Documentation]
gate = hasDefect(sen)
*    = hasDoc(dep) OR changedComment(diff)

[category Idempotency]
gate = hasDefect(sen)
*    = hasIdem(dep)

[category Security]
gate = hasDefect(sen)
*    = hasSecu(dep) OR changedSecu(diff)

[category Service]
gate     = hasDefect(sen)
Resource = hasServResour(dep) OR changedService(diff)
Panic    = hasServPanic(dep)

[category Syntax]
gate = hasDefect(sen)
*    = hasSyntax(dep)
)RULES";

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view src, int line_no) : src_(src), line_no_(line_no) {}

  Expr parse() {
    Expr e = parse_or();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(src_.substr(pos_)) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(src_.substr(start, pos_ - start));
  }

  bool keyword(std::string_view kw) {
    skip_ws();
    std::size_t end = pos_;
    while (end < src_.size() && std::isalpha(static_cast<unsigned char>(src_[end]))) ++end;
    std::string_view word = src_.substr(pos_, end - pos_);
    if (word.size() != kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(word[i])) != kw[i]) return false;
    pos_ = end;
    return true;
  }

  bool punct(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_or() {
    Expr first = parse_and();
    if (!peek_keyword("OR")) return first;
    Expr e = Expr::of(Expr::Op::Or);
    e.children.push_back(std::move(first));
    while (keyword("OR")) e.children.push_back(parse_and());
    return e;
  }

  Expr parse_and() {
    Expr first = parse_unary();
    if (!peek_keyword("AND")) return first;
    Expr e = Expr::of(Expr::Op::And);
    e.children.push_back(std::move(first));
    while (keyword("AND")) e.children.push_back(parse_unary());
    return e;
  }

  bool peek_keyword(std::string_view kw) {
    std::size_t saved = pos_;
    bool ok = keyword(kw);
    pos_ = saved;
    return ok;
  }

  Expr parse_unary() {
    if (keyword("NOT")) {
      Expr e = Expr::of(Expr::Op::Not);
      e.children.push_back(parse_unary());
      return e;
    }
    if (punct('(')) {
      Expr e = parse_or();
      if (!punct(')')) fail("expected ')'");
      return e;
    }
    std::string name = ident();
    if (!punct('(')) fail("expected '(' after " + name);
    std::string scope = ident();
    if (!punct(')')) fail("expected ')' after scope");
    if (auto sig = parse_signal_function(name)) {
      if (scope != "diff") fail(name + " takes (diff)");
      Expr e = Expr::of(Expr::Op::Signal);
      e.signal = *sig;
      return e;
    }
    Expr e = Expr::of(Expr::Op::Lexicon);
    e.lexicon = name;
    if (scope == "sen")
      e.scope = Scope::Sentence;
    else if (scope == "dep")
      e.scope = Scope::Dependent;
    else
      fail(name + " takes (sen) or (dep)");
    return e;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_no_;
};

inline std::vector<std::string> parse_words(std::string_view line) {
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',')
      flush();
    else if (c != '\'' && c != '"')
      cur.push_back(c);
  }
  flush();
  return words;
}

inline std::string trim(std::string_view s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline void collect_lexicons(const Expr& e, std::set<std::string>& out) {
  if (e.op == Expr::Op::Lexicon) out.insert(e.lexicon);
  for (const auto& c : e.children) collect_lexicons(c, out);
}

}  // namespace detail

inline RuleSet RuleSet::parse(std::string_view text) {
  RuleSet rs;
  enum class Section { None, Lexicon, Detector, Category } section = Section::None;
  std::string section_name;
  std::vector<std::string> lexicon_words;
  CategoryRule* current = nullptr;
  bool current_has_gate = false;
  std::set<Category> seen_categories;

  auto close_section = [&] {
    if (section == Section::Lexicon) rs.lexicons[section_name] = Lexicon(std::move(lexicon_words));
    if (section == Section::Detector) rs.detectors[section_name] = Lexicon(std::move(lexicon_words));
    if (section == Section::Category && !current_has_gate)
      throw Error(ErrorKind::RuleSyntax, "category " + section_name + " has no gate");
    lexicon_words.clear();
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = detail::trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      close_section();
      if (line.back() != ']')
        throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no) + ": unterminated section header");
      auto words = detail::parse_words(std::string_view(line).substr(1, line.size() - 2));
      if (words.size() != 2)
        throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no) + ": expected [kind name]");
      section_name = words[1];
      if (words[0] == "lexicon") {
        section = Section::Lexicon;
      } else if (words[0] == "detector") {
        section = Section::Detector;
      } else if (words[0] == "category") {
        auto cat = parse_category(section_name);
        if (!cat)
          throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no) + ": unknown category " + section_name);
        if (!seen_categories.insert(*cat).second)
          throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no) + ": duplicate category " + section_name);
        section = Section::Category;
        rs.rules.emplace_back();
        rs.rules.back().category = *cat;
        current = &rs.rules.back();
        current_has_gate = false;
      } else {
        throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no) + ": unknown section kind " + words[0]);
      }
      continue;
    }

    switch (section) {
      case Section::None:
        throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no) + ": content outside a section");
      case Section::Lexicon:
      case Section::Detector:
        for (auto& w : detail::parse_words(line)) lexicon_words.push_back(std::move(w));
        break;
      case Section::Category: {
        auto eq = line.find('=');
        if (eq == std::string::npos)
          throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no) + ": expected 'key = expression'");
        std::string key = detail::trim(std::string_view(line).substr(0, eq));
        std::string source = detail::trim(std::string_view(line).substr(eq + 1));
        Expr expr = detail::ExprParser(source, line_no).parse();
        if (key == "gate") {
          current->gate = std::move(expr);
          current_has_gate = true;
        } else if (key == "*") {
          current->clauses.push_back({std::nullopt, std::move(expr), source});
        } else {
          auto sub = parse_subcategory(key);
          if (!sub || parent_of(*sub) != current->category)
            throw Error(ErrorKind::RuleSyntax, "line " + std::to_string(line_no) + ": '" + key +
                                                   "' is not a subcategory of " + std::string(id_of(current->category)));
          current->clauses.push_back({sub, std::move(expr), source});
        }
        break;
      }
    }
  }
  close_section();

  if (!rs.lexicons.contains("hasDefect")) throw Error(ErrorKind::RuleSyntax, "rule set lacks the hasDefect lexicon");
  std::set<std::string> referenced;
  for (const auto& rule : rs.rules) {
    detail::collect_lexicons(rule.gate, referenced);
    for (const auto& clause : rule.clauses) detail::collect_lexicons(clause.expr, referenced);
  }
  for (const auto& name : referenced)
    if (!rs.lexicons.contains(name)) throw Error(ErrorKind::RuleSyntax, "rule references unknown function " + name);

  std::sort(rs.rules.begin(), rs.rules.end(),
            [](const CategoryRule& a, const CategoryRule& b) { return a.category < b.category; });
  return rs;
}

inline RuleSet RuleSet::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read rule file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline const RuleSet& RuleSet::defaults() {
  static const RuleSet rs = parse(kDefaultRules);
  return rs;
}

/// What an expression is evaluated against.
struct EvalContext {
  const std::vector<std::string>& sentence_tokens;
  const std::set<std::string>& dependent_terms;
  const DiffSignals& signals;
};

inline bool evaluate(const Expr& e, const RuleSet& rs, const EvalContext& ctx) {
  switch (e.op) {
    case Expr::Op::Lexicon: {
      const Lexicon& lex = rs.lexicon(e.lexicon);
      return e.scope == Scope::Sentence ? match_pattern(ctx.sentence_tokens, lex)
                                        : match_pattern(ctx.dependent_terms, lex);
    }
    case Expr::Op::Signal:
      return ctx.signals.get(e.signal);
    case Expr::Op::And:
      for (const auto& c : e.children)
        if (!evaluate(c, rs, ctx)) return false;
      return true;
    case Expr::Op::Or:
      for (const auto& c : e.children)
        if (evaluate(c, rs, ctx)) return true;
      return false;
    case Expr::Op::Not:
      return !evaluate(e.children.front(), rs, ctx);
  }
  return false;
}

/// Signals referenced by `e` that are currently true.
inline void true_signals(const Expr& e, const DiffSignals& signals, std::set<Signal>& out) {
  if (e.op == Expr::Op::Signal && signals.get(e.signal)) out.insert(e.signal);
  for (const auto& c : e.children) true_signals(c, signals, out);
}

}  // namespace acid::rules
