#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "acid/ecm.hpp"
#include "acid/rules.hpp"
#include "acid/signals.hpp"
#include "acid/taxonomy.hpp"
#include "acid/text.hpp"

namespace acid {

struct Evidence {
  std::string source;  // "sentence" or a diff-signal field name
  std::string text;
  std::string path;    // diff evidence only

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

/// "ConfigurationData/Network" or "Security".
inline std::string label_string(Category c) { return std::string(id_of(c)); }
inline std::string label_string(Subcategory s) {
  return std::string(id_of(parent_of(s))) + "/" + std::string(id_of(s));
}

struct ClassificationResult {
  std::string commit_id;
  std::set<Category> categories;
  std::set<Subcategory> subcategories;
  // Keyed by label_string() of each fired category and subcategory.
  std::map<std::string, std::vector<Evidence>> evidence;
  bool is_defect = false;

  /// Resolved labels in taxonomy order: a category that fired through a
  /// subcategory clause is listed per subcategory, otherwise bare.
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (Category c : categories) {
      bool any_sub = false;
      for (Subcategory s : subcategories) {
        if (parent_of(s) != c) continue;
        out.push_back(label_string(s));
        any_sub = true;
      }
      if (!any_sub) out.push_back(label_string(c));
    }
    return out;
  }
};

namespace detail {
inline void add_evidence(std::vector<Evidence>& list, Evidence e) {
  if (std::find(list.begin(), list.end(), e) == list.end()) list.push_back(std::move(e));
}
}  // namespace detail

/// Evaluates every category rule per ECM sentence; labels are the union over
/// sentences. Diff signals apply to every sentence alike.
inline ClassificationResult classify_ecm(const ecm::EnhancedCommitMessage& ecm, const DiffSignals& signals,
                                         const rules::RuleSet& rules, const text::DependencyExtractor& extractor) {
  ClassificationResult result;
  result.commit_id = ecm.commit_id;

  for (const auto& sentence : text::analyze(ecm.text, rules.defect_lexicon(), extractor)) {
    rules::EvalContext ctx{sentence.tokens, sentence.dependent_terms, signals};
    for (const auto& rule : rules.rules) {
      if (!rules::evaluate(rule.gate, rules, ctx)) continue;
      for (const auto& clause : rule.clauses) {
        if (!rules::evaluate(clause.expr, rules, ctx)) continue;

        std::vector<Evidence> found{{"sentence", sentence.raw, ""}};
        std::set<Signal> fired;
        rules::true_signals(clause.expr, signals, fired);
        rules::true_signals(rule.gate, signals, fired);
        for (Signal s : fired)
          for (const auto& ev : signals.evidence(s)) found.push_back({std::string(field_name(s)), ev.line, ev.path});

        result.categories.insert(rule.category);
        for (const auto& e : found) detail::add_evidence(result.evidence[label_string(rule.category)], e);
        if (clause.subcategory) {
          result.subcategories.insert(*clause.subcategory);
          for (const auto& e : found) detail::add_evidence(result.evidence[label_string(*clause.subcategory)], e);
        }
      }
    }
  }
  result.is_defect = !result.categories.empty();
  return result;
}

inline ClassificationResult classify_ecm(const ecm::EnhancedCommitMessage& ecm, const DiffSignals& signals,
                                         const rules::RuleSet& rules = rules::RuleSet::defaults()) {
  static const text::CooccurrenceExtractor extractor;
  return classify_ecm(ecm, signals, rules, extractor);
}

}  // namespace acid
