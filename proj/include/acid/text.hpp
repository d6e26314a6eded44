#pragma once

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "acid/lexicon.hpp"

namespace acid::text {

// Sentence tokenization, pre-processing and dependent-term extraction: the
// stages that feed the rule engine.

inline bool is_sentence_delimiter(char c) {
  return c == '.' || c == '!' || c == '?' || c == ';' || c == '\n';
}

/// Splits on . ! ? ; and newlines, trims, drops blank pieces.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  auto flush = [&](std::string_view piece) {
    auto first = piece.find_first_not_of(" \t\r\f\v");
    if (first == std::string_view::npos) return;
    auto last = piece.find_last_not_of(" \t\r\f\v");
    out.emplace_back(piece.substr(first, last - first + 1));
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_sentence_delimiter(text[i])) {
      flush(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < text.size()) flush(text.substr(start));
  return out;
}

/// Lower-cases, turns every non-alphanumeric byte into a separator and splits.
/// Numeric tokens are kept.
inline std::vector<std::string> normalize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

struct Sentence {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<std::size_t> defect_anchors;  // indices into tokens
  std::set<std::string> dependent_terms;
};

/// Strategy producing the terms that depend on a sentence's defect anchors.
class DependencyExtractor {
 public:
  virtual ~DependencyExtractor() = default;
  virtual std::set<std::string> extract(const Sentence& sentence) const = 0;
};

/// Sentence-scoped co-occurrence: when the sentence has at least one defect
/// anchor, every non-anchor token depends on it.
inline std::set<std::string> dependent_terms(const Sentence& sentence) {
  std::set<std::string> terms;
  if (sentence.defect_anchors.empty()) return terms;
  std::vector<bool> is_anchor(sentence.tokens.size(), false);
  for (auto idx : sentence.defect_anchors)
    if (idx < is_anchor.size()) is_anchor[idx] = true;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
    if (!is_anchor[i]) terms.insert(sentence.tokens[i]);
  return terms;
}

class CooccurrenceExtractor final : public DependencyExtractor {
 public:
  std::set<std::string> extract(const Sentence& sentence) const override { return dependent_terms(sentence); }
};

inline Sentence make_sentence(std::string raw, const Lexicon& defect_lexicon, const DependencyExtractor& extractor) {
  Sentence s;
  s.tokens = normalize(raw);
  s.raw = std::move(raw);
  for (std::size_t i = 0; i < s.tokens.size(); ++i)
    if (defect_lexicon.matches(s.tokens[i])) s.defect_anchors.push_back(i);
  s.dependent_terms = extractor.extract(s);
  return s;
}

inline std::vector<Sentence> analyze(std::string_view text, const Lexicon& defect_lexicon,
                                     const DependencyExtractor& extractor) {
  std::vector<Sentence> out;
  for (auto& raw : split_sentences(text)) out.push_back(make_sentence(std::move(raw), defect_lexicon, extractor));
  return out;
}

inline std::vector<Sentence> analyze(std::string_view text, const Lexicon& defect_lexicon) {
  static const CooccurrenceExtractor extractor;
  return analyze(text, defect_lexicon, extractor);
}

}  // namespace acid::text
