#include "ape/detection.hpp"

#include "ape/numbers.hpp"
#include "ape/text.hpp"

namespace ape {

std::vector<Sentence> filter_candidates(const Decision &decision, const Lexicon &lexicon) {
  std::vector<Sentence> out;
  for (const auto &s : decision.sentences) {
    if (s.token_count == 0) continue;
    if (lexicon.has_filter_keyword(s.text)) out.push_back(s);
  }
  return out;
}

ScoredSentence rule_score(const Sentence &sentence, const Lexicon &lexicon) {
  const auto tokens = tokenize(sentence.text);
  ScoredSentence out;
  out.sentence_index = sentence.index;
  out.tier_hits = match_tiers(tokens, lexicon);
  out.has_number = !all_number_spans(tokens, lexicon).empty();
  const NumeralLexicon &numerals = lexicon.numerals();
  for (const auto &t : tokens) {
    if (lexicon.time_unit(t.norm) || numerals.unit_only_form(t.norm) || numerals.dual_form(t.norm)) {
      out.has_time_unit = true;
      break;
    }
  }
  out.fine_marker_count = static_cast<int>(find_phrases(tokens, lexicon.fine_markers()).size());

  const StructuralWeights &w = lexicon.structural();
  double structural = 0.0;
  if (out.has_number && out.has_time_unit) structural += w.number_with_unit_bonus;
  if (out.has_number && !out.has_time_unit) structural -= w.number_without_unit_penalty;
  if (out.fine_marker_count > 0) structural -= w.fine_penalty;
  out.structural = structural;
  out.score = out.tier_hits.weighted_total() + structural;
  return out;
}

std::optional<ScoredSentence> detect_rule_based(const Decision &decision, const Lexicon &lexicon) {
  std::optional<ScoredSentence> best;
  for (const auto &s : filter_candidates(decision, lexicon)) {
    ScoredSentence scored = rule_score(s, lexicon);
    if (scored.score < lexicon.threshold()) continue;
    // Candidates arrive in document order, so >= keeps the later one on ties.
    if (!best || scored.score >= best->score) best = std::move(scored);
  }
  return best;
}

std::optional<int> select_sentence_rule_based(const Decision &decision, const Lexicon &lexicon) {
  auto best = detect_rule_based(decision, lexicon);
  if (!best) return std::nullopt;
  return best->sentence_index;
}

}  // namespace ape
