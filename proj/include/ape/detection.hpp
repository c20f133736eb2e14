#pragma once

#include <optional>
#include <vector>

#include "ape/corpus.hpp"
#include "ape/lexicon.hpp"

namespace ape {

struct ScoredSentence {
  int sentence_index = 0;
  double score = 0.0;
  TierHits tier_hits;
  bool has_number = false;
  bool has_time_unit = false;
  int fine_marker_count = 0;
  double structural = 0.0;  // score - tier_hits.weighted_total()
};

// Non-empty sentences containing at least one filter keyword, in order.
std::vector<Sentence> filter_candidates(const Decision &decision, const Lexicon &lexicon);

ScoredSentence rule_score(const Sentence &sentence, const Lexicon &lexicon);

// Highest-scoring candidate at or above the lexicon threshold; ties go to
// the later sentence.
std::optional<ScoredSentence> detect_rule_based(const Decision &decision, const Lexicon &lexicon);
std::optional<int> select_sentence_rule_based(const Decision &decision, const Lexicon &lexicon);

}  // namespace ape
