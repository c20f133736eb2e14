#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ape/corpus.hpp"
#include "ape/lexicon.hpp"
#include "ape/numbers.hpp"

namespace ape {

// Weights for ranking duration candidates inside one sentence. There is no
// absolute threshold: the best span in the sentence wins.
struct ExtractionWeights {
  double unit_proximity = 2.0;  // / (1 + unit_distance)
  double actual_marker = 3.0;   // / (1 + distance), marker attached to the span
  double probation_marker = -3.0;
  double fine_marker = -3.0;
  double position = 0.5;  // * start_token / (n_tokens - 1)
  int marker_window = 4;  // max tokens between a leading marker and its span
};

enum class ExtractionMethod { decomposition, scored, none };
std::string_view to_string(ExtractionMethod m);

struct ExtractionResult {
  std::string case_id;
  std::optional<int> sentence_index;
  std::optional<std::int64_t> months;
  ExtractionMethod method = ExtractionMethod::none;
  std::vector<NumberSpan> candidates;
  std::optional<int> chosen;  // index into candidates
};

// With exactly three unit-bearing spans Z, X, Y (token order) and
// months(Z) == months(X) + months(Y), returns months(X).
std::optional<std::int64_t> try_decomposition(const std::vector<NumberSpan> &spans);

struct SpanScore {
  std::size_t span = 0;
  double unit = 0.0;
  double actual = 0.0;
  double probation = 0.0;
  double fine = 0.0;
  double position = 0.0;
  double total() const { return unit + actual + probation + fine + position; }
};

// Scores every unit-bearing span; unit-less spans are not candidates.
std::vector<SpanScore> score_spans(const std::vector<Token> &tokens, const std::vector<NumberSpan> &spans,
                                   const Lexicon &lexicon, const ExtractionWeights &weights = {});

struct ScoredChoice {
  std::int64_t months = 0;
  std::size_t span = 0;
};

std::optional<ScoredChoice> score_duration_candidates(const std::vector<Token> &tokens,
                                                      const std::vector<NumberSpan> &spans,
                                                      const Lexicon &lexicon,
                                                      const ExtractionWeights &weights = {});
std::optional<std::int64_t> score_duration_candidates(const Sentence &sentence,
                                                      const std::vector<NumberSpan> &spans,
                                                      const Lexicon &lexicon,
                                                      const ExtractionWeights &weights = {});

struct ExtractOptions {
  ExtractionWeights weights;
  NumberOptions numbers;
};

ExtractionResult extract(const Decision &decision, std::optional<int> sentence_index, const Lexicon &lexicon,
                         const ExtractOptions &options = {});

// Extraction applied to one sentence text, outside any decision.
ExtractionResult extract_sentence(std::string_view text, const Lexicon &lexicon,
                                  const ExtractOptions &options = {});

}  // namespace ape
