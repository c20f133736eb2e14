#include "ape/extraction.hpp"

#include <algorithm>
#include <cmath>

#include "ape/text.hpp"

namespace ape {

std::string_view to_string(ExtractionMethod m) {
  switch (m) {
    case ExtractionMethod::decomposition: return "decomposition";
    case ExtractionMethod::scored: return "scored";
    case ExtractionMethod::none: return "none";
  }
  return "none";
}

std::optional<std::int64_t> try_decomposition(const std::vector<NumberSpan> &spans) {
  std::vector<std::int64_t> months;
  for (const auto &s : spans) {
    if (auto m = span_months(s)) months.push_back(*m);
  }
  if (months.size() != 3) return std::nullopt;
  if (months[0] != months[1] + months[2]) return std::nullopt;
  return months[1];
}

namespace {

// Tokens allowed between a span's unit and a trailing marker, e.g. the
// imprisonment noun in "30 חודשי מאסר בפועל".
bool is_filler(const Token &t, const Lexicon &lexicon) {
  if (t.norm.empty()) return true;
  if (lexicon.numerals().is_half(t.norm)) return true;
  return lexicon.has_filter_keyword(std::vector<Token>{t});
}

struct Attachment {
  std::size_t span;
  int distance;
};

std::optional<Attachment> attach_marker(const PhraseHit &hit, const std::vector<Token> &tokens,
                                        const std::vector<NumberSpan> &spans, const Lexicon &lexicon,
                                        int window) {
  // Trailing modifier of the closest preceding duration.
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].end_token < hit.start_token) prev = i;
  }
  if (prev && spans[*prev].has_unit()) {
    const NumberSpan &p = spans[*prev];
    const int anchor = std::max(p.end_token, p.unit_token);
    if (anchor < hit.start_token) {
      bool ok = true;
      for (int t = anchor + 1; t < hit.start_token && ok; ++t) ok = is_filler(tokens[t], lexicon);
      if (ok) return Attachment{*prev, hit.start_token - anchor - 1};
    }
  }
  // Otherwise a leading modifier of the next span within the window.
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].start_token > hit.end_token) {
      const int gap = spans[i].start_token - hit.end_token - 1;
      if (gap <= window) return Attachment{i, gap};
      break;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<SpanScore> score_spans(const std::vector<Token> &tokens, const std::vector<NumberSpan> &spans,
                                   const Lexicon &lexicon, const ExtractionWeights &weights) {
  std::vector<SpanScore> scores(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) scores[i].span = i;

  auto apply = [&](const std::vector<Phrase> &markers, double weight, double SpanScore::*field) {
    for (const auto &hit : find_phrases(tokens, markers)) {
      auto a = attach_marker(hit, tokens, spans, lexicon, weights.marker_window);
      if (!a) continue;
      const double v = weight / (1.0 + a->distance);
      double &slot = scores[a->span].*field;
      if (std::abs(v) > std::abs(slot)) slot = v;
    }
  };
  apply(lexicon.actual_markers(), weights.actual_marker, &SpanScore::actual);
  apply(lexicon.probation_markers(), weights.probation_marker, &SpanScore::probation);
  apply(lexicon.fine_markers(), weights.fine_marker, &SpanScore::fine);

  const double last = tokens.size() > 1 ? static_cast<double>(tokens.size() - 1) : 1.0;
  std::vector<SpanScore> out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (!spans[i].has_unit()) continue;
    SpanScore s = scores[i];
    s.unit = weights.unit_proximity / (1.0 + spans[i].unit_distance);
    s.position = weights.position * static_cast<double>(spans[i].start_token) / last;
    out.push_back(s);
  }
  return out;
}

std::optional<ScoredChoice> score_duration_candidates(const std::vector<Token> &tokens,
                                                      const std::vector<NumberSpan> &spans,
                                                      const Lexicon &lexicon,
                                                      const ExtractionWeights &weights) {
  std::optional<SpanScore> best;
  for (const auto &s : score_spans(tokens, spans, lexicon, weights)) {
    if (!best || s.total() >= best->total()) best = s;
  }
  if (!best) return std::nullopt;
  return ScoredChoice{*span_months(spans[best->span]), best->span};
}

std::optional<std::int64_t> score_duration_candidates(const Sentence &sentence,
                                                      const std::vector<NumberSpan> &spans,
                                                      const Lexicon &lexicon,
                                                      const ExtractionWeights &weights) {
  auto choice = score_duration_candidates(tokenize(sentence.text), spans, lexicon, weights);
  if (!choice) return std::nullopt;
  return choice->months;
}

ExtractionResult extract_sentence(std::string_view text, const Lexicon &lexicon, const ExtractOptions &options) {
  ExtractionResult r;
  const auto tokens = tokenize(text);
  r.candidates = all_number_spans(tokens, lexicon, options.numbers);
  if (auto x = try_decomposition(r.candidates)) {
    r.months = *x;
    r.method = ExtractionMethod::decomposition;
    // X is the second unit-bearing span.
    int seen = 0;
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      if (r.candidates[i].has_unit() && ++seen == 2) {
        r.chosen = static_cast<int>(i);
        break;
      }
    }
    return r;
  }
  if (auto c = score_duration_candidates(tokens, r.candidates, lexicon, options.weights)) {
    r.months = c->months;
    r.method = ExtractionMethod::scored;
    r.chosen = static_cast<int>(c->span);
  }
  return r;
}

ExtractionResult extract(const Decision &decision, std::optional<int> sentence_index, const Lexicon &lexicon,
                         const ExtractOptions &options) {
  ExtractionResult r;
  if (sentence_index && *sentence_index >= 0 &&
      *sentence_index < static_cast<int>(decision.sentences.size())) {
    r = extract_sentence(decision.sentences[static_cast<std::size_t>(*sentence_index)].text, lexicon, options);
    r.sentence_index = sentence_index;
  }
  r.case_id = decision.case_id;
  return r;
}

}  // namespace ape
