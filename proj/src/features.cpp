#include "ape/features.hpp"

#include <algorithm>
#include <regex>

#include "ape/numbers.hpp"

namespace ape {

namespace {

int count_dockets(const std::vector<Token> &tokens) {
  static const std::regex docket(R"(\d+/\d+)");
  int n = 0;
  for (const auto &t : tokens) {
    if (std::regex_search(t.norm, docket)) ++n;
  }
  return n;
}

}  // namespace

FeatureVector featurize(const Sentence &sentence, const Decision &decision, const Lexicon &lexicon,
                        double token_scale) {
  FeatureVector fv;
  Eigen::VectorXd &v = fv.values;
  const auto tokens = tokenize(sentence.text);
  const TierHits hits = match_tiers(tokens, lexicon);
  for (std::size_t t = 0; t < kTierCount; ++t) v[static_cast<Eigen::Index>(t)] = hits.counts[t];

  const auto spans = all_number_spans(tokens, lexicon);
  bool unit = false;
  const NumeralLexicon &numerals = lexicon.numerals();
  for (const auto &t : tokens) {
    unit = unit || lexicon.time_unit(t.norm) || numerals.unit_only_form(t.norm) || numerals.dual_form(t.norm);
  }
  v[4] = spans.empty() ? 0.0 : 1.0;
  v[5] = unit ? 1.0 : 0.0;
  v[6] = static_cast<double>(spans.size());
  v[7] = static_cast<double>(find_phrases(tokens, lexicon.fine_markers()).size());
  v[8] = static_cast<double>(find_phrases(tokens, lexicon.probation_markers()).size());
  v[9] = count_dockets(tokens);
  v[10] = static_cast<double>(find_phrases(tokens, lexicon.past_tense_markers()).size());
  v[11] = static_cast<double>(find_phrases(tokens, lexicon.actual_markers()).size());

  const std::size_t n = decision.sentences.size();
  const double rel = n > 1 ? static_cast<double>(sentence.index) / static_cast<double>(n - 1) : 0.0;
  v[12] = rel;
  v[13] = token_scale > 0.0 ? sentence.token_count / token_scale : sentence.token_count;
  v[14] = 1.0 - rel;
  return fv;
}

Eigen::MatrixXd featurize_all(const Decision &decision, const Lexicon &lexicon, double token_scale) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(decision.sentences.size()), kFeatureDim);
  for (std::size_t i = 0; i < decision.sentences.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = featurize(decision.sentences[i], decision, lexicon, token_scale).values;
  }
  return X;
}

double max_token_count(const std::vector<Decision> &decisions) {
  int m = 0;
  for (const auto &d : decisions) {
    for (const auto &s : d.sentences) m = std::max(m, s.token_count);
  }
  return m;
}

}  // namespace ape
