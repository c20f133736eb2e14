#include <doctest.h>

#include "ape/corpus.hpp"
#include "ape/features.hpp"
#include "ape/lexicon.hpp"

using namespace ape;

namespace {

const Lexicon &lex() {
  static const Lexicon l = load_lexicon(APE_TEST_LEXICON);
  return l;
}

Decision sample() {
  Decision d;
  d.case_id = "f";
  d.sentences = segment_sentences(
      "הנאשם הורשע. בת\"פ 1124/04 נגזרו עליו 12 חודשי מאסר וקנס. אנו גוזרים ומטילים על הנאשם 30 חודשי מאסר "
      "בפועל ומאסר על תנאי.");
  return d;
}

}  // namespace

TEST_CASE("feature names and dimension agree") {
  CHECK(kFeatureNames.size() == static_cast<std::size_t>(kFeatureDim));
  CHECK(FeatureVector{}.values.size() == kFeatureDim);
}

TEST_CASE("counts and indicators") {
  const Decision d = sample();
  const Eigen::VectorXd gold = featurize(d.sentences[2], d, lex()).values;
  CHECK(gold[0] == 1.0);  // גוזרים; ומטילים is not listed
  CHECK(gold[1] == 1.0);
  CHECK(gold[4] == 1.0);
  CHECK(gold[5] == 1.0);
  CHECK(gold[6] == 1.0);
  CHECK(gold[8] == 1.0);
  CHECK(gold[11] == 1.0);
  CHECK(gold[12] == 1.0);
  CHECK(gold[14] == 0.0);

  const Eigen::VectorXd prior = featurize(d.sentences[1], d, lex()).values;
  CHECK(prior[2] == 1.0);  // "/"
  CHECK(prior[7] == 1.0);
  CHECK(prior[9] == 1.0);
  CHECK(prior[10] == 1.0);
  CHECK(prior[12] == 0.5);
}

TEST_CASE("empty sentence has zero counts and defined positions") {
  Decision d = sample();
  const Sentence empty{1, "", 0, 0.5};
  const Eigen::VectorXd v = featurize(empty, d, lex()).values;
  for (int i = 0; i < 12; ++i) CHECK(v[i] == 0.0);
  CHECK(v[12] == 0.5);
  CHECK(v[14] == 0.5);
  CHECK(v.allFinite());
}

TEST_CASE("token count is scaled by the corpus maximum") {
  const Decision d = sample();
  const double scale = max_token_count({d});
  CHECK(scale == static_cast<double>(d.sentences[2].token_count));
  const Eigen::MatrixXd X = featurize_all(d, lex(), scale);
  CHECK(X.rows() == 3);
  CHECK(X(2, 13) == 1.0);
  CHECK(X.col(13).maxCoeff() <= 1.0);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    for (int c : {4, 5}) CHECK((X(r, c) == 0.0 || X(r, c) == 1.0));
  }
}
