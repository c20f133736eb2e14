#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "ape/error.hpp"
#include "ape/supervised.hpp"
#include "synthetic.hpp"

using namespace ape;

namespace {

const Lexicon &lex() {
  static const Lexicon l = load_lexicon(APE_TEST_LEXICON);
  return l;
}

// Positives have a number and a strong-positive hit; everything else is noise.
void toy(std::vector<std::pair<FeatureVector, bool>> &out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 120; ++i) {
    FeatureVector fv;
    fv.values.setZero();
    const bool pos = i % 4 == 0;
    fv.values[0] = pos ? 1.0 + static_cast<double>(rng() % 2) : 0.0;
    fv.values[4] = pos || i % 3 == 0 ? 1.0 : 0.0;
    fv.values[3] = static_cast<double>(rng() % 2);
    fv.values[12] = static_cast<double>(rng() % 100) / 100.0;
    fv.values[14] = 1.0 - fv.values[12];
    out.emplace_back(fv, pos);
  }
}

double training_accuracy(const TrainedModel &m, const std::vector<std::pair<FeatureVector, bool>> &data) {
  int ok = 0;
  for (const auto &[fv, y] : data) ok += (predict_proba(m, fv) >= 0.5) == y;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("both learners fit a separable toy set") {
  std::vector<std::pair<FeatureVector, bool>> data;
  toy(data, 1);
  CHECK(training_accuracy(train(data, ModelKind::linear_margin, {}, 5), data) == 1.0);
  CHECK(training_accuracy(train(data, ModelKind::tree_ensemble, {}, 5), data) == 1.0);
}

TEST_CASE("same data and seed give identical predictions") {
  std::vector<std::pair<FeatureVector, bool>> data;
  toy(data, 2);
  for (ModelKind k : {ModelKind::linear_margin, ModelKind::tree_ensemble}) {
    const TrainedModel a = train(data, k, {}, 77);
    const TrainedModel b = train(data, k, {}, 77);
    for (const auto &[fv, y] : data) CHECK(predict_proba(a, fv) == predict_proba(b, fv));
  }
}

TEST_CASE("training input is validated") {
  std::vector<std::pair<FeatureVector, bool>> data;
  toy(data, 3);
  auto all_pos = data;
  for (auto &r : all_pos) r.second = true;
  CHECK_THROWS_AS(train(all_pos, ModelKind::linear_margin, {}, 1), Error);
  auto nan = data;
  nan[5].first.values[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(train(nan, ModelKind::tree_ensemble, {}, 1), Error);
}

TEST_CASE("prediction checks the feature schema") {
  std::vector<std::pair<FeatureVector, bool>> data;
  toy(data, 4);
  const TrainedModel m = train(data, ModelKind::linear_margin, {}, 1);
  FeatureVector old = data[0].first;
  old.schema_version = kFeatureSchemaVersion + 1;
  CHECK_THROWS_AS(predict_proba(m, old), Error);
  CHECK_THROWS_AS(predict_proba(m, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("probability definitions") {
  TrainedModel forest;
  forest.kind = ModelKind::tree_ensemble;
  for (int t = 0; t < 100; ++t) {
    DecisionTree tree;
    tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, t < 80 ? 1 : 0});
    forest.ensemble.trees.push_back(tree);
  }
  CHECK(predict_proba(forest, FeatureVector{}) == 0.8);

  TrainedModel linear;
  linear.kind = ModelKind::linear_margin;
  linear.linear.mean = Eigen::VectorXd::Zero(kFeatureDim);
  linear.linear.scale = Eigen::VectorXd::Ones(kFeatureDim);
  linear.linear.weights = Eigen::VectorXd::Zero(kFeatureDim);
  linear.linear.bias = 0.0;
  CHECK(predict_proba(linear, FeatureVector{}) == 0.5);
}

TEST_CASE("stage one thresholds, stage two takes the latest maximum") {
  const std::vector<SentenceProbability> p = {{1, 0.9}, {4, 0.6}, {7, 0.2}};
  CHECK(stage1_classify(p, 0.5) == std::vector<int>{1, 4});
  CHECK(stage1_classify(p, 0.95).empty());
  CHECK(stage1_classify(p, 0.0) == std::vector<int>{1, 4, 7});

  CHECK(stage2_argmax({{4, 0.3}, {9, 0.7}, {30, 0.7}}) == 30);
  CHECK(stage2_argmax({{5, 0.01}}) == 5);
  CHECK_FALSE(stage2_argmax({}).has_value());
}

TEST_CASE("argmax is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SentenceProbability> p;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      // coarse values make ties common
      p.push_back({i * 3, std::round(u(rng) * 8.0) / 8.0});
    }
    auto q = p;
    for (auto &x : q) x.probability = std::exp(3.0 * x.probability) / (1.0 + std::exp(3.0 * x.probability));
    CHECK(stage2_argmax(p) == stage2_argmax(q));
  }
}

TEST_CASE("folds partition the decisions") {
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("d" + std::to_string(i));
  const auto folds = make_folds(ids, 5, 3);
  REQUIRE(folds.size() == 5);
  std::multiset<std::string> all;
  for (const auto &f : folds) {
    CHECK(f.size() == 2);
    all.insert(f.begin(), f.end());
  }
  CHECK(all == std::multiset<std::string>(ids.begin(), ids.end()));
  CHECK(make_folds(ids, 5, 3) == folds);
  CHECK_THROWS_AS(make_folds({"a", "b", "c"}, 5, 1), Error);
  CHECK_THROWS_AS(make_folds(ids, 1, 1), Error);
}

TEST_CASE("cross-validation on the synthetic corpus") {
  const auto corpus = testing::make_synthetic_corpus(lex().numerals(), 20, 5);
  const auto decisions = corpus.to_decisions();
  const auto annotations = corpus.annotations();
  CVConfig cfg;
  cfg.seed = 17;
  for (ModelKind k : {ModelKind::linear_margin, ModelKind::tree_ensemble}) {
    cfg.kind = k;
    const EvaluationReport r = cross_validate(decisions, annotations, lex(), cfg);
    CHECK(r.per_case.size() == 20);
    std::set<std::string> seen;
    for (const auto &fold : r.fold_case_ids) {
      for (const auto &id : fold) CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == 20);
    CHECK(r.stage1.recall == 1.0);
    const EvaluationReport again = cross_validate(decisions, annotations, lex(), cfg);
    CHECK(again.stage1.f1 == r.stage1.f1);
    CHECK(again.ape_f1 == r.ape_f1);
  }
}

TEST_CASE("cross-validation needs at least as many decisions as folds") {
  const auto corpus = testing::make_synthetic_corpus(lex().numerals(), 3, 1);
  CVConfig cfg;
  CHECK_THROWS_WITH_AS(cross_validate(corpus.to_decisions(), corpus.annotations(), lex(), cfg),
                       doctest::Contains("fewer decisions than folds"), Error);
}
