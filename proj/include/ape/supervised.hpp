#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ape/corpus.hpp"
#include "ape/evaluation.hpp"
#include "ape/extraction.hpp"
#include "ape/features.hpp"
#include "ape/lexicon.hpp"
#include "ape/linear_margin.hpp"
#include "ape/tree_ensemble.hpp"

namespace ape {

enum class ModelKind { linear_margin, tree_ensemble };
std::string_view to_string(ModelKind k);
// Accepts "svm" / "linear_margin" and "rf" / "tree_ensemble".
ModelKind parse_model_kind(std::string_view s);
// Short CLI name: "svm" or "rf".
std::string_view method_name(ModelKind k);

struct TrainConfig {
  LinearMarginConfig linear;
  TreeEnsembleConfig trees;
};

struct TrainedModel {
  ModelKind kind = ModelKind::linear_margin;
  int feature_schema_version = kFeatureSchemaVersion;
  int feature_dim = kFeatureDim;
  std::uint64_t rng_seed = 0;
  double token_scale = 1.0;  // corpus max sentence length seen at training time
  LinearMargin linear;
  SigmoidCalibration calibration;  // linear_margin only
  TreeEnsemble ensemble;           // tree_ensemble only
};

// Labels are 0/1, one per row of X. Throws ape::Error on single-class
// input, non-finite features or a row/label count mismatch.
TrainedModel train(const Eigen::MatrixXd &X, const std::vector<int> &labels, ModelKind kind,
                   const TrainConfig &config, std::uint64_t seed);
TrainedModel train(const std::vector<std::pair<FeatureVector, bool>> &records, ModelKind kind,
                   const TrainConfig &config, std::uint64_t seed);

// Throws ape::Error when the vector's schema or dimension does not match.
double predict_proba(const TrainedModel &model, const FeatureVector &fv);
double predict_proba(const TrainedModel &model, const Eigen::VectorXd &x);

struct SentenceProbability {
  int sentence_index = 0;
  double probability = 0.0;
};

// Probabilities for the keyword-filtered candidates of `decision`, in order.
std::vector<SentenceProbability> candidate_probabilities(const TrainedModel &model, const Decision &decision,
                                                         const Lexicon &lexicon);

std::vector<int> stage1_classify(const std::vector<SentenceProbability> &probs, double threshold);
std::vector<int> stage1_classify(const TrainedModel &model, const Decision &decision, const Lexicon &lexicon,
                                 double threshold);

// Argmax over probabilities; ties go to the later sentence.
std::optional<int> stage2_argmax(const std::vector<SentenceProbability> &probs);
std::optional<int> stage2_argmax(const TrainedModel &model, const Decision &decision, const Lexicon &lexicon);

struct TrainingSet {
  Eigen::MatrixXd X;
  std::vector<int> labels;
};

// Every sentence of every decision that has gold; sentences not annotated
// positive are negatives.
TrainingSet build_training_set(const std::vector<const Decision *> &decisions,
                               const std::map<std::string, CaseGold> &gold, const Lexicon &lexicon,
                               double token_scale);

struct CVConfig {
  int num_folds = 5;
  std::uint64_t seed = 0;
  double stage1_threshold = 0.5;
  ModelKind kind = ModelKind::linear_margin;
  TrainConfig train;
  ExtractOptions extract;
};

// Seeded shuffle of the ids, dealt round-robin into `num_folds` folds; each
// fold is returned sorted.
std::vector<std::vector<std::string>> make_folds(std::vector<std::string> case_ids, int num_folds,
                                                 std::uint64_t seed);

// Document-level cross-validation over the decisions that have annotations.
// Throws ape::Error when there are fewer such decisions than folds.
EvaluationReport cross_validate(const std::vector<Decision> &decisions,
                                const std::vector<AnnotationRecord> &annotations, const Lexicon &lexicon,
                                const CVConfig &config);

// Rule-based pipeline scored against the same gold.
EvaluationReport evaluate_rule_based(const std::vector<Decision> &decisions,
                                     const std::vector<AnnotationRecord> &annotations, const Lexicon &lexicon,
                                     const ExtractOptions &options = {});

}  // namespace ape
