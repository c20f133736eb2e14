#include "ape/supervised.hpp"

#include <algorithm>
#include <cmath>

#include "ape/detection.hpp"
#include "ape/error.hpp"
#include "ape/rng.hpp"

namespace ape {

std::string_view to_string(ModelKind k) {
  return k == ModelKind::linear_margin ? "linear_margin" : "tree_ensemble";
}

std::string_view method_name(ModelKind k) { return k == ModelKind::linear_margin ? "svm" : "rf"; }

ModelKind parse_model_kind(std::string_view s) {
  if (s == "svm" || s == "linear_margin") return ModelKind::linear_margin;
  if (s == "rf" || s == "tree_ensemble") return ModelKind::tree_ensemble;
  throw Error("unknown model kind '" + std::string(s) + "'");
}

TrainedModel train(const Eigen::MatrixXd &X, const std::vector<int> &labels, ModelKind kind,
                   const TrainConfig &config, std::uint64_t seed) {
  if (static_cast<std::size_t>(X.rows()) != labels.size()) throw Error("train: feature rows and labels differ");
  if (X.cols() != kFeatureDim) throw Error("train: feature dimension mismatch");
  if (!X.allFinite()) throw Error("train: non-finite feature value");
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error("train: labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (positives == 0 || positives == labels.size()) throw Error("train: need both positive and negative examples");

  TrainedModel m;
  m.kind = kind;
  m.rng_seed = seed;
  if (kind == ModelKind::linear_margin) {
    m.linear = fit_linear_margin(X, labels, config.linear, seed);
    m.calibration = fit_sigmoid(m.linear.margins(X), labels);
  } else {
    m.ensemble = fit_tree_ensemble(X, labels, config.trees, seed);
  }
  return m;
}

TrainedModel train(const std::vector<std::pair<FeatureVector, bool>> &records, ModelKind kind,
                   const TrainConfig &config, std::uint64_t seed) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(records.size()), kFeatureDim);
  std::vector<int> labels;
  labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &[fv, y] = records[i];
    if (fv.schema_version != kFeatureSchemaVersion || fv.values.size() != kFeatureDim) {
      throw Error("train: feature schema mismatch");
    }
    X.row(static_cast<Eigen::Index>(i)) = fv.values;
    labels.push_back(y ? 1 : 0);
  }
  return train(X, labels, kind, config, seed);
}

double predict_proba(const TrainedModel &model, const Eigen::VectorXd &x) {
  if (x.size() != model.feature_dim) throw Error("predict_proba: feature dimension mismatch");
  if (model.kind == ModelKind::linear_margin) return model.calibration(model.linear.margin(x));
  return model.ensemble.probability(x);
}

double predict_proba(const TrainedModel &model, const FeatureVector &fv) {
  if (fv.schema_version != model.feature_schema_version) {
    throw Error("predict_proba: feature schema version " + std::to_string(fv.schema_version) +
                " does not match model schema " + std::to_string(model.feature_schema_version));
  }
  return predict_proba(model, fv.values);
}

std::vector<SentenceProbability> candidate_probabilities(const TrainedModel &model, const Decision &decision,
                                                         const Lexicon &lexicon) {
  std::vector<SentenceProbability> out;
  for (const Sentence &s : filter_candidates(decision, lexicon)) {
    out.push_back({s.index, predict_proba(model, featurize(s, decision, lexicon, model.token_scale))});
  }
  return out;
}

std::vector<int> stage1_classify(const std::vector<SentenceProbability> &probs, double threshold) {
  std::vector<int> out;
  for (const auto &p : probs) {
    if (p.probability >= threshold) out.push_back(p.sentence_index);
  }
  return out;
}

std::vector<int> stage1_classify(const TrainedModel &model, const Decision &decision, const Lexicon &lexicon,
                                 double threshold) {
  return stage1_classify(candidate_probabilities(model, decision, lexicon), threshold);
}

std::optional<int> stage2_argmax(const std::vector<SentenceProbability> &probs) {
  const SentenceProbability *best = nullptr;
  for (const auto &p : probs) {
    if (!best || p.probability > best->probability ||
        (p.probability == best->probability && p.sentence_index > best->sentence_index)) {
      best = &p;
    }
  }
  if (!best) return std::nullopt;
  return best->sentence_index;
}

std::optional<int> stage2_argmax(const TrainedModel &model, const Decision &decision, const Lexicon &lexicon) {
  return stage2_argmax(candidate_probabilities(model, decision, lexicon));
}

TrainingSet build_training_set(const std::vector<const Decision *> &decisions,
                               const std::map<std::string, CaseGold> &gold, const Lexicon &lexicon,
                               double token_scale) {
  Eigen::Index rows = 0;
  for (const Decision *d : decisions) rows += static_cast<Eigen::Index>(d->sentences.size());
  TrainingSet ts;
  ts.X.resize(rows, kFeatureDim);
  ts.labels.reserve(static_cast<std::size_t>(rows));
  Eigen::Index r = 0;
  for (const Decision *d : decisions) {
    const CaseGold *g = nullptr;
    if (auto it = gold.find(d->case_id); it != gold.end()) g = &it->second;
    for (const Sentence &s : d->sentences) {
      ts.X.row(r++) = featurize(s, *d, lexicon, token_scale).values;
      const bool pos = g && std::find(g->indices.begin(), g->indices.end(), s.index) != g->indices.end();
      ts.labels.push_back(pos ? 1 : 0);
    }
  }
  return ts;
}

std::vector<std::vector<std::string>> make_folds(std::vector<std::string> case_ids, int num_folds,
                                                 std::uint64_t seed) {
  if (num_folds < 2) throw Error("need at least 2 folds");
  if (case_ids.size() < static_cast<std::size_t>(num_folds)) {
    throw Error("fewer decisions than folds (" + std::to_string(case_ids.size()) + " < " +
                std::to_string(num_folds) + ")");
  }
  std::sort(case_ids.begin(), case_ids.end());
  std::mt19937_64 rng(derive_seed(seed, 0x666f6c6473ULL));
  shuffle_in_place(case_ids, rng);
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(num_folds));
  for (std::size_t i = 0; i < case_ids.size(); ++i) folds[i % folds.size()].push_back(case_ids[i]);
  for (auto &f : folds) std::sort(f.begin(), f.end());
  return folds;
}

namespace {

std::vector<const Decision *> annotated(const std::vector<Decision> &decisions,
                                        const std::map<std::string, CaseGold> &gold) {
  std::vector<const Decision *> out;
  for (const auto &d : decisions) {
    if (gold.count(d.case_id)) out.push_back(&d);
  }
  std::sort(out.begin(), out.end(), [](const Decision *a, const Decision *b) { return a->case_id < b->case_id; });
  return out;
}

CaseOutcome outcome_for(const Decision &d, const CaseGold &g) {
  CaseOutcome c;
  c.case_id = d.case_id;
  c.gold_indices = g.indices;
  c.gold_months = g.months;
  return c;
}

}  // namespace

EvaluationReport cross_validate(const std::vector<Decision> &decisions,
                                const std::vector<AnnotationRecord> &annotations, const Lexicon &lexicon,
                                const CVConfig &config) {
  const auto gold = gold_by_case(annotations);
  const auto pool = annotated(decisions, gold);
  std::vector<std::string> ids;
  for (const Decision *d : pool) ids.push_back(d->case_id);

  EvaluationReport report;
  report.method = std::string(method_name(config.kind));
  report.folds = config.num_folds;
  report.seed = config.seed;
  report.fold_case_ids = make_folds(ids, config.num_folds, config.seed);

  for (std::size_t f = 0; f < report.fold_case_ids.size(); ++f) {
    const auto &test_ids = report.fold_case_ids[f];
    std::vector<const Decision *> train_docs, test_docs;
    for (const Decision *d : pool) {
      const bool in_test = std::binary_search(test_ids.begin(), test_ids.end(), d->case_id);
      (in_test ? test_docs : train_docs).push_back(d);
    }
    double scale = 0.0;
    for (const Decision *d : train_docs) {
      for (const auto &s : d->sentences) scale = std::max(scale, static_cast<double>(s.token_count));
    }
    if (scale <= 0.0) scale = 1.0;
    const TrainingSet ts = build_training_set(train_docs, gold, lexicon, scale);
    TrainedModel model = train(ts.X, ts.labels, config.kind, config.train, derive_seed(config.seed, f));
    model.token_scale = scale;

    for (const Decision *d : test_docs) {
      CaseOutcome c = outcome_for(*d, gold.at(d->case_id));
      const auto probs = candidate_probabilities(model, *d, lexicon);
      c.stage1_predicted = stage1_classify(probs, config.stage1_threshold);
      c.predicted_index = stage2_argmax(probs);
      c.predicted_months = extract(*d, c.predicted_index, lexicon, config.extract).months;
      report.per_case.push_back(std::move(c));
    }
  }
  finalize_report(report, decisions, lexicon);
  return report;
}

EvaluationReport evaluate_rule_based(const std::vector<Decision> &decisions,
                                     const std::vector<AnnotationRecord> &annotations, const Lexicon &lexicon,
                                     const ExtractOptions &options) {
  const auto gold = gold_by_case(annotations);
  EvaluationReport report;
  report.method = "rule_based";
  for (const Decision *d : annotated(decisions, gold)) {
    CaseOutcome c = outcome_for(*d, gold.at(d->case_id));
    std::optional<ScoredSentence> best;
    for (const Sentence &s : filter_candidates(*d, lexicon)) {
      ScoredSentence sc = rule_score(s, lexicon);
      if (sc.score < lexicon.threshold()) continue;
      c.stage1_predicted.push_back(s.index);
      if (!best || sc.score >= best->score) best = sc;
    }
    if (best) c.predicted_index = best->sentence_index;
    c.predicted_months = extract(*d, c.predicted_index, lexicon, options).months;
    report.per_case.push_back(std::move(c));
  }
  finalize_report(report, decisions, lexicon);
  return report;
}

}  // namespace ape
