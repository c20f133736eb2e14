#include "ape/evaluation.hpp"

#include <cmath>
#include <regex>

#include "ape/detection.hpp"
#include "ape/text.hpp"

namespace ape {

PRF stage1_prf(const std::set<SentenceKey> &predicted, const std::set<SentenceKey> &gold) {
  PRF r;
  std::size_t tp = 0;
  for (const auto &k : predicted) tp += gold.count(k);
  if (predicted.empty()) {
    r.precision_undefined = true;
  } else {
    r.precision = static_cast<double>(tp) / static_cast<double>(predicted.size());
  }
  if (gold.empty()) {
    r.recall_undefined = true;
  } else {
    r.recall = static_cast<double>(tp) / static_cast<double>(gold.size());
  }
  r.f1 = harmonic_mean(r.precision, r.recall);
  return r;
}

double selection_f1(const std::map<std::string, std::optional<int>> &predictions,
                    const std::map<std::string, std::set<int>> &gold) {
  if (gold.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto &[case_id, indices] : gold) {
    auto it = predictions.find(case_id);
    if (it != predictions.end() && it->second && indices.count(*it->second)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

ApeScores ape_f1_and_error(const std::map<std::string, std::optional<std::int64_t>> &predicted,
                           const std::map<std::string, std::int64_t> &gold) {
  ApeScores s;
  s.cases = gold.size();
  if (gold.empty()) return s;
  std::size_t exact = 0;
  double abs_err = 0.0;
  for (const auto &[case_id, months] : gold) {
    std::optional<std::int64_t> p;
    if (auto it = predicted.find(case_id); it != predicted.end()) p = it->second;
    if (p && *p == months) ++exact;
    abs_err += static_cast<double>(std::llabs(p.value_or(0) - months));
  }
  s.ape_f1 = static_cast<double>(exact) / static_cast<double>(gold.size());
  s.avg_month_error = abs_err / static_cast<double>(gold.size());
  return s;
}

KappaResult fleiss_kappa(const Eigen::MatrixXi &ratings, int num_classes) {
  const Eigen::Index items = ratings.rows();
  const Eigen::Index raters = ratings.cols();
  if (items < 1 || raters < 2) throw Error("fleiss_kappa: need at least one item and two raters");
  if (num_classes < 1) throw Error("fleiss_kappa: need at least one class");
  if ((ratings.array() < 0).any()) throw Error("fleiss_kappa: missing ratings");
  if ((ratings.array() >= num_classes).any()) throw Error("fleiss_kappa: category out of range");

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(items, num_classes);
  for (Eigen::Index i = 0; i < items; ++i) {
    for (Eigen::Index j = 0; j < raters; ++j) counts(i, ratings(i, j)) += 1.0;
  }
  const double n = static_cast<double>(raters);
  const Eigen::VectorXd per_item = (counts.array().square().rowwise().sum() - n) / (n * (n - 1.0));
  const Eigen::VectorXd proportions = counts.colwise().sum().transpose() / (static_cast<double>(items) * n);
  KappaResult r;
  r.observed = per_item.mean();
  r.expected = proportions.squaredNorm();
  if (r.expected >= 1.0 - 1e-15) {
    r.degenerate = true;
    r.value = 1.0;
    return r;
  }
  r.value = (r.observed - r.expected) / (1.0 - r.expected);
  return r;
}

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::probation: return "probation";
    case ErrorCategory::prior_case_reference: return "prior_case_reference";
    case ErrorCategory::fine: return "fine";
    case ErrorCategory::procedural: return "procedural";
    case ErrorCategory::misc: return "misc";
  }
  return "misc";
}

ErrorCategory categorize_error(const Sentence &predicted_sentence, const Lexicon &lexicon) {
  static const std::regex docket(R"(\d+/\d+)");
  const auto tokens = tokenize(predicted_sentence.text);
  if (!find_phrases(tokens, lexicon.probation_markers()).empty()) return ErrorCategory::probation;
  bool prior = !find_phrases(tokens, lexicon.past_tense_markers()).empty();
  for (const auto &t : tokens) prior = prior || std::regex_search(t.norm, docket);
  if (prior) return ErrorCategory::prior_case_reference;
  if (!find_phrases(tokens, lexicon.fine_markers()).empty()) return ErrorCategory::fine;
  const ScoredSentence scored = rule_score(predicted_sentence, lexicon);
  if (scored.has_number && !scored.has_time_unit) return ErrorCategory::procedural;
  return ErrorCategory::misc;
}

PunishmentHistogram punishment_histogram(const std::vector<ExtractionResult> &results, std::int64_t bucket_months) {
  if (bucket_months < 1) throw Error("histogram bucket width must be at least one month");
  PunishmentHistogram h;
  std::vector<std::int64_t> months;
  for (const auto &r : results) {
    if (r.months) months.push_back(*r.months);
  }
  h.total = months.size();
  if (months.empty()) return h;
  std::sort(months.begin(), months.end());
  std::map<std::int64_t, std::size_t> counts;
  std::size_t small = 0;
  for (auto m : months) {
    ++counts[m / bucket_months];
    if (m <= 15) ++small;
  }
  for (const auto &[b, c] : counts) h.buckets.push_back({b * bucket_months, b * bucket_months + bucket_months - 1, c});
  const std::size_t n = months.size();
  h.median = n % 2 == 1 ? static_cast<double>(months[n / 2])
                        : (static_cast<double>(months[n / 2 - 1]) + static_cast<double>(months[n / 2])) / 2.0;
  h.fraction_at_most_15 = static_cast<double>(small) / static_cast<double>(n);
  return h;
}

std::map<std::string, CaseGold> gold_by_case(const std::vector<AnnotationRecord> &records) {
  std::map<std::string, CaseGold> out;
  std::map<std::string, int> first_positive;
  for (const auto &r : records) {
    CaseGold &g = out[r.case_id];
    if (!r.is_punishment) continue;
    g.indices.push_back(r.sentence_index);
    auto it = first_positive.find(r.case_id);
    if (it == first_positive.end() || r.sentence_index < it->second) {
      first_positive[r.case_id] = r.sentence_index;
      g.months = r.months.value_or(0);
    }
  }
  for (auto &[id, g] : out) std::sort(g.indices.begin(), g.indices.end());
  return out;
}

void finalize_report(EvaluationReport &report, const std::vector<Decision> &decisions, const Lexicon &lexicon) {
  std::sort(report.per_case.begin(), report.per_case.end(),
            [](const CaseOutcome &a, const CaseOutcome &b) { return a.case_id < b.case_id; });
  std::map<std::string, const Decision *> by_id;
  for (const auto &d : decisions) by_id[d.case_id] = &d;

  std::set<SentenceKey> predicted, gold;
  std::map<std::string, std::optional<int>> selections;
  std::map<std::string, std::set<int>> gold_sets;
  std::map<std::string, std::optional<std::int64_t>> months;
  std::map<std::string, std::int64_t> gold_months;
  std::size_t correct = 0, correct_and_exact = 0, wrong = 0;
  std::map<std::string, std::size_t> categories;
  for (auto &c : report.per_case) {
    for (int i : c.stage1_predicted) predicted.insert({c.case_id, i});
    for (int i : c.gold_indices) gold.insert({c.case_id, i});
    selections[c.case_id] = c.predicted_index;
    gold_sets[c.case_id] = std::set<int>(c.gold_indices.begin(), c.gold_indices.end());
    months[c.case_id] = c.predicted_months;
    gold_months[c.case_id] = c.gold_months;
    const bool hit = c.predicted_index && gold_sets[c.case_id].count(*c.predicted_index);
    c.error_category.reset();
    if (hit) {
      ++correct;
      if (c.predicted_months && *c.predicted_months == c.gold_months) ++correct_and_exact;
      continue;
    }
    ++wrong;
    ErrorCategory cat = ErrorCategory::misc;
    auto it = by_id.find(c.case_id);
    if (c.predicted_index && it != by_id.end()) {
      const auto &sents = it->second->sentences;
      const auto idx = static_cast<std::size_t>(*c.predicted_index);
      if (idx < sents.size()) cat = categorize_error(sents[idx], lexicon);
    }
    c.error_category = cat;
    ++categories[std::string(to_string(cat))];
  }
  report.stage1 = stage1_prf(predicted, gold);
  report.sentence_selection_f1 = selection_f1(selections, gold_sets);
  const ApeScores ape = ape_f1_and_error(months, gold_months);
  report.ape_f1 = ape.ape_f1;
  report.avg_month_error = ape.avg_month_error;
  report.correct_sentence_cases = correct;
  report.duration_accuracy_given_correct_sentence =
      correct > 0 ? static_cast<double>(correct_and_exact) / static_cast<double>(correct) : 0.0;
  report.error_breakdown.clear();
  for (ErrorCategory cat : kErrorCategories) {
    const std::string key(to_string(cat));
    report.error_breakdown[key] =
        wrong > 0 ? static_cast<double>(categories[key]) / static_cast<double>(wrong) : 0.0;
  }
}

}  // namespace ape
