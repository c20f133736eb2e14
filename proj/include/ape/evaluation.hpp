#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ape/corpus.hpp"
#include "ape/error.hpp"
#include "ape/extraction.hpp"
#include "ape/lexicon.hpp"

namespace ape {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // no predictions
  bool recall_undefined = false;     // no gold items
};

using SentenceKey = std::pair<std::string, int>;

// Micro-averaged set precision / recall / F1. Undefined ratios are reported
// as 0 with the matching flag set.
PRF stage1_prf(const std::set<SentenceKey> &predicted, const std::set<SentenceKey> &gold);

inline double harmonic_mean(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

// One prediction per gold case; a case is a hit iff its predicted index is
// among its gold indices. With exactly one prediction per case precision
// equals recall, so F1 is the hit rate.
double selection_f1(const std::map<std::string, std::optional<int>> &predictions,
                    const std::map<std::string, std::set<int>> &gold);

struct ApeScores {
  double ape_f1 = 0.0;
  double avg_month_error = 0.0;  // missing predictions count as 0 months
  std::size_t cases = 0;
};

ApeScores ape_f1_and_error(const std::map<std::string, std::optional<std::int64_t>> &predicted,
                           const std::map<std::string, std::int64_t> &gold);

struct KappaResult {
  double value = 0.0;
  double observed = 0.0;  // p_o
  double expected = 0.0;  // p_e
  bool degenerate = false;  // p_e == 1
};

// Cohen's kappa for two raters over any equality-comparable label type.
template <typename Label>
KappaResult cohen_kappa(const std::vector<Label> &a, const std::vector<Label> &b) {
  if (a.size() != b.size()) throw Error("cohen_kappa: rating vectors differ in length");
  if (a.empty()) throw Error("cohen_kappa: no ratings");
  const double n = static_cast<double>(a.size());
  std::vector<Label> labels(a.begin(), a.end());
  labels.insert(labels.end(), b.begin(), b.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) agree += a[i] == b[i] ? 1.0 : 0.0;
  KappaResult r;
  r.observed = agree / n;
  for (const Label &l : labels) {
    const double pa = static_cast<double>(std::count(a.begin(), a.end(), l)) / n;
    const double pb = static_cast<double>(std::count(b.begin(), b.end(), l)) / n;
    r.expected += pa * pb;
  }
  if (r.expected >= 1.0) {
    r.degenerate = true;
    r.value = r.observed >= 1.0 ? 1.0 : 0.0;
    return r;
  }
  r.value = (r.observed - r.expected) / (1.0 - r.expected);
  return r;
}

// Fleiss' kappa. `ratings(i, j)` is rater j's category for item i, in
// [0, num_classes); negative entries mean a missing rating and are rejected.
KappaResult fleiss_kappa(const Eigen::MatrixXi &ratings, int num_classes);

enum class ErrorCategory { probation, prior_case_reference, fine, procedural, misc };
std::string_view to_string(ErrorCategory c);
inline constexpr std::array<ErrorCategory, 5> kErrorCategories = {
    ErrorCategory::probation, ErrorCategory::prior_case_reference, ErrorCategory::fine,
    ErrorCategory::procedural, ErrorCategory::misc};

// First matching of: probation marker, docket number or past-tense
// sentencing verb, fine marker, number without time unit; else misc.
ErrorCategory categorize_error(const Sentence &predicted_sentence, const Lexicon &lexicon);

struct HistogramBucket {
  std::int64_t start = 0;
  std::int64_t end = 0;  // inclusive
  std::size_t count = 0;
};

struct PunishmentHistogram {
  std::vector<HistogramBucket> buckets;  // non-empty buckets only, ascending
  std::optional<double> median;
  double fraction_at_most_15 = 0.0;
  std::size_t total = 0;
};

PunishmentHistogram punishment_histogram(const std::vector<ExtractionResult> &results, std::int64_t bucket_months);

struct CaseOutcome {
  std::string case_id;
  std::optional<int> predicted_index;
  std::vector<int> gold_indices;
  std::vector<int> stage1_predicted;
  std::optional<std::int64_t> predicted_months;
  std::int64_t gold_months = 0;
  std::optional<ErrorCategory> error_category;
};

struct EvaluationReport {
  std::string method;
  int folds = 0;
  std::uint64_t seed = 0;
  PRF stage1;
  double sentence_selection_f1 = 0.0;
  double ape_f1 = 0.0;
  double avg_month_error = 0.0;
  double duration_accuracy_given_correct_sentence = 0.0;
  std::size_t correct_sentence_cases = 0;
  std::map<std::string, double> error_breakdown;
  std::vector<std::vector<std::string>> fold_case_ids;
  std::vector<CaseOutcome> per_case;
};

// Gold for one decision from its annotation records: positive sentence
// indices and the months of the first positive sentence (0 if none).
struct CaseGold {
  std::vector<int> indices;
  std::int64_t months = 0;
};
std::map<std::string, CaseGold> gold_by_case(const std::vector<AnnotationRecord> &records);

// Fills every aggregate field from per-case outcomes. Wrong selections get
// an error category from the predicted sentence (misc when nothing was
// predicted).
void finalize_report(EvaluationReport &report, const std::vector<Decision> &decisions, const Lexicon &lexicon);

}  // namespace ape
