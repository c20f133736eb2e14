#include <doctest.h>

#include <numeric>

#include "ape/corpus.hpp"
#include "ape/error.hpp"
#include "ape/evaluation.hpp"

using namespace ape;

namespace {

const Lexicon &lex() {
  static const Lexicon l = load_lexicon(APE_TEST_LEXICON);
  return l;
}

ErrorCategory category(std::string_view text) { return categorize_error(Sentence{0, std::string(text), 0, 0.0}, lex()); }

// Expands per-item category counts into one column per rater.
Eigen::MatrixXi ratings_from_counts(const std::vector<std::vector<int>> &counts) {
  const int raters = std::accumulate(counts[0].begin(), counts[0].end(), 0);
  Eigen::MatrixXi m(static_cast<Eigen::Index>(counts.size()), raters);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    int col = 0;
    for (std::size_t c = 0; c < counts[i].size(); ++c) {
      for (int k = 0; k < counts[i][c]; ++k) m(static_cast<Eigen::Index>(i), col++) = static_cast<int>(c);
    }
  }
  return m;
}

std::set<SentenceKey> keys(std::initializer_list<SentenceKey> k) { return k; }

}  // namespace

TEST_CASE("stage-one precision, recall and F1") {
  const auto same = stage1_prf(keys({{"a", 1}, {"b", 2}}), keys({{"a", 1}, {"b", 2}}));
  CHECK(same.precision == 1.0);
  CHECK(same.recall == 1.0);
  CHECK(same.f1 == 1.0);

  const auto mixed = stage1_prf(keys({{"a", 1}, {"b", 2}, {"c", 3}}), keys({{"a", 1}, {"b", 2}, {"c", 4}}));
  CHECK(mixed.precision == doctest::Approx(2.0 / 3.0));
  CHECK(mixed.recall == doctest::Approx(2.0 / 3.0));
  CHECK(mixed.f1 == doctest::Approx(2.0 / 3.0));

  const auto none = stage1_prf({}, keys({{"a", 1}}));
  CHECK(none.precision_undefined);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);

  const auto no_gold = stage1_prf(keys({{"a", 1}}), {});
  CHECK(no_gold.recall_undefined);
  CHECK(no_gold.precision == 0.0);

  // 2 of 5 predictions correct, 2 of 4 gold found
  const auto skew = stage1_prf(keys({{"a", 1}, {"a", 2}, {"a", 3}, {"b", 1}, {"b", 2}}),
                               keys({{"a", 1}, {"b", 1}, {"c", 1}, {"c", 2}}));
  CHECK(skew.precision == doctest::Approx(0.4));
  CHECK(skew.recall == doctest::Approx(0.5));
  CHECK(skew.f1 == doctest::Approx(2 * 0.4 * 0.5 / 0.9));

  // one prediction per case and one gold per case: precision equals recall
  const auto paired = stage1_prf(keys({{"a", 1}, {"b", 1}, {"c", 9}}), keys({{"a", 1}, {"b", 2}, {"c", 9}}));
  CHECK(paired.precision == paired.recall);
}

TEST_CASE("selection F1 is the hit rate") {
  std::map<std::string, std::optional<int>> pred;
  std::map<std::string, std::set<int>> gold;
  for (int i = 0; i < 100; ++i) {
    const std::string id = "c" + std::to_string(i);
    gold[id] = {5};
    pred[id] = i < 68 ? 5 : 4;
  }
  CHECK(selection_f1(pred, gold) == doctest::Approx(0.68));

  for (auto &[k, v] : pred) v = std::nullopt;
  CHECK(selection_f1(pred, gold) == 0.0);
  for (auto &[k, v] : pred) v = 5;
  CHECK(selection_f1(pred, gold) == 1.0);

  CHECK(selection_f1({{"a", 3}}, {{"a", {1, 3}}}) == 1.0);
  CHECK(selection_f1({}, {{"a", {1}}, {"b", {2}}}) == 0.0);
  CHECK(selection_f1({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 2}}, {{"a", {1}}, {"b", {2}}, {"c", {1}}, {"d", {2}}}) ==
        0.75);
}

TEST_CASE("APE F1 and average month error") {
  const auto two = ape_f1_and_error({{"a", 30}, {"b", 12}}, {{"a", 30}, {"b", 24}});
  CHECK(two.ape_f1 == 0.5);
  CHECK(two.avg_month_error == 6.0);

  const auto exact = ape_f1_and_error({{"a", 30}, {"b", 24}}, {{"a", 30}, {"b", 24}});
  CHECK(exact.ape_f1 == 1.0);
  CHECK(exact.avg_month_error == 0.0);

  // 65 of 100 exact, the remaining 35 off by 100/7 months each: mean error 5
  std::map<std::string, std::optional<std::int64_t>> pred;
  std::map<std::string, std::int64_t> gold;
  std::int64_t total = 0;
  for (int i = 0; i < 100; ++i) {
    const std::string id = "c" + std::to_string(i);
    gold[id] = 100;
    std::int64_t off = 0;
    if (i >= 65) off = i < 90 ? 14 : 15;  // 25 * 14 + 10 * 15 = 500
    total += off;
    pred[id] = 100 + off;
  }
  REQUIRE(total == 500);
  const auto table = ape_f1_and_error(pred, gold);
  CHECK(table.ape_f1 == doctest::Approx(0.65));
  CHECK(table.avg_month_error == doctest::Approx(5.0));

  const auto missing = ape_f1_and_error({{"a", std::nullopt}}, {{"a", 18}});
  CHECK(missing.ape_f1 == 0.0);
  CHECK(missing.avg_month_error == 18.0);

  const auto zero = ape_f1_and_error({{"a", 0}, {"b", std::nullopt}}, {{"a", 0}, {"b", 0}});
  CHECK(zero.ape_f1 == 0.5);
  CHECK(zero.avg_month_error == 0.0);
}

TEST_CASE("Cohen kappa") {
  const std::vector<char> a = {'A', 'A', 'B', 'B'};
  const std::vector<char> b = {'A', 'B', 'A', 'B'};
  const KappaResult zero = cohen_kappa(a, b);
  CHECK(zero.observed == 0.5);
  CHECK(zero.expected == 0.5);
  CHECK(zero.value == 0.0);
  CHECK(cohen_kappa(a, a).value == 1.0);

  // 37 items: 9 agree on A, 22 agree on B, 3 + 3 disagreements
  std::vector<int> r4, r5;
  auto add = [&](int x, int y, int n) {
    for (int i = 0; i < n; ++i) {
      r4.push_back(x);
      r5.push_back(y);
    }
  };
  add(0, 0, 9);
  add(0, 1, 3);
  add(1, 0, 3);
  add(1, 1, 22);
  const KappaResult k = cohen_kappa(r4, r5);
  CHECK(k.value == doctest::Approx(0.63).epsilon(1e-12));
  CHECK(cohen_kappa(r5, r4).value == k.value);
  std::vector<int> relabeled = r4, relabeled5 = r5;
  for (auto &x : relabeled) x = 7 - x;
  for (auto &x : relabeled5) x = 7 - x;
  CHECK(cohen_kappa(relabeled, relabeled5).value == doctest::Approx(k.value));

  const KappaResult same = cohen_kappa(std::vector<int>{1, 1, 1}, std::vector<int>{1, 1, 1});
  CHECK(same.degenerate);
  CHECK(same.value == 1.0);
  CHECK_THROWS_AS(cohen_kappa(std::vector<int>{1}, std::vector<int>{1, 2}), Error);
  CHECK_THROWS_AS(cohen_kappa(std::vector<int>{}, std::vector<int>{}), Error);
}

TEST_CASE("Fleiss kappa") {
  // item 1: two raters say 0, one says 1; item 2: all say 1.
  // P1 = 1/3, P2 = 1, Pbar = 2/3; p = (1/3, 2/3, 0), Pe = 5/9; kappa = 1/4
  Eigen::MatrixXi small(2, 3);
  small << 0, 0, 1, 1, 1, 1;
  const KappaResult s = fleiss_kappa(small, 3);
  CHECK(s.observed == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.expected == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
  CHECK(std::abs(s.value - 0.25) < 1e-9);

  // 10 items, 14 raters, 5 categories; exact value 4211/20059
  const auto wide = ratings_from_counts({{0, 0, 0, 0, 14},
                                         {0, 2, 6, 4, 2},
                                         {0, 0, 3, 5, 6},
                                         {0, 3, 9, 2, 0},
                                         {2, 2, 8, 1, 1},
                                         {7, 7, 0, 0, 0},
                                         {3, 2, 6, 3, 0},
                                         {2, 5, 3, 2, 2},
                                         {6, 5, 2, 1, 0},
                                         {0, 2, 2, 3, 7}});
  const KappaResult w = fleiss_kappa(wide, 5);
  CHECK(std::abs(w.observed - 172.0 / 455.0) < 1e-12);
  CHECK(std::abs(w.expected - 417.0 / 1960.0) < 1e-12);
  CHECK(std::abs(w.value - 4211.0 / 20059.0) < 1e-9);

  Eigen::MatrixXi agree(4, 5);
  agree << 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 0, 0, 0, 0, 0;
  CHECK(fleiss_kappa(agree, 3).value == doctest::Approx(1.0));

  Eigen::MatrixXi unanimous = Eigen::MatrixXi::Zero(3, 4);
  const KappaResult u = fleiss_kappa(unanimous, 3);
  CHECK(u.degenerate);
  CHECK(u.value == 1.0);

  Eigen::MatrixXi missing = small;
  missing(1, 2) = -1;
  CHECK_THROWS_AS(fleiss_kappa(missing, 3), Error);
  CHECK_THROWS_AS(fleiss_kappa(small, 1), Error);
}

TEST_CASE("Fleiss with two raters shares Cohen's observed agreement") {
  const std::vector<int> a = {0, 1, 2, 1, 0, 0, 2, 1, 1, 0};
  const std::vector<int> b = {0, 1, 1, 1, 0, 2, 2, 1, 0, 0};
  Eigen::MatrixXi m(10, 2);
  for (int i = 0; i < 10; ++i) m.row(i) << a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)];
  CHECK(fleiss_kappa(m, 3).observed == doctest::Approx(cohen_kappa(a, b).observed));
}

TEST_CASE("error categories follow their precedence") {
  CHECK(category("בנוסף, 18 חודשי מאסר על תנאי.") == ErrorCategory::probation);
  CHECK(category("בת\"פ 1124/04 נגזרו על הנאשם 12 חודשי מאסר בפועל.") == ErrorCategory::prior_case_reference);
  CHECK(category("נגזרו על הנאשם 12 חודשי מאסר בפועל.") == ErrorCategory::prior_case_reference);
  CHECK(category("קנס בסך 5,000 ש\"ח או 30 ימי מאסר תמורתו.") == ErrorCategory::fine);
  CHECK(category("המאסר יחל ב-31.") == ErrorCategory::procedural);
  CHECK(category("הנאשם ישא במאסר.") == ErrorCategory::misc);
  CHECK(category("בת\"פ 1/2 הוטל מאסר על תנאי וקנס.") == ErrorCategory::probation);
}

TEST_CASE("punishment histogram") {
  auto results = [](std::vector<std::optional<std::int64_t>> months) {
    std::vector<ExtractionResult> out;
    for (auto m : months) {
      ExtractionResult r;
      r.months = m;
      out.push_back(r);
    }
    return out;
  };
  const auto h = punishment_histogram(results({6, 6, 30}), 12);
  REQUIRE(h.buckets.size() == 2);
  CHECK(h.buckets[0].start == 0);
  CHECK(h.buckets[0].end == 11);
  CHECK(h.buckets[0].count == 2);
  CHECK(h.buckets[1].start == 24);
  CHECK(h.buckets[1].count == 1);
  CHECK(h.median == 6.0);
  CHECK(h.fraction_at_most_15 == doctest::Approx(2.0 / 3.0));

  const auto empty = punishment_histogram({}, 12);
  CHECK(empty.buckets.empty());
  CHECK_FALSE(empty.median.has_value());

  CHECK(punishment_histogram(results({12, 36, 60, std::nullopt}), 12).median == 36.0);
  CHECK(punishment_histogram(results({12, 36}), 6).median == 24.0);
  CHECK_THROWS_AS(punishment_histogram({}, 0), Error);
}

TEST_CASE("gold per case uses the first positive sentence") {
  const auto gold = gold_by_case({{"a", 9, true, 6}, {"a", 4, true, 30}, {"a", 1, false, std::nullopt},
                                  {"b", 2, false, std::nullopt}});
  REQUIRE(gold.size() == 2);
  CHECK(gold.at("a").indices == std::vector<int>{4, 9});
  CHECK(gold.at("a").months == 30);
  CHECK(gold.at("b").indices.empty());
  CHECK(gold.at("b").months == 0);
}

TEST_CASE("report aggregates per-case outcomes") {
  Decision d1;
  d1.case_id = "a";
  d1.sentences = segment_sentences("בנוסף, 18 חודשי מאסר על תנאי. אנו גוזרים על הנאשם 30 חודשי מאסר בפועל.");
  Decision d2 = d1;
  d2.case_id = "b";
  Decision d3 = d1;
  d3.case_id = "c";

  EvaluationReport r;
  r.per_case = {
      {"c", std::nullopt, {1}, {}, std::nullopt, 30, std::nullopt},
      {"a", 1, {1}, {1}, 30, 30, std::nullopt},
      {"b", 0, {1}, {0, 1}, 18, 30, std::nullopt},
  };
  finalize_report(r, {d1, d2, d3}, lex());
  CHECK(r.per_case[0].case_id == "a");
  CHECK(r.sentence_selection_f1 == doctest::Approx(1.0 / 3.0));
  CHECK(r.ape_f1 == doctest::Approx(1.0 / 3.0));
  CHECK(r.avg_month_error == doctest::Approx((0.0 + 12.0 + 30.0) / 3.0));
  CHECK(r.stage1.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.stage1.recall == doctest::Approx(2.0 / 3.0));
  CHECK(r.correct_sentence_cases == 1);
  CHECK(r.duration_accuracy_given_correct_sentence == 1.0);
  CHECK_FALSE(r.per_case[0].error_category.has_value());
  CHECK(r.per_case[1].error_category == ErrorCategory::probation);
  CHECK(r.per_case[2].error_category == ErrorCategory::misc);
  double sum = 0.0;
  for (const auto &[k, v] : r.error_breakdown) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(r.error_breakdown.at("probation") == 0.5);
}
