#include <doctest.h>

#include <filesystem>

#include "ape/error.hpp"
#include "ape/io.hpp"
#include "synthetic.hpp"

using namespace ape;
namespace fs = std::filesystem;

namespace {

const Lexicon &lex() {
  static const Lexicon l = load_lexicon(APE_TEST_LEXICON);
  return l;
}

TrainedModel small_model(ModelKind kind) {
  const auto corpus = testing::make_synthetic_corpus(lex().numerals(), 6, 21);
  const auto decisions = corpus.to_decisions();
  const auto gold = gold_by_case(corpus.annotations());
  std::vector<const Decision *> docs;
  for (const auto &d : decisions) docs.push_back(&d);
  const double scale = max_token_count(decisions);
  const TrainingSet ts = build_training_set(docs, gold, lex(), scale);
  TrainConfig cfg;
  cfg.trees.trees = 7;
  TrainedModel m = train(ts.X, ts.labels, kind, cfg, 4);
  m.token_scale = scale;
  return m;
}

}  // namespace

TEST_CASE("atomic writes replace the target and leave no temporary") {
  const fs::path dir = fs::temp_directory_path() / "ape_io_atomic";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path p = dir / "out.json";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  CHECK(read_file(p) == "two");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
  CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "x", "y"), Error);
  CHECK_THROWS_AS(read_file(dir / "nope"), Error);
}

TEST_CASE("models survive a save and load") {
  const auto corpus = testing::make_synthetic_corpus(lex().numerals(), 3, 8);
  const auto decisions = corpus.to_decisions();
  for (ModelKind k : {ModelKind::linear_margin, ModelKind::tree_ensemble}) {
    const TrainedModel m = small_model(k);
    const TrainedModel back = model_from_json(Json::parse(model_to_json(m).dump()));
    CHECK(back.kind == k);
    CHECK(back.rng_seed == 4);
    for (const auto &d : decisions) {
      const auto a = candidate_probabilities(m, d, lex());
      const auto b = candidate_probabilities(back, d, lex());
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].probability == b[i].probability);
    }
    CHECK(model_to_json(back).dump() == model_to_json(m).dump());
  }
}

TEST_CASE("model files are versioned") {
  Json j = model_to_json(small_model(ModelKind::linear_margin));
  Json wrong_schema = j;
  wrong_schema["feature_schema_version"] = kFeatureSchemaVersion + 1;
  CHECK_THROWS_AS(model_from_json(wrong_schema), Error);
  Json wrong_format = j;
  wrong_format["format_version"] = 99;
  CHECK_THROWS_AS(model_from_json(wrong_format), Error);
  Json truncated = j;
  truncated["linear"]["weights"] = Json::array({1.0});
  CHECK_THROWS_AS(model_from_json(truncated), Error);
  CHECK_THROWS_AS(model_from_json(Json::object()), Error);
}

TEST_CASE("report and histogram serialization") {
  EvaluationReport r;
  r.method = "rule_based";
  r.per_case.push_back({"a", std::nullopt, {2}, {}, std::nullopt, 12, ErrorCategory::misc});
  const Json j = to_json(r);
  CHECK(j["per_case"][0]["predicted_index"].is_null());
  CHECK(j["per_case"][0]["error_category"] == "misc");
  for (const char *key : {"stage1", "sentence_selection_f1", "ape_f1", "avg_month_error",
                          "duration_accuracy_given_correct_sentence", "error_breakdown", "per_case"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }

  PunishmentHistogram h;
  h.buckets = {{0, 11, 2}, {24, 35, 1}};
  CHECK(histogram_csv(h) == "bucket_start,bucket_end,count\n0,11,2\n24,35,1\n");
}
