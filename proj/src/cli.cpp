#include "ape/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ape/corpus.hpp"
#include "ape/detection.hpp"
#include "ape/error.hpp"
#include "ape/evaluation.hpp"
#include "ape/extraction.hpp"
#include "ape/io.hpp"
#include "ape/lexicon.hpp"
#include "ape/supervised.hpp"

#ifndef APE_DEFAULT_LEXICON
#define APE_DEFAULT_LEXICON "data/lexicon/default.json"
#endif

namespace ape {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string corpus_dir;
  std::string metadata_path;
  std::string lexicon_path;
  std::string annotations_path;
  std::string model_path;
  std::string method = "svm";
  std::uint64_t seed = 0;
  std::string output_path;
  int folds = 5;
  double stage1_threshold = 0.5;
  int jobs = 1;
  bool rule_based = false;
  std::string histogram_path;
  int bucket_months = 12;

  std::optional<double> threshold;
  std::optional<double> unit_bonus;
  std::optional<double> no_unit_penalty;
  std::optional<double> fine_penalty;
  int unit_window = 3;
  int marker_window = 4;

  int trees = 100;
  int max_depth = 0;
  int min_leaf = 1;
  double lambda = 1e-3;
  int epochs = 60;
};

std::string resolve_lexicon_path(const RunConfig &cfg) {
  if (!cfg.lexicon_path.empty()) return cfg.lexicon_path;
  if (const char *env = std::getenv("APE_LEXICON"); env && *env) return env;
  return APE_DEFAULT_LEXICON;
}

Lexicon lexicon_for(const RunConfig &cfg) {
  Lexicon lex = load_lexicon(resolve_lexicon_path(cfg));
  if (cfg.threshold) lex.set_threshold(*cfg.threshold);
  StructuralWeights w = lex.structural();
  if (cfg.unit_bonus) w.number_with_unit_bonus = *cfg.unit_bonus;
  if (cfg.no_unit_penalty) w.number_without_unit_penalty = *cfg.no_unit_penalty;
  if (cfg.fine_penalty) w.fine_penalty = *cfg.fine_penalty;
  lex.set_structural(w);
  return lex;
}

ExtractOptions extract_options(const RunConfig &cfg) {
  ExtractOptions o;
  o.numbers.unit_window = cfg.unit_window;
  o.weights.marker_window = cfg.marker_window;
  return o;
}

TrainConfig train_config(const RunConfig &cfg) {
  TrainConfig t;
  t.linear.lambda = cfg.lambda;
  t.linear.epochs = cfg.epochs;
  t.trees.trees = cfg.trees;
  t.trees.max_depth = cfg.max_depth;
  t.trees.min_leaf = cfg.min_leaf;
  t.trees.jobs = cfg.jobs;
  return t;
}

std::vector<Decision> corpus_for(const RunConfig &cfg) {
  const fs::path meta =
      cfg.metadata_path.empty() ? fs::path(cfg.corpus_dir) / "metadata.json" : fs::path(cfg.metadata_path);
  CorpusLoad load = load_corpus(cfg.corpus_dir, meta);
  for (const auto &e : load.errors) std::cerr << "warning: " << e.file << ": " << e.message << "\n";
  return std::move(load.decisions);
}

std::vector<AnnotationRecord> annotations_for(const RunConfig &cfg) {
  AnnotationLoad load = load_annotations(cfg.annotations_path);
  for (const auto &w : load.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto &e : load.errors) std::cerr << "error: " << e << "\n";
  if (!load.errors.empty()) throw Error("annotation file has invalid records");
  return std::move(load.records);
}

void emit(const RunConfig &cfg, const std::string &content) {
  if (cfg.output_path.empty() || cfg.output_path == "-") {
    std::cout << content;
  } else {
    write_file_atomic(cfg.output_path, content);
  }
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index writes its
// own slot, so output order never depends on scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double training_scale(const std::vector<const Decision *> &docs) {
  double scale = 0.0;
  for (const Decision *d : docs) {
    for (const auto &s : d->sentences) scale = std::max(scale, static_cast<double>(s.token_count));
  }
  return scale > 0.0 ? scale : 1.0;
}

void cmd_segment(const RunConfig &cfg) {
  const auto decisions = corpus_for(cfg);
  Json out = Json::array();
  for (const auto &d : decisions) {
    Json sentences = Json::array();
    for (const auto &s : d.sentences) sentences.push_back(to_json(s));
    out.push_back(Json{{"case_id", d.case_id}, {"year", d.year}, {"court", d.court}, {"sentences", sentences}});
  }
  emit(cfg, out.dump(2) + "\n");
}

void cmd_prelabel(const RunConfig &cfg) {
  const auto decisions = corpus_for(cfg);
  const Lexicon lex = lexicon_for(cfg);
  std::vector<std::string> chunks(decisions.size());
  parallel_for(decisions.size(), cfg.jobs, [&](std::size_t i) {
    const Decision &d = decisions[i];
    for (const auto &[idx, negative] : prelabel_negatives(d, lex)) {
      Json rec{{"case_id", d.case_id}, {"sentence_index", idx}, {"auto_negative", negative}};
      rec["is_punishment"] = negative ? Json(false) : Json(nullptr);
      chunks[i] += rec.dump() + "\n";
    }
  });
  std::string out;
  for (const auto &c : chunks) out += c;
  emit(cfg, out);
}

void cmd_detect(const RunConfig &cfg) {
  const auto decisions = corpus_for(cfg);
  const Lexicon lex = lexicon_for(cfg);
  std::optional<TrainedModel> model;
  if (!cfg.model_path.empty()) model = load_model(cfg.model_path);
  std::vector<Json> records(decisions.size());
  parallel_for(decisions.size(), cfg.jobs, [&](std::size_t i) {
    const Decision &d = decisions[i];
    Json rec{{"case_id", d.case_id}, {"sentence_index", nullptr}, {"score", nullptr}, {"text", nullptr}};
    std::optional<int> idx;
    if (model) {
      const auto probs = candidate_probabilities(*model, d, lex);
      idx = stage2_argmax(probs);
      for (const auto &p : probs) {
        if (idx && p.sentence_index == *idx) rec["score"] = p.probability;
      }
    } else if (auto best = detect_rule_based(d, lex)) {
      idx = best->sentence_index;
      rec["score"] = best->score;
    }
    if (idx) {
      rec["sentence_index"] = *idx;
      rec["text"] = d.sentences[static_cast<std::size_t>(*idx)].text;
    }
    records[i] = std::move(rec);
  });
  emit(cfg, Json(records).dump(2) + "\n");
}

void cmd_train(const RunConfig &cfg) {
  if (cfg.output_path.empty() || cfg.output_path == "-") throw Error("train requires --out");
  const auto decisions = corpus_for(cfg);
  const auto records = annotations_for(cfg);
  const Lexicon lex = lexicon_for(cfg);
  const ModelKind kind = parse_model_kind(cfg.method);
  const auto gold = gold_by_case(records);
  std::vector<const Decision *> docs;
  for (const auto &d : decisions) {
    if (gold.count(d.case_id)) docs.push_back(&d);
  }
  if (docs.empty()) throw Error("no annotated decisions in the corpus");
  const double scale = training_scale(docs);
  const TrainingSet ts = build_training_set(docs, gold, lex, scale);
  TrainedModel model = train(ts.X, ts.labels, kind, train_config(cfg), cfg.seed);
  model.token_scale = scale;
  save_model(cfg.output_path, model);
}

void cmd_extract(const RunConfig &cfg) {
  if (cfg.rule_based == !cfg.model_path.empty()) throw Error("extract needs exactly one of --rule-based or --model");
  const auto decisions = corpus_for(cfg);
  const Lexicon lex = lexicon_for(cfg);
  const ExtractOptions opts = extract_options(cfg);
  std::optional<TrainedModel> model;
  if (!cfg.model_path.empty()) model = load_model(cfg.model_path);
  std::vector<ExtractionResult> results(decisions.size());
  parallel_for(decisions.size(), cfg.jobs, [&](std::size_t i) {
    const Decision &d = decisions[i];
    const std::optional<int> idx = model ? stage2_argmax(*model, d, lex) : select_sentence_rule_based(d, lex);
    results[i] = extract(d, idx, lex, opts);
  });
  Json out = Json::array();
  for (const auto &r : results) out.push_back(to_json(r));
  emit(cfg, out.dump(2) + "\n");
  if (!cfg.histogram_path.empty()) {
    write_file_atomic(cfg.histogram_path, histogram_csv(punishment_histogram(results, cfg.bucket_months)));
  }
}

void cmd_eval(const RunConfig &cfg) {
  const auto decisions = corpus_for(cfg);
  const auto records = annotations_for(cfg);
  const Lexicon lex = lexicon_for(cfg);
  EvaluationReport report;
  if (cfg.method == "rule_based") {
    report = evaluate_rule_based(decisions, records, lex, extract_options(cfg));
  } else {
    CVConfig cv;
    cv.num_folds = cfg.folds;
    cv.seed = cfg.seed;
    cv.stage1_threshold = cfg.stage1_threshold;
    cv.kind = parse_model_kind(cfg.method);
    cv.train = train_config(cfg);
    cv.extract = extract_options(cfg);
    report = cross_validate(decisions, records, lex, cv);
  }
  emit(cfg, to_json(report).dump(2) + "\n");
}

void cmd_stats(const RunConfig &cfg) {
  const auto decisions = corpus_for(cfg);
  emit(cfg, to_json(corpus_stats(decisions)).dump(2) + "\n");
}

void add_corpus(CLI::App *sub, RunConfig &cfg) {
  sub->add_option("--corpus", cfg.corpus_dir, "directory of decision .txt files")->required();
  sub->add_option("--metadata", cfg.metadata_path, "metadata file (default: CORPUS/metadata.json)");
  sub->add_option("--out", cfg.output_path, "output file (default: stdout)");
}

void add_lexicon(CLI::App *sub, RunConfig &cfg) {
  sub->add_option("--lexicon", cfg.lexicon_path, "lexicon file (default: $APE_LEXICON or the bundled one)");
  sub->add_option("--threshold", cfg.threshold, "rule score threshold");
  sub->add_option("--unit-bonus", cfg.unit_bonus, "bonus for a number with a time unit");
  sub->add_option("--no-unit-penalty", cfg.no_unit_penalty, "penalty for a number without a time unit");
  sub->add_option("--fine-penalty", cfg.fine_penalty, "penalty for a fine marker");
  sub->add_option("--unit-window", cfg.unit_window, "max tokens between number and unit")->check(CLI::Range(0, 50));
  sub->add_option("--marker-window", cfg.marker_window, "max tokens between marker and number")
      ->check(CLI::Range(0, 50));
}

void add_jobs(CLI::App *sub, RunConfig &cfg) {
  sub->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::Range(1, 1024));
}

void add_learner(CLI::App *sub, RunConfig &cfg) {
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--trees", cfg.trees, "trees in the forest")->check(CLI::Range(1, 100000));
  sub->add_option("--max-depth", cfg.max_depth, "tree depth limit, 0 for none")->check(CLI::NonNegativeNumber);
  sub->add_option("--min-leaf", cfg.min_leaf, "minimum samples per leaf")->check(CLI::PositiveNumber);
  sub->add_option("--lambda", cfg.lambda, "L2 strength of the margin classifier")->check(CLI::PositiveNumber);
  sub->add_option("--epochs", cfg.epochs, "passes of the margin classifier")->check(CLI::PositiveNumber);
}

}  // namespace

int run(int argc, char **argv) {
  CLI::App app{"Punishment extraction for Hebrew sentencing decisions"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto *segment = app.add_subcommand("segment", "split decisions into sentences");
  add_corpus(segment, cfg);

  auto *prelabel = app.add_subcommand("prelabel", "mark sentences without filter keywords as negatives");
  add_corpus(prelabel, cfg);
  add_lexicon(prelabel, cfg);
  add_jobs(prelabel, cfg);

  auto *detect = app.add_subcommand("detect", "select the punishment sentence of each decision");
  add_corpus(detect, cfg);
  add_lexicon(detect, cfg);
  add_jobs(detect, cfg);
  detect->add_option("--model", cfg.model_path, "trained model (default: rule-based)");

  auto *train_cmd = app.add_subcommand("train", "fit a sentence classifier");
  add_corpus(train_cmd, cfg);
  add_lexicon(train_cmd, cfg);
  add_jobs(train_cmd, cfg);
  add_learner(train_cmd, cfg);
  train_cmd->add_option("--annotations", cfg.annotations_path, "annotation records")->required();
  train_cmd->add_option("--model", cfg.method, "svm or rf")->check(CLI::IsMember({"svm", "rf"}));

  auto *extract_cmd = app.add_subcommand("extract", "extract imprisonment durations");
  add_corpus(extract_cmd, cfg);
  add_lexicon(extract_cmd, cfg);
  add_jobs(extract_cmd, cfg);
  extract_cmd->add_option("--model", cfg.model_path, "trained model");
  extract_cmd->add_flag("--rule-based", cfg.rule_based, "use the rule-based detector");
  extract_cmd->add_option("--histogram", cfg.histogram_path, "also write a CSV histogram of months");
  extract_cmd->add_option("--bucket-months", cfg.bucket_months, "histogram bucket width")
      ->check(CLI::PositiveNumber);

  auto *eval = app.add_subcommand("eval", "score a method against annotations");
  add_corpus(eval, cfg);
  add_lexicon(eval, cfg);
  add_jobs(eval, cfg);
  add_learner(eval, cfg);
  eval->add_option("--annotations", cfg.annotations_path, "annotation records")->required();
  eval->add_option("--method", cfg.method, "rule_based, svm or rf")
      ->check(CLI::IsMember({"rule_based", "svm", "rf"}));
  eval->add_option("--folds", cfg.folds, "cross-validation folds");
  eval->add_option("--stage1-threshold", cfg.stage1_threshold, "probability threshold for stage 1")
      ->check(CLI::Range(0.0, 1.0));

  auto *stats = app.add_subcommand("stats", "corpus statistics");
  add_corpus(stats, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*segment) cmd_segment(cfg);
    else if (*prelabel) cmd_prelabel(cfg);
    else if (*detect) cmd_detect(cfg);
    else if (*train_cmd) cmd_train(cfg);
    else if (*extract_cmd) cmd_extract(cfg);
    else if (*eval) cmd_eval(cfg);
    else if (*stats) cmd_stats(cfg);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace ape
