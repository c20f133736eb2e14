#include "ape/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "ape/error.hpp"

namespace ape {

namespace fs = std::filesystem;

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path &path, const std::string &content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot replace " + path.string());
  }
}

Json to_json(const Sentence &s) {
  return Json{{"index", s.index}, {"text", s.text}, {"token_count", s.token_count},
              {"relative_position", s.relative_position}};
}

Json to_json(const CorpusStats &st) {
  return Json{{"num_cases", st.num_cases},
              {"num_sentences", st.num_sentences},
              {"num_words", st.num_words},
              {"sentence_length_mean", st.sentence_length_mean},
              {"sentence_length_std", st.sentence_length_std},
              {"sentence_length_min", st.sentence_length_min},
              {"sentence_length_max", st.sentence_length_max}};
}

Json to_json(const NumberSpan &span) {
  Json j{{"start_token", span.start_token}, {"end_token", span.end_token}, {"value", span.value},
         {"source", std::string(to_string(span.source))}};
  j["unit"] = span.attached_unit ? Json(std::string(to_string(*span.attached_unit))) : Json(nullptr);
  j["half"] = span.half;
  return j;
}

namespace {

template <typename T>
Json optional_json(const std::optional<T> &v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const ExtractionResult &r) {
  Json candidates = Json::array();
  for (const auto &c : r.candidates) candidates.push_back(to_json(c));
  return Json{{"case_id", r.case_id},
              {"sentence_index", optional_json(r.sentence_index)},
              {"months", optional_json(r.months)},
              {"method", std::string(to_string(r.method))},
              {"chosen_candidate", optional_json(r.chosen)},
              {"candidates", candidates}};
}

Json to_json(const PRF &p) {
  return Json{{"precision", p.precision},
              {"recall", p.recall},
              {"f1", p.f1},
              {"precision_undefined", p.precision_undefined},
              {"recall_undefined", p.recall_undefined}};
}

Json to_json(const EvaluationReport &r) {
  Json per_case = Json::array();
  for (const auto &c : r.per_case) {
    per_case.push_back(Json{
        {"case_id", c.case_id},
        {"predicted_index", optional_json(c.predicted_index)},
        {"gold_indices", c.gold_indices},
        {"stage1_predicted", c.stage1_predicted},
        {"predicted_months", optional_json(c.predicted_months)},
        {"gold_months", c.gold_months},
        {"error_category", c.error_category ? Json(std::string(to_string(*c.error_category))) : Json(nullptr)}});
  }
  Json breakdown = Json::object();
  for (const auto &[k, v] : r.error_breakdown) breakdown[k] = v;
  return Json{{"method", r.method},
              {"folds", r.folds},
              {"seed", r.seed},
              {"missing_prediction_months", 0},
              {"stage1", to_json(r.stage1)},
              {"sentence_selection_f1", r.sentence_selection_f1},
              {"ape_f1", r.ape_f1},
              {"avg_month_error", r.avg_month_error},
              {"duration_accuracy_given_correct_sentence", r.duration_accuracy_given_correct_sentence},
              {"correct_sentence_cases", r.correct_sentence_cases},
              {"error_breakdown", breakdown},
              {"fold_case_ids", r.fold_case_ids},
              {"per_case", per_case}};
}

Json to_json(const PunishmentHistogram &h) {
  Json buckets = Json::array();
  for (const auto &b : h.buckets) buckets.push_back(Json{{"start", b.start}, {"end", b.end}, {"count", b.count}});
  return Json{{"total", h.total},
              {"median", optional_json(h.median)},
              {"fraction_at_most_15", h.fraction_at_most_15},
              {"buckets", buckets}};
}

std::string histogram_csv(const PunishmentHistogram &h) {
  std::string out = "bucket_start,bucket_end,count\n";
  for (const auto &b : h.buckets) {
    out += std::to_string(b.start) + "," + std::to_string(b.end) + "," + std::to_string(b.count) + "\n";
  }
  return out;
}

namespace {

Json vec_json(const Eigen::VectorXd &v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vec_from(const Json &j, Eigen::Index expected, const char *name) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != expected) throw Error(std::string("model: bad length for ") + name);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), expected);
}

}  // namespace

Json model_to_json(const TrainedModel &m) {
  Json j{{"format", "ape-model"},
         {"format_version", kModelFormatVersion},
         {"kind", std::string(to_string(m.kind))},
         {"feature_schema_version", m.feature_schema_version},
         {"feature_dim", m.feature_dim},
         {"feature_names", Json::array()},
         {"rng_seed", m.rng_seed},
         {"token_scale", m.token_scale}};
  for (auto name : kFeatureNames) j["feature_names"].push_back(std::string(name));
  if (m.kind == ModelKind::linear_margin) {
    j["linear"] = Json{{"mean", vec_json(m.linear.mean)},
                       {"scale", vec_json(m.linear.scale)},
                       {"weights", vec_json(m.linear.weights)},
                       {"bias", m.linear.bias}};
    j["calibration"] = Json{{"a", m.calibration.a}, {"b", m.calibration.b}};
  } else {
    Json trees = Json::array();
    for (const auto &t : m.ensemble.trees) {
      Json nodes = Json::array();
      for (const auto &n : t.nodes) nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, n.vote}));
      trees.push_back(nodes);
    }
    j["trees"] = trees;
  }
  return j;
}

TrainedModel model_from_json(const Json &j) {
  try {
    if (j.value("format", "") != "ape-model") throw Error("not a model file");
    if (j.at("format_version").get<int>() != kModelFormatVersion) throw Error("unsupported model format version");
    TrainedModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.feature_schema_version = j.at("feature_schema_version").get<int>();
    m.feature_dim = j.at("feature_dim").get<int>();
    if (m.feature_schema_version != kFeatureSchemaVersion || m.feature_dim != kFeatureDim) {
      throw Error("model feature schema " + std::to_string(m.feature_schema_version) +
                  " does not match this build (" + std::to_string(kFeatureSchemaVersion) + ")");
    }
    m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    m.token_scale = j.at("token_scale").get<double>();
    if (m.kind == ModelKind::linear_margin) {
      const Json &l = j.at("linear");
      m.linear.mean = vec_from(l.at("mean"), kFeatureDim, "mean");
      m.linear.scale = vec_from(l.at("scale"), kFeatureDim, "scale");
      m.linear.weights = vec_from(l.at("weights"), kFeatureDim, "weights");
      m.linear.bias = l.at("bias").get<double>();
      m.calibration.a = j.at("calibration").at("a").get<double>();
      m.calibration.b = j.at("calibration").at("b").get<double>();
    } else {
      for (const Json &t : j.at("trees")) {
        DecisionTree tree;
        for (const Json &n : t) {
          TreeNode node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                        n.at(4).get<int>()};
          const int size = static_cast<int>(t.size());
          if (node.feature >= kFeatureDim ||
              (node.feature >= 0 && (node.left < 0 || node.left >= size || node.right < 0 || node.right >= size))) {
            throw Error("model: malformed tree node");
          }
          tree.nodes.push_back(node);
        }
        if (tree.nodes.empty()) throw Error("model: empty tree");
        m.ensemble.trees.push_back(std::move(tree));
      }
      if (m.ensemble.trees.empty()) throw Error("model: no trees");
    }
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const fs::path &path, const TrainedModel &model) {
  write_file_atomic(path, model_to_json(model).dump(2) + "\n");
}

TrainedModel load_model(const fs::path &path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception &e) {
    throw Error("malformed model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace ape
