#pragma once

#include <array>
#include <string_view>

#include <Eigen/Dense>

#include "ape/corpus.hpp"
#include "ape/lexicon.hpp"

namespace ape {

// Bump whenever the dimension list below changes.
inline constexpr int kFeatureSchemaVersion = 1;
inline constexpr int kFeatureDim = 15;

inline constexpr std::array<std::string_view, kFeatureDim> kFeatureNames = {
    "strong_positive",     "moderate_positive",  "moderate_negative",        "strong_negative",
    "has_number",          "has_time_unit",      "number_count",             "fine_markers",
    "probation_markers",   "docket_markers",     "past_tense_markers",       "actual_markers",
    "relative_position",   "token_count_scaled", "distance_to_document_end",
};

struct FeatureVector {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(kFeatureDim);
  int schema_version = kFeatureSchemaVersion;
};

// `token_scale` is the corpus-wide maximum sentence length used to scale the
// token count into [0, 1]; values <= 0 leave counts unscaled.
FeatureVector featurize(const Sentence &sentence, const Decision &decision, const Lexicon &lexicon,
                        double token_scale = 1.0);

// Rows are featurize() outputs for every sentence of `decision`.
Eigen::MatrixXd featurize_all(const Decision &decision, const Lexicon &lexicon, double token_scale);

double max_token_count(const std::vector<Decision> &decisions);

}  // namespace ape
