#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ape/corpus.hpp"
#include "ape/evaluation.hpp"
#include "ape/extraction.hpp"
#include "ape/supervised.hpp"

namespace ape {

using Json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

std::string read_file(const std::filesystem::path &path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

Json to_json(const Sentence &s);
Json to_json(const CorpusStats &stats);
Json to_json(const NumberSpan &span);
Json to_json(const ExtractionResult &r);
Json to_json(const PRF &prf);
Json to_json(const EvaluationReport &report);
Json to_json(const PunishmentHistogram &h);

// bucket_start,bucket_end,count rows under a header line.
std::string histogram_csv(const PunishmentHistogram &h);

Json model_to_json(const TrainedModel &model);
// Throws ape::Error on unknown format versions, kinds or schema mismatch.
TrainedModel model_from_json(const Json &j);

void save_model(const std::filesystem::path &path, const TrainedModel &model);
TrainedModel load_model(const std::filesystem::path &path);

}  // namespace ape
