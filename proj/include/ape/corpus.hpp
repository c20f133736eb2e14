#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ape {

class Lexicon;

struct Sentence {
  int index = 0;
  std::string text;
  int token_count = 0;
  double relative_position = 0.0;  // index / (n - 1); 0 for single-sentence documents
};

struct Decision {
  std::string case_id;
  int year = 0;
  std::string court;
  std::string raw_text;
  std::vector<Sentence> sentences;
};

struct AnnotationRecord {
  std::string case_id;
  int sentence_index = 0;
  bool is_punishment = false;
  std::optional<int> months;  // present iff is_punishment
};

struct CorpusStats {
  long num_cases = 0;
  long num_sentences = 0;
  long num_words = 0;
  double sentence_length_mean = 0.0;
  double sentence_length_std = 0.0;
  long sentence_length_min = 0;
  long sentence_length_max = 0;
};

struct SegmenterOptions {
  // Tokens ending in a period that do not close a sentence.
  std::vector<std::string> abbreviations = {"ת.פ.", "ע.פ.", "ת.א.", "ע.א.", "בש.פ.", "רע.פ.",
                                            "עמ.",  "מס.",  "סע.",  "Mr.",  "Dr.",   "No.",
                                            "vs.",  "e.g.", "i.e.", "p.",   "pp.",   "Inc."};
};

std::vector<Sentence> segment_sentences(std::string_view raw_text,
                                        const SegmenterOptions &options = {});

struct LoadError {
  enum class Kind { unreadable, missing_metadata, invalid_utf8, duplicate_case_id };
  Kind kind;
  std::string file;
  std::string message;
};

struct CorpusLoad {
  std::vector<Decision> decisions;  // sorted by case_id
  std::vector<LoadError> errors;
};

// Reads every `.txt` file in `directory`; `metadata_path` is a JSON array of
// {filename, case_id, year, court}. Problems with individual files are
// collected in `errors` and loading continues. Throws ape::Error if the
// metadata file itself is missing or malformed.
CorpusLoad load_corpus(const std::filesystem::path &directory,
                       const std::filesystem::path &metadata_path,
                       const SegmenterOptions &options = {});

struct AnnotationLoad {
  std::vector<AnnotationRecord> records;
  std::vector<std::string> errors;    // rejected records, with line numbers
  std::vector<std::string> warnings;  // duplicates (last one wins)
};

AnnotationLoad parse_annotations(std::istream &in);
AnnotationLoad load_annotations(const std::filesystem::path &path);

inline constexpr int kMaxAnnotatedMonths = 1200;

CorpusStats corpus_stats(const std::vector<Decision> &decisions);

// (sentence_index, auto_negative): auto_negative is true iff the sentence
// contains none of the lexicon's filter keywords.
std::vector<std::pair<int, bool>> prelabel_negatives(const Decision &decision,
                                                     const Lexicon &lexicon);

}  // namespace ape
