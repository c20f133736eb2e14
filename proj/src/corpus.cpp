#include "ape/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ape/error.hpp"
#include "ape/lexicon.hpp"
#include "ape/text.hpp"

namespace ape {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// The whitespace-delimited token that ends at position `end` (inclusive).
std::string_view token_ending_at(std::string_view text, std::size_t end) {
  std::size_t b = end;
  while (b > 0 && !is_ws(text[b - 1])) --b;
  return text.substr(b, end - b + 1);
}

}  // namespace

std::vector<Sentence> segment_sentences(std::string_view raw_text, const SegmenterOptions &options) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::size_t i = 0;
  const std::size_t n = raw_text.size();
  auto flush = [&](std::size_t end) {
    auto piece = trim(raw_text.substr(start, end - start));
    if (!piece.empty()) pieces.emplace_back(piece);
    start = end;
  };
  while (i < n) {
    const char c = raw_text[i];
    if (!is_terminator(c)) {
      ++i;
      continue;
    }
    // A terminator glued to the next character (decimals, dates, docket
    // forms such as 31.12.2004 or ת.פ) never closes a sentence.
    std::size_t j = i;
    while (j < n && is_terminator(raw_text[j])) ++j;
    std::size_t k = j;
    while (k < n && is_closer(raw_text[k])) ++k;
    const bool at_boundary = k == n || is_ws(raw_text[k]);
    if (!at_boundary) {
      i = j;
      continue;
    }
    if (c == '.' && j == i + 1) {
      const auto tok = token_ending_at(raw_text, i);
      const bool abbrev = std::find(options.abbreviations.begin(), options.abbreviations.end(),
                                    tok) != options.abbreviations.end();
      if (abbrev) {
        i = j;
        continue;
      }
    }
    flush(k);
    i = k;
  }
  flush(n);

  std::vector<Sentence> out;
  out.reserve(pieces.size());
  const double denom = pieces.size() > 1 ? static_cast<double>(pieces.size() - 1) : 1.0;
  for (std::size_t idx = 0; idx < pieces.size(); ++idx) {
    Sentence s;
    s.index = static_cast<int>(idx);
    s.text = std::move(pieces[idx]);
    s.token_count = static_cast<int>(count_tokens(s.text));
    s.relative_position = pieces.size() > 1 ? static_cast<double>(idx) / denom : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

CorpusLoad load_corpus(const fs::path &directory, const fs::path &metadata_path,
                       const SegmenterOptions &options) {
  if (!fs::is_directory(directory)) {
    throw Error("corpus directory not found: " + directory.string());
  }
  std::ifstream meta_in(metadata_path);
  if (!meta_in) throw Error("cannot read metadata file: " + metadata_path.string());
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::exception &e) {
    throw Error("malformed metadata file " + metadata_path.string() + ": " + e.what());
  }
  if (!meta.is_array()) throw Error("metadata file must hold a JSON array: " + metadata_path.string());

  struct Meta {
    std::string case_id;
    int year;
    std::string court;
  };
  std::map<std::string, Meta> by_file;
  for (const auto &entry : meta) {
    if (!entry.is_object() || !entry.contains("filename") || !entry.contains("case_id")) {
      throw Error("metadata entry needs filename and case_id: " + entry.dump());
    }
    Meta m{entry.at("case_id").get<std::string>(), entry.value("year", 0),
           entry.value("court", std::string())};
    if (m.case_id.empty()) throw Error("empty case_id in metadata entry: " + entry.dump());
    by_file[entry.at("filename").get<std::string>()] = std::move(m);
  }

  std::vector<fs::path> files;
  for (const auto &de : fs::directory_iterator(directory)) {
    if (de.path().extension() == ".txt") files.push_back(de.path());
  }
  std::sort(files.begin(), files.end());

  CorpusLoad result;
  std::map<std::string, std::string> seen_ids;
  for (const auto &file : files) {
    const std::string name = file.filename().string();
    auto it = by_file.find(name);
    if (it == by_file.end()) {
      result.errors.push_back({LoadError::Kind::missing_metadata, name,
                               "no metadata entry for file " + name});
      continue;
    }
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      result.errors.push_back({LoadError::Kind::unreadable, name, "cannot read file " + name});
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
      result.errors.push_back({LoadError::Kind::unreadable, name, "cannot read file " + name});
      continue;
    }
    std::string text = buf.str();
    if (auto bad = find_invalid_utf8(text)) {
      result.errors.push_back({LoadError::Kind::invalid_utf8, name,
                               name + ": invalid UTF-8 at byte offset " + std::to_string(*bad)});
      continue;
    }
    const Meta &m = it->second;
    if (auto dup = seen_ids.find(m.case_id); dup != seen_ids.end()) {
      result.errors.push_back({LoadError::Kind::duplicate_case_id, name,
                               "case_id " + m.case_id + " already used by " + dup->second});
      continue;
    }
    seen_ids.emplace(m.case_id, name);
    Decision d;
    d.case_id = m.case_id;
    d.year = m.year;
    d.court = m.court;
    d.sentences = segment_sentences(text, options);
    d.raw_text = std::move(text);
    result.decisions.push_back(std::move(d));
  }
  std::sort(result.decisions.begin(), result.decisions.end(),
            [](const Decision &a, const Decision &b) { return a.case_id < b.case_id; });
  return result;
}

AnnotationLoad parse_annotations(std::istream &in) {
  AnnotationLoad out;
  std::map<std::pair<std::string, int>, std::size_t> position;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception &e) {
      out.errors.push_back(where + "malformed record: " + e.what());
      continue;
    }
    if (!obj.is_object() || !obj.contains("case_id") || !obj.contains("sentence_index") ||
        !obj.contains("is_punishment") || !obj["case_id"].is_string() ||
        !obj["sentence_index"].is_number_integer() || !obj["is_punishment"].is_boolean()) {
      out.errors.push_back(where + "record needs case_id, sentence_index and is_punishment");
      continue;
    }
    AnnotationRecord rec;
    rec.case_id = obj["case_id"].get<std::string>();
    rec.sentence_index = obj["sentence_index"].get<int>();
    rec.is_punishment = obj["is_punishment"].get<bool>();
    if (rec.case_id.empty() || rec.sentence_index < 0) {
      out.errors.push_back(where + "empty case_id or negative sentence_index");
      continue;
    }
    if (obj.contains("months") && !obj["months"].is_null()) {
      if (!obj["months"].is_number_integer()) {
        out.errors.push_back(where + "months must be an integer");
        continue;
      }
      const long long m = obj["months"].get<long long>();
      if (!rec.is_punishment) {
        out.errors.push_back(where + "months given for a non-punishment sentence");
        continue;
      }
      if (m < 0) {
        out.errors.push_back(where + "negative months");
        continue;
      }
      if (m > kMaxAnnotatedMonths) {
        out.errors.push_back(where + "months above " + std::to_string(kMaxAnnotatedMonths));
        continue;
      }
      rec.months = static_cast<int>(m);
    } else if (rec.is_punishment) {
      out.errors.push_back(where + "punishment sentence without months");
      continue;
    }
    auto key = std::make_pair(rec.case_id, rec.sentence_index);
    if (auto it = position.find(key); it != position.end()) {
      out.warnings.push_back(where + "duplicate record for " + rec.case_id + "#" +
                             std::to_string(rec.sentence_index) + ", keeping the last one");
      out.records[it->second] = std::move(rec);
    } else {
      position.emplace(std::move(key), out.records.size());
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

AnnotationLoad load_annotations(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read annotations file: " + path.string());
  return parse_annotations(in);
}

CorpusStats corpus_stats(const std::vector<Decision> &decisions) {
  CorpusStats st;
  st.num_cases = static_cast<long>(decisions.size());
  double sum = 0.0;
  bool first = true;
  for (const auto &d : decisions) {
    for (const auto &s : d.sentences) {
      ++st.num_sentences;
      st.num_words += s.token_count;
      sum += s.token_count;
      if (first || s.token_count < st.sentence_length_min) st.sentence_length_min = s.token_count;
      if (first || s.token_count > st.sentence_length_max) st.sentence_length_max = s.token_count;
      first = false;
    }
  }
  if (st.num_sentences == 0) return st;
  st.sentence_length_mean = sum / static_cast<double>(st.num_sentences);
  double ss = 0.0;
  for (const auto &d : decisions) {
    for (const auto &s : d.sentences) {
      const double dev = s.token_count - st.sentence_length_mean;
      ss += dev * dev;
    }
  }
  st.sentence_length_std = std::sqrt(ss / static_cast<double>(st.num_sentences));
  return st;
}

std::vector<std::pair<int, bool>> prelabel_negatives(const Decision &decision,
                                                     const Lexicon &lexicon) {
  std::vector<std::pair<int, bool>> out;
  out.reserve(decision.sentences.size());
  for (const auto &s : decision.sentences) {
    out.emplace_back(s.index, !lexicon.has_filter_keyword(s.text));
  }
  return out;
}

}  // namespace ape
