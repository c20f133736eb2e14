#include "ape/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "ape/corpus.hpp"
#include "ape/error.hpp"

namespace ape {

using nlohmann::json;

std::string_view to_string(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::month: return "month";
    case TimeUnit::year: return "year";
    case TimeUnit::day: return "day";
  }
  return "month";
}

std::optional<TimeUnit> parse_time_unit(std::string_view name) {
  if (name == "month") return TimeUnit::month;
  if (name == "year") return TimeUnit::year;
  if (name == "day") return TimeUnit::day;
  return std::nullopt;
}

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::strong_positive: return "strong_positive";
    case Tier::moderate_positive: return "moderate_positive";
    case Tier::moderate_negative: return "moderate_negative";
    case Tier::strong_negative: return "strong_negative";
  }
  return "strong_positive";
}

Phrase make_phrase(std::string_view surface, double weight) {
  Phrase p;
  p.surface = std::string(trim(surface));
  p.weight = weight;
  p.char_marker = !p.surface.empty() && !has_alnum(p.surface);
  if (!p.char_marker) {
    for (auto &tok : tokenize(p.surface)) {
      if (!tok.norm.empty()) p.tokens.push_back(std::move(tok.norm));
    }
  }
  return p;
}

std::vector<PhraseHit> find_phrases(const std::vector<Token> &tokens, const std::vector<Phrase> &phrases) {
  std::vector<PhraseHit> hits;
  for (std::size_t pi = 0; pi < phrases.size(); ++pi) {
    const Phrase &ph = phrases[pi];
    if (ph.char_marker) {
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        const std::string raw = strip_points(tokens[t].raw);
        for (std::size_t at = raw.find(ph.surface); at != std::string::npos;
             at = raw.find(ph.surface, at + ph.surface.size())) {
          hits.push_back({static_cast<int>(t), static_cast<int>(t), pi});
        }
      }
      continue;
    }
    const std::size_t len = ph.tokens.size();
    if (len == 0 || len > tokens.size()) continue;
    for (std::size_t t = 0; t + len <= tokens.size(); ++t) {
      bool ok = true;
      for (std::size_t k = 0; k < len && ok; ++k) ok = tokens[t + k].norm == ph.tokens[k];
      if (ok) hits.push_back({static_cast<int>(t), static_cast<int>(t + len - 1), pi});
    }
  }
  std::stable_sort(hits.begin(), hits.end(), [](const PhraseHit &a, const PhraseHit &b) {
    return a.start_token < b.start_token;
  });
  return hits;
}

void NumeralLexicon::rebuild_index() {
  by_first_.clear();
  unit_only_.clear();
  dual_.clear();
  half_.clear();
  auto add = [this](const std::vector<NumeralEntry> &list, NumeralItem::Kind kind) {
    for (const auto &e : list) {
      Phrase p = make_phrase(e.surface);
      if (p.tokens.empty()) continue;
      by_first_[p.tokens.front()].push_back({p.tokens, kind, e.value});
    }
  };
  add(units, NumeralItem::Kind::unit);
  add(teens, NumeralItem::Kind::teen);
  add(tens, NumeralItem::Kind::ten);
  add(hundreds, NumeralItem::Kind::hundred);
  for (auto &[first, entries] : by_first_) {
    std::stable_sort(entries.begin(), entries.end(), [](const IndexedEntry &a, const IndexedEntry &b) {
      return a.tokens.size() > b.tokens.size();
    });
  }
  for (const auto &[surface, unit] : unit_only) unit_only_[normalize_token(surface)] = unit;
  for (const auto &[surface, unit] : dual_units) dual_[normalize_token(surface)] = unit;
  for (const auto &h : half_words) half_.push_back(normalize_token(h));
}

std::optional<NumeralItem> NumeralLexicon::match(const std::vector<Token> &tokens, std::size_t pos) const {
  if (pos >= tokens.size()) return std::nullopt;
  const std::string &first = tokens[pos].norm;
  auto try_with_first = [&](const std::string &head, bool conj) -> std::optional<NumeralItem> {
    auto it = by_first_.find(head);
    if (it == by_first_.end()) return std::nullopt;
    for (const auto &entry : it->second) {
      const std::size_t len = entry.tokens.size();
      if (pos + len > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 1; k < len && ok; ++k) ok = tokens[pos + k].norm == entry.tokens[k];
      if (ok) return NumeralItem{entry.kind, entry.value, static_cast<int>(len), conj};
    }
    return std::nullopt;
  };
  if (auto item = try_with_first(first, false)) return item;
  for (const auto &c : conjunctions) {
    if (first.size() > c.size() && first.compare(0, c.size(), c) == 0) {
      if (auto item = try_with_first(first.substr(c.size()), true)) return item;
    }
  }
  return std::nullopt;
}

std::optional<TimeUnit> NumeralLexicon::unit_only_form(std::string_view norm) const {
  auto it = unit_only_.find(std::string(norm));
  if (it == unit_only_.end()) return std::nullopt;
  return it->second;
}

std::optional<TimeUnit> NumeralLexicon::dual_form(std::string_view norm) const {
  auto it = dual_.find(std::string(norm));
  if (it == dual_.end()) return std::nullopt;
  return it->second;
}

bool NumeralLexicon::is_half(std::string_view norm) const {
  return std::find(half_.begin(), half_.end(), norm) != half_.end();
}

namespace {

const json &require(const json &doc, const char *key) {
  if (!doc.contains(key)) throw Error(std::string("lexicon is missing required section '") + key + "'");
  return doc.at(key);
}

std::vector<Phrase> parse_phrases(const json &arr, const char *name, double default_weight) {
  if (!arr.is_array()) throw Error(std::string("lexicon section '") + name + "' must be an array");
  std::vector<Phrase> out;
  for (const auto &e : arr) {
    if (e.is_string()) {
      out.push_back(make_phrase(e.get<std::string>(), default_weight));
    } else if (e.is_object() && e.contains("surface")) {
      out.push_back(make_phrase(e.at("surface").get<std::string>(), e.value("weight", default_weight)));
    } else {
      throw Error(std::string("bad entry in lexicon section '") + name + "': " + e.dump());
    }
    if (out.back().surface.empty()) throw Error(std::string("empty surface in section '") + name + "'");
  }
  return out;
}

std::vector<Phrase> optional_phrases(const json &doc, const char *key) {
  if (!doc.contains(key)) return {};
  return parse_phrases(doc.at(key), key, 0.0);
}

std::vector<NumeralEntry> parse_numerals(const json &doc, const char *key, int lo, int hi) {
  std::vector<NumeralEntry> out;
  for (const auto &e : require(doc, key)) {
    NumeralEntry n{e.at("surface").get<std::string>(), e.at("value").get<int>()};
    if (n.value < lo || n.value > hi) {
      throw Error(std::string("numeral '") + n.surface + "' in '" + key + "' has out-of-range value " +
                  std::to_string(n.value));
    }
    out.push_back(std::move(n));
  }
  return out;
}

std::vector<std::pair<std::string, TimeUnit>> parse_unit_map(const json &obj, const char *key) {
  std::vector<std::pair<std::string, TimeUnit>> out;
  if (!obj.is_object()) throw Error(std::string("lexicon section '") + key + "' must be an object");
  for (const auto &[surface, unit] : obj.items()) {
    auto u = parse_time_unit(unit.get<std::string>());
    if (!u) throw Error("unknown time unit '" + unit.get<std::string>() + "' for '" + surface + "'");
    out.emplace_back(surface, *u);
  }
  return out;
}

std::string key_of(const Phrase &p) {
  if (p.char_marker) return p.surface;
  std::string k;
  for (const auto &t : p.tokens) {
    if (!k.empty()) k += ' ';
    k += t;
  }
  return k;
}

}  // namespace

Lexicon Lexicon::from_json(const json &doc) {
  if (!doc.is_object()) throw Error("lexicon document must be an object");
  static constexpr const char *kTierNames[kTierCount] = {"strong_positive", "moderate_positive",
                                                         "moderate_negative", "strong_negative"};
  Lexicon lex;
  lex.filter_keywords_ = parse_phrases(require(doc, "filter_keywords"), "filter_keywords", 0.0);
  for (std::size_t t = 0; t < kTierCount; ++t) {
    lex.tiers_[t] = parse_phrases(require(doc, kTierNames[t]), kTierNames[t], kDefaultTierWeights[t]);
  }
  for (const auto &[surface, unit] : parse_unit_map(require(doc, "time_units"), "time_units")) {
    lex.time_units_[normalize_token(surface)] = unit;
  }
  lex.fine_markers_ = parse_phrases(require(doc, "fine_markers"), "fine_markers", 0.0);
  lex.probation_markers_ = parse_phrases(require(doc, "probation_markers"), "probation_markers", 0.0);
  lex.actual_markers_ = optional_phrases(doc, "actual_markers");
  lex.past_tense_markers_ = optional_phrases(doc, "past_tense_markers");
  lex.threshold_ = doc.value("threshold", 2.0);
  if (doc.contains("structural")) {
    const auto &s = doc.at("structural");
    lex.structural_.number_with_unit_bonus = s.value("number_with_unit_bonus", 1.0);
    lex.structural_.number_without_unit_penalty = s.value("number_without_unit_penalty", 2.0);
    lex.structural_.fine_penalty = s.value("fine_penalty", 3.0);
  }

  // Tiers must be pairwise disjoint.
  std::map<std::string, std::size_t> owner;
  std::vector<std::string> clashes;
  for (std::size_t t = 0; t < kTierCount; ++t) {
    std::set<std::string> local;
    for (const auto &p : lex.tiers_[t]) {
      const std::string k = key_of(p);
      if (!local.insert(k).second) continue;
      auto [it, inserted] = owner.emplace(k, t);
      if (!inserted) {
        clashes.push_back("'" + p.surface + "' in " + kTierNames[it->second] + " and " + kTierNames[t]);
      }
    }
  }
  if (!clashes.empty()) {
    std::string msg = "lexicon tiers overlap:";
    for (const auto &c : clashes) msg += " " + c + ";";
    throw Error(msg);
  }

  // Sign convention: strong_positive > moderate_positive > 0 > moderate_negative > strong_negative.
  auto lo = [&](std::size_t t) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto &p : lex.tiers_[t]) v = std::min(v, p.weight);
    return v;
  };
  auto hi = [&](std::size_t t) {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto &p : lex.tiers_[t]) v = std::max(v, p.weight);
    return v;
  };
  if (!(lo(0) > hi(1) && lo(1) > 0.0 && hi(2) < 0.0 && lo(2) > hi(3))) {
    throw Error("lexicon tier weights violate strong_positive > moderate_positive > 0 > "
                "moderate_negative > strong_negative");
  }

  const json &num = require(doc, "numerals");
  NumeralLexicon &n = lex.numerals_;
  n.units = parse_numerals(num, "units", 1, 10);
  n.teens = parse_numerals(num, "teens", 11, 19);
  n.tens = parse_numerals(num, "tens", 20, 90);
  for (const auto &e : n.tens) {
    if (e.value % 10 != 0) throw Error("tens numeral '" + e.surface + "' is not a multiple of ten");
  }
  n.hundreds = parse_numerals(num, "hundreds", 100, 900);
  for (const auto &e : n.hundreds) {
    if (e.value % 100 != 0) throw Error("hundreds numeral '" + e.surface + "' is not a multiple of 100");
  }
  for (const auto &c : require(num, "conjunctions")) n.conjunctions.push_back(normalize_token(c.get<std::string>()));
  n.unit_only = parse_unit_map(require(num, "unit_only"), "unit_only");
  if (num.contains("dual_units")) n.dual_units = parse_unit_map(num.at("dual_units"), "dual_units");
  if (num.contains("half_words")) {
    for (const auto &h : num.at("half_words")) n.half_words.push_back(h.get<std::string>());
  }
  n.rebuild_index();
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read lexicon file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception &e) {
    throw Error("malformed lexicon file " + path.string() + ": " + e.what());
  }
  return Lexicon::from_json(doc);
}

std::optional<TimeUnit> Lexicon::time_unit(std::string_view norm) const {
  auto it = time_units_.find(std::string(norm));
  if (it == time_units_.end()) return std::nullopt;
  return it->second;
}

bool Lexicon::has_filter_keyword(std::string_view text) const { return has_filter_keyword(tokenize(text)); }

bool Lexicon::has_filter_keyword(const std::vector<Token> &tokens) const {
  return !find_phrases(tokens, filter_keywords_).empty();
}

double TierHits::weighted_total() const {
  double s = 0.0;
  for (double w : weight_sums) s += w;
  return s;
}

TierHits match_tiers(const std::vector<Token> &tokens, const Lexicon &lexicon) {
  TierHits hits;
  for (std::size_t t = 0; t < kTierCount; ++t) {
    const auto &phrases = lexicon.tier(static_cast<Tier>(t));
    for (const auto &h : find_phrases(tokens, phrases)) {
      const Phrase &p = phrases[h.phrase];
      ++hits.counts[t];
      hits.weight_sums[t] += p.weight;
      hits.matches.push_back({static_cast<Tier>(t), h.start_token, h.end_token, p.surface, p.weight});
    }
  }
  std::stable_sort(hits.matches.begin(), hits.matches.end(),
                   [](const TierMatch &a, const TierMatch &b) { return a.start_token < b.start_token; });
  return hits;
}

TierHits match_tiers(const Sentence &sentence, const Lexicon &lexicon) {
  return match_tiers(tokenize(sentence.text), lexicon);
}

}  // namespace ape
