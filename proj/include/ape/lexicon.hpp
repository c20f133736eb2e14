#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ape/text.hpp"

namespace ape {

struct Sentence;

enum class TimeUnit { month, year, day };

std::string_view to_string(TimeUnit unit);
std::optional<TimeUnit> parse_time_unit(std::string_view name);

// Keyword tiers used by the rule scorer, in a fixed order.
enum class Tier { strong_positive = 0, moderate_positive, moderate_negative, strong_negative };
inline constexpr std::size_t kTierCount = 4;
std::string_view to_string(Tier tier);

inline constexpr std::array<double, kTierCount> kDefaultTierWeights = {3.0, 1.0, -1.0, -3.0};

// A lexicon surface form pre-split into normalized tokens. Entries made only
// of punctuation (docket markers such as "/") match anywhere in the raw text.
struct Phrase {
  std::string surface;
  std::vector<std::string> tokens;
  bool char_marker = false;
  double weight = 0.0;
};

Phrase make_phrase(std::string_view surface, double weight = 0.0);

struct PhraseHit {
  int start_token = 0;
  int end_token = 0;  // inclusive
  std::size_t phrase = 0;
};

// All occurrences of any phrase in `phrases` within `tokens` (and `raw` for
// character markers), ordered by start token.
std::vector<PhraseHit> find_phrases(const std::vector<Token> &tokens, const std::vector<Phrase> &phrases);

struct NumeralEntry {
  std::string surface;
  int value = 0;
};

struct NumeralItem {
  enum class Kind { unit, teen, ten, hundred };
  Kind kind = Kind::unit;
  int value = 0;
  int length = 1;     // tokens consumed
  bool conj = false;  // first token carried an "and" prefix
};

// Hebrew number words. Within each list the first entry for a value is its
// canonical spelling; later entries are spelling or gender variants.
struct NumeralLexicon {
  std::vector<NumeralEntry> units;     // 1..10
  std::vector<NumeralEntry> teens;     // 11..19, usually two tokens
  std::vector<NumeralEntry> tens;      // 20..90
  std::vector<NumeralEntry> hundreds;  // 100..900
  std::vector<std::string> conjunctions;
  std::vector<std::pair<std::string, TimeUnit>> unit_only;   // bare singular units, value 1
  std::vector<std::pair<std::string, TimeUnit>> dual_units;  // dual forms, value 2
  std::vector<std::string> half_words;

  // Must be called after the lists change; lookups use the index.
  void rebuild_index();

  std::optional<NumeralItem> match(const std::vector<Token> &tokens, std::size_t pos) const;
  std::optional<TimeUnit> unit_only_form(std::string_view norm) const;
  std::optional<TimeUnit> dual_form(std::string_view norm) const;
  bool is_half(std::string_view norm) const;

 private:
  struct IndexedEntry {
    std::vector<std::string> tokens;
    NumeralItem::Kind kind;
    int value;
  };
  // first token -> entries starting with it, longest first
  std::unordered_map<std::string, std::vector<IndexedEntry>> by_first_;
  std::unordered_map<std::string, TimeUnit> unit_only_;
  std::unordered_map<std::string, TimeUnit> dual_;
  std::vector<std::string> half_;
};

// Structural score terms applied on top of the tier weights.
struct StructuralWeights {
  double number_with_unit_bonus = 1.0;
  double number_without_unit_penalty = 2.0;
  double fine_penalty = 3.0;
};

class Lexicon {
 public:
  static Lexicon from_json(const nlohmann::json &doc);

  const std::vector<Phrase> &filter_keywords() const { return filter_keywords_; }
  const std::vector<Phrase> &tier(Tier t) const { return tiers_[static_cast<std::size_t>(t)]; }
  const std::vector<Phrase> &fine_markers() const { return fine_markers_; }
  const std::vector<Phrase> &probation_markers() const { return probation_markers_; }
  const std::vector<Phrase> &actual_markers() const { return actual_markers_; }
  const std::vector<Phrase> &past_tense_markers() const { return past_tense_markers_; }
  const NumeralLexicon &numerals() const { return numerals_; }
  const StructuralWeights &structural() const { return structural_; }
  double threshold() const { return threshold_; }

  void set_threshold(double t) { threshold_ = t; }
  void set_structural(const StructuralWeights &w) { structural_ = w; }

  std::optional<TimeUnit> time_unit(std::string_view norm) const;
  bool has_filter_keyword(std::string_view text) const;
  bool has_filter_keyword(const std::vector<Token> &tokens) const;

 private:
  std::vector<Phrase> filter_keywords_;
  std::array<std::vector<Phrase>, kTierCount> tiers_;
  std::unordered_map<std::string, TimeUnit> time_units_;
  std::vector<Phrase> fine_markers_;
  std::vector<Phrase> probation_markers_;
  std::vector<Phrase> actual_markers_;
  std::vector<Phrase> past_tense_markers_;
  NumeralLexicon numerals_;
  StructuralWeights structural_;
  double threshold_ = 2.0;
};

Lexicon load_lexicon(const std::filesystem::path &path);

struct TierMatch {
  Tier tier;
  int start_token = 0;
  int end_token = 0;
  std::string surface;
  double weight = 0.0;
};

struct TierHits {
  std::array<int, kTierCount> counts{};
  std::array<double, kTierCount> weight_sums{};
  std::vector<TierMatch> matches;

  int count(Tier t) const { return counts[static_cast<std::size_t>(t)]; }
  double weighted_total() const;
};

TierHits match_tiers(const Sentence &sentence, const Lexicon &lexicon);
TierHits match_tiers(const std::vector<Token> &tokens, const Lexicon &lexicon);

}  // namespace ape
