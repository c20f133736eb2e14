#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ape/lexicon.hpp"
#include "ape/text.hpp"

namespace ape {

struct Sentence;

enum class NumberSource { digits, words, unit_only_elimination };
std::string_view to_string(NumberSource source);

struct NumberSpan {
  int start_token = 0;
  int end_token = 0;  // inclusive
  std::int64_t value = 0;
  NumberSource source = NumberSource::digits;
  std::optional<TimeUnit> attached_unit;
  int unit_distance = 0;  // tokens strictly between the number and its unit
  int unit_token = -1;
  bool half = false;  // "and a half" follows the unit

  bool has_unit() const { return attached_unit.has_value(); }
};

struct NumberOptions {
  int unit_window = 3;    // max token offset between a number and its unit
  bool fractions = true;  // honour "and a half"
};

// Digit literals and Hebrew number-word sequences, each attached to the
// nearest unclaimed time unit (following units first, then preceding ones).
// Spans are sorted by start_token and never overlap.
std::vector<NumberSpan> find_numbers(const std::vector<Token> &tokens, const Lexicon &lexicon,
                                     const NumberOptions &options = {});
std::vector<NumberSpan> find_numbers(const Sentence &sentence, const Lexicon &lexicon,
                                     const NumberOptions &options = {});

// Bare singular unit words ("year of imprisonment") that no number claims,
// read as a count of one.
std::vector<NumberSpan> unit_only_elimination(const std::vector<Token> &tokens, const Lexicon &lexicon,
                                              const NumberOptions &options = {});
std::vector<NumberSpan> unit_only_elimination(const Sentence &sentence, const Lexicon &lexicon,
                                              const NumberOptions &options = {});

// find_numbers and unit_only_elimination merged in token order.
std::vector<NumberSpan> all_number_spans(const std::vector<Token> &tokens, const Lexicon &lexicon,
                                         const NumberOptions &options = {});

// Composes a sequence of number words: hundreds, then tens, then units or a
// teen; with two or more parts the last one carries the "and" prefix.
// Returns nullopt for ill-formed sequences.
std::optional<int> compose(const std::vector<std::string> &word_tokens, const NumeralLexicon &numerals);
std::optional<int> compose_items(const std::vector<NumeralItem> &items);

// Days convert at 30 per month, rounding half up.
std::int64_t to_months(std::int64_t value, TimeUnit unit);

// Months for a unit-bearing span, including a trailing half unit.
std::optional<std::int64_t> span_months(const NumberSpan &span);

}  // namespace ape
