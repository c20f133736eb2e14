#include "ape/numbers.hpp"

#include <algorithm>
#include <cctype>

#include "ape/corpus.hpp"

namespace ape {

std::string_view to_string(NumberSource source) {
  switch (source) {
    case NumberSource::digits: return "digits";
    case NumberSource::words: return "words";
    case NumberSource::unit_only_elimination: return "unit_only_elimination";
  }
  return "digits";
}

namespace {

// Single-letter Hebrew prefixes (ו ה ב ל מ ש כ) as two-byte UTF-8 sequences.
bool is_prefix_letter(const std::string &s, std::size_t i) {
  if (i + 1 >= s.size() || static_cast<unsigned char>(s[i]) != 0xD7) return false;
  switch (static_cast<unsigned char>(s[i + 1])) {
    case 0x95: case 0x94: case 0x91: case 0x9C: case 0x9E: case 0xA9: case 0x9B:
      return true;
    default:
      return false;
  }
}

struct DigitParse {
  std::int64_t value;
  bool half;
};

// Accepts forms such as 48, 5,000, ל-30, ב-31, 1124/04, 31.12.2004, 2.5.
std::optional<DigitParse> parse_digit_token(const std::string &norm) {
  std::size_t i = 0;
  for (int k = 0; k < 3 && is_prefix_letter(norm, i); ++k) i += 2;
  if (i < norm.size() && norm[i] == '-') ++i;
  if (i >= norm.size() || !is_ascii_digit(norm[i])) return std::nullopt;

  std::int64_t value = 0;
  std::size_t digits = 0;
  std::size_t j = i;
  while (j < norm.size()) {
    if (is_ascii_digit(norm[j])) {
      if (value > 100'000'000'000LL) return std::nullopt;
      value = value * 10 + (norm[j] - '0');
      ++digits;
      ++j;
    } else if (norm[j] == ',' && digits > 0 && j + 3 < norm.size() && is_ascii_digit(norm[j + 1]) &&
               is_ascii_digit(norm[j + 2]) && is_ascii_digit(norm[j + 3]) &&
               (j + 4 == norm.size() || !is_ascii_digit(norm[j + 4]))) {
      ++j;  // thousands separator
    } else {
      break;
    }
  }
  bool half = false;
  std::string_view rest(norm.data() + j, norm.size() - j);
  if (rest == ".5") half = true;
  if (has_alnum(rest)) {
    // Only digits may follow (docket slashes, dates, clock times).
    for (std::size_t k = 0; k < rest.size(); ++k) {
      const auto c = static_cast<unsigned char>(rest[k]);
      if (c >= 0x80 || std::isalpha(c)) return std::nullopt;
    }
  }
  return DigitParse{value, half};
}

bool inside(const NumberSpan &s, int pos) { return pos >= s.start_token && pos <= s.end_token; }

struct Analysis {
  std::vector<NumberSpan> numbers;
  std::vector<NumberSpan> eliminated;
};

Analysis analyze(const std::vector<Token> &tokens, const Lexicon &lexicon, const NumberOptions &options) {
  const NumeralLexicon &numerals = lexicon.numerals();
  const int n = static_cast<int>(tokens.size());
  Analysis out;
  auto &spans = out.numbers;

  int i = 0;
  while (i < n) {
    const std::string &norm = tokens[i].norm;
    if (norm.empty()) {
      ++i;
      continue;
    }
    if (auto d = parse_digit_token(norm)) {
      NumberSpan s;
      s.start_token = s.end_token = i;
      s.value = d->value;
      s.half = d->half && options.fractions;
      s.source = NumberSource::digits;
      spans.push_back(s);
      ++i;
      continue;
    }
    if (auto dual = numerals.dual_form(norm)) {
      NumberSpan s;
      s.start_token = s.end_token = i;
      s.value = 2;
      s.source = NumberSource::words;
      s.attached_unit = *dual;
      s.unit_token = i;
      spans.push_back(s);
      ++i;
      continue;
    }
    // Maximal run of contiguous numeral items.
    std::vector<NumeralItem> items;
    std::vector<int> starts;
    int pos = i;
    while (pos < n) {
      auto item = numerals.match(tokens, static_cast<std::size_t>(pos));
      if (!item) break;
      items.push_back(*item);
      starts.push_back(pos);
      pos += item->length;
    }
    if (items.empty()) {
      ++i;
      continue;
    }
    // Greedy: longest well-formed prefix, repeatedly.
    std::size_t k = 0;
    while (k < items.size()) {
      for (std::size_t len = items.size() - k; len >= 1; --len) {
        std::vector<NumeralItem> part(items.begin() + static_cast<long>(k),
                                      items.begin() + static_cast<long>(k + len));
        if (auto v = compose_items(part)) {
          NumberSpan s;
          s.start_token = starts[k];
          s.end_token = starts[k + len - 1] + items[k + len - 1].length - 1;
          s.value = *v;
          s.source = NumberSource::words;
          spans.push_back(s);
          k += len;
          break;
        }
        if (len == 1) {
          ++k;  // unreachable for single items; guards the loop
          break;
        }
      }
    }
    i = pos;
  }

  // "30 (שלושים)": a parenthesized word echo of a digit literal is one number.
  std::vector<NumberSpan> merged;
  for (const auto &s : spans) {
    if (!merged.empty()) {
      NumberSpan &prev = merged.back();
      const std::string &raw = tokens[s.start_token].raw;
      if (prev.source == NumberSource::digits && s.source == NumberSource::words && !s.has_unit() &&
          prev.end_token + 1 == s.start_token && prev.value == s.value && !raw.empty() && raw[0] == '(') {
        prev.end_token = s.end_token;
        continue;
      }
    }
    merged.push_back(s);
  }
  spans = std::move(merged);

  std::vector<std::optional<TimeUnit>> unit_of(n);
  for (int t = 0; t < n; ++t) {
    auto u = lexicon.time_unit(tokens[t].norm);
    if (!u) u = numerals.unit_only_form(tokens[t].norm);
    if (u) unit_of[t] = u;
  }
  std::vector<bool> claimed(n, false);
  for (const auto &s : spans) {
    if (s.unit_token >= 0) claimed[s.unit_token] = true;
  }
  auto blocked = [&](int pos, std::size_t self) {
    for (std::size_t o = 0; o < spans.size(); ++o) {
      if (o != self && inside(spans[o], pos)) return true;
    }
    return false;
  };
  for (std::size_t si = 0; si < spans.size(); ++si) {
    NumberSpan &s = spans[si];
    if (s.has_unit()) continue;
    for (int j = s.end_token + 1; j < n && j - s.end_token <= options.unit_window; ++j) {
      if (blocked(j, si)) break;
      if (unit_of[j] && !claimed[j]) {
        s.attached_unit = unit_of[j];
        s.unit_token = j;
        s.unit_distance = j - s.end_token - 1;
        claimed[j] = true;
        break;
      }
    }
  }
  for (std::size_t si = 0; si < spans.size(); ++si) {
    NumberSpan &s = spans[si];
    if (s.has_unit()) continue;
    for (int j = s.start_token - 1; j >= 0 && s.start_token - j <= options.unit_window; --j) {
      if (blocked(j, si)) break;
      if (unit_of[j] && !claimed[j]) {
        s.attached_unit = unit_of[j];
        s.unit_token = j;
        s.unit_distance = s.start_token - j - 1;
        claimed[j] = true;
        break;
      }
    }
  }
  auto half_after = [&](int t) {
    return options.fractions && t + 1 < n && numerals.is_half(tokens[t + 1].norm);
  };
  for (auto &s : spans) {
    if (s.has_unit() && !s.half) {
      const int after = std::max(s.unit_token, s.end_token);
      s.half = half_after(after);
    }
  }

  for (int t = 0; t < n; ++t) {
    if (claimed[t]) continue;
    auto u = numerals.unit_only_form(tokens[t].norm);
    if (!u) continue;
    bool covered = false;
    for (const auto &s : spans) covered = covered || inside(s, t);
    if (covered) continue;
    NumberSpan e;
    e.start_token = e.end_token = t;
    e.value = 1;
    e.source = NumberSource::unit_only_elimination;
    e.attached_unit = u;
    e.unit_token = t;
    e.half = half_after(t);
    out.eliminated.push_back(e);
  }
  return out;
}

}  // namespace

std::optional<int> compose_items(const std::vector<NumeralItem> &items) {
  if (items.empty()) return std::nullopt;
  using Kind = NumeralItem::Kind;
  auto rank = [](Kind k) {
    switch (k) {
      case Kind::hundred: return 0;
      case Kind::ten: return 1;
      case Kind::unit:
      case Kind::teen: return 2;
    }
    return 2;
  };
  int total = 0;
  int last_rank = -1;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const NumeralItem &it = items[i];
    const int r = rank(it.kind);
    if (r <= last_rank) return std::nullopt;  // out of order or repeated slot
    if (it.kind == Kind::teen && last_rank == 1) return std::nullopt;
    if (items.size() > 1 && i > 0) {
      const bool is_last = i + 1 == items.size();
      if (is_last != it.conj) return std::nullopt;
    }
    total += it.value;
    last_rank = r;
  }
  return total;
}

std::optional<int> compose(const std::vector<std::string> &word_tokens, const NumeralLexicon &numerals) {
  std::vector<Token> tokens;
  tokens.reserve(word_tokens.size());
  for (const auto &w : word_tokens) tokens.push_back({w, normalize_token(w)});
  std::vector<NumeralItem> items;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    auto item = numerals.match(tokens, pos);
    if (!item) return std::nullopt;
    items.push_back(*item);
    pos += static_cast<std::size_t>(item->length);
  }
  return compose_items(items);
}

std::vector<NumberSpan> find_numbers(const std::vector<Token> &tokens, const Lexicon &lexicon,
                                     const NumberOptions &options) {
  return analyze(tokens, lexicon, options).numbers;
}

std::vector<NumberSpan> find_numbers(const Sentence &sentence, const Lexicon &lexicon,
                                     const NumberOptions &options) {
  return find_numbers(tokenize(sentence.text), lexicon, options);
}

std::vector<NumberSpan> unit_only_elimination(const std::vector<Token> &tokens, const Lexicon &lexicon,
                                              const NumberOptions &options) {
  return analyze(tokens, lexicon, options).eliminated;
}

std::vector<NumberSpan> unit_only_elimination(const Sentence &sentence, const Lexicon &lexicon,
                                              const NumberOptions &options) {
  return unit_only_elimination(tokenize(sentence.text), lexicon, options);
}

std::vector<NumberSpan> all_number_spans(const std::vector<Token> &tokens, const Lexicon &lexicon,
                                         const NumberOptions &options) {
  Analysis a = analyze(tokens, lexicon, options);
  std::vector<NumberSpan> all = std::move(a.numbers);
  all.insert(all.end(), a.eliminated.begin(), a.eliminated.end());
  std::sort(all.begin(), all.end(),
            [](const NumberSpan &x, const NumberSpan &y) { return x.start_token < y.start_token; });
  return all;
}

std::int64_t to_months(std::int64_t value, TimeUnit unit) {
  switch (unit) {
    case TimeUnit::year: return value * 12;
    case TimeUnit::month: return value;
    case TimeUnit::day: return (value + 15) / 30;
  }
  return value;
}

std::optional<std::int64_t> span_months(const NumberSpan &span) {
  if (!span.attached_unit) return std::nullopt;
  if (!span.half) return to_months(span.value, *span.attached_unit);
  // value + 1/2 unit, rounded half up; counted in half units to stay exact.
  const std::int64_t halves = 2 * span.value + 1;
  switch (*span.attached_unit) {
    case TimeUnit::year: return halves * 6;
    case TimeUnit::month: return (halves + 1) / 2;
    case TimeUnit::day: return (halves + 30) / 60;
  }
  return std::nullopt;
}

}  // namespace ape
