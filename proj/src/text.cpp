#include "ape/text.hpp"

#include <cctype>
#include <cstdint>

namespace ape {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_edge_punct(char c) {
  switch (c) {
    case ',': case '.': case ';': case ':': case '!': case '?':
    case '(': case ')': case '[': case ']': case '{': case '}': case '"':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::optional<std::size_t> find_invalid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > n) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return i;
    }
    i += len;
  }
  return std::nullopt;
}

std::string strip_points(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if ((c == 0xD6 || c == 0xD7) && i + 1 < text.size()) {
      const auto d = static_cast<unsigned char>(text[i + 1]);
      const unsigned cp = ((c & 0x1F) << 6) | (d & 0x3F);
      if (cp == 0x05BE) {  // maqaf
        out.push_back('-');
        ++i;
        continue;
      }
      if (cp == 0x05F3) {
        out.push_back('\'');
        ++i;
        continue;
      }
      if (cp == 0x05F4) {
        out.push_back('"');
        ++i;
        continue;
      }
      const bool point = (cp >= 0x0591 && cp <= 0x05BD) || cp == 0x05BF || cp == 0x05C1 ||
                         cp == 0x05C2 || cp == 0x05C4 || cp == 0x05C5 || cp == 0x05C7;
      if (point) {
        ++i;
        continue;
      }
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string normalize_token(std::string_view raw) {
  std::string s = strip_points(raw);
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_edge_punct(s[b])) ++b;
  while (e > b && is_edge_punct(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) {
      std::string raw(text.substr(start, i - start));
      std::string norm = normalize_token(raw);
      tokens.push_back({std::move(raw), std::move(norm)});
    }
  }
  return tokens;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char ch : text) {
    const bool space = is_space(static_cast<unsigned char>(ch));
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

bool has_alnum(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isalnum(c)) return true;
    // Hebrew letters live in U+05D0..U+05EA, lead byte 0xD7.
    if (c == 0xD7 && i + 1 < s.size()) {
      const auto d = static_cast<unsigned char>(s[i + 1]);
      if (d >= 0x90 && d <= 0xAA) return true;
    }
  }
  return false;
}

}  // namespace ape
