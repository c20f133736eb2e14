#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ape {

// One whitespace-delimited token. `norm` has Hebrew points removed,
// gershayim/geresh folded to ASCII quotes and edge punctuation stripped.
struct Token {
  std::string raw;
  std::string norm;
};

// Byte offset of the first invalid UTF-8 sequence, or nullopt if valid.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

// Removes niqqud and cantillation marks, maps maqaf to '-' and the Hebrew
// punctuation marks ׳ ״ to ' and ".
std::string strip_points(std::string_view text);

std::string normalize_token(std::string_view raw);

std::vector<Token> tokenize(std::string_view text);
std::size_t count_tokens(std::string_view text);

std::string_view trim(std::string_view s);

bool is_ascii_digit(char c);

// True if the token contains at least one letter (ASCII or Hebrew) or digit.
bool has_alnum(std::string_view s);

}  // namespace ape
