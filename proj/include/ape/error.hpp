#pragma once

#include <stdexcept>
#include <string>

namespace ape {

// Raised for malformed or inconsistent user input (files, flags, records).
// The CLI maps it to exit code 1; anything else is an internal error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace ape
