#pragma once

#include <stdexcept>
#include <string>

namespace metatrail {

// Raised when an input violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an identifier (poi_id, vertex) is not present.
class LookupError : public std::out_of_range {
 public:
  explicit LookupError(const std::string& what) : std::out_of_range(what) {}
};

}  // namespace metatrail
