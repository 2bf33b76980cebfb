#pragma once

#include <stdexcept>
#include <string>

namespace usk {

// Thrown when matrix or vector shapes disagree with what an operation needs.
class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerically rank-deficient input.
class RankError : public std::runtime_error {
public:
  explicit RankError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of the function.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class LengthError : public std::length_error {
public:
  explicit LengthError(const std::string& what) : std::length_error(what) {}
};

// Enumeration exceeded its node budget.
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace usk
