#pragma once

#include <stdexcept>
#include <string>

namespace bcplab {

/// Input violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A requested object would exceed the id type or a configured memory cap.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Similarity of two empty sets (0/0) was requested.
class UndefinedSimilarityError : public std::domain_error {
public:
    explicit UndefinedSimilarityError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace bcplab
