#pragma once

#include <stdexcept>
#include <string>

namespace itdflex {

/// Malformed input file (JSON / CSV syntax or missing fields).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally well-formed input that violates a model invariant.
/// The message names the invariant and the offending element id.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside a solver (singular system, failed elimination, ...).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace itdflex
