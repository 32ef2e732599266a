#pragma once

#include <stdexcept>
#include <string>

namespace spectradiag {

/// Malformed or invalid input: unreadable file, bad cell, violated precondition.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// The input was valid but the analysis cannot produce a result
/// (undefined ED, rejected fit, too few valid samples).
class AnalysisError : public std::runtime_error {
 public:
  explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spectradiag
