#pragma once

#include <stdexcept>
#include <string>

namespace hgon {

/// Raised when an operation's precondition is violated by its inputs
/// (repeated vertex, degenerate labels, empty observation set, ...).
class Rejection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Rejection(what);
}

}  // namespace hgon
