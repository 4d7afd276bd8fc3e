#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace hypinv {

using Index = std::int64_t;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidWeightError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when finite data cannot settle a question; hint says how much more data would help.
class InconclusiveError : public std::runtime_error {
 public:
  InconclusiveError(const std::string& what, std::string hint)
      : std::runtime_error(what), hint_(std::move(hint)) {}
  const std::string& hint() const noexcept { return hint_; }

 private:
  std::string hint_;
};

struct IndexRange {
  Index lo = 0;
  Index hi = 0;
  Index size() const { return hi - lo + 1; }
};

}  // namespace hypinv
