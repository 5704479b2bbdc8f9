#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace hilbertop {

using cplx = std::complex<double>;

/// Raised when an argument lies outside the domain of an operation
/// (points on or outside the unit circle, non-integrable exponents, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an integrand or functional produces NaN/inf at a node.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Neumaier's variant of Kahan summation. Results depend only on the order of
// add() calls, so callers keep a fixed index order.
class CompensatedSum {
 public:
  CompensatedSum& add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  CompensatedSum& operator+=(double x) { return add(x); }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  CompensatedComplexSum& add(cplx x) {
    re_.add(x.real());
    im_.add(x.imag());
    return *this;
  }
  CompensatedComplexSum& operator+=(cplx x) { return add(x); }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

namespace detail {

inline std::string format_point(cplx z) {
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

inline void require_inside_disc(cplx z, const char* what) {
  if (!(std::abs(z) < 1.0)) {
    throw DomainError(std::string(what) + ": point " + format_point(z) +
                      " is not inside the unit disc");
  }
}

}  // namespace detail

}  // namespace hilbertop
