#pragma once

#include <cmath>
#include <complex>

namespace grsum {

// Neumaier (Kahan-Babuska) compensated accumulator.  Two properties matter
// for the determinism contracts elsewhere in the library: the result depends
// only on the sequence of nonzero terms, because adding an exact 0.0 changes
// neither the running sum nor the compensation, and a fixed term order gives
// bit-identical results across runs.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexCompensatedSum {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }

  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

// eps^d by repeated multiplication; riemann_sum and partition_riemann_sum
// must scale terms with the identical double, so both call this.
inline double int_pow(double base, int exponent) {
  double r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace grsum
