#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace grsum {

struct WeightedPoint {
  std::vector<double> coords;
  std::complex<double> weight;
};

using PointVisitor = std::function<void(std::span<const double>, std::complex<double>)>;

// A weighted discrete subset of R^d.  visit_points(R, emit) calls emit once
// for every point of norm <= R, in lexicographic order on coordinates, with
// its (nonzero) weight.  The order is part of the contract: summation code
// relies on it for run-to-run determinism.
class PointSource {
 public:
  virtual ~PointSource() = default;
  virtual int dimension() const = 0;
  virtual std::string descriptor() const = 0;
  virtual void visit_points(double radius, const PointVisitor& emit) const = 0;

  std::vector<WeightedPoint> enumerate(double radius) const {
    std::vector<WeightedPoint> out;
    visit_points(radius, [&](std::span<const double> x, std::complex<double> w) {
      out.push_back({std::vector<double>(x.begin(), x.end()), w});
    });
    return out;
  }
};

namespace detail {

// Largest integer m >= 0 with m*m <= budget (budget may be non-integral).
inline long long floor_sqrt_budget(double budget) {
  if (budget < 0) return -1;
  long long m = static_cast<long long>(std::floor(std::sqrt(budget)));
  while (static_cast<double>((m + 1) * (m + 1)) <= budget) ++m;
  while (m > 0 && static_cast<double>(m * m) > budget) --m;
  return m;
}

// Visits integer vectors c with |c| <= R in lexicographic order; the filter
// sees the full coordinate vector and returns the point's weight, or nullopt
// semantics via a bool out-parameter-free pattern: filter returns true to
// emit.  Weight emission is kept in the caller.
template <typename F>
void for_each_lattice_point(int d, double radius, F&& body) {
  if (radius < 0) return;
  std::vector<long long> c(d);
  std::vector<double> x(d);
  const double r2 = radius * radius;
  // Recursive descent over axes with the remaining squared radius.
  auto rec = [&](auto&& self, int axis, double budget) -> void {
    const long long lim = floor_sqrt_budget(budget);
    if (lim < 0) return;
    for (long long v = -lim; v <= lim; ++v) {
      c[axis] = v;
      x[axis] = static_cast<double>(v);
      if (axis + 1 == d) {
        body(std::span<const long long>(c), std::span<const double>(x));
      } else {
        self(self, axis + 1, budget - static_cast<double>(v) * static_cast<double>(v));
      }
    }
  };
  rec(rec, 0, r2);
}

}  // namespace detail

// Z^d with weight 1.
class IntegerLattice : public PointSource {
 public:
  explicit IntegerLattice(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("IntegerLattice: dimension must be >= 1");
  }

  int dimension() const override { return d_; }
  std::string descriptor() const override { return "Z^" + std::to_string(d_); }

  void visit_points(double radius, const PointVisitor& emit) const override {
    detail::for_each_lattice_point(d_, radius,
                                   [&](std::span<const long long>, std::span<const double> x) {
                                     emit(x, {1.0, 0.0});
                                   });
  }

 private:
  int d_;
};

// The separable affine lattice {scale * k + offset : k in Z^d}; covers the
// sub/super-lattices (2Z)^d, (Z/2)^d and the odd lattice (2Z+1)^d used in
// refinement tests.
class AffineLattice : public PointSource {
 public:
  AffineLattice(int d, double scale, double offset)
      : d_(d), scale_(scale), offset_(offset) {
    if (d < 1) throw std::invalid_argument("AffineLattice: dimension must be >= 1");
    if (scale <= 0) throw std::invalid_argument("AffineLattice: scale must be positive");
  }

  int dimension() const override { return d_; }
  std::string descriptor() const override {
    return std::to_string(scale_) + "*Z^" + std::to_string(d_) + "+" + std::to_string(offset_);
  }

  void visit_points(double radius, const PointVisitor& emit) const override {
    if (radius < 0) return;
    std::vector<long long> c(d_);
    std::vector<double> x(d_);
    const double r2 = radius * radius;
    auto rec = [&](auto&& self, int axis, double budget) -> void {
      if (budget < 0) return;
      // scale*k + offset in [-sqrt(budget), sqrt(budget)]
      const double b = std::sqrt(std::max(0.0, budget));
      long long klo = static_cast<long long>(std::ceil((-b - offset_) / scale_)) - 1;
      long long khi = static_cast<long long>(std::floor((b - offset_) / scale_)) + 1;
      for (long long k = klo; k <= khi; ++k) {
        const double v = scale_ * static_cast<double>(k) + offset_;
        if (v * v > budget) continue;
        c[axis] = k;
        x[axis] = v;
        if (axis + 1 == d_) {
          emit(std::span<const double>(x), {1.0, 0.0});
        } else {
          self(self, axis + 1, budget - v * v);
        }
      }
    };
    rec(rec, 0, r2);
  }

 private:
  int d_;
  double scale_;
  double offset_;
};

// Wraps an integer-coordinate source, multiplying every weight by
// e^{2 pi i <z, eta>} for a rational eta = (num_i / den_i).  The phase is
// computed from the exact residue of <z, eta> modulo 1, so integer eta gives
// weight exactly 1.
class TwistedSource : public PointSource {
 public:
  TwistedSource(std::shared_ptr<const PointSource> inner,
                std::vector<long long> eta_num, std::vector<long long> eta_den)
      : inner_(std::move(inner)), num_(std::move(eta_num)), den_(std::move(eta_den)) {
    const int d = inner_->dimension();
    if (static_cast<int>(num_.size()) != d || static_cast<int>(den_.size()) != d)
      throw std::invalid_argument("TwistedSource: eta dimension mismatch");
    lcm_ = 1;
    for (int i = 0; i < d; ++i) {
      if (den_[i] <= 0) throw std::invalid_argument("TwistedSource: denominators must be positive");
      lcm_ = std::lcm(lcm_, den_[i]);
    }
    mult_.resize(d);
    for (int i = 0; i < d; ++i) mult_[i] = num_[i] * (lcm_ / den_[i]);
    phase_table_.resize(static_cast<std::size_t>(lcm_));
    for (long long j = 0; j < lcm_; ++j)
      phase_table_[static_cast<std::size_t>(j)] =
          std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(lcm_));
  }

  int dimension() const override { return inner_->dimension(); }
  std::string descriptor() const override { return inner_->descriptor() + " twisted"; }

  void visit_points(double radius, const PointVisitor& emit) const override {
    const int d = inner_->dimension();
    inner_->visit_points(radius, [&](std::span<const double> x, std::complex<double> w) {
      long long acc = 0;
      for (int i = 0; i < d; ++i) {
        const long long zi = static_cast<long long>(std::llround(x[i]));
        acc += ((zi % lcm_) * (mult_[i] % lcm_)) % lcm_;
      }
      long long r = acc % lcm_;
      if (r < 0) r += lcm_;
      emit(x, w * phase_table_[static_cast<std::size_t>(r)]);
    });
  }

 private:
  std::shared_ptr<const PointSource> inner_;
  std::vector<long long> num_, den_, mult_;
  long long lcm_ = 1;
  std::vector<std::complex<double>> phase_table_;
};

}  // namespace grsum
