#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "grsum/point_source.hpp"
#include "grsum/summation.hpp"
#include "grsum/test_function.hpp"

namespace grsum {

// sigma(f^eps, Gamma, omega) = sum_{z in Gamma} eps^d f(eps z) omega(z).
// The sum is finite: only points with |z| <= outer_radius(f)/eps can
// contribute, and the source enumerates exactly those.
inline std::complex<double> riemann_sum(const TestFunction& f, const PointSource& src,
                                        double eps) {
  if (f.dimension() != src.dimension())
    throw std::invalid_argument("riemann_sum: dimension mismatch between f and source");
  if (!(eps > 0.0)) throw std::invalid_argument("riemann_sum: eps must be positive");
  if (f.support_radius() == 0.0) return {0.0, 0.0};  // degenerate support: empty sum
  const int d = f.dimension();
  const double scale = int_pow(eps, d);
  const double reach = f.outer_radius() / eps;
  ComplexCompensatedSum acc;
  std::vector<double> scaled(d);
  src.visit_points(reach, [&](std::span<const double> z, std::complex<double> w) {
    for (int i = 0; i < d; ++i) scaled[i] = eps * z[i];
    const double fx = f(scaled);
    if (fx != 0.0) acc.add((scale * fx) * w);
  });
  return acc.value();
}

enum class SampleMode { corner, center };

// Classical Riemann sum over the cubical partition of pitch cell_size,
// sampling each cube at its lower corner or its center.  With corner
// sampling and cell_size = eps this reproduces riemann_sum(f, Z^d, eps)
// bit for bit: identical terms, identical order, identical accumulator.
inline double partition_riemann_sum(const TestFunction& f, double cell_size,
                                    SampleMode mode) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("partition_riemann_sum: cell_size must be positive");
  const int d = f.dimension();
  const double vol = int_pow(cell_size, d);
  const double rho = f.support_radius();
  const auto& c = f.center();
  if (rho == 0.0) return 0.0;

  std::vector<long long> klo(d), khi(d);
  for (int i = 0; i < d; ++i) {
    klo[i] = static_cast<long long>(std::floor((c[i] - rho) / cell_size)) - 1;
    khi[i] = static_cast<long long>(std::ceil((c[i] + rho) / cell_size)) + 1;
  }
  const double off = (mode == SampleMode::center) ? 0.5 : 0.0;

  CompensatedSum acc;
  std::vector<long long> k(d);
  std::vector<double> x(d);
  auto rec = [&](auto&& self, int axis) -> void {
    for (long long v = klo[axis]; v <= khi[axis]; ++v) {
      k[axis] = v;
      x[axis] = cell_size * (static_cast<double>(v) + off);
      if (axis + 1 == d) {
        const double fx = f(x);
        if (fx != 0.0) acc.add(vol * fx);
      } else {
        self(self, axis + 1);
      }
    }
  };
  rec(rec, 0);
  return acc.value();
}

// int f dx: the closed form when the family has one, otherwise midpoint
// partition sums refined until two successive pitches agree to tol.  The
// bump is smooth with compact support, so the midpoint sums converge
// super-algebraically and the loop terminates after a few rounds.
inline double integral(const TestFunction& f, double tol = 1e-8) {
  if (auto v = f.exact_integral()) return *v;
  if (f.support_radius() == 0.0) return 0.0;
  double h = f.support_radius() / 8.0;
  double prev = partition_riemann_sum(f, h, SampleMode::center);
  for (int round = 0; round < 16; ++round) {
    h *= 0.5;
    const double cur = partition_riemann_sum(f, h, SampleMode::center);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

struct DensityEstimate {
  std::vector<double> epsilons;
  std::vector<std::complex<double>> scaled_sums;    // sigma(f^eps, Gamma, omega)
  double integral = 0.0;                            // int f
  std::vector<std::complex<double>> density_samples;  // scaled_sums / integral
  std::complex<double> extrapolated;
  double error_estimate = 0.0;
};

namespace detail {

// Least-squares intercept of y = a + b*eps through the given points
// (fitting real and imaginary parts separately).
inline std::complex<double> linear_intercept(std::span<const double> eps,
                                             std::span<const std::complex<double>> y) {
  const std::size_t n = eps.size();
  if (n == 1) return y[0];
  double se = 0, see = 0;
  std::complex<double> sy = 0, sey = 0;
  for (std::size_t i = 0; i < n; ++i) {
    se += eps[i];
    see += eps[i] * eps[i];
    sy += y[i];
    sey += eps[i] * y[i];
  }
  const double nn = static_cast<double>(n);
  const double det = nn * see - se * se;
  if (det == 0.0) return sy / nn;
  const std::complex<double> b = (nn * sey - se * sy) / det;
  return (sy - b * se) / nn;
}

}  // namespace detail

// Scaled Riemann sums over a decreasing eps schedule, normalized by int f,
// with the constant density read off by a linear-in-eps fit through the
// last three samples (indicator boundary error is O(eps), so the linear
// model is the right minimal one).
inline DensityEstimate estimate_density(const TestFunction& f, const PointSource& src,
                                        std::vector<double> eps_schedule) {
  if (eps_schedule.empty()) throw std::invalid_argument("estimate_density: empty schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0))
      throw std::invalid_argument("estimate_density: eps values must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      throw std::invalid_argument("estimate_density: schedule must be strictly decreasing");
  }
  DensityEstimate est;
  est.integral = integral(f);
  if (est.integral == 0.0)
    throw std::invalid_argument("estimate_density: f has zero integral");
  est.epsilons = std::move(eps_schedule);
  for (double eps : est.epsilons) {
    const std::complex<double> s = riemann_sum(f, src, eps);
    est.scaled_sums.push_back(s);
    est.density_samples.push_back(s / est.integral);
  }
  const std::size_t n = est.density_samples.size();
  const std::size_t k = std::min<std::size_t>(3, n);
  est.extrapolated = detail::linear_intercept(
      std::span<const double>(est.epsilons).subspan(n - k),
      std::span<const std::complex<double>>(est.density_samples).subspan(n - k));
  est.error_estimate = 0.0;
  for (std::size_t i = (n >= 2 ? n - 2 : n - 1); i < n; ++i)
    est.error_estimate = std::max(est.error_estimate,
                                  std::abs(est.density_samples[i] - est.extrapolated));
  return est;
}

// Geometric default schedule 2^-4 .. 2^-12.
inline std::vector<double> default_eps_schedule(double eps_max = 1.0 / 16,
                                                double eps_min = 1.0 / 4096) {
  std::vector<double> s;
  for (double e = eps_max; e >= eps_min * (1.0 - 1e-12); e *= 0.5) s.push_back(e);
  if (s.empty()) throw std::invalid_argument("default_eps_schedule: empty range");
  return s;
}

struct Box {
  std::vector<double> lo, hi;
};

struct DeloneReport {
  double R_candidate = 0.0;
  double r_candidate = 0.0;
  bool relatively_dense = false;
  bool uniformly_discrete = false;
  Box test_region;
};

namespace detail {

class CellHash2Plus {
 public:
  CellHash2Plus(const std::vector<WeightedPoint>& pts, double cell) : cell_(cell) {
    for (std::size_t i = 0; i < pts.size(); ++i) map_[key(pts[i].coords)].push_back(i);
  }

  template <typename F>
  void for_each_near(const std::vector<double>& x, int shells, F&& body) const {
    std::vector<long long> base(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      base[i] = static_cast<long long>(std::floor(x[i] / cell_));
    std::vector<long long> cur(x.size());
    auto rec = [&](auto&& self, std::size_t axis) -> void {
      for (long long dv = -shells; dv <= shells; ++dv) {
        cur[axis] = base[axis] + dv;
        if (axis + 1 == x.size()) {
          auto it = map_.find(key_of(cur));
          if (it != map_.end())
            for (std::size_t idx : it->second) body(idx);
        } else {
          self(self, axis + 1);
        }
      }
    };
    rec(rec, 0);
  }

 private:
  std::size_t key(const std::vector<double>& x) const {
    std::vector<long long> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      c[i] = static_cast<long long>(std::floor(x[i] / cell_));
    return key_of(c);
  }

  static std::size_t key_of(const std::vector<long long>& c) {
    std::size_t h = 1469598103934665603ull;
    for (long long v : c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }

  double cell_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> map_;
};

}  // namespace detail

// Empirical Delone diagnostics on a bounded region.  Relative density is
// probed on a grid of pitch R/4 (an empty R-ball can hide from the grid only
// up to that discretization slack); uniform discreteness scans for a pair of
// points closer than 2r.  Open-ball convention: a pair at distance exactly
// 2r still passes.
inline DeloneReport delone_check(const PointSource& src, double R, double r,
                                 const Box& region) {
  if (!(R > 0.0) || !(r > 0.0)) throw std::invalid_argument("delone_check: R and r must be positive");
  const int d = src.dimension();
  if (static_cast<int>(region.lo.size()) != d || static_cast<int>(region.hi.size()) != d)
    throw std::invalid_argument("delone_check: region dimension mismatch");
  DeloneReport rep;
  rep.R_candidate = R;
  rep.r_candidate = r;
  rep.test_region = region;

  double corner2 = 0.0;
  for (int i = 0; i < d; ++i)
    corner2 += std::max(region.lo[i] * region.lo[i], region.hi[i] * region.hi[i]);
  const double reach = std::sqrt(corner2) + R + 1.0;
  const std::vector<WeightedPoint> pts = src.enumerate(reach);

  // Uniform discreteness: look for pairs at distance < 2r among points that
  // matter for the region (everything enumerated is fine to include).
  rep.uniformly_discrete = true;
  {
    detail::CellHash2Plus hash(pts, 2.0 * r);
    for (std::size_t i = 0; i < pts.size() && rep.uniformly_discrete; ++i) {
      hash.for_each_near(pts[i].coords, 1, [&](std::size_t j) {
        if (j <= i) return;
        double s = 0.0;
        for (int ax = 0; ax < d; ++ax) {
          const double dd = pts[i].coords[ax] - pts[j].coords[ax];
          s += dd * dd;
        }
        if (s < 4.0 * r * r) rep.uniformly_discrete = false;
      });
    }
  }

  // Relative density: every grid node in the region must see a point within R.
  rep.relatively_dense = true;
  {
    const double pitch = R / 4.0;
    detail::CellHash2Plus hash(pts, R);
    std::vector<long long> steps(d);
    for (int i = 0; i < d; ++i)
      steps[i] = static_cast<long long>(std::floor((region.hi[i] - region.lo[i]) / pitch));
    std::vector<double> x(d);
    std::vector<long long> idx(d, 0);
    auto rec = [&](auto&& self, int axis) -> void {
      if (!rep.relatively_dense) return;
      for (long long v = 0; v <= steps[axis]; ++v) {
        x[axis] = region.lo[axis] + pitch * static_cast<double>(v);
        if (axis + 1 == d) {
          bool found = false;
          hash.for_each_near(x, 2, [&](std::size_t j) {
            if (found) return;
            double s = 0.0;
            for (int ax = 0; ax < d; ++ax) {
              const double dd = x[ax] - pts[j].coords[ax];
              s += dd * dd;
            }
            if (s <= R * R) found = true;
          });
          if (!found) {
            rep.relatively_dense = false;
            return;
          }
        } else {
          self(self, axis + 1);
        }
      }
    };
    rec(rec, 0);
  }
  return rep;
}

}  // namespace grsum
