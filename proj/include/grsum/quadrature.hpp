#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace grsum {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes and weights by Newton iteration on P_n, seeded with
// the Chebyshev-like asymptotic roots.
inline const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence: evaluate P_n(x) and P_n'(x)
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

// int_a^b g(x) e^{-2 pi i x xi} dx with an n-node Gauss-Legendre rule.
template <typename G>
std::complex<double> oscillatory_integral(G&& g, double a, double b, double xi, int n) {
  const QuadratureRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::complex<double> acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = mid + half * rule.nodes[i];
    acc += rule.weights[i] * g(x) * std::polar(1.0, -2.0 * std::numbers::pi * x * xi);
  }
  return half * acc;
}

// Node count that resolves e^{-2 pi i x xi} over an interval of the given
// width: a few nodes per oscillation plus headroom, rounded up to the next
// power of two so refinement steps nest predictably.
inline int oscillation_nodes(double width, double max_abs_xi, int floor_nodes = 64) {
  double need = 4.0 * width * std::abs(max_abs_xi) + 48.0;
  int n = floor_nodes;
  while (static_cast<double>(n) < need) n *= 2;
  return n;
}

// The standard C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly
// increasing in between.
inline double smoothstep_c_inf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace grsum
