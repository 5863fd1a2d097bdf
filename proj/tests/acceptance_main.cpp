// Acceptance suite: one line per criterion, [PASS]/[FAIL], exit 1 if any
// criterion fails.  Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grsum/arith.hpp"
#include "grsum/core.hpp"
#include "grsum/fourier.hpp"
#include "grsum/pythagoras.hpp"

using namespace grsum;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// 1. the thirty published enumeration rows, exactly, in under a second
void criterion_somos() {
  const auto t0 = Clock::now();
  const auto list = enumerate_ppt(9425);
  const double dt = seconds_since(t0);
  bool ok = list.size() == 1500;
  std::ifstream in(std::string(GRSUM_FIXTURE_DIR) + "/somos_rows.csv");
  ok = ok && in.good();
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long long N, x, y, z;
    ss >> N >> x >> y >> z;
    ++rows;
    const auto& t = list[static_cast<std::size_t>(N - 1)];
    ok = ok && t.x == x && t.y == y && t.z == z;
  }
  ok = ok && rows == 30 && dt < 1.0;
  report(1, "triple table reproduction", ok, fmt("30 rows exact, %.3fs", dt));
}

// 2. z_100/100 = 6.29 +- 0.005, z_1500/1500 = 6.28333 +- 1e-5, trend to 2 pi
void criterion_lehmer() {
  const auto t0 = Clock::now();
  const double r100 = lehmer_ratio(100);
  const double r1000 = lehmer_ratio(1000);
  const double r1500 = lehmer_ratio(1500);
  const double dt = seconds_since(t0);
  const double two_pi = 2.0 * std::numbers::pi;
  const bool ok = std::abs(r100 - 6.29) <= 0.005 && std::abs(r1500 - 6.28333) <= 1e-5 &&
                  std::abs(r1500 - two_pi) < std::abs(r1000 - two_pi) &&
                  std::abs(r1000 - two_pi) < std::abs(r100 - two_pi) && dt < 1.0;
  report(2, "hypotenuse ratios", ok,
         fmt("6.29 / 6.277 / %.5f -> 2pi, %.3fs", r1500, dt));
}

// 3. coprime fraction: 0.5% at 1e4, 0.05% at 1e6, under 10 s
void criterion_coprime() {
  const auto t0 = Clock::now();
  const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
  const double q4 = to_double(coprime_fraction(10000));
  const double q6 = to_double(coprime_fraction(1000000));
  const double dt = seconds_since(t0);
  const double rel4 = std::abs(q4 - target) / target;
  const double rel6 = std::abs(q6 - target) / target;
  const bool ok = rel4 < 0.005 && rel6 < 0.0005 && dt < 10.0;
  report(3, "coprime pair density", ok, fmt("rel 1e4: %.2e, 1e6: %.2e, %.3fs", rel4, rel6, dt));
}

// 4. constant density of the primitive points, d = 2 and d = 3, 1%
void criterion_prim_density() {
  const auto t0 = Clock::now();
  PrimitiveLattice p2(PrimitiveSetKind::prim, 2);
  auto ball2 = TestFunction::ball_indicator({0, 0}, 1.0);
  const auto est2 = estimate_density(ball2, p2, default_eps_schedule(1.0 / 16, 1.0 / 1024));
  const double t2 = 1.0 / zeta(2, 1e-12);
  const double rel2 = std::abs(est2.extrapolated.real() - t2) / t2;

  PrimitiveLattice p3(PrimitiveSetKind::prim, 3);
  auto ball3 = TestFunction::ball_indicator({0, 0, 0}, 1.0);
  const auto est3 = estimate_density(ball3, p3, default_eps_schedule(1.0 / 16, 1.0 / 128));
  const double t3 = 1.0 / zeta(3, 1e-12);
  const double rel3 = std::abs(est3.extrapolated.real() - t3) / t3;
  const double dt = seconds_since(t0);
  const bool ok = rel2 < 0.01 && rel3 < 0.01 && dt < 60.0;
  report(4, "primitive-point densities", ok,
         fmt("rel d=2: %.2e, d=3: %.2e, %.1fs", rel2, rel3, dt));
}

// 5. parity split 4/pi^2 + 2/pi^2 = 6/pi^2
void criterion_parity_split() {
  auto ball = TestFunction::ball_indicator({0, 0}, 1.0);
  PrimitiveLattice star(PrimitiveSetKind::prim_star, 2);
  PrimitiveLattice odd(PrimitiveSetKind::odd_prim, 2);
  const auto es = estimate_density(ball, star, default_eps_schedule(1.0 / 16, 1.0 / 1024));
  const auto eo = estimate_density(ball, odd, default_eps_schedule(1.0 / 16, 1.0 / 1024));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double rs = std::abs(es.extrapolated.real() - 4.0 / pi2) * pi2 / 4.0;
  const double ro = std::abs(eo.extrapolated.real() - 2.0 / pi2) * pi2 / 2.0;
  const double sum = es.extrapolated.real() + eo.extrapolated.real();
  const double rsum = std::abs(sum - 6.0 / pi2) * pi2 / 6.0;
  const bool ok = rs < 0.01 && ro < 0.01 && rsum < 0.015;
  report(5, "parity-split densities", ok,
         fmt("rel star: %.2e, odd: %.2e, sum: %.2e", rs, ro, rsum));
}

// 6. sector limits: (0,1) -> 1/(2 pi), (0,1/2) -> (2/pi^2) atan(1/2), 2%
void criterion_sector() {
  const double c1 = static_cast<double>(sector_count(1000000, 0.0, 1.0)) / 1e6;
  const double l1 = 1.0 / (2.0 * std::numbers::pi);
  const double c2 = static_cast<double>(sector_count(1000000, 0.0, 0.5)) / 1e6;
  const double l2 = 2.0 / (std::numbers::pi * std::numbers::pi) * std::atan(0.5);
  const double r1 = std::abs(c1 - l1) / l1, r2 = std::abs(c2 - l2) / l2;
  const bool ok = r1 < 0.02 && r2 < 0.02;
  report(6, "sector limits", ok, fmt("rel (0,1): %.2e, (0,1/2): %.2e", r1, r2));
}

// 7. equidistribution on the arc [0, pi/4] at height 1e5, 2%
void criterion_equidistribution() {
  const auto st = equidistribution_stat(0.0, std::numbers::pi / 4, 100000);
  const double asym =
      2.0 * (std::numbers::pi / 4) / (std::numbers::pi * std::numbers::pi) * 1e5;
  const double rc = std::abs(static_cast<double>(st.count) - asym) / asym;
  const double rr = std::abs(st.ratio - 0.125) / 0.125;
  const bool ok = rc < 0.02 && rr < 0.02;
  report(7, "circle equidistribution", ok, fmt("rel count: %.2e, ratio: %.2e", rc, rr));
}

// 8. one hundred randomized rational test functions, both identities exact
void criterion_iep() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(987654321);
  std::uniform_int_distribution<long long> radius(1, 20), coord(-10, 10);
  std::uniform_int_distribution<int> num(1, 7), den(1, 5), kind(0, 1);
  bool ok = true;
  for (int i = 0; i < 100 && ok; ++i) {
    const Rational scale(num(rng), den(rng));
    LatticeFunction f;
    if (kind(rng) == 0) {
      std::vector<long long> lo(2), hi(2);
      for (int ax = 0; ax < 2; ++ax) {
        const long long a = coord(rng), b = coord(rng);
        lo[static_cast<std::size_t>(ax)] = std::min(a, b);
        hi[static_cast<std::size_t>(ax)] = std::max(a, b);
      }
      f = lattice_box_indicator(lo, hi, scale);
    } else {
      f = lattice_ball_indicator({coord(rng) / 2, coord(rng) / 2}, radius(rng), scale);
    }
    ok = ok && iep_mobius_identity_check(f, 2).equal;
    ok = ok && iep_odd_identity_check(f).equal;
    if (i % 4 == 0) {
      auto f3 = lattice_ball_indicator({0, 0, 0}, std::min<long long>(radius(rng), 10), scale);
      ok = ok && iep_mobius_identity_check(f3, 3).equal;
    }
  }
  const double dt = seconds_since(t0);
  report(8, "exact inclusion-exclusion", ok && dt < 30.0,
         fmt("100 functions, zero tolerance, %.1fs", dt));
}

// 9. hypotenuse multiplicity characterization up to 1e4
void criterion_fermat() {
  const auto fc = fermat_characterization_check(10000);
  report(9, "hypotenuse characterization", fc.consistent,
         fmt("mismatches: %.0f", static_cast<double>(fc.mismatches.size())));
}

// 10. |D_n/n! - 1/e| < 1/(n+1)! for n <= 20, exact rational arithmetic
void criterion_derangements() {
  bool ok = true;
  for (int n = 0; n <= 20 && ok; ++n) {
    const int m = n + 8;
    Rational s = 0, term = 1;
    for (int k = 0; k <= m; ++k) {
      s += (k % 2 == 0) ? term : -term;
      term /= (k + 1);
    }
    Rational bound = 1;
    for (int k = 2; k <= n + 1; ++k) bound /= k;
    ok = ok && rational_abs(derangement_stats(n).probability - s) + term < bound;
  }
  report(10, "derangement tail bound", ok, "n <= 20 exact");
}

// 11. Gaussian Poisson summation on Z and Z^2, abs_err < 1e-10
void criterion_poisson() {
  double worst = 0.0;
  for (double t : {1.0, 4.0}) {
    worst = std::max(worst, poisson_check(GaussianFunction{t}, Lattice::integer(1), {},
                                          8.0 / std::sqrt(t) + 2, 8.0 * std::sqrt(t) + 2)
                                .abs_err);
    std::vector<double> eta1{1.0 / 3.0};
    worst = std::max(worst, poisson_check(GaussianFunction{t}, Lattice::integer(1), eta1,
                                          8.0 / std::sqrt(t) + 2, 8.0 * std::sqrt(t) + 3)
                                .abs_err);
  }
  worst = std::max(
      worst, poisson_check(GaussianFunction{1.0}, Lattice::integer(2), {}, 10.0, 12.0).abs_err);
  std::vector<double> eta2{1.0 / 3.0, 0.0};
  worst = std::max(
      worst,
      poisson_check(GaussianFunction{1.0}, Lattice::integer(2), eta2, 10.0, 12.0).abs_err);
  report(11, "Poisson summation (Gaussian)", worst < 1e-10, fmt("worst abs_err %.2e", worst));
}

// 12. Fibonacci model set: two gaps with ratio tau, density = vol(W)/covol = a(0)
void criterion_model_set() {
  auto fib = CutProjectScheme::fibonacci();
  ModelSetSource ms(fib);
  const auto pts = ms.enumerate(50.0);
  std::map<long long, double> clusters;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double g = pts[i].coords[0] - pts[i - 1].coords[0];
    clusters[static_cast<long long>(std::llround(g * 1e6))] = g;
  }
  const double tau = (1.0 + std::sqrt(5.0)) / 2.0;
  bool ok = clusters.size() == 2;
  double ratio_err = 1.0;
  if (ok) {
    ratio_err = std::abs(clusters.rbegin()->second / clusters.begin()->second - tau);
    ok = ratio_err < 1e-9;
  }

  auto ball = TestFunction::ball_indicator({0.0}, 1.0);
  const auto est = estimate_density(ball, ms, default_eps_schedule(1.0 / 16, 1.0 / 1024));
  const double rel_density = std::abs(est.extrapolated.real() - fib.density()) / fib.density();
  ok = ok && rel_density < 0.01;

  const auto spec = qc_spectrum(fib, 2.0, 1e-3);
  const double a0_err =
      spec.empty() ? 1.0 : std::abs(spec[0].amplitude.real() - fib.density());
  ok = ok && a0_err < 1e-12;
  report(12, "Fibonacci model set", ok,
         fmt("gap ratio err %.1e, density rel %.1e, a(0) err %.1e", ratio_err, rel_density,
             a0_err));
}

// 13. near-quasicrystal expansion: error strictly decreasing over the
// cutoffs 4, 8, 16, 32 and below 1% of the direct sum at the largest
void criterion_prim_poisson() {
  const auto t0 = Clock::now();
  auto bump = TestFunction::smooth_bump({0.0, 0.0}, 6.0);
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  double final_rel = 1.0;
  for (double cutoff : {4.0, 8.0, 16.0, 32.0}) {
    const auto r = prim_poisson_check(2, bump, 8, cutoff);
    decreasing = decreasing && r.abs_err < prev;
    prev = r.abs_err;
    final_rel = r.abs_err / std::abs(r.lhs);
  }
  const double dt = seconds_since(t0);
  const bool ok = decreasing && final_rel < 0.01 && dt < 300.0;
  report(13, "near-quasicrystal expansion", ok,
         fmt("strictly decreasing, final rel %.1e, %.1fs", final_rel, dt));
}

// 14. twisted density at eta = (1/2, 0) within 3% of a(eta) = -2/pi^2
void criterion_twisted() {
  auto ball = TestFunction::ball_indicator({0, 0}, 1.0);
  std::vector<RationalCoord> eta{{1, 2}, {0, 1}};
  const auto est = twisted_density_check(2, eta, ball, default_eps_schedule(1.0 / 16, 1.0 / 1024));
  const double target = twisted_density_target(2, eta);
  const double rel =
      std::abs(est.extrapolated - std::complex<double>(target, 0.0)) / std::abs(target);
  report(14, "twisted density", rel < 0.03, fmt("rel %.2e against -2/pi^2", rel));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_somos();
  criterion_lehmer();
  criterion_coprime();
  criterion_prim_density();
  criterion_parity_split();
  criterion_sector();
  criterion_equidistribution();
  criterion_iep();
  criterion_fermat();
  criterion_derangements();
  criterion_poisson();
  criterion_model_set();
  criterion_prim_poisson();
  criterion_twisted();
  std::printf("%d/14 criteria passed in %.1fs\n", 14 - g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
