#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "grsum/arith.hpp"
#include "grsum/core.hpp"

using namespace grsum;
using Catch::Approx;

namespace {

// Independent Mobius oracle by trial factorization.
int mu_slow(long long n) {
  int mu = 1;
  for (long long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

LatticeFunction random_lattice_function(std::mt19937_64& rng, int d, long long max_radius) {
  std::uniform_int_distribution<long long> radius(1, max_radius);
  std::uniform_int_distribution<long long> coord(-max_radius / 2, max_radius / 2);
  std::uniform_int_distribution<int> num(1, 7), den(1, 5), kind(0, 1);
  const Rational scale(num(rng), den(rng));
  if (kind(rng) == 0) {
    std::vector<long long> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const long long a = coord(rng), b = coord(rng);
      lo[static_cast<std::size_t>(i)] = std::min(a, b);
      hi[static_cast<std::size_t>(i)] = std::max(a, b);
    }
    return lattice_box_indicator(lo, hi, scale);
  }
  std::vector<long long> center(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) center[static_cast<std::size_t>(i)] = coord(rng) / 2;
  return lattice_ball_indicator(center, radius(rng), scale);
}

}  // namespace

TEST_CASE("mobius_sieve basics") {
  auto t = mobius_sieve(6);
  CHECK(t.mu(1) == 1);
  CHECK(t.mu(2) == -1);
  CHECK(t.mu(3) == -1);
  CHECK(t.mu(4) == 0);
  CHECK(t.mu(5) == -1);
  CHECK(t.mu(6) == 1);
  CHECK_THROWS_AS(mobius_sieve(0), std::invalid_argument);
}

TEST_CASE("mobius_sieve agrees with trial factorization and sums to Mertens") {
  auto t = mobius_sieve(10000);
  for (long long k = 1; k <= 10000; ++k) CHECK(t.mu(k) == mu_slow(k));
  CHECK(t.mertens(100) == 1);

  double s = 0.0;
  for (long long k = 1; k <= 10000; ++k)
    s += static_cast<double>(t.mu(k)) / (static_cast<double>(k) * static_cast<double>(k));
  CHECK(std::abs(s - 6.0 / (std::numbers::pi * std::numbers::pi)) < 1e-3);
}

TEST_CASE("mobius summatory identity sum_{d|n} mu(d) = [n=1]") {
  auto t = mobius_sieve(10000);
  for (long long n = 1; n <= 10000; ++n) {
    long long s = 0;
    for (long long d = 1; d * d <= n; ++d) {
      if (n % d) continue;
      s += t.mu(d);
      if (d * d != n) s += t.mu(n / d);
    }
    REQUIRE(s == (n == 1 ? 1 : 0));
  }
}

TEST_CASE("zeta values") {
  CHECK(zeta(2, 1e-10) == Approx(std::numbers::pi * std::numbers::pi / 6).margin(1e-10));
  CHECK(zeta(4, 1e-10) == Approx(std::pow(std::numbers::pi, 4) / 90).margin(1e-10));
  CHECK(1.0 / zeta(2, 1e-10) == Approx(0.6079271019).margin(1e-9));
  CHECK_THROWS_AS(zeta(1), std::invalid_argument);
}

TEST_CASE("primitive point enumeration on small balls") {
  PrimitiveLattice prim(PrimitiveSetKind::prim, 2);
  CHECK(prim.enumerate(1.5).size() == 8);  // (+-1,0),(0,+-1),(+-1,+-1)
  PrimitiveLattice odd(PrimitiveSetKind::odd_prim, 2);
  CHECK(odd.enumerate(2.0).size() == 4);  // (+-1,+-1)
  CHECK_THROWS_AS(PrimitiveLattice(PrimitiveSetKind::prim, 1), std::invalid_argument);
  CHECK_THROWS_AS(PrimitiveLattice(PrimitiveSetKind::prim_star, 3), std::invalid_argument);
}

TEST_CASE("primitive density matches the reciprocal zeta value at R = 1000") {
  PrimitiveLattice prim(PrimitiveSetKind::prim, 2);
  long long count = 0;
  prim.visit_points(1000.0, [&](std::span<const double>, std::complex<double>) { ++count; });
  const double density = static_cast<double>(count) / (std::numbers::pi * 1e6);
  const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
  CHECK(std::abs(density - target) / target < 0.01);
}

TEST_CASE("set algebra: the parity split partitions the primitive points") {
  PrimitiveLattice prim(PrimitiveSetKind::prim, 2);
  PrimitiveLattice star(PrimitiveSetKind::prim_star, 2);
  PrimitiveLattice odd(PrimitiveSetKind::odd_prim, 2);
  for (double R : {10.0, 35.0, 100.0}) {
    std::set<std::pair<long long, long long>> sp, ss, so;
    auto key = [](const WeightedPoint& w) {
      return std::pair<long long, long long>(static_cast<long long>(w.coords[0]),
                                             static_cast<long long>(w.coords[1]));
    };
    for (const auto& w : prim.enumerate(R)) sp.insert(key(w));
    for (const auto& w : star.enumerate(R)) ss.insert(key(w));
    for (const auto& w : odd.enumerate(R)) so.insert(key(w));
    REQUIRE(ss.size() + so.size() == sp.size());
    for (const auto& k : ss) {
      CHECK(sp.count(k) == 1);
      CHECK(so.count(k) == 0);
    }
    for (const auto& k : so) CHECK(sp.count(k) == 1);
  }
}

TEST_CASE("iep_mobius_identity_check frozen examples") {
  // brute-force count of primitive points in [-3,3]^2 is 32:
  // 4 axis points and 7 coprime pairs per open quadrant
  {
    long long brute = 0;
    for (int x = -3; x <= 3; ++x)
      for (int y = -3; y <= 3; ++y) {
        if (x == 0 && y == 0) continue;
        if (std::gcd(std::abs(x), std::abs(y)) == 1) ++brute;
      }
    REQUIRE(brute == 32);
    auto r = iep_mobius_identity_check(lattice_box_indicator({-3, -3}, {3, 3}), 2);
    CHECK(r.lhs == Rational(32));
    CHECK(r.rhs == Rational(32));
    CHECK(r.equal);
  }
  {
    // non-primitive point: mu-weighted right side cancels (k = 1 vs k = 2)
    auto r = iep_mobius_identity_check(lattice_point_mass({2, 4}), 2);
    CHECK(r.lhs == Rational(0));
    CHECK(r.rhs == Rational(0));
    CHECK(r.equal);
  }
  {
    auto r = iep_mobius_identity_check(lattice_point_mass({1, 0}), 2);
    CHECK(r.lhs == Rational(1));
    CHECK(r.rhs == Rational(1));
    CHECK(r.equal);
  }
}

TEST_CASE("iep_odd_identity_check frozen examples") {
  {
    // brute count of odd coprime pairs in [-5,5]^2
    long long brute = 0;
    for (int x = -5; x <= 5; ++x)
      for (int y = -5; y <= 5; ++y)
        if ((x & 1) && (y & 1) && std::gcd(std::abs(x), std::abs(y)) == 1) ++brute;
    auto r = iep_odd_identity_check(lattice_box_indicator({-5, -5}, {5, 5}));
    CHECK(r.lhs == Rational(brute));
    CHECK(r.equal);
  }
  {
    // (3,9) is odd but not coprime: k=1 and k=3 terms cancel on the right
    auto r = iep_odd_identity_check(lattice_point_mass({3, 9}));
    CHECK(r.lhs == Rational(0));
    CHECK(r.rhs == Rational(0));
  }
  {
    auto r = iep_odd_identity_check(lattice_point_mass({1, 1}));
    CHECK(r.lhs == Rational(1));
    CHECK(r.rhs == Rational(1));
  }
}

TEST_CASE("both identities hold exactly on randomized rational functions") {
  std::mt19937_64 rng(20260810);
  for (int it = 0; it < 40; ++it) {
    auto f2 = random_lattice_function(rng, 2, 20);
    auto rm = iep_mobius_identity_check(f2, 2);
    REQUIRE(rm.equal);
    auto ro = iep_odd_identity_check(f2);
    REQUIRE(ro.equal);
    if (it % 4 == 0) {
      auto f3 = random_lattice_function(rng, 3, 10);
      auto r3 = iep_mobius_identity_check(f3, 3);
      REQUIRE(r3.equal);
    }
  }
}

TEST_CASE("exact linearity of the primitive-point functional") {
  // sum over primitive points of (a f + b g) equals a*sum(f) + b*sum(g)
  // exactly, in rational arithmetic
  auto f = lattice_box_indicator({-4, -2}, {3, 5});
  auto g = lattice_ball_indicator({1, 1}, 3);
  const Rational a(7, 3), b(-2, 5);
  LatticeFunction combined;
  combined.dimension = 2;
  combined.support_radius = std::max(f.support_radius, g.support_radius);
  combined.value = [&, a, b](std::span<const long long> z) {
    return a * f.value(z) + b * g.value(z);
  };
  auto rc = iep_mobius_identity_check(combined, 2);
  auto rf = iep_mobius_identity_check(f, 2);
  auto rg = iep_mobius_identity_check(g, 2);
  CHECK(rc.lhs == a * rf.lhs + b * rg.lhs);
  CHECK(rc.rhs == a * rf.rhs + b * rg.rhs);
  CHECK(rc.equal);
}

TEST_CASE("coprime_fraction") {
  CHECK(coprime_fraction(1) == Rational(1));
  // brute force over the 16 pairs
  {
    long long brute = 0;
    for (int a = 1; a <= 4; ++a)
      for (int b = 1; b <= 4; ++b)
        if (std::gcd(a, b) == 1) ++brute;
    REQUIRE(brute == 11);
    CHECK(coprime_fraction(4) == Rational(11, 16));
  }
  const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
  CHECK(std::abs(to_double(coprime_fraction(10000)) - target) / target < 0.005);
  CHECK_THROWS_AS(coprime_fraction(0), std::invalid_argument);
}

TEST_CASE("derangement counts and the 1/e tail bound") {
  CHECK(derangement_stats(0).count == 1);
  CHECK(derangement_stats(1).count == 0);
  {
    // brute force over the 24 permutations of 4 elements
    int perm[4] = {0, 1, 2, 3};
    long long brute = 0;
    std::sort(perm, perm + 4);
    do {
      bool fixed = false;
      for (int i = 0; i < 4; ++i) fixed = fixed || perm[i] == i;
      if (!fixed) ++brute;
    } while (std::next_permutation(perm, perm + 4));
    REQUIRE(brute == 9);
    CHECK(derangement_stats(4).count == 9);
  }
  // |D_n/n! - 1/e| < 1/(n+1)! exactly, using the alternating series interval
  // for 1/e: |S_m - 1/e| <= 1/(m+1)! with S_m = sum_{k<=m} (-1)^k/k!.
  for (int n = 0; n <= 20; ++n) {
    const int m = n + 8;
    Rational s = 0, term = 1;  // (-1)^k/k!
    for (int k = 0; k <= m; ++k) {
      s += (k % 2 == 0) ? term : -term;
      term /= (k + 1);
    }
    Rational tail = term;  // 1/(m+1)!
    Rational bound = 1;
    for (int k = 2; k <= n + 1; ++k) bound /= k;  // 1/(n+1)!
    const Rational diff = rational_abs(derangement_stats(n).probability - s);
    CHECK(diff + tail < bound);
  }
  const double d12 = to_double(derangement_stats(12).probability);
  CHECK(std::abs(d12 - std::exp(-1.0)) < 1e-8);
}
