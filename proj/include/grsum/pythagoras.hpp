#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "grsum/rational.hpp"

namespace grsum {

// Primitive Pythagorean triple in canonical (odd leg, even leg, hypotenuse)
// form together with its generator pair: x = m^2-n^2, y = 2mn, z = m^2+n^2
// with m > n >= 1, gcd(m,n) = 1, m-n odd.
struct PPTriple {
  long long x = 0;  // odd leg
  long long y = 0;  // even leg
  long long z = 0;  // hypotenuse
  long long m = 0;
  long long n = 0;

  friend bool operator==(const PPTriple& a, const PPTriple& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }
};

inline PPTriple ppt_from_pair(long long m, long long n) {
  if (n < 1) throw std::invalid_argument("ppt_from_pair: need n >= 1");
  if (m <= n) throw std::invalid_argument("ppt_from_pair: need m > n");
  if (std::gcd(m, n) != 1) throw std::invalid_argument("ppt_from_pair: need gcd(m,n) = 1");
  if (((m - n) & 1LL) == 0) throw std::invalid_argument("ppt_from_pair: need m - n odd");
  if (m > 3037000499LL) throw std::invalid_argument("ppt_from_pair: m too large for 64-bit");
  PPTriple t;
  t.m = m;
  t.n = n;
  t.x = m * m - n * n;
  t.y = 2 * m * n;
  t.z = m * m + n * n;
  return t;
}

// All PPTs with z <= z_max, ordered by ascending z and, within equal z,
// ascending even leg y (the tie-break that reproduces the published
// enumeration at z = 65, 85 and 9425).
inline std::vector<PPTriple> enumerate_ppt(long long z_max) {
  std::vector<PPTriple> out;
  if (z_max < 5) return out;
  for (long long m = 2; m * m + 1 <= z_max; ++m) {
    for (long long n = 1 + (m & 1LL); n < m && m * m + n * n <= z_max; n += 2) {
      if (std::gcd(m, n) != 1) continue;
      out.push_back(ppt_from_pair(m, n));
    }
  }
  std::sort(out.begin(), out.end(), [](const PPTriple& a, const PPTriple& b) {
    if (a.z != b.z) return a.z < b.z;
    return a.y < b.y;
  });
  return out;
}

// z_N / N for the N-th triple in the canonical order (tends to 2*pi).
inline double lehmer_ratio(long long N) {
  if (N < 1) throw std::invalid_argument("lehmer_ratio: N >= 1");
  // z_N ~ 2*pi*N; grow the enumeration bound until the list is long enough.
  long long bound = static_cast<long long>(8.0 * static_cast<double>(N)) + 64;
  for (;;) {
    const std::vector<PPTriple> list = enumerate_ppt(bound);
    if (static_cast<long long>(list.size()) >= N)
      return static_cast<double>(list[static_cast<std::size_t>(N - 1)].z) /
             static_cast<double>(N);
    bound *= 2;
  }
}

// |P(N; alpha, beta)|: coprime pairs (m,n), m-n odd, alpha <= n/m <= beta,
// m^2+n^2 <= N (inclusive boundary).
inline long long sector_count(long long N, double alpha, double beta) {
  if (!(0.0 <= alpha && alpha < beta && beta <= 1.0))
    throw std::invalid_argument("sector_count: need 0 <= alpha < beta <= 1");
  if (N < 1) throw std::invalid_argument("sector_count: N >= 1");
  long long count = 0;
  for (long long m = 1; m * m + 1 <= N; ++m) {
    const double md = static_cast<double>(m);
    for (long long n = 1 + (m & 1LL); n <= m && m * m + n * n <= N; n += 2) {
      const double nd = static_cast<double>(n);
      if (nd < alpha * md || nd > beta * md) continue;
      if (std::gcd(m, n) != 1) continue;
      ++count;
    }
  }
  return count;
}

// A rational point on the unit circle with its height (least h such that
// h*(p,q) is integral) and its angle in [0, 2*pi).
struct RationalCirclePoint {
  Rational p;
  Rational q;
  long long height = 0;
  double angle = 0.0;
};

namespace detail {

inline double circle_angle(const Rational& p, const Rational& q) {
  const long double pd = p.convert_to<long double>();
  const long double qd = q.convert_to<long double>();
  long double a = std::atan2(qd, pd);
  if (a < 0) a += 2.0L * std::numbers::pi_v<long double>;
  if (a >= 2.0L * std::numbers::pi_v<long double>) a = 0.0L;
  return static_cast<double>(a);
}

}  // namespace detail

// All of S^1(Q) with height <= h_max: the four lattice points of height 1
// plus eight signed/swapped points (+-x/z, +-y/z), (+-y/z, +-x/z) for each
// PPT with z <= h_max.  Sorted by height, then angle.
inline std::vector<RationalCirclePoint> rational_circle_points(long long h_max) {
  if (h_max < 1) throw std::invalid_argument("rational_circle_points: h_max >= 1");
  std::vector<RationalCirclePoint> pts;
  auto push = [&](Rational p, Rational q, long long h) {
    RationalCirclePoint r;
    r.angle = detail::circle_angle(p, q);
    r.p = std::move(p);
    r.q = std::move(q);
    r.height = h;
    pts.push_back(std::move(r));
  };
  push(1, 0, 1);
  push(0, 1, 1);
  push(-1, 0, 1);
  push(0, -1, 1);
  for (const PPTriple& t : enumerate_ppt(h_max)) {
    const Rational a(t.x, t.z), b(t.y, t.z);
    for (int sa : {+1, -1})
      for (int sb : {+1, -1}) {
        push(sa * a, sb * b, t.z);
        push(sa * b, sb * a, t.z);
      }
  }
  std::sort(pts.begin(), pts.end(), [](const RationalCirclePoint& u, const RationalCirclePoint& v) {
    if (u.height != v.height) return u.height < v.height;
    return u.angle < v.angle;
  });
  return pts;
}

struct EquidistributionStat {
  long long count = 0;   // points with angle in [theta1, theta2)
  long long total = 0;   // all points of height <= h_max
  double ratio = 0.0;
  double expected = 0.0;  // (theta2 - theta1) / (2*pi)
};

inline EquidistributionStat equidistribution_stat(double theta1, double theta2,
                                                  long long h_max) {
  if (!(0.0 <= theta1 && theta1 < theta2 && theta2 <= 2.0 * std::numbers::pi + 1e-15))
    throw std::invalid_argument("equidistribution_stat: need 0 <= theta1 < theta2 <= 2*pi");
  const std::vector<RationalCirclePoint> pts = rational_circle_points(h_max);
  EquidistributionStat s;
  s.total = static_cast<long long>(pts.size());
  for (const auto& pt : pts)
    if (pt.angle >= theta1 && pt.angle < theta2) ++s.count;
  s.ratio = static_cast<double>(s.count) / static_cast<double>(s.total);
  s.expected = (theta2 - theta1) / (2.0 * std::numbers::pi);
  return s;
}

struct FermatMismatch {
  long long z = 0;
  long long multiplicity = 0;  // observed in the enumeration
  long long expected = 0;      // 2^(nu(z)-1) if all prime divisors are 1 mod 4
};

struct FermatCheck {
  bool consistent = true;
  std::vector<FermatMismatch> mismatches;
};

// Fermat's characterization: an odd z appears as a hypotenuse iff every
// prime divisor of z is congruent to 1 mod 4, and then exactly
// 2^(nu(z)-1) times, nu = number of distinct prime divisors.
inline FermatCheck fermat_characterization_check(long long z_max) {
  if (z_max < 5) throw std::invalid_argument("fermat_characterization_check: z_max >= 5");
  std::map<long long, long long> multiplicity;
  for (const PPTriple& t : enumerate_ppt(z_max)) ++multiplicity[t.z];

  // smallest-prime-factor sieve for odd z
  std::vector<int32_t> spf(static_cast<std::size_t>(z_max) + 1, 0);
  for (long long i = 2; i <= z_max; ++i) {
    if (spf[static_cast<std::size_t>(i)] == 0) {
      for (long long j = i; j <= z_max; j += i)
        if (spf[static_cast<std::size_t>(j)] == 0)
          spf[static_cast<std::size_t>(j)] = static_cast<int32_t>(i);
    }
  }

  FermatCheck out;
  for (long long z = 3; z <= z_max; z += 2) {
    int nu = 0;
    bool all_1mod4 = true;
    long long v = z;
    while (v > 1) {
      const long long p = spf[static_cast<std::size_t>(v)];
      if (p % 4 != 1) all_1mod4 = false;
      ++nu;
      while (v % p == 0) v /= p;
    }
    const long long expected = all_1mod4 ? (1LL << (nu - 1)) : 0;
    const auto it = multiplicity.find(z);
    const long long got = it == multiplicity.end() ? 0 : it->second;
    if (got != expected) {
      out.consistent = false;
      out.mismatches.push_back({z, got, expected});
    }
  }
  return out;
}

}  // namespace grsum
