#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grsum/point_source.hpp"
#include "grsum/rational.hpp"

namespace grsum {

// ---------------------------------------------------------------------------
// Mobius function
// ---------------------------------------------------------------------------

struct MobiusTable {
  long long limit = 0;
  std::vector<int8_t> values;  // values[k] = mu(k), index 0 unused

  int mu(long long k) const {
    if (k < 1 || k > limit) throw std::out_of_range("MobiusTable: index out of range");
    return values[static_cast<std::size_t>(k)];
  }

  long long mertens(long long n) const {
    if (n > limit) throw std::out_of_range("MobiusTable: mertens beyond table");
    long long s = 0;
    for (long long k = 1; k <= n; ++k) s += values[static_cast<std::size_t>(k)];
    return s;
  }
};

// Linear sieve: every composite is struck exactly once by its smallest
// prime factor.
inline MobiusTable mobius_sieve(long long limit) {
  if (limit < 1) throw std::invalid_argument("mobius_sieve: limit must be >= 1");
  MobiusTable t;
  t.limit = limit;
  t.values.assign(static_cast<std::size_t>(limit) + 1, 0);
  t.values[1] = 1;
  std::vector<long long> primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (long long n = 2; n <= limit; ++n) {
    if (!composite[static_cast<std::size_t>(n)]) {
      primes.push_back(n);
      t.values[static_cast<std::size_t>(n)] = -1;
    }
    for (long long p : primes) {
      if (p * n > limit) break;
      composite[static_cast<std::size_t>(p * n)] = true;
      if (n % p == 0) {
        t.values[static_cast<std::size_t>(p * n)] = 0;
        break;
      }
      t.values[static_cast<std::size_t>(p * n)] =
          static_cast<int8_t>(-t.values[static_cast<std::size_t>(n)]);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// zeta(d) by partial sum plus Euler-Maclaurin tail
// ---------------------------------------------------------------------------

// sum_{n>M} n^-d = M^{1-d}/(d-1) - M^-d/2 + d*M^{-d-1}/12 + R,
// |R| <= d(d+1)(d+2)/720 * M^{-d-3}  (Euler-Maclaurin).
inline double zeta(int d, double tol = 1e-12) {
  if (d < 2) throw std::invalid_argument("zeta: requires d >= 2 (series diverges)");
  const double dd = static_cast<double>(d);
  long long M = 16;
  while (dd * (dd + 1.0) * (dd + 2.0) / 720.0 * std::pow(static_cast<double>(M), -dd - 3.0) >= tol)
    M *= 2;
  double head = 0.0;
  for (long long n = M; n >= 1; --n) head += std::pow(static_cast<double>(n), -dd);
  const double m = static_cast<double>(M);
  const double tail = std::pow(m, 1.0 - dd) / (dd - 1.0) - 0.5 * std::pow(m, -dd) +
                      dd / 12.0 * std::pow(m, -dd - 1.0);
  return head + tail;
}

// ---------------------------------------------------------------------------
// Primitive lattice point sources
// ---------------------------------------------------------------------------

enum class PrimitiveSetKind {
  prim,       // Z^d_prim: gcd(|z_1|,...,|z_d|) = 1  (includes (+-1,0),(0,+-1))
  prim_star,  // d = 2, additionally z_1 - z_2 odd
  odd_prim,   // d = 2, both coordinates odd and coprime
};

// Lattice points visible from the origin, with the gcd convention
// gcd(a, 0) = a so the axis unit vectors are primitive.
class PrimitiveLattice : public PointSource {
 public:
  PrimitiveLattice(PrimitiveSetKind kind, int d) : kind_(kind), d_(d) {
    if (kind == PrimitiveSetKind::prim) {
      if (d < 2) throw std::invalid_argument("PrimitiveLattice: prim requires d >= 2");
    } else {
      if (d != 2) throw std::invalid_argument("PrimitiveLattice: parity kinds require d = 2");
    }
  }

  PrimitiveSetKind kind() const { return kind_; }
  int dimension() const override { return d_; }

  std::string descriptor() const override {
    switch (kind_) {
      case PrimitiveSetKind::prim: return "Z^" + std::to_string(d_) + "_prim";
      case PrimitiveSetKind::prim_star: return "Z^2*_prim";
      case PrimitiveSetKind::odd_prim: return "(Z_odd)^2_prim";
    }
    return "?";
  }

  void visit_points(double radius, const PointVisitor& emit) const override {
    detail::for_each_lattice_point(
        d_, radius, [&](std::span<const long long> c, std::span<const double> x) {
          if (accepts(c)) emit(x, {1.0, 0.0});
        });
  }

  bool accepts(std::span<const long long> c) const {
    switch (kind_) {
      case PrimitiveSetKind::prim:
        return coords_gcd(c) == 1;
      case PrimitiveSetKind::prim_star:
        return ((c[0] - c[1]) & 1LL) != 0 && coords_gcd(c) == 1;
      case PrimitiveSetKind::odd_prim:
        return (c[0] & 1LL) != 0 && (c[1] & 1LL) != 0 && coords_gcd(c) == 1;
    }
    return false;
  }

  static long long coords_gcd(std::span<const long long> c) {
    long long g = 0;
    for (long long v : c) {
      g = std::gcd(g, v < 0 ? -v : v);
      if (g == 1) return 1;
    }
    return g;  // 0 for the origin, which is never primitive
  }

 private:
  PrimitiveSetKind kind_;
  int d_;
};

inline PrimitiveLattice primitive_points(PrimitiveSetKind kind, int d = 2) {
  return PrimitiveLattice(kind, d);
}

// ---------------------------------------------------------------------------
// Exact inclusion-exclusion identity checks
// ---------------------------------------------------------------------------

// A compactly supported rational-valued function on Z^d: value(z) = 0
// whenever |z| > support_radius.
struct LatticeFunction {
  int dimension = 0;
  double support_radius = 0.0;
  std::function<Rational(std::span<const long long>)> value;
};

inline LatticeFunction lattice_box_indicator(std::vector<long long> lo,
                                             std::vector<long long> hi,
                                             Rational scale = 1) {
  if (lo.empty() || lo.size() != hi.size())
    throw std::invalid_argument("lattice_box_indicator: bad bounds");
  LatticeFunction f;
  f.dimension = static_cast<int>(lo.size());
  double r2 = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] < lo[i]) throw std::invalid_argument("lattice_box_indicator: hi < lo");
    r2 += static_cast<double>(std::max(lo[i] * lo[i], hi[i] * hi[i]));
  }
  f.support_radius = std::sqrt(r2);
  f.value = [lo = std::move(lo), hi = std::move(hi), scale](std::span<const long long> z) {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (z[i] < lo[i] || z[i] > hi[i]) return Rational(0);
    return scale;
  };
  return f;
}

inline LatticeFunction lattice_ball_indicator(std::vector<long long> center,
                                              long long radius, Rational scale = 1) {
  LatticeFunction f;
  f.dimension = static_cast<int>(center.size());
  double c2 = 0.0;
  for (long long c : center) c2 += static_cast<double>(c * c);
  f.support_radius = std::sqrt(c2) + static_cast<double>(radius);
  f.value = [center = std::move(center), radius, scale](std::span<const long long> z) {
    long long s = 0;
    for (std::size_t i = 0; i < center.size(); ++i) {
      const long long d = z[i] - center[i];
      s += d * d;
    }
    return s <= radius * radius ? scale : Rational(0);
  };
  return f;
}

inline LatticeFunction lattice_point_mass(std::vector<long long> at, Rational v = 1) {
  LatticeFunction f;
  f.dimension = static_cast<int>(at.size());
  double c2 = 0.0;
  for (long long c : at) c2 += static_cast<double>(c * c);
  f.support_radius = std::sqrt(c2);
  f.value = [at = std::move(at), v](std::span<const long long> z) {
    for (std::size_t i = 0; i < at.size(); ++i)
      if (z[i] != at[i]) return Rational(0);
    return v;
  };
  return f;
}

struct IdentityCheck {
  Rational lhs;
  Rational rhs;
  bool equal = false;
};

namespace detail {

template <typename Pred, typename Term>
void for_each_lattice_in_box(int d, long long bound, Pred&& pred, Term&& term) {
  std::vector<long long> z(d);
  auto rec = [&](auto&& self, int axis) -> void {
    for (long long v = -bound; v <= bound; ++v) {
      z[axis] = v;
      if (axis + 1 == d) {
        if (pred(std::span<const long long>(z))) term(std::span<const long long>(z));
      } else {
        self(self, axis + 1);
      }
    }
  };
  if (bound >= 0) rec(rec, 0);
}

}  // namespace detail

// sum_{z in Z^d_prim} f(z)  =  sum_{k>=1} mu(k) sum_{w in Z^d \ 0} f(k w),
// both sides evaluated exactly; k beyond the support radius contributes
// nothing because |k w| >= k for w != 0.
inline IdentityCheck iep_mobius_identity_check(const LatticeFunction& f, int d) {
  if (d < 2) throw std::invalid_argument("iep_mobius_identity_check: d >= 2");
  if (f.dimension != d) throw std::invalid_argument("iep_mobius_identity_check: dimension mismatch");
  const long long bound = static_cast<long long>(std::floor(f.support_radius));
  IdentityCheck out;

  detail::for_each_lattice_in_box(
      d, bound,
      [&](std::span<const long long> z) { return PrimitiveLattice::coords_gcd(z) == 1; },
      [&](std::span<const long long> z) { out.lhs += f.value(z); });

  const MobiusTable mob = mobius_sieve(std::max<long long>(1, bound));
  std::vector<long long> scaled(d);
  for (long long k = 1; k <= bound; ++k) {
    const int mu = mob.mu(k);
    if (mu == 0) continue;
    Rational inner = 0;
    detail::for_each_lattice_in_box(
        d, bound / k,
        [&](std::span<const long long> w) {
          for (long long v : w)
            if (v != 0) return true;
          return false;
        },
        [&](std::span<const long long> w) {
          for (int i = 0; i < d; ++i) scaled[i] = k * w[i];
          inner += f.value(scaled);
        });
    out.rhs += Rational(mu) * inner;
  }
  out.equal = (out.lhs == out.rhs);
  return out;
}

// sum_{z in (Z_odd)^2_prim} f(z)
//   =  sum_{k>=1} mu(k) sum_{h>=0} sum_{w in (Z_odd)^2} f(k 2^h w).
inline IdentityCheck iep_odd_identity_check(const LatticeFunction& f) {
  if (f.dimension != 2) throw std::invalid_argument("iep_odd_identity_check: d = 2 only");
  const long long bound = static_cast<long long>(std::floor(f.support_radius));
  IdentityCheck out;

  detail::for_each_lattice_in_box(
      2, bound,
      [&](std::span<const long long> z) {
        return (z[0] & 1LL) != 0 && (z[1] & 1LL) != 0 &&
               PrimitiveLattice::coords_gcd(z) == 1;
      },
      [&](std::span<const long long> z) { out.lhs += f.value(z); });

  const MobiusTable mob = mobius_sieve(std::max<long long>(1, bound));
  std::vector<long long> scaled(2);
  for (long long k = 1; k <= bound; ++k) {
    const int mu = mob.mu(k);
    if (mu == 0) continue;
    for (long long m = k; m <= bound; m *= 2) {  // m = k * 2^h
      Rational inner = 0;
      detail::for_each_lattice_in_box(
          2, bound / m,
          [&](std::span<const long long> w) {
            return (w[0] & 1LL) != 0 && (w[1] & 1LL) != 0;
          },
          [&](std::span<const long long> w) {
            scaled[0] = m * w[0];
            scaled[1] = m * w[1];
            inner += f.value(scaled);
          });
      out.rhs += Rational(mu) * inner;
    }
  }
  out.equal = (out.lhs == out.rhs);
  return out;
}

// ---------------------------------------------------------------------------
// Coprime-pair statistics and derangements
// ---------------------------------------------------------------------------

// |{(a,b) in [1,N]^2 : gcd(a,b)=1}| / N^2 via the totient sieve identity
// count = 2*sum_{m<=N} phi(m) - 1.
inline Rational coprime_fraction(long long N) {
  if (N < 1) throw std::invalid_argument("coprime_fraction: N >= 1");
  std::vector<long long> phi(static_cast<std::size_t>(N) + 1);
  for (long long i = 0; i <= N; ++i) phi[static_cast<std::size_t>(i)] = i;
  for (long long p = 2; p <= N; ++p) {
    if (phi[static_cast<std::size_t>(p)] == p) {  // p prime
      for (long long m = p; m <= N; m += p)
        phi[static_cast<std::size_t>(m)] -= phi[static_cast<std::size_t>(m)] / p;
    }
  }
  BigInt total = 0;
  for (long long m = 1; m <= N; ++m) total += phi[static_cast<std::size_t>(m)];
  const BigInt count = 2 * total - 1;
  return Rational(count, BigInt(N) * N);
}

struct DerangementStats {
  BigInt count;
  Rational probability;
};

// D_n = n! * sum_{k=0..n} (-1)^k / k!, evaluated as the exact alternating
// sum of the integers n!/k!.
inline DerangementStats derangement_stats(int n) {
  if (n < 0) throw std::invalid_argument("derangement_stats: n >= 0");
  BigInt factorial = 1;
  for (int i = 2; i <= n; ++i) factorial *= i;
  BigInt term = factorial;  // n!/k! at k = 0
  BigInt count = 0;
  for (int k = 0; k <= n; ++k) {
    count += (k % 2 == 0) ? term : -term;
    if (k < n) term /= (k + 1);  // n!/(k+1)! = (n!/k!) / (k+1)
  }
  DerangementStats s;
  s.count = count;
  s.probability = Rational(count, factorial);
  return s;
}

}  // namespace grsum
