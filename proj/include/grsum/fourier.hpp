#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grsum/arith.hpp"
#include "grsum/core.hpp"
#include "grsum/linalg.hpp"
#include "grsum/point_source.hpp"
#include "grsum/quadrature.hpp"
#include "grsum/summation.hpp"
#include "grsum/test_function.hpp"

namespace grsum {

// ---------------------------------------------------------------------------
// Lattices and duals
// ---------------------------------------------------------------------------

// Full-rank lattice in R^n, generated by the columns of its basis.
class Lattice {
 public:
  explicit Lattice(SquareMatrix basis) : basis_(std::move(basis)) {
    const double det = basis_.determinant();
    if (det == 0.0 || !std::isfinite(det))
      throw std::invalid_argument("Lattice: basis is singular");
    covolume_ = std::abs(det);
  }

  static Lattice integer(int d) { return Lattice(SquareMatrix::identity(d)); }

  int dimension() const { return basis_.size(); }
  const SquareMatrix& basis() const { return basis_; }
  double covolume() const { return covolume_; }

 private:
  SquareMatrix basis_;
  double covolume_ = 0.0;
};

// L* = {eta : <eta, z> in Z for all z in L}; basis is the inverse transpose.
inline Lattice dual_lattice(const Lattice& L) {
  if (L.basis().condition_inf() > 1e12)
    throw std::invalid_argument("dual_lattice: basis is near-singular (condition number > 1e12)");
  return Lattice(L.basis().inverse().transposed());
}

namespace detail {

// Visits every lattice vector x = B k with |x - center| <= radius, in
// lexicographic order of the integer coordinates k.
template <typename F>
void for_each_lattice_vector_near(const Lattice& L, std::span<const double> center,
                                  double radius, F&& body) {
  const int n = L.dimension();
  const SquareMatrix inv = L.basis().inverse();
  std::vector<double> k_center(n, 0.0);
  if (!center.empty()) k_center = inv.apply(center);
  std::vector<long long> klo(n), khi(n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += inv(i, j) * inv(i, j);
    const double slack = std::sqrt(row) * radius + 1e-9;
    klo[i] = static_cast<long long>(std::floor(k_center[i] - slack));
    khi[i] = static_cast<long long>(std::ceil(k_center[i] + slack));
  }
  std::vector<long long> k(n);
  std::vector<double> x(n);
  const double r2 = radius * radius;
  auto rec = [&](auto&& self, int axis) -> void {
    for (long long v = klo[axis]; v <= khi[axis]; ++v) {
      k[axis] = v;
      if (axis + 1 == n) {
        double dist2 = 0.0;
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += L.basis()(i, j) * static_cast<double>(k[j]);
          x[i] = s;
          const double c = center.empty() ? 0.0 : center[i];
          dist2 += (s - c) * (s - c);
        }
        if (dist2 <= r2)
          body(std::span<const long long>(k), std::span<const double>(x));
      } else {
        self(self, axis + 1);
      }
    }
  };
  if (radius >= 0) rec(rec, 0);
}

template <typename F>
void for_each_lattice_vector(const Lattice& L, double radius, F&& body) {
  for_each_lattice_vector_near(L, {}, radius, std::forward<F>(body));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classical Poisson summation on a lattice, Gaussian family
// ---------------------------------------------------------------------------

// f(x) = e^{-pi t |x|^2}, whose transform is t^{-d/2} e^{-pi |xi|^2 / t}.
struct GaussianFunction {
  double t = 1.0;

  double value2(double dist2) const { return std::exp(-std::numbers::pi * t * dist2); }
  double ft2(int d, double dist2) const {
    return std::pow(t, -0.5 * d) * std::exp(-std::numbers::pi * dist2 / t);
  }
};

struct PoissonCheckResult {
  std::complex<double> lhs;
  std::complex<double> rhs;
  double abs_err = 0.0;
};

// sum_{z in L} f(z) e^{2 pi i <z, eta>}  vs  vol(D_L)^{-1} sum_{xi in L*} fhat(xi - eta),
// both sides truncated at radii the caller chooses large enough for the
// Gaussian tails to vanish.
inline PoissonCheckResult poisson_check(const GaussianFunction& f, const Lattice& L,
                                        std::span<const double> eta, double R_direct,
                                        double R_dual) {
  const int d = L.dimension();
  if (!eta.empty() && static_cast<int>(eta.size()) != d)
    throw std::invalid_argument("poisson_check: eta dimension mismatch");
  if (!(f.t > 0.0)) throw std::invalid_argument("poisson_check: Gaussian needs t > 0");
  const double two_pi = 2.0 * std::numbers::pi;

  ComplexCompensatedSum lhs;
  detail::for_each_lattice_vector(L, R_direct, [&](std::span<const long long>,
                                                   std::span<const double> z) {
    double dist2 = 0.0, dot = 0.0;
    for (int i = 0; i < d; ++i) {
      dist2 += z[i] * z[i];
      if (!eta.empty()) dot += z[i] * eta[i];
    }
    lhs.add(f.value2(dist2) * std::polar(1.0, two_pi * dot));
  });

  const Lattice dual = dual_lattice(L);
  ComplexCompensatedSum rhs;
  detail::for_each_lattice_vector_near(dual, eta, R_dual, [&](std::span<const long long>,
                                                              std::span<const double> xi) {
    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = eta.empty() ? 0.0 : eta[i];
      dist2 += (xi[i] - c) * (xi[i] - c);
    }
    rhs.add({f.ft2(d, dist2) / L.covolume(), 0.0});
  });

  PoissonCheckResult out;
  out.lhs = lhs.value();
  out.rhs = rhs.value();
  out.abs_err = std::abs(out.lhs - out.rhs);
  return out;
}

// ---------------------------------------------------------------------------
// Cut-and-project schemes
// ---------------------------------------------------------------------------

// hat chi_[lo,hi](u) = int_lo^hi e^{-2 pi i x u} dx.
inline std::complex<double> interval_ft(double lo, double hi, double u) {
  if (u == 0.0) return {hi - lo, 0.0};
  const double two_pi = 2.0 * std::numbers::pi;
  const std::complex<double> ea = std::polar(1.0, -two_pi * lo * u);
  const std::complex<double> eb = std::polar(1.0, -two_pi * hi * u);
  return (ea - eb) / std::complex<double>(0.0, two_pi * u);
}

// Lattice L in R^N plus a box window W in the internal space R^(N-d).
// The model set is p_d(L intersect (R^d x W)).
class CutProjectScheme {
 public:
  CutProjectScheme(int total_dim, int physical_dim, SquareMatrix basis,
                   std::vector<std::array<double, 2>> window)
      : total_dim_(total_dim),
        physical_dim_(physical_dim),
        lattice_(std::move(basis)),
        window_(std::move(window)) {
    if (!(physical_dim_ >= 1 && physical_dim_ < total_dim_))
      throw std::invalid_argument("CutProjectScheme: need 1 <= physical_dim < total_dim");
    if (lattice_.dimension() != total_dim_)
      throw std::invalid_argument("CutProjectScheme: basis size != total_dim");
    if (static_cast<int>(window_.size()) != internal_dim())
      throw std::invalid_argument("CutProjectScheme: window must have total_dim - physical_dim axes");
    for (const auto& iv : window_)
      if (iv[1] < iv[0]) throw std::invalid_argument("CutProjectScheme: window interval reversed");
    density_warning_ = detect_rational_dependency();
  }

  // The Fibonacci chain: Z^2 rotated so the physical axis has slope 1/tau
  // in lattice coordinates, window = the unit-cell projection onto the
  // internal axis (length sin theta + cos theta), slid by half a short gap
  // into generic position.  The literal projection [-sin, cos] has both
  // endpoints equal to lattice internal coordinates, which admits one
  // spurious close pair; after the slide the boundary sits at internal
  // values (-1/2 + Z + Z tau)/sqrt(tau+2), never attained by lattice
  // points, so the gap set is exactly {sin theta, cos theta} with ratio
  // tau at every radius.
  static CutProjectScheme fibonacci() {
    const double tau = (1.0 + std::sqrt(5.0)) / 2.0;
    const double c = tau / std::sqrt(tau + 2.0);  // cos theta
    const double s = 1.0 / std::sqrt(tau + 2.0);  // sin theta
    SquareMatrix b(2);
    b(0, 0) = c;
    b(1, 0) = -s;
    b(0, 1) = s;
    b(1, 1) = c;
    return CutProjectScheme(2, 1, b, {{{-0.5 * s, c + 0.5 * s}}});
  }

  int total_dim() const { return total_dim_; }
  int physical_dim() const { return physical_dim_; }
  int internal_dim() const { return total_dim_ - physical_dim_; }
  const Lattice& lattice() const { return lattice_; }
  const std::vector<std::array<double, 2>>& window() const { return window_; }
  bool density_warning() const { return density_warning_; }

  double window_volume() const {
    double v = 1.0;
    for (const auto& iv : window_) v *= iv[1] - iv[0];
    return v;
  }

  // Expected point density of the model set, which is also the central
  // diffraction amplitude a(0).
  double density() const { return window_volume() / lattice_.covolume(); }

  bool window_contains(std::span<const double> internal) const {
    for (int j = 0; j < internal_dim(); ++j)
      if (internal[j] < window_[static_cast<std::size_t>(j)][0] ||
          internal[j] > window_[static_cast<std::size_t>(j)][1])
        return false;
    return true;
  }

  double max_internal_norm() const {
    double s = 0.0;
    for (const auto& iv : window_)
      s += std::max(iv[0] * iv[0], iv[1] * iv[1]);
    return std::sqrt(s);
  }

 private:
  // Looks for a small nonzero integer combination of the internal
  // projections of the basis vectors that vanishes; such a relation makes
  // p_{N-d}(L) non-dense.  Empirical small-coefficient scan.
  bool detect_rational_dependency() const {
    const int n = total_dim_;
    const int di = internal_dim();
    std::vector<std::vector<double>> internal(static_cast<std::size_t>(n),
                                              std::vector<double>(static_cast<std::size_t>(di)));
    double scale = 0.0;
    for (int col = 0; col < n; ++col)
      for (int j = 0; j < di; ++j) {
        internal[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] =
            lattice_.basis()(physical_dim_ + j, col);
        scale = std::max(scale, std::abs(internal[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)]));
      }
    const int range = n <= 4 ? 8 : 4;
    std::vector<int> coeff(static_cast<std::size_t>(n), -range);
    const double tol = 1e-9 * std::max(scale, 1.0) * range;
    for (;;) {
      bool all_zero = true;
      for (int c : coeff) all_zero = all_zero && c == 0;
      if (!all_zero) {
        double worst = 0.0;
        for (int j = 0; j < di; ++j) {
          double s = 0.0;
          for (int col = 0; col < n; ++col)
            s += coeff[static_cast<std::size_t>(col)] *
                 internal[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
          worst = std::max(worst, std::abs(s));
        }
        if (worst < tol) return true;
      }
      int axis = 0;
      while (axis < n && coeff[static_cast<std::size_t>(axis)] == range) {
        coeff[static_cast<std::size_t>(axis)] = -range;
        ++axis;
      }
      if (axis == n) break;
      ++coeff[static_cast<std::size_t>(axis)];
    }
    return false;
  }

  int total_dim_;
  int physical_dim_;
  Lattice lattice_;
  std::vector<std::array<double, 2>> window_;
  bool density_warning_ = false;
};

// The model set as a weighted point source.  Enumeration scans lattice
// points whose physical part lands in the ball and internal part in the
// window; p_d must be injective on that strip, and every enumeration
// re-checks it.
class ModelSetSource : public PointSource {
 public:
  explicit ModelSetSource(CutProjectScheme scheme) : scheme_(std::move(scheme)) {}

  const CutProjectScheme& scheme() const { return scheme_; }
  int dimension() const override { return scheme_.physical_dim(); }
  std::string descriptor() const override {
    return "model set (N=" + std::to_string(scheme_.total_dim()) +
           ", d=" + std::to_string(scheme_.physical_dim()) + ")";
  }

  void visit_points(double radius, const PointVisitor& emit) const override {
    if (radius < 0) return;
    const int d = scheme_.physical_dim();
    const double wmax = scheme_.max_internal_norm();
    const double reach = std::sqrt(radius * radius + wmax * wmax) + 1e-9;

    struct Hit {
      std::vector<double> phys;
      std::vector<long long> k;
    };
    std::vector<Hit> hits;
    detail::for_each_lattice_vector(scheme_.lattice(), reach, [&](std::span<const long long> k,
                                                                  std::span<const double> x) {
      double p2 = 0.0;
      for (int i = 0; i < d; ++i) p2 += x[i] * x[i];
      if (p2 > radius * radius) return;
      if (!scheme_.window_contains(x.subspan(static_cast<std::size_t>(d)))) return;
      hits.push_back({std::vector<double>(x.begin(), x.begin() + d),
                      std::vector<long long>(k.begin(), k.end())});
    });
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return std::lexicographical_compare(a.phys.begin(), a.phys.end(), b.phys.begin(),
                                          b.phys.end());
    });
    for (std::size_t i = 1; i < hits.size(); ++i) {
      bool same = true;
      for (int ax = 0; ax < d; ++ax)
        same = same && std::abs(hits[i].phys[static_cast<std::size_t>(ax)] -
                                hits[i - 1].phys[static_cast<std::size_t>(ax)]) <= 1e-9;
      if (same) {
        std::ostringstream msg;
        msg << "model set: physical projection is not injective on the strip; lattice points (";
        for (std::size_t j = 0; j < hits[i - 1].k.size(); ++j)
          msg << (j ? "," : "") << hits[i - 1].k[j];
        msg << ") and (";
        for (std::size_t j = 0; j < hits[i].k.size(); ++j) msg << (j ? "," : "") << hits[i].k[j];
        msg << ") collide";
        throw std::runtime_error(msg.str());
      }
    }
    for (const Hit& h : hits) emit(h.phys, {1.0, 0.0});
  }

 private:
  CutProjectScheme scheme_;
};

inline ModelSetSource model_set(const CutProjectScheme& scheme) {
  return ModelSetSource(scheme);
}

// ---------------------------------------------------------------------------
// Diffraction spectrum of a model set
// ---------------------------------------------------------------------------

struct SpectrumEntry {
  std::vector<double> xi;           // physical frequency, in p_d(L*)
  std::vector<double> xi_internal;  // the unique internal lift
  std::complex<double> amplitude;   // vol(D_L)^{-1} * hat chi_W(xi_internal)
};

// All xi = p_d(beta), beta in L*, with |xi| <= xi_cutoff and |a(xi)| >=
// amp_floor.  The box window keeps hat chi_W in closed product form, which
// also yields the per-axis enumeration bound |xi'_j| <= vol(W) /
// (covol * pi * amp_floor * w_j).
inline std::vector<SpectrumEntry> qc_spectrum(const CutProjectScheme& scheme,
                                              double xi_cutoff, double amp_floor) {
  if (!(xi_cutoff > 0.0) || !(amp_floor > 0.0))
    throw std::invalid_argument("qc_spectrum: cutoffs must be positive");
  const int d = scheme.physical_dim();
  const int di = scheme.internal_dim();
  const double covol = scheme.lattice().covolume();
  const double volw = scheme.window_volume();

  std::vector<double> bound(static_cast<std::size_t>(di));
  for (int j = 0; j < di; ++j) {
    const double w = scheme.window()[static_cast<std::size_t>(j)][1] -
                     scheme.window()[static_cast<std::size_t>(j)][0];
    if (w == 0.0) return {};  // amplitude identically zero
    bound[static_cast<std::size_t>(j)] = volw / (covol * std::numbers::pi * amp_floor * w) + 1.0;
  }
  double enc2 = xi_cutoff * xi_cutoff;
  for (double b : bound) enc2 += b * b;

  const Lattice dual = dual_lattice(scheme.lattice());
  std::vector<SpectrumEntry> out;
  detail::for_each_lattice_vector(dual, std::sqrt(enc2), [&](std::span<const long long>,
                                                             std::span<const double> beta) {
    double p2 = 0.0;
    for (int i = 0; i < d; ++i) p2 += beta[i] * beta[i];
    if (p2 > xi_cutoff * xi_cutoff) return;
    for (int j = 0; j < di; ++j)
      if (std::abs(beta[d + j]) > bound[static_cast<std::size_t>(j)]) return;
    std::complex<double> amp = 1.0 / covol;
    for (int j = 0; j < di; ++j)
      amp *= interval_ft(scheme.window()[static_cast<std::size_t>(j)][0],
                         scheme.window()[static_cast<std::size_t>(j)][1], beta[d + j]);
    if (std::abs(amp) < amp_floor) return;
    SpectrumEntry e;
    e.xi.assign(beta.begin(), beta.begin() + d);
    e.xi_internal.assign(beta.begin() + d, beta.end());
    e.amplitude = amp;
    out.push_back(std::move(e));
  });
  std::sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    double na = 0.0, nb = 0.0;
    for (double v : a.xi) na += v * v;
    for (double v : b.xi) nb += v * v;
    if (na != nb) return na < nb;
    if (a.xi != b.xi) return a.xi < b.xi;
    return a.xi_internal < b.xi_internal;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Fourier transform of the smooth bump by tensor Gauss-Legendre quadrature
// ---------------------------------------------------------------------------

// Certified evaluator for hat f of a SmoothBump, d = 1 or 2.  The per-axis
// node count scales with the largest frequency requested and is refined at
// construction until doubling the nodes moves probe values by less than tol.
class BumpTransform {
 public:
  BumpTransform(TestFunction f, double max_abs_xi, double tol = 1e-10)
      : f_(std::move(f)), max_xi_(max_abs_xi), tol_(tol) {
    if (f_.kind() != TestFunction::Kind::bump)
      throw std::invalid_argument("BumpTransform: only the smooth bump is supported");
    d_ = f_.dimension();
    if (d_ != 1 && d_ != 2)
      throw std::invalid_argument("BumpTransform: dimensions 1 and 2 only");
    width_ = 2.0 * f_.support_radius();
    for (int ax = 0; ax < d_; ++ax) {
      lo_[ax] = f_.center()[static_cast<std::size_t>(ax)] - f_.support_radius();
      hi_[ax] = f_.center()[static_cast<std::size_t>(ax)] + f_.support_radius();
    }
    // Certify in two stages.  The dc value has the largest magnitude and is
    // limited by the bump's own resolution needs (base node count); the
    // high frequencies are limited by nodes-per-oscillation (mult).
    {
      const std::vector<double> dc(static_cast<std::size_t>(d_), 0.0);
      bool ok = false;
      for (int round = 0; round < 8 && !ok; ++round) {
        const int n = nodes_for(0.0);
        ok = std::abs(eval_direct(dc, n) - eval_direct(dc, 2 * n)) < tol_;
        if (!ok) base_ *= 2;
      }
      if (!ok) throw std::runtime_error("BumpTransform: dc quadrature failed to certify");
    }
    for (int round = 0; round < 6; ++round) {
      bool ok = true;
      for (double scale : {0.37, 1.0}) {
        std::vector<double> probe(static_cast<std::size_t>(d_), scale * max_xi_);
        const int n = nodes_for(scale * max_xi_);
        if (std::abs(eval_direct(probe, n) - eval_direct(probe, 2 * n)) >= tol_) {
          ok = false;
          break;
        }
      }
      if (ok) return;
      mult_ *= 2;
    }
    throw std::runtime_error("BumpTransform: quadrature failed to certify");
  }

  int dimension() const { return d_; }

  std::complex<double> at(std::span<const double> xi) const {
    double m = 0.0;
    for (double v : xi) m = std::max(m, std::abs(v));
    return eval_direct(xi, nodes_for(std::min(m, max_xi_)));
  }

  // d = 2 only: hat f on the grid xi = (p/den, q/den), |p| <= P, |q| <= Q.
  // Row-major with p varying slowest: out[(p+P)*(2Q+1) + (q+Q)].
  std::vector<std::complex<double>> grid_2d(long long den, long long P, long long Q) const {
    if (d_ != 2) throw std::logic_error("BumpTransform::grid_2d: d = 2 only");
    const double fmax = std::max(static_cast<double>(P), static_cast<double>(Q)) /
                        static_cast<double>(den);
    const int n = nodes_for(fmax);
    const QuadratureRule& rule = gauss_legendre(n);
    const double two_pi = 2.0 * std::numbers::pi;

    std::array<std::vector<double>, 2> xs;
    for (int ax = 0; ax < 2; ++ax) {
      xs[static_cast<std::size_t>(ax)].resize(static_cast<std::size_t>(n));
      const double half = 0.5 * (hi_[ax] - lo_[ax]);
      const double mid = 0.5 * (hi_[ax] + lo_[ax]);
      for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(ax)][static_cast<std::size_t>(i)] = mid + half * rule.nodes[i];
    }
    const double jac = 0.25 * (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]);

    // A[i][j] = w_i w_j f(x_i, y_j) * jacobian
    std::vector<double> A(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    {
      std::array<double, 2> pt{};
      for (int i = 0; i < n; ++i) {
        pt[0] = xs[0][static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
          pt[1] = xs[1][static_cast<std::size_t>(j)];
          A[static_cast<std::size_t>(i) * n + j] =
              jac * rule.weights[i] * rule.weights[j] * f_(pt);
        }
      }
    }

    const long long np = 2 * P + 1, nq = 2 * Q + 1;
    // G[p][j] = sum_i A[i][j] e^{-2 pi i x_i p/den}
    std::vector<std::complex<double>> G(static_cast<std::size_t>(np) * static_cast<std::size_t>(n));
    for (long long p = -P; p <= P; ++p) {
      const double xi1 = static_cast<double>(p) / static_cast<double>(den);
      std::complex<double>* row = &G[static_cast<std::size_t>(p + P) * static_cast<std::size_t>(n)];
      for (int i = 0; i < n; ++i) {
        const std::complex<double> e = std::polar(1.0, -two_pi * xs[0][static_cast<std::size_t>(i)] * xi1);
        const double* arow = &A[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) row[j] += arow[j] * e;
      }
    }
    // out[p][q] = sum_j G[p][j] e^{-2 pi i y_j q/den}
    std::vector<std::complex<double>> E2(static_cast<std::size_t>(nq) * static_cast<std::size_t>(n));
    for (long long q = -Q; q <= Q; ++q) {
      const double xi2 = static_cast<double>(q) / static_cast<double>(den);
      for (int j = 0; j < n; ++j)
        E2[static_cast<std::size_t>(q + Q) * static_cast<std::size_t>(n) + j] =
            std::polar(1.0, -two_pi * xs[1][static_cast<std::size_t>(j)] * xi2);
    }
    std::vector<std::complex<double>> out(static_cast<std::size_t>(np) * static_cast<std::size_t>(nq));
    for (long long p = 0; p < np; ++p) {
      const std::complex<double>* grow = &G[static_cast<std::size_t>(p) * static_cast<std::size_t>(n)];
      for (long long q = 0; q < nq; ++q) {
        const std::complex<double>* erow = &E2[static_cast<std::size_t>(q) * static_cast<std::size_t>(n)];
        std::complex<double> s = 0.0;
        for (int j = 0; j < n; ++j) s += grow[j] * erow[j];
        out[static_cast<std::size_t>(p) * static_cast<std::size_t>(nq) + static_cast<std::size_t>(q)] = s;
      }
    }
    return out;
  }

 private:
  int nodes_for(double abs_xi) const {
    const double need = static_cast<double>(base_) + 4.0 * mult_ * width_ * std::abs(abs_xi);
    int n = base_;
    while (static_cast<double>(n) < need) n *= 2;
    return n;
  }

  std::complex<double> eval_direct(std::span<const double> xi, int n) const {
    const QuadratureRule& rule = gauss_legendre(n);
    const double two_pi = 2.0 * std::numbers::pi;
    if (d_ == 1) {
      const double half = 0.5 * (hi_[0] - lo_[0]);
      const double mid = 0.5 * (hi_[0] + lo_[0]);
      std::complex<double> acc = 0.0;
      std::array<double, 1> pt{};
      for (int i = 0; i < n; ++i) {
        pt[0] = mid + half * rule.nodes[i];
        const double fv = f_(pt);
        if (fv != 0.0) acc += rule.weights[i] * fv * std::polar(1.0, -two_pi * pt[0] * xi[0]);
      }
      return half * acc;
    }
    // d == 2
    const double half0 = 0.5 * (hi_[0] - lo_[0]), mid0 = 0.5 * (hi_[0] + lo_[0]);
    const double half1 = 0.5 * (hi_[1] - lo_[1]), mid1 = 0.5 * (hi_[1] + lo_[1]);
    std::complex<double> acc = 0.0;
    std::array<double, 2> pt{};
    for (int i = 0; i < n; ++i) {
      pt[0] = mid0 + half0 * rule.nodes[i];
      const std::complex<double> e1 = std::polar(1.0, -two_pi * pt[0] * xi[0]);
      std::complex<double> inner = 0.0;
      for (int j = 0; j < n; ++j) {
        pt[1] = mid1 + half1 * rule.nodes[j];
        const double fv = f_(pt);
        if (fv != 0.0) inner += rule.weights[j] * fv * std::polar(1.0, -two_pi * pt[1] * xi[1]);
      }
      acc += rule.weights[i] * e1 * inner;
    }
    return half0 * half1 * acc;
  }

  TestFunction f_;
  int d_ = 1;
  double max_xi_ = 1.0;
  double tol_ = 1e-10;
  double width_ = 0.0;
  std::array<double, 2> lo_{}, hi_{};
  int base_ = 64;
  int mult_ = 1;
};

// ---------------------------------------------------------------------------
// Smoothed generalized Poisson check for model sets
// ---------------------------------------------------------------------------

struct GeneralizedPoissonResult {
  double lhs = 0.0;  // sum over the model set (exact finite sum)
  std::complex<double> rhs;
  double abs_err = 0.0;
};

namespace detail {

// hat g of one axis of the smoothed window: 1 on [lo, hi], C-infinity decay
// to 0 across the 1/N shells on both sides.
inline std::complex<double> smoothed_window_axis_ft(double lo, double hi, double inv_n,
                                                    double u) {
  std::complex<double> acc = interval_ft(lo, hi, u);
  const int n = oscillation_nodes(inv_n, u, 32);
  acc += oscillatory_integral(
      [&](double x) { return smoothstep_c_inf((x - (lo - inv_n)) / inv_n); }, lo - inv_n, lo,
      u, n);
  acc += oscillatory_integral(
      [&](double x) { return smoothstep_c_inf(((hi + inv_n) - x) / inv_n); }, hi, hi + inv_n,
      u, n);
  return acc;
}

}  // namespace detail

// Smallest distance from the window boundary to the internal coordinate of
// any lattice point that projects into the physical ball of the given
// radius but lies outside the window.  1/smoothing_N must stay below this
// gap for the smoothed identity to be exact.
inline double min_internal_gap(const CutProjectScheme& scheme, double radius) {
  const int d = scheme.physical_dim();
  const int di = scheme.internal_dim();
  // points well outside the window cannot enter any reasonable shell; cap
  // the search at distance 1 from the window.
  double wmax = scheme.max_internal_norm() + 1.0;
  const double reach = std::sqrt(radius * radius + wmax * wmax) + 1e-9;
  double gap = 1.0;
  detail::for_each_lattice_vector(scheme.lattice(), reach, [&](std::span<const long long>,
                                                               std::span<const double> x) {
    double p2 = 0.0;
    for (int i = 0; i < d; ++i) p2 += x[i] * x[i];
    if (p2 > radius * radius) return;
    if (scheme.window_contains(x.subspan(static_cast<std::size_t>(d)))) return;
    double dist = 0.0;
    for (int j = 0; j < di; ++j) {
      const auto& iv = scheme.window()[static_cast<std::size_t>(j)];
      const double v = x[d + j];
      if (v < iv[0]) dist = std::max(dist, iv[0] - v);
      if (v > iv[1]) dist = std::max(dist, v - iv[1]);
    }
    gap = std::min(gap, dist);
  });
  return gap;
}

// lhs = sum_{z in Gamma} f(z); rhs = sum over the dual lattice of
// vol^{-1} hat g_N(xi') hat f(xi) truncated at |xi| <= xi_cutoff.  The
// internal truncation radius grows until the sampled hat g_N envelope is
// negligible.
inline GeneralizedPoissonResult generalized_poisson_check(const CutProjectScheme& scheme,
                                                          const TestFunction& f,
                                                          int smoothing_N,
                                                          double xi_cutoff) {
  if (f.dimension() != scheme.physical_dim())
    throw std::invalid_argument("generalized_poisson_check: f dimension != physical_dim");
  if (smoothing_N < 1) throw std::invalid_argument("generalized_poisson_check: smoothing_N >= 1");
  if (!(xi_cutoff > 0)) throw std::invalid_argument("generalized_poisson_check: xi_cutoff > 0");
  const int d = scheme.physical_dim();
  const int di = scheme.internal_dim();
  const double inv_n = 1.0 / static_cast<double>(smoothing_N);
  const double covol = scheme.lattice().covolume();

  GeneralizedPoissonResult out;
  {
    ModelSetSource src(scheme);
    CompensatedSum acc;
    src.visit_points(f.outer_radius(), [&](std::span<const double> z, std::complex<double>) {
      const double v = f(z);
      if (v != 0.0) acc.add(v);
    });
    out.lhs = acc.value();
  }

  BumpTransform fhat(f, xi_cutoff);

  // effective physical cutoff: beyond it the sampled |hat f| envelope is
  // below 1e-15 and the terms cannot matter at double precision.
  double xi_eff = xi_cutoff;
  {
    const double step = std::max(0.05, xi_cutoff / 512.0);
    double last_significant = 0.0;
    std::vector<double> probe(static_cast<std::size_t>(d), 0.0);
    for (double u = 0.0; u <= xi_cutoff + 1e-12; u += step) {
      probe[0] = u;
      if (std::abs(fhat.at(probe)) >= 1e-15) last_significant = u;
    }
    xi_eff = std::min(xi_cutoff, last_significant + 1.0);
  }

  // internal truncation: grow until the sampled envelope of hat g_N is tiny
  std::vector<double> ubound(static_cast<std::size_t>(di));
  for (int j = 0; j < di; ++j) {
    const auto& iv = scheme.window()[static_cast<std::size_t>(j)];
    double U = 16.0 * smoothing_N;
    for (int round = 0; round < 8; ++round) {
      double worst = 0.0;
      for (int s = 0; s < 48; ++s) {
        const double u = U * (1.0 + static_cast<double>(s) / 47.0);
        worst = std::max(worst,
                         std::abs(detail::smoothed_window_axis_ft(iv[0], iv[1], inv_n, u)));
      }
      if (worst < 1e-12) break;
      U *= 2.0;
    }
    ubound[static_cast<std::size_t>(j)] = U;
  }

  double enc2 = xi_eff * xi_eff;
  for (double b : ubound) enc2 += b * b;
  const Lattice dual = dual_lattice(scheme.lattice());
  ComplexCompensatedSum rhs;
  std::vector<double> xi(static_cast<std::size_t>(d));
  detail::for_each_lattice_vector(dual, std::sqrt(enc2), [&](std::span<const long long>,
                                                             std::span<const double> beta) {
    double p2 = 0.0;
    for (int i = 0; i < d; ++i) p2 += beta[i] * beta[i];
    if (p2 > xi_eff * xi_eff) return;
    for (int j = 0; j < di; ++j)
      if (std::abs(beta[d + j]) > ubound[static_cast<std::size_t>(j)]) return;
    std::complex<double> g = 1.0;
    for (int j = 0; j < di; ++j) {
      const auto& iv = scheme.window()[static_cast<std::size_t>(j)];
      g *= detail::smoothed_window_axis_ft(iv[0], iv[1], inv_n, beta[d + j]);
    }
    for (int i = 0; i < d; ++i) xi[static_cast<std::size_t>(i)] = beta[i];
    rhs.add(g * fhat.at(xi) / covol);
  });
  out.rhs = rhs.value();
  out.abs_err = std::abs(std::complex<double>(out.lhs, 0.0) - out.rhs);
  return out;
}

// ---------------------------------------------------------------------------
// Z^d_prim as a near-quasicrystal: Lambda_N, a_N, a, and the Mertens term
// ---------------------------------------------------------------------------

using RationalCoord = std::pair<long long, long long>;  // (num, den), den > 0

// mu(n) by trial division (n is small wherever this is used).
inline int mu_of(long long n) {
  if (n < 1) throw std::invalid_argument("mu_of: n >= 1");
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

inline RationalCoord reduce_fraction(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("reduce_fraction: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  return {g ? num / g : 0, g ? den / g : 1};
}

// n(xi) = lcm of the reduced denominators.
inline long long n_of_xi(std::span<const RationalCoord> xi) {
  long long l = 1;
  for (const auto& c : xi) {
    const RationalCoord r = reduce_fraction(c.first, c.second);
    l = std::lcm(l, r.second);
  }
  return l;
}

// a_N(xi) = mu(n)/n^d * sum_{l <= N/n, gcd(l,n)=1} mu(l)/l^d, n = n(xi).
inline double prim_amplitude_truncated(int d, long long n_xi, long long N,
                                       const MobiusTable& mob) {
  const int mu_n = mob.mu(n_xi);
  if (mu_n == 0) return 0.0;
  double s = 0.0;
  for (long long l = 1; l * n_xi <= N; ++l) {
    if (std::gcd(l, n_xi) != 1) continue;
    const int mu_l = mob.mu(l);
    if (mu_l == 0) continue;
    s += static_cast<double>(mu_l) / std::pow(static_cast<double>(l), d);
  }
  return static_cast<double>(mu_n) / std::pow(static_cast<double>(n_xi), d) * s;
}

// a(xi) = mu(n)/n^d * zeta(d)^{-1} * prod_{p | n} (1 - p^{-d})^{-1}.
inline double prim_amplitude_limit(int d, long long n_xi) {
  long long v = n_xi;
  int mu = 1;
  double euler = 1.0;
  for (long long p = 2; p * p <= v; ++p) {
    if (v % p) continue;
    v /= p;
    if (v % p == 0) return 0.0;  // not squarefree
    mu = -mu;
    euler *= 1.0 - std::pow(static_cast<double>(p), -d);
  }
  if (v > 1) {
    mu = -mu;
    euler *= 1.0 - std::pow(static_cast<double>(v), -d);
  }
  return static_cast<double>(mu) / std::pow(static_cast<double>(n_xi), d) / zeta(d) / euler;
}

struct PrimExpansionEntry {
  std::vector<RationalCoord> xi;
  long long n_xi = 1;
  double a_N = 0.0;
  double a_limit = 0.0;
};

struct PrimExpansion {
  int d = 2;
  long long N = 1;
  long long mertens = 0;
  std::vector<PrimExpansionEntry> entries;
};

namespace detail {

// For squarefree den, xi = b/den (componentwise) has n(xi) = den exactly
// iff gcd(b_1, ..., b_d, den) = 1.
inline bool exact_denominator(std::span<const long long> nums, long long den) {
  long long g = den;
  for (long long b : nums) {
    g = std::gcd(g, b < 0 ? -b : b);
    if (g == 1) return true;
  }
  return g == 1;
}

}  // namespace detail

// Lambda_N truncated to |xi| <= xi_cutoff: for every squarefree
// denominator D <= N, the points (b_1/D, ..., b_d/D) with n(xi) = D.
inline PrimExpansion prim_expansion(int d, long long N, double xi_cutoff) {
  if (d < 2) throw std::invalid_argument("prim_expansion: d >= 2");
  if (N < 1) throw std::invalid_argument("prim_expansion: N >= 1");
  if (!(xi_cutoff >= 0)) throw std::invalid_argument("prim_expansion: xi_cutoff >= 0");
  const MobiusTable mob = mobius_sieve(N);
  PrimExpansion out;
  out.d = d;
  out.N = N;
  out.mertens = mob.mertens(N);
  for (long long den = 1; den <= N; ++den) {
    if (mob.mu(den) == 0) continue;
    const double aN = prim_amplitude_truncated(d, den, N, mob);
    const double alim = prim_amplitude_limit(d, den);
    const long long numer_bound = static_cast<long long>(std::floor(xi_cutoff * static_cast<double>(den)));
    std::vector<long long> b(static_cast<std::size_t>(d));
    auto rec = [&](auto&& self, int axis) -> void {
      for (long long v = -numer_bound; v <= numer_bound; ++v) {
        b[static_cast<std::size_t>(axis)] = v;
        if (axis + 1 == d) {
          double nrm2 = 0.0;
          for (long long bb : b) {
            const double t = static_cast<double>(bb) / static_cast<double>(den);
            nrm2 += t * t;
          }
          if (nrm2 > xi_cutoff * xi_cutoff) continue;
          if (!detail::exact_denominator(b, den)) continue;
          PrimExpansionEntry e;
          for (long long bb : b) e.xi.push_back(reduce_fraction(bb, den));
          e.n_xi = den;
          e.a_N = aN;
          e.a_limit = alim;
          out.entries.push_back(std::move(e));
        } else {
          self(self, axis + 1);
        }
      }
    };
    rec(rec, 0);
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const PrimExpansionEntry& a, const PrimExpansionEntry& b) {
              double na = 0.0, nb = 0.0;
              std::vector<double> va, vb;
              for (const auto& c : a.xi) {
                va.push_back(static_cast<double>(c.first) / static_cast<double>(c.second));
                na += va.back() * va.back();
              }
              for (const auto& c : b.xi) {
                vb.push_back(static_cast<double>(c.first) / static_cast<double>(c.second));
                nb += vb.back() * vb.back();
              }
              if (na != nb) return na < nb;
              return va < vb;
            });
  return out;
}

struct PrimPoissonResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double tail_estimate = 0.0;
  long long mertens = 0;
};

// sum_{z in Z^2_prim} f(z) = sum_{xi in Lambda_N} a_N(xi) hat f(xi)
//                            - (sum_{k<=N} mu(k)) f(0),
// rhs truncated at |xi| <= xi_cutoff.  Requires supp f inside B_N(0).
inline PrimPoissonResult prim_poisson_check(int d, const TestFunction& f, long long N,
                                            double xi_cutoff) {
  if (d != 2)
    throw std::invalid_argument("prim_poisson_check: implemented for d = 2");
  if (f.dimension() != d) throw std::invalid_argument("prim_poisson_check: dimension mismatch");
  if (f.outer_radius() > static_cast<double>(N))
    throw std::invalid_argument("prim_poisson_check: support of f must lie inside B_N(0)");
  if (N < 1) throw std::invalid_argument("prim_poisson_check: N >= 1");
  if (!(xi_cutoff > 0)) throw std::invalid_argument("prim_poisson_check: xi_cutoff > 0");

  PrimPoissonResult out;
  {
    PrimitiveLattice src(PrimitiveSetKind::prim, 2);
    CompensatedSum acc;
    src.visit_points(f.outer_radius(), [&](std::span<const double> z, std::complex<double>) {
      const double v = f(z);
      if (v != 0.0) acc.add(v);
    });
    out.lhs = acc.value();
  }

  const MobiusTable mob = mobius_sieve(N);
  out.mertens = mob.mertens(N);
  BumpTransform fhat(f, xi_cutoff);

  CompensatedSum rhs;
  CompensatedSum rhs_imag;  // should cancel to noise for real-valued identities
  double edge_max = 0.0;
  long long edge_count = 0;
  const double edge_radius2 = 0.81 * xi_cutoff * xi_cutoff;
  for (long long den = 1; den <= N; ++den) {
    if (mob.mu(den) == 0) continue;
    const double aN = prim_amplitude_truncated(d, den, N, mob);
    const long long P = static_cast<long long>(std::floor(xi_cutoff * static_cast<double>(den)));
    const std::vector<std::complex<double>> grid = fhat.grid_2d(den, P, P);
    const long long stride = 2 * P + 1;
    const double cutoff2 = xi_cutoff * xi_cutoff;
    for (long long p = -P; p <= P; ++p) {
      const double x1 = static_cast<double>(p) / static_cast<double>(den);
      for (long long q = -P; q <= P; ++q) {
        const double x2 = static_cast<double>(q) / static_cast<double>(den);
        const double nrm2 = x1 * x1 + x2 * x2;
        if (nrm2 > cutoff2) continue;
        const std::array<long long, 2> nums{p, q};
        if (!detail::exact_denominator(nums, den)) continue;
        const std::complex<double> fv =
            grid[static_cast<std::size_t>(p + P) * static_cast<std::size_t>(stride) +
                 static_cast<std::size_t>(q + P)];
        rhs.add(aN * fv.real());
        rhs_imag.add(aN * fv.imag());
        if (nrm2 >= edge_radius2) {
          edge_max = std::max(edge_max, std::abs(fv));
          ++edge_count;
        }
      }
    }
  }
  const double f0 = f(std::vector<double>(static_cast<std::size_t>(d), 0.0));
  out.rhs = rhs.value() - static_cast<double>(out.mertens) * f0;
  out.abs_err = std::abs(out.lhs - out.rhs);
  // crude tail estimate: the outer-annulus terms bound the decay scale; a
  // factor 10 covers the shells beyond the cutoff.
  out.tail_estimate = edge_max * static_cast<double>(std::max<long long>(edge_count, 1)) * 10.0;
  return out;
}

// ---------------------------------------------------------------------------
// Twisted density of Z^d_prim
// ---------------------------------------------------------------------------

// Constant density of (Z^d_prim, omega_eta) with omega_eta(z) =
// e^{2 pi i <z, eta>}.  The limit value a(eta) is only defined for eta
// with mu(n(eta)) != 0; anything else is rejected.
inline DensityEstimate twisted_density_check(int d, std::span<const RationalCoord> eta,
                                             const TestFunction& f,
                                             std::vector<double> eps_schedule) {
  if (static_cast<int>(eta.size()) != d)
    throw std::invalid_argument("twisted_density_check: eta dimension mismatch");
  if (mu_of(n_of_xi(eta)) == 0)
    throw std::invalid_argument("twisted_density_check: mu(n(eta)) = 0, no asserted limit");
  std::vector<long long> nums, dens;
  for (const auto& c : eta) {
    const RationalCoord r = reduce_fraction(c.first, c.second);
    nums.push_back(r.first);
    dens.push_back(r.second);
  }
  auto prim = std::make_shared<PrimitiveLattice>(PrimitiveSetKind::prim, d);
  TwistedSource src(prim, nums, dens);
  return estimate_density(f, src, std::move(eps_schedule));
}

// The target value for the twisted density: a(eta) from the expansion.
inline double twisted_density_target(int d, std::span<const RationalCoord> eta) {
  return prim_amplitude_limit(d, n_of_xi(eta));
}

}  // namespace grsum
