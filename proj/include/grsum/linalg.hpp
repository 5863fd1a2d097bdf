#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace grsum {

// Dense square matrix just big enough for the cut-and-project schemes
// (N <= 8 or so).  Row-major storage.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  static SquareMatrix identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  std::vector<double> apply(std::span<const double> v) const {
    std::vector<double> out(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

  SquareMatrix transposed() const {
    SquareMatrix t(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double determinant() const {
    SquareMatrix lu(*this);
    double det = 1.0;
    for (int col = 0; col < n_; ++col) {
      int pivot = col;
      for (int r = col + 1; r < n_; ++r)
        if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
      if (lu(pivot, col) == 0.0) return 0.0;
      if (pivot != col) {
        for (int j = 0; j < n_; ++j) std::swap(lu(pivot, j), lu(col, j));
        det = -det;
      }
      det *= lu(col, col);
      for (int r = col + 1; r < n_; ++r) {
        const double factor = lu(r, col) / lu(col, col);
        for (int j = col; j < n_; ++j) lu(r, j) -= factor * lu(col, j);
      }
    }
    return det;
  }

  SquareMatrix inverse() const {
    SquareMatrix lu(*this);
    SquareMatrix inv = identity(n_);
    for (int col = 0; col < n_; ++col) {
      int pivot = col;
      for (int r = col + 1; r < n_; ++r)
        if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
      if (lu(pivot, col) == 0.0) throw std::runtime_error("SquareMatrix: singular matrix");
      if (pivot != col)
        for (int j = 0; j < n_; ++j) {
          std::swap(lu(pivot, j), lu(col, j));
          std::swap(inv(pivot, j), inv(col, j));
        }
      const double d = lu(col, col);
      for (int j = 0; j < n_; ++j) {
        lu(col, j) /= d;
        inv(col, j) /= d;
      }
      for (int r = 0; r < n_; ++r) {
        if (r == col) continue;
        const double factor = lu(r, col);
        if (factor == 0.0) continue;
        for (int j = 0; j < n_; ++j) {
          lu(r, j) -= factor * lu(col, j);
          inv(r, j) -= factor * inv(col, j);
        }
      }
    }
    return inv;
  }

  double norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

  double condition_inf() const { return norm_inf() * inverse().norm_inf(); }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

}  // namespace grsum
