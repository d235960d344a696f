#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qnls {

/// Banded LU with partial pivoting, LAPACK band layout (column-major, ldab = 2kl+ku+1).
template <class T>
class BandedLU {
 public:
  BandedLU() = default;
  BandedLU(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
        ab_(static_cast<std::size_t>(ldab_) * static_cast<std::size_t>(n), T(0)),
        ipiv_(static_cast<std::size_t>(n), 0) {}

  int size() const { return n_; }

  /// Entry A(i, j); valid only for |i - j| inside the declared band and before factorize().
  T& at(int i, int j) { return ab_[idx(i, j)]; }
  T at(int i, int j) const { return ab_[idx(i, j)]; }

  void factorize() {
    const int kv = ku_ + kl_;
    int ju = 0;
    for (int j = 0; j < n_; ++j) {
      const int km = std::min(kl_, n_ - 1 - j);
      int jp = 0;
      double best = std::abs(ab_[pos(kv, j)]);
      for (int p = 1; p <= km; ++p) {
        const double a = std::abs(ab_[pos(kv + p, j)]);
        if (a > best) {
          best = a;
          jp = p;
        }
      }
      ipiv_[static_cast<std::size_t>(j)] = j + jp;
      if (best == 0.0) throw std::runtime_error("BandedLU: singular matrix");
      ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
      if (jp != 0) {
        for (int c = j; c <= ju; ++c) std::swap(ab_[pos(kv + jp - (c - j), c)], ab_[pos(kv - (c - j), c)]);
      }
      const T piv = ab_[pos(kv, j)];
      for (int p = 1; p <= km; ++p) ab_[pos(kv + p, j)] /= piv;
      for (int c = j + 1; c <= ju; ++c) {
        const T ujc = ab_[pos(kv - (c - j), c)];
        if (ujc == T(0)) continue;
        for (int p = 1; p <= km; ++p) ab_[pos(kv + p - (c - j), c)] -= ab_[pos(kv + p, j)] * ujc;
      }
    }
    factored_ = true;
  }

  /// Solves A x = b in place; b has stride `stride`.
  template <class U>
  void solve(U* b, std::ptrdiff_t stride = 1) const {
    if (!factored_) throw std::logic_error("BandedLU: solve before factorize");
    const int kv = ku_ + kl_;
    for (int j = 0; j < n_ - 1; ++j) {
      const int lm = std::min(kl_, n_ - 1 - j);
      const int jp = ipiv_[static_cast<std::size_t>(j)];
      if (jp != j) std::swap(b[j * stride], b[jp * stride]);
      const U bj = b[j * stride];
      for (int p = 1; p <= lm; ++p) b[(j + p) * stride] -= ab_[pos(kv + p, j)] * bj;
    }
    for (int j = n_ - 1; j >= 0; --j) {
      b[j * stride] /= ab_[pos(kv, j)];
      const U bj = b[j * stride];
      const int i0 = std::max(0, j - kv);
      for (int i = i0; i < j; ++i) b[i * stride] -= ab_[pos(kv + i - j, j)] * bj;
    }
  }

 private:
  std::size_t pos(int row, int col) const {
    return static_cast<std::size_t>(row) + static_cast<std::size_t>(col) * static_cast<std::size_t>(ldab_);
  }
  std::size_t idx(int i, int j) const {
    if (i - j > kl_ || j - i > ku_ || i < 0 || j < 0 || i >= n_ || j >= n_)
      throw std::out_of_range("BandedLU: entry outside band");
    return pos(kl_ + ku_ + i - j, j);
  }

  int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 1;
  std::vector<T> ab_;
  std::vector<int> ipiv_;
  bool factored_ = false;
};

/**
 * Banded LU without pivoting. Stable when the Hermitian part of A is positive definite,
 * which holds for the Crank-Nicolson matrices W + i c K (W > 0, K real symmetric).
 */
template <class T>
class BandedLUNoPivot {
 public:
  BandedLUNoPivot() = default;
  BandedLUNoPivot(int n, int bw) : n_(n), bw_(bw), w_(2 * bw + 1), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(w_), T(0)) {}

  int size() const { return n_; }

  T& at(int i, int j) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || std::abs(i - j) > bw_) throw std::out_of_range("BandedLUNoPivot: entry outside band");
    return a_[pos(i, j)];
  }

  void factorize() {
    for (int k = 0; k < n_; ++k) {
      const T piv = a_[pos(k, k)];
      if (piv == T(0)) throw std::runtime_error("BandedLUNoPivot: zero pivot");
      const int iend = std::min(n_ - 1, k + bw_);
      for (int i = k + 1; i <= iend; ++i) {
        const T l = a_[pos(i, k)] / piv;
        a_[pos(i, k)] = l;
        for (int j = k + 1; j <= iend; ++j) a_[pos(i, j)] -= l * a_[pos(k, j)];
      }
      inv_diag_.push_back(T(1) / piv);
    }
    factored_ = true;
  }

  template <class U>
  void solve(U* b, std::ptrdiff_t stride = 1) const {
    if (!factored_) throw std::logic_error("BandedLUNoPivot: solve before factorize");
    for (int i = 1; i < n_; ++i) {
      U acc = b[i * stride];
      for (int j = std::max(0, i - bw_); j < i; ++j) acc -= a_[pos(i, j)] * b[j * stride];
      b[i * stride] = acc;
    }
    for (int i = n_ - 1; i >= 0; --i) {
      U acc = b[i * stride];
      const int jend = std::min(n_ - 1, i + bw_);
      for (int j = i + 1; j <= jend; ++j) acc -= a_[pos(i, j)] * b[j * stride];
      b[i * stride] = acc * inv_diag_[static_cast<std::size_t>(i)];
    }
  }

  /// Solves `lines` systems at once; entry i of line l is b[i * stride + l], so the inner loop is contiguous.
  template <class U>
  void solve_lines(U* b, std::ptrdiff_t stride, int lines) const {
    if (!factored_) throw std::logic_error("BandedLUNoPivot: solve before factorize");
    for (int i = 1; i < n_; ++i) {
      U* bi = b + i * stride;
      for (int j = std::max(0, i - bw_); j < i; ++j) {
        const T l = a_[pos(i, j)];
        const U* bj = b + j * stride;
        for (int k = 0; k < lines; ++k) bi[k] -= l * bj[k];
      }
    }
    for (int i = n_ - 1; i >= 0; --i) {
      U* bi = b + i * stride;
      const int jend = std::min(n_ - 1, i + bw_);
      for (int j = i + 1; j <= jend; ++j) {
        const T u = a_[pos(i, j)];
        const U* bj = b + j * stride;
        for (int k = 0; k < lines; ++k) bi[k] -= u * bj[k];
      }
      const T d = inv_diag_[static_cast<std::size_t>(i)];
      for (int k = 0; k < lines; ++k) bi[k] *= d;
    }
  }

 private:
  std::size_t pos(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(j - i + bw_);
  }

  int n_ = 0, bw_ = 0, w_ = 1;
  std::vector<T> a_;
  std::vector<T> inv_diag_;
  bool factored_ = false;
};

}  // namespace qnls
