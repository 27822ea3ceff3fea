#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bfm/errors.hpp"
#include "bfm/geom.hpp"

namespace bfm {

// Minimal row-major dense matrix for the rigidity toolkit. Sizes here are
// m*d by n*d for modest n, so simple O(n^3) algorithms are fine.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  DenseMatrix operator*(const DenseMatrix& o) const {
    DenseMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const double v = at(i, k);
        if (v == 0.0) continue;
        for (int j = 0; j < o.cols_; ++j) r.at(i, j) += v * o.at(k, j);
      }
    return r;
  }

  std::vector<double> operator*(const std::vector<double>& x) const {
    std::vector<double> y(static_cast<size_t>(rows_), 0.0);
    for (int i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (int j = 0; j < cols_; ++j) s += at(i, j) * x[static_cast<size_t>(j)];
      y[static_cast<size_t>(i)] = s;
    }
    return y;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
  }

  double max_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j)
        m = std::max(m, std::fabs(at(i, j) - at(j, i)));
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, ascending.
inline std::vector<double> sym_eigenvalues(const DenseMatrix& m_in) {
  if (m_in.rows() != m_in.cols())
    throw Error(Fault::NotSymmetric, "eigenvalues of a non-square matrix requested");
  if (m_in.max_asymmetry() > k_sym_tol * std::max(1.0, m_in.max_abs()))
    throw Error(Fault::NotSymmetric,
                "symmetric eigensolver got asymmetry " + std::to_string(m_in.max_asymmetry()));

  const int n = m_in.rows();
  DenseMatrix m = m_in;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (m.at(i, j) + m.at(j, i));
      m.at(i, j) = v;
      m.at(j, i) = v;
    }

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += m.at(i, j) * m.at(i, j);
    if (off <= 1e-30 * std::max(1.0, m.max_abs() * m.max_abs())) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m.at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double app = m.at(p, p);
        const double aqq = m.at(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;

        for (int k = 0; k < n; ++k) {
          const double mkp = m.at(k, p);
          const double mkq = m.at(k, q);
          m.at(k, p) = cs * mkp - sn * mkq;
          m.at(k, q) = sn * mkp + cs * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m.at(p, k);
          const double mqk = m.at(q, k);
          m.at(p, k) = cs * mpk - sn * mqk;
          m.at(q, k) = sn * mpk + cs * mqk;
        }
      }
    }
  }

  std::vector<double> eig(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) eig[static_cast<size_t>(i)] = m.at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

// Singular values by one-sided Jacobi orthogonalization of the columns,
// descending. Operates on whichever orientation has fewer columns; the
// nonzero singular values are orientation-invariant.
inline std::vector<double> singular_values(const DenseMatrix& a_in) {
  DenseMatrix w = a_in.cols() <= a_in.rows() ? a_in : a_in.transpose();
  const int rows = w.rows();
  const int cols = w.cols();

  const int max_sweeps = 64;
  const double tol = 1e-14;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < cols - 1; ++p) {
      for (int q = p + 1; q < cols; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int k = 0; k < rows; ++k) {
          const double wp = w.at(k, p);
          const double wq = w.at(k, q);
          app += wp * wp;
          aqq += wq * wq;
          apq += wp * wq;
        }
        if (std::fabs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;

        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (int k = 0; k < rows; ++k) {
          const double wp = w.at(k, p);
          const double wq = w.at(k, q);
          w.at(k, p) = cs * wp - sn * wq;
          w.at(k, q) = sn * wp + cs * wq;
        }
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(static_cast<size_t>(cols));
  for (int j = 0; j < cols; ++j) {
    double s = 0.0;
    for (int k = 0; k < rows; ++k) s += w.at(k, j) * w.at(k, j);
    sv[static_cast<size_t>(j)] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

// Rank-revealing cutoff at rel_tol * sigma_max.
inline int numeric_rank(const DenseMatrix& a, double rel_tol = 1e-8) {
  const std::vector<double> sv = singular_values(a);
  if (sv.empty() || sv[0] == 0.0) return 0;
  const double cut = rel_tol * sv[0];
  int rank = 0;
  for (double s : sv)
    if (s > cut) ++rank;
  return rank;
}

inline int kernel_dimension(const DenseMatrix& a, double rel_tol = 1e-8) {
  return a.cols() - numeric_rank(a, rel_tol);
}

}  // namespace bfm
