#pragma once

// Shared helpers for the test suites: independent reference implementations
// (dense linear algebra via Eigen, plain Gaussian-elimination rank) and
// deterministic random generators for property tests. The reference routes
// intentionally share no code with the library under test.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "bfm/bearing_spec.hpp"
#include "bfm/dense.hpp"
#include "bfm/geom.hpp"
#include "bfm/graph.hpp"

namespace testutil {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

template <int D>
bfm::Vec<D> random_vec(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  bfm::Vec<D> v;
  for (int c = 0; c < D; ++c) v[c] = uniform(rng, lo, hi);
  return v;
}

template <int D>
bfm::Vec<D> random_unit(std::mt19937_64& rng) {
  for (;;) {
    auto v = random_vec<D>(rng);
    const double n = v.norm();
    if (n > 0.1 && n < 1.0) return (1.0 / n) * v;
  }
}

template <int D>
Eigen::MatrixXd to_eigen(const bfm::Mat<D>& m) {
  Eigen::MatrixXd out(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) out(i, j) = m(i, j);
  return out;
}

inline Eigen::MatrixXd to_eigen(const bfm::DenseMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m.at(i, j);
  return out;
}

// Reference eigenvalues of a symmetric matrix, ascending.
template <typename M>
std::vector<double> eigen_sym_reference(const M& m) {
  const Eigen::MatrixXd a = to_eigen(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  return out;
}

// Reference singular values, descending.
inline std::vector<double> svd_reference(const bfm::DenseMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  return out;
}

// Rank by straightforward Gaussian elimination with partial pivoting; a route
// independent of both the library's SVD and Eigen's.
inline int ge_rank(std::vector<std::vector<double>> a, double tol) {
  if (a.empty()) return 0;
  const size_t rows = a.size(), cols = a[0].size();
  int rank = 0;
  size_t col = 0;
  for (size_t row = 0; row < rows && col < cols; ++col) {
    size_t piv = row;
    for (size_t r = row + 1; r < rows; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= tol) continue;
    std::swap(a[row], a[piv]);
    for (size_t r = 0; r < rows; ++r) {
      if (r == row) continue;
      const double factor = a[r][col] / a[row][col];
      for (size_t c2 = col; c2 < cols; ++c2) a[r][c2] -= factor * a[row][c2];
    }
    ++row;
    ++rank;
  }
  return rank;
}

inline std::vector<std::vector<double>> to_rows(const bfm::DenseMatrix& m) {
  std::vector<std::vector<double>> out(static_cast<size_t>(m.rows()),
                                       std::vector<double>(static_cast<size_t>(m.cols())));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[static_cast<size_t>(i)][static_cast<size_t>(j)] = m.at(i, j);
  return out;
}

// Random conformant layered graph: l leaders, nf followers, each follower
// wired to r distinct earlier vertices.
inline bfm::FormationGraph random_graph(std::mt19937_64& rng, int l, int nf, int r = 3) {
  std::vector<std::vector<int>> nbrs;
  for (int f = 0; f < nf; ++f) {
    const int v = l + f;
    std::vector<int> pool(static_cast<size_t>(v));
    for (int j = 0; j < v; ++j) pool[static_cast<size_t>(j)] = j;
    std::vector<int> pick;
    for (int k = 0; k < r; ++k) {
      const size_t idx = static_cast<size_t>(uniform01(rng) * static_cast<double>(pool.size()));
      pick.push_back(pool[std::min(idx, pool.size() - 1)]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::min(idx, pool.size() - 1)));
    }
    nbrs.push_back(pick);
  }
  return bfm::build_acyclic_lf_graph(l, nbrs);
}

// Random positions for the graph such that every follower sees its neighbors
// non-collinearly (min eigenvalue of the desired projection sum above floor).
template <int D>
std::vector<bfm::Vec<D>> random_feasible_config(std::mt19937_64& rng, const bfm::FormationGraph& g,
                                                double lambda_floor = 0.2, double span = 4.0) {
  for (int attempt = 0; attempt < 400; ++attempt) {
    std::vector<bfm::Vec<D>> p;
    for (int i = 0; i < g.n; ++i) p.push_back(random_vec<D>(rng, -span, span));

    bool ok = true;
    for (int i = 0; i < g.n && ok; ++i)
      for (int j = i + 1; j < g.n; ++j)
        if ((p[static_cast<size_t>(i)] - p[static_cast<size_t>(j)]).norm() < 0.3) {
          ok = false;
          break;
        }
    if (!ok) continue;

    for (int f = 0; f < g.followers() && ok; ++f) {
      const int v = g.l + f;
      bfm::Mat<D> sum = bfm::Mat<D>::zero();
      for (int j : g.neighbor_sets[static_cast<size_t>(v)])
        sum += bfm::projection_matrix(
            bfm::bearing(p[static_cast<size_t>(v)], p[static_cast<size_t>(j)]));
      if (bfm::min_eigenvalue_sym(sum) < lambda_floor) ok = false;
    }
    if (ok) return p;
  }
  throw std::runtime_error("no feasible random configuration found");
}

}  // namespace testutil
