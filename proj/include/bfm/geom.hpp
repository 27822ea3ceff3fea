#pragma once

#include <array>
#include <cmath>
#include <string>

#include "bfm/errors.hpp"

namespace bfm {

// Numeric thresholds shared across the library.
inline constexpr double k_eps_zero = 1e-12;       // vector-normalization guard
inline constexpr double k_eps_collinear = 1e-6;   // lambda_1 parallelism threshold
inline constexpr double k_sym_tol = 1e-9;         // max asymmetry accepted by eigen ops

template <int D>
struct Vec {
  static_assert(D == 2 || D == 3, "only planar and spatial agents are supported");

  std::array<double, D> c{};

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < D; ++i) c[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator-(Vec a) {
    for (int i = 0; i < D; ++i) a.c[i] = -a.c[i];
    return a;
  }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += c[i] * o.c[i];
    return s;
  }
  double norm_sq() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_sq()); }
  double norm1() const {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += std::fabs(c[i]);
    return s;
  }
  bool all_finite() const {
    for (int i = 0; i < D; ++i)
      if (!std::isfinite(c[i])) return false;
    return true;
  }

  static Vec zero() { return Vec{}; }
};

template <int D>
struct Mat {
  static_assert(D == 2 || D == 3);

  // Row-major d*d entries.
  std::array<double, static_cast<size_t>(D) * D> a{};

  double& operator()(int i, int j) { return a[static_cast<size_t>(i * D + j)]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i * D + j)]; }

  Mat& operator+=(const Mat& o) {
    for (size_t k = 0; k < a.size(); ++k) a[k] += o.a[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (size_t k = 0; k < a.size(); ++k) a[k] -= o.a[k];
    return *this;
  }
  Mat& operator*=(double s) {
    for (size_t k = 0; k < a.size(); ++k) a[k] *= s;
    return *this;
  }

  friend Mat operator+(Mat x, const Mat& y) { return x += y; }
  friend Mat operator-(Mat x, const Mat& y) { return x -= y; }
  friend Mat operator*(double s, Mat x) { return x *= s; }

  Vec<D> operator*(const Vec<D>& v) const {
    Vec<D> r{};
    for (int i = 0; i < D; ++i) {
      double s = 0.0;
      for (int j = 0; j < D; ++j) s += (*this)(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  Mat operator*(const Mat& o) const {
    Mat r{};
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        double s = 0.0;
        for (int k = 0; k < D; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  Mat transpose() const {
    Mat r{};
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += (*this)(i, i);
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
  }

  double max_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < D; ++i)
      for (int j = i + 1; j < D; ++j)
        m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
  }

  static Mat identity() {
    Mat r{};
    for (int i = 0; i < D; ++i) r(i, i) = 1.0;
    return r;
  }
  static Mat zero() { return Mat{}; }
};

template <int D>
inline Mat<D> outer(const Vec<D>& x, const Vec<D>& y) {
  Mat<D> r{};
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) r(i, j) = x[i] * y[j];
  return r;
}

// P_x = I - x x^T / |x|^2. Annihilates x, acts as identity on its orthogonal
// complement, and is invariant under rescaling of x.
template <int D>
inline Mat<D> projection_matrix(const Vec<D>& x) {
  const double n2 = x.norm_sq();
  if (!(n2 > k_eps_zero * k_eps_zero)) {
    throw Error(Fault::NearZeroVector,
                "projection matrix undefined for near-zero vector (|x| = " +
                    std::to_string(std::sqrt(n2)) + ")");
  }
  Mat<D> p = Mat<D>::identity();
  const double inv = 1.0 / n2;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) p(i, j) -= x[i] * x[j] * inv;
  return p;
}

// Applies P_x to v without forming the matrix: v - x (x.v)/(x.x).
// When v is a scalar multiple of x, x.v/(x.x) evaluates to that exact scale
// factor (in particular 1.0 when v == x), so the result is exactly zero.
// The matrix route leaves O(eps) residue in that case; sign-based control
// terms would amplify it, so annihilation here must be exact.
template <int D>
inline Vec<D> project_out(const Vec<D>& x, const Vec<D>& v) {
  const double n2 = x.norm_sq();
  if (!(n2 > k_eps_zero * k_eps_zero)) {
    throw Error(Fault::NearZeroVector,
                "projection undefined for near-zero vector (|x| = " +
                    std::to_string(std::sqrt(n2)) + ")");
  }
  return v - (x.dot(v) / n2) * x;
}

// Unit vector pointing from p_i toward p_j.
template <int D>
inline Vec<D> bearing(const Vec<D>& p_i, const Vec<D>& p_j) {
  const Vec<D> z = p_j - p_i;
  const double n = z.norm();
  if (!(n > k_eps_zero)) {
    throw Error(Fault::AgentCollision,
                "bearing undefined: agents coincide (distance = " +
                    std::to_string(n) + ")");
  }
  return (1.0 / n) * z;
}

// Componentwise sign(x) |x|^alpha. Odd by construction; identity at alpha = 1.
template <int D>
inline Vec<D> sig_pow(const Vec<D>& x, double alpha) {
  Vec<D> r{};
  for (int i = 0; i < D; ++i) {
    const double v = x[i];
    if (v > 0.0)
      r[i] = std::pow(v, alpha);
    else if (v < 0.0)
      r[i] = -std::pow(-v, alpha);
    else
      r[i] = 0.0;
  }
  return r;
}

// Componentwise signum with sign(0) = 0 (including negative zero).
template <int D>
inline Vec<D> sign_vec(const Vec<D>& x) {
  Vec<D> r{};
  for (int i = 0; i < D; ++i) r[i] = static_cast<double>((x[i] > 0.0) - (x[i] < 0.0));
  return r;
}

namespace detail {

inline std::array<double, 2> eig_sym_2(double a00, double a01, double a11) {
  const double mean = 0.5 * (a00 + a11);
  const double diff = 0.5 * (a00 - a11);
  const double disc = std::sqrt(diff * diff + a01 * a01);
  return {mean - disc, mean + disc};
}

// Closed-form symmetric 3x3 eigenvalues via the trigonometric solution of the
// characteristic cubic.
inline std::array<double, 3> eig_sym_3(const Mat<3>& m) {
  const double a00 = m(0, 0), a11 = m(1, 1), a22 = m(2, 2);
  const double a01 = 0.5 * (m(0, 1) + m(1, 0));
  const double a02 = 0.5 * (m(0, 2) + m(2, 0));
  const double a12 = 0.5 * (m(1, 2) + m(2, 1));

  const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
  if (p1 == 0.0) {
    std::array<double, 3> d{a00, a11, a22};
    if (d[0] > d[1]) std::swap(d[0], d[1]);
    if (d[1] > d[2]) std::swap(d[1], d[2]);
    if (d[0] > d[1]) std::swap(d[0], d[1]);
    return d;
  }

  const double q = (a00 + a11 + a22) / 3.0;
  const double b00 = a00 - q, b11 = a11 - q, b22 = a22 - q;
  const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (!(p > 0.0)) return {q, q, q};

  const double inv_p = 1.0 / p;
  const double c00 = b00 * inv_p, c11 = b11 * inv_p, c22 = b22 * inv_p;
  const double c01 = a01 * inv_p, c02 = a02 * inv_p, c12 = a12 * inv_p;
  double r = 0.5 * (c00 * (c11 * c22 - c12 * c12) - c01 * (c01 * c22 - c12 * c02) +
                    c02 * (c01 * c12 - c11 * c02));
  r = std::max(-1.0, std::min(1.0, r));

  const double phi = std::acos(r) / 3.0;
  const double two_pi_thirds = 2.0943951023931953;
  const double e_max = q + 2.0 * p * std::cos(phi);
  const double e_min = q + 2.0 * p * std::cos(phi + two_pi_thirds);
  const double e_mid = 3.0 * q - e_max - e_min;
  return {e_min, e_mid, e_max};
}

}  // namespace detail

template <int D>
inline std::array<double, D> eigenvalues_sym(const Mat<D>& m) {
  if (m.max_asymmetry() > k_sym_tol) {
    throw Error(Fault::NotSymmetric,
                "symmetric eigenvalues requested for matrix with asymmetry " +
                    std::to_string(m.max_asymmetry()));
  }
  if constexpr (D == 2) {
    return detail::eig_sym_2(m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1));
  } else {
    return detail::eig_sym_3(m);
  }
}

template <int D>
inline double min_eigenvalue_sym(const Mat<D>& m) {
  return eigenvalues_sym(m)[0];
}

// Direct solve of a symmetric positive-definite d x d system.
template <int D>
inline Vec<D> solve_spd(const Mat<D>& m, const Vec<D>& b) {
  const double scale = std::max(m.max_abs(), 1.0);
  if constexpr (D == 2) {
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (!(det > k_eps_zero * scale * scale)) {
      throw Error(Fault::SingularSystem,
                  "2x2 system not positive definite (det = " + std::to_string(det) + ")");
    }
    const double inv = 1.0 / det;
    return Vec<2>{{inv * (m(1, 1) * b[0] - m(0, 1) * b[1]),
                   inv * (m(0, 0) * b[1] - m(1, 0) * b[0])}};
  } else {
    const double c00 = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double c01 = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    const double c02 = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    const double det = m(0, 0) * c00 + m(0, 1) * c01 + m(0, 2) * c02;
    if (!(det > k_eps_zero * scale * scale * scale)) {
      throw Error(Fault::SingularSystem,
                  "3x3 system not positive definite (det = " + std::to_string(det) + ")");
    }
    const double c10 = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    const double c11 = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    const double c12 = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    const double c20 = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    const double c21 = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    const double c22 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double inv = 1.0 / det;
    return Vec<3>{{inv * (c00 * b[0] + c10 * b[1] + c20 * b[2]),
                   inv * (c01 * b[0] + c11 * b[1] + c21 * b[2]),
                   inv * (c02 * b[0] + c12 * b[1] + c22 * b[2])}};
  }
}

}  // namespace bfm
