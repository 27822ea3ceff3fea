#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bfm/errors.hpp"
#include "bfm/geom.hpp"

namespace bfm {

// How the integrator realizes the discontinuous signum terms: exact signs
// (the default; matches the analysis) or a boundary layer x / (|x| + eps)
// that trades exactness near the switching surface for smoothness.
enum class SwitchMode { raw_sign, boundary_layer };

struct Switching {
  SwitchMode mode = SwitchMode::raw_sign;
  double layer_eps = 1e-4;
};

template <int D>
inline Vec<D> switched_sign(const Vec<D>& x, const Switching& sw) {
  if (sw.mode == SwitchMode::raw_sign) return sign_vec(x);
  Vec<D> r{};
  for (int i = 0; i < D; ++i) r[i] = x[i] / (std::fabs(x[i]) + sw.layer_eps);
  return r;
}

struct BearingOnlyGains {
  double alpha = 0.5;  // fractional-power exponent, in (0,1)
  double beta = 2.0;   // leader speed bound; must exceed sup |v*|
};

struct EstimatorGains {
  double alpha = 0.5;
  double beta = 2.0;
  std::vector<double> gamma;  // per follower, sign-term gain
  double rho = 0.0;           // super-linear exponent (> 1), fixed-time law only
};

// One evaluation of the bearing-only law, with the measured quantities the
// gains were derived from.
template <int D>
struct BearingOnlyEval {
  Vec<D> u{};
  double lambda1 = 0.0;  // min eig of the measured projection sum M_i
  double k1 = 0.0;
  double k2 = 0.0;
};

// u_i = -k1 sum_j P_g sig(P_g g*)^alpha - k2 beta sum_j P_g sign(P_g g*),
// with P_g built from the bearings measured this call and
// k1 = lambda_1(M_i)^{-(alpha+1)/2}, k2 = lambda_1(M_i)^{-1/2}.
template <int D>
inline BearingOnlyEval<D> bearing_only_control(const Vec<D>& p_i,
                                               const std::vector<Vec<D>>& neighbor_positions,
                                               const std::vector<Vec<D>>& desired_bearings,
                                               double alpha, double beta,
                                               const Switching& sw) {
  const size_t r = neighbor_positions.size();
  if (r != desired_bearings.size() || r == 0)
    throw Error(Fault::ValidationError, "control needs one desired bearing per neighbor");

  std::vector<Vec<D>> bearings;
  bearings.reserve(r);
  Mat<D> m_i = Mat<D>::zero();
  for (size_t j = 0; j < r; ++j) {
    const Vec<D> g = bearing(p_i, neighbor_positions[j]);
    bearings.push_back(g);
    m_i += projection_matrix(g);
  }

  BearingOnlyEval<D> out;
  out.lambda1 = min_eigenvalue_sym(m_i);
  if (!(out.lambda1 > k_eps_collinear))
    throw Error(Fault::CollinearNeighbors,
                "agent and neighbors are collinear (lambda_1 = " +
                    std::to_string(out.lambda1) + ")");
  out.k1 = std::pow(out.lambda1, -0.5 * (alpha + 1.0));
  out.k2 = std::pow(out.lambda1, -0.5);

  // Residuals use the annihilation-exact vector form: when the measured
  // bearing equals the desired one, resid is exactly zero and both the
  // fractional and the signum terms vanish, so u = 0 at the target shape.
  Vec<D> frac = Vec<D>::zero();
  Vec<D> sgn = Vec<D>::zero();
  for (size_t j = 0; j < r; ++j) {
    const Vec<D> resid = project_out(bearings[j], desired_bearings[j]);
    frac += project_out(bearings[j], sig_pow(resid, alpha));
    sgn += project_out(bearings[j], switched_sign(resid, sw));
  }
  out.u = -out.k1 * frac - (out.k2 * beta) * sgn;
  return out;
}

// Estimator dynamics: received values are the neighbors' estimates (their true
// positions when the neighbor is a leader). Uses desired bearings only; no
// measured bearings enter. The vector-form projection keeps the rhs exactly
// zero once every received value agrees with est_i along the desired bearing.
template <int D>
inline Vec<D> estimator_rhs(const Vec<D>& est_i, const std::vector<Vec<D>>& received,
                            const std::vector<Vec<D>>& desired_bearings, double alpha,
                            double gamma_i, const Switching& sw) {
  if (received.size() != desired_bearings.size() || received.empty())
    throw Error(Fault::ValidationError, "estimator needs one desired bearing per received value");
  Vec<D> rhs = Vec<D>::zero();
  for (size_t j = 0; j < received.size(); ++j) {
    const Vec<D> resid = project_out(desired_bearings[j], received[j] - est_i);
    rhs += project_out(desired_bearings[j], sig_pow(resid, alpha));
    rhs += gamma_i * project_out(desired_bearings[j], switched_sign(resid, sw));
  }
  return rhs;
}

// Fixed-time variant: adds the super-linear sig(.)^rho term under the same
// projections, making the convergence time bounded independently of the
// initial error.
template <int D>
inline Vec<D> fixed_time_estimator_rhs(const Vec<D>& est_i,
                                       const std::vector<Vec<D>>& received,
                                       const std::vector<Vec<D>>& desired_bearings,
                                       double alpha, double rho, double gamma_i,
                                       const Switching& sw) {
  if (!(rho > 1.0))
    throw Error(Fault::ValidationError,
                "fixed-time estimator needs rho > 1, got " + std::to_string(rho));
  Vec<D> rhs = estimator_rhs(est_i, received, desired_bearings, alpha, gamma_i, sw);
  for (size_t j = 0; j < received.size(); ++j) {
    const Vec<D> resid = project_out(desired_bearings[j], received[j] - est_i);
    rhs += project_out(desired_bearings[j], sig_pow(resid, rho));
  }
  return rhs;
}

// Position tracking toward the estimated target.
template <int D>
inline Vec<D> tracking_rhs(const Vec<D>& p_i, const Vec<D>& est_i, double alpha,
                           double beta, const Switching& sw) {
  const Vec<D> e = p_i - est_i;
  return -sig_pow(e, alpha) - beta * switched_sign(e, sw);
}

// Planar obstacle: repulsion activates strictly inside the radius-d ball.
struct Obstacle {
  Vec<2> position{};
  double d = 0.5;      // activation radius
  double d_max = 1.0;  // sensing range, d < d_max
  double k = 5.0;      // repulsion gain, > 1
};

// Inside the activation ball the radial push dominates and the tangential
// term J g_io rotates the obstacle bearing, steering the agent around;
// outside, plain tracking applies.
inline Vec<2> obstacle_avoid_control(const Vec<2>& p_i, const Vec<2>& est_i,
                                     const Obstacle& obs, double alpha, double beta,
                                     const Switching& sw) {
  const Vec<2> to_obs = obs.position - p_i;
  const double dist = to_obs.norm();
  if (dist >= obs.d) return tracking_rhs(p_i, est_i, alpha, beta, sw);

  if (!(dist > k_eps_zero))
    throw Error(Fault::ObstacleCoincidence,
                "agent sits on the obstacle (distance = " + std::to_string(dist) + ")");
  const Vec<2> g_io = (1.0 / dist) * to_obs;
  const Vec<2> g_perp{{g_io[1], -g_io[0]}};  // J g_io with J = [[0,1],[-1,0]]
  return obs.k * (p_i - obs.position) + g_perp;
}

}  // namespace bfm
