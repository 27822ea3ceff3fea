#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bfm/bearing_spec.hpp"
#include "bfm/control.hpp"
#include "bfm/errors.hpp"
#include "bfm/geom.hpp"
#include "bfm/scenario.hpp"

namespace bfm {

struct TraceEvent {
  double t = 0.0;
  std::string kind;   // crossed, converged, estimator_crossed, phase,
                      // obstacle_enter, obstacle_exit, warning, abort
  int agent = 0;      // 1-indexed; 0 when not agent-specific
  std::string detail;
};

// Self-describing header for a recorded run; everything metrics and plotting
// need without the original scenario object.
struct TraceMeta {
  int dim = 0;
  int n = 0;  // recorded agents (all vertices, or tracking replicas)
  int l = 0;  // leaders (0 for target tracking)
  std::vector<std::pair<int, int>> edges;  // 0-indexed (tail, head)
  std::string name;
  std::string kind;  // formation | target_tracking
  std::string law;
  std::string mode;  // raw_sign | boundary_layer
  double h = 0.0;
  double duration = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma_max = 0.0;
  double threshold = 0.0;
  int stride = 1;
  int dwell = 1;
  int est_count = 0;  // estimate columns: followers, one target, or zero
  std::vector<double> follower_max_zstar;
  std::vector<int> follower_neighbor_count;
  std::vector<std::pair<double, double>> scaling_windows;
  bool has_obstacle = false;
  double obs_x = 0.0, obs_y = 0.0, obs_d = 0.0, obs_dmax = 0.0, obs_k = 0.0;
  bool aborted = false;
  std::string abort_fault;
  std::string abort_message;
  double abort_time = -1.0;
  std::uint64_t estimate_seed = 0;
  bool estimates_seeded = false;

  int err_count() const { return l > 0 ? n - l : n; }
};

// Flat sample-major arrays; absent series stay empty. Convergence times are
// measured at full step resolution, not just at samples; -1 means never.
struct SimTrace {
  TraceMeta meta;
  std::vector<double> times;
  std::vector<double> positions;        // samples x n x dim
  std::vector<double> estimates;        // samples x est_count x dim
  std::vector<double> bearing_errors;   // samples x |edges|
  std::vector<double> position_errors;  // samples x err_count
  std::vector<double> estimate_errors;  // samples x est_count (formation only)
  std::vector<double> lambda1;          // samples x followers (formation only)
  std::vector<double> control_norm;     // samples x err_count
  std::vector<TraceEvent> events;

  std::vector<double> crossing;             // first error < threshold
  std::vector<double> gated_crossing;       // first crossing at/after all neighbors'
  std::vector<double> estimator_crossing;   // first estimate error < threshold
  std::vector<double> converged_at;         // dwell-confirmed; window start time

  int samples() const { return static_cast<int>(times.size()); }

  double pos(int s, int agent, int c) const {
    return positions[(static_cast<size_t>(s) * meta.n + agent) * meta.dim + c];
  }
  double est(int s, int entity, int c) const {
    return estimates[(static_cast<size_t>(s) * meta.est_count + entity) * meta.dim + c];
  }
  double pos_err(int s, int idx) const {
    return position_errors[static_cast<size_t>(s) * meta.err_count() + idx];
  }
  double bearing_err(int s, int edge) const {
    return bearing_errors[static_cast<size_t>(s) * meta.edges.size() + edge];
  }
};

struct Diagnostic {
  Fault fault = Fault::ValidationError;
  bool fatal = false;
  int agent = 0;  // 1-indexed, 0 when global
  double value = 0.0;
  std::string message;
};

// Checks the standing hypotheses at one state: pairwise separation, measured
// non-collinearity per follower, and the leader speed bound. Collinearity is
// fatal only for the bearing-only law, whose analysis requires it.
template <int D>
inline std::vector<Diagnostic> monitor_hypotheses(const std::vector<Vec<D>>& positions,
                                                  const Scenario<D>& sc, double t) {
  std::vector<Diagnostic> out;
  constexpr double collision_threshold = 1e-6;

  if (sc.kind == ScenarioKind::formation) {
    const int n = sc.graph.n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double dist = (positions[static_cast<size_t>(i)] - positions[static_cast<size_t>(j)]).norm();
        if (dist <= collision_threshold)
          out.push_back({Fault::AgentCollision, true, i + 1, dist,
                         "agents " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                             " are " + std::to_string(dist) + " apart"});
      }
    if (!out.empty()) return out;  // bearings below are undefined at contact

    for (int f = 0; f < sc.graph.followers(); ++f) {
      const int v = sc.graph.l + f;
      Mat<D> m_i = Mat<D>::zero();
      for (int j : sc.graph.neighbor_sets[static_cast<size_t>(v)])
        m_i += projection_matrix(bearing(positions[static_cast<size_t>(v)], positions[static_cast<size_t>(j)]));
      const double lam1 = min_eigenvalue_sym(m_i);
      if (!(lam1 > k_eps_collinear))
        out.push_back({Fault::CollinearNeighbors, sc.law == LawType::bearing_only, v + 1,
                       lam1,
                       "follower " + std::to_string(v + 1) +
                           " is collinear with its neighbors (lambda_1 = " +
                           std::to_string(lam1) + ")"});
    }

    std::vector<Vec<D>> leaders(positions.begin(), positions.begin() + sc.graph.l);
    const auto lv = leader_velocity(sc.profile, leaders, t);
    for (size_t i = 0; i < lv.size(); ++i)
      if (!(lv[i].norm() < sc.beta))
        out.push_back({Fault::ValidationError, false, static_cast<int>(i) + 1, lv[i].norm(),
                       "leader " + std::to_string(i + 1) + " moves at " +
                           std::to_string(lv[i].norm()) + ", not below beta"});
  } else if (sc.obstacle) {
    if constexpr (D == 2) {
      for (size_t i = 0; i < positions.size(); ++i) {
        const double dist = (positions[i] - sc.obstacle->position).norm();
        if (dist <= 1e-6)
          out.push_back({Fault::ObstacleCoincidence, true, static_cast<int>(i) + 1, dist,
                         "agent " + std::to_string(i + 1) + " touches the obstacle"});
      }
    }
  }
  return out;
}

namespace detail {

inline void record_abort(SimTrace& tr, Fault fault, const std::string& message, double t) {
  tr.meta.aborted = true;
  tr.meta.abort_fault = fault_name(fault);
  tr.meta.abort_message = message;
  tr.meta.abort_time = t;
  tr.events.push_back({t, "abort", 0, std::string(fault_name(fault)) + ": " + message});
}

}  // namespace detail

// Forward-Euler integration of the selected law with all agents advancing
// simultaneously from the frozen previous state. Returns a complete trace, or
// a partial one with the abort recorded in the metadata.
template <int D>
inline SimTrace run(const Scenario<D>& sc) {
  SimTrace tr;
  TraceMeta& meta = tr.meta;
  const bool formation = sc.kind == ScenarioKind::formation;
  const int n = formation ? sc.graph.n : static_cast<int>(sc.agent_positions.size());
  const int l = formation ? sc.graph.l : 0;
  const int nf = n - l;
  const int m = formation ? sc.graph.m() : 0;

  meta.dim = D;
  meta.n = n;
  meta.l = l;
  if (formation) meta.edges = sc.graph.edges;
  meta.name = sc.name;
  meta.kind = formation ? "formation" : "target_tracking";
  meta.law = law_name(sc.law);
  meta.mode = sc.integrator.sw.mode == SwitchMode::raw_sign ? "raw_sign" : "boundary_layer";
  meta.h = sc.integrator.h;
  meta.duration = sc.integrator.duration;
  meta.alpha = sc.alpha;
  meta.beta = sc.beta;
  for (double g : sc.gamma) meta.gamma_max = std::max(meta.gamma_max, g);
  meta.threshold = sc.convergence.threshold;
  meta.stride = sc.integrator.stride;
  meta.dwell = sc.convergence.dwell;
  meta.est_count = formation ? (sc.uses_estimators() ? nf : 0) : 1;
  if (formation) {
    meta.follower_max_zstar = sc.spec.follower_max_zstar;
    for (int f = 0; f < nf; ++f)
      meta.follower_neighbor_count.push_back(
          static_cast<int>(sc.graph.neighbor_sets[static_cast<size_t>(l + f)].size()));
    meta.scaling_windows = sc.profile.scaling_windows();
  }
  if (sc.obstacle) {
    meta.has_obstacle = true;
    meta.obs_x = sc.obstacle->position[0];
    meta.obs_y = sc.obstacle->position[1];
    meta.obs_d = sc.obstacle->d;
    meta.obs_dmax = sc.obstacle->d_max;
    meta.obs_k = sc.obstacle->k;
  }
  meta.estimate_seed = sc.estimate_seed;
  meta.estimates_seeded = sc.estimates_seeded;

  const double h = sc.integrator.h;
  const long steps = sc.integrator.steps();
  const double thr = sc.convergence.threshold;

  std::vector<Vec<D>> p = formation ? sc.initial_positions : sc.agent_positions;
  std::vector<Vec<D>> est;
  if (formation && sc.uses_estimators())
    est = sc.initial_estimates;
  else if (!formation)
    est = {sc.target_start};

  // Per-follower edge ids and neighbor vertex lists, in edge order.
  std::vector<std::vector<int>> edge_ids(static_cast<size_t>(nf));
  if (formation)
    for (int k = 0; k < m; ++k) {
      const int tail = sc.graph.edges[static_cast<size_t>(k)].first;
      if (!sc.graph.is_leader(tail)) edge_ids[static_cast<size_t>(tail - l)].push_back(k);
    }

  const int err_count = meta.err_count();
  tr.crossing.assign(static_cast<size_t>(err_count), -1.0);
  tr.gated_crossing.assign(static_cast<size_t>(err_count), -1.0);
  tr.converged_at.assign(static_cast<size_t>(err_count), -1.0);
  tr.estimator_crossing.assign(static_cast<size_t>(meta.est_count), -1.0);

  std::vector<int> dwell_count(static_cast<size_t>(err_count), 0);
  std::vector<double> prev_err(static_cast<size_t>(err_count), 0.0);
  std::vector<char> inside_obstacle(static_cast<size_t>(err_count), 0);
  int prev_segment = -1;
  int lyapunov_warnings = 0;
  int gain_warnings = 0;
  long lyapunov_suppressed = 0;
  const int max_recorded_warnings = 16;

  // Scratch, reused across steps.
  std::vector<Vec<D>> targets;
  std::vector<double> pos_err(static_cast<size_t>(err_count), 0.0);
  std::vector<double> est_err(static_cast<size_t>(meta.est_count), 0.0);
  std::vector<double> edge_err(static_cast<size_t>(m), 0.0);
  std::vector<double> lam1(static_cast<size_t>(formation ? nf : 0), 0.0);
  std::vector<double> u_norm(static_cast<size_t>(err_count), 0.0);
  std::vector<Vec<D>> vel(static_cast<size_t>(n), Vec<D>::zero());
  std::vector<Vec<D>> est_vel(est.size(), Vec<D>::zero());
  std::vector<Vec<D>> nbr_pos, nbr_bearing, received;

  for (long s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) * h;

    // Hypothesis monitors on the frozen state.
    const auto diags = monitor_hypotheses(p, sc, t);
    bool fatal = false;
    for (const auto& d : diags) {
      if (d.fatal) {
        detail::record_abort(tr, d.fault, d.message, t);
        fatal = true;
        break;
      }
    }
    if (fatal) break;

    try {
      // Derived quantities of the frozen state.
      if (formation) {
        std::vector<Vec<D>> leaders(p.begin(), p.begin() + l);
        targets = cascade_targets(sc.spec, leaders);
        for (int f = 0; f < nf; ++f) {
          pos_err[static_cast<size_t>(f)] =
              (p[static_cast<size_t>(l + f)] - targets[static_cast<size_t>(l + f)]).norm();
          if (sc.uses_estimators())
            est_err[static_cast<size_t>(f)] =
                (est[static_cast<size_t>(f)] - targets[static_cast<size_t>(l + f)]).norm();
        }
        for (int k = 0; k < m; ++k) {
          const auto& [tail, head] = sc.graph.edges[static_cast<size_t>(k)];
          edge_err[static_cast<size_t>(k)] =
              (bearing(p[static_cast<size_t>(tail)], p[static_cast<size_t>(head)]) -
               sc.spec.desired[static_cast<size_t>(k)])
                  .norm();
        }
      } else {
        for (int i = 0; i < n; ++i)
          pos_err[static_cast<size_t>(i)] = (p[static_cast<size_t>(i)] - est[0]).norm();
        est_err[0] = 0.0;
      }

      // Velocities from the frozen state (also yields lambda1 and |u|).
      if (formation) {
        std::vector<Vec<D>> leaders(p.begin(), p.begin() + l);
        const auto lv = leader_velocity(sc.profile, leaders, t);
        for (int i = 0; i < l; ++i) vel[static_cast<size_t>(i)] = lv[static_cast<size_t>(i)];

        for (int f = 0; f < nf; ++f) {
          const int v = l + f;
          const auto& nbrs = sc.graph.neighbor_sets[static_cast<size_t>(v)];
          if (sc.law == LawType::bearing_only) {
            nbr_pos.clear();
            nbr_bearing.clear();
            for (size_t a = 0; a < nbrs.size(); ++a) {
              nbr_pos.push_back(p[static_cast<size_t>(nbrs[a])]);
              nbr_bearing.push_back(
                  sc.spec.desired[static_cast<size_t>(edge_ids[static_cast<size_t>(f)][a])]);
            }
            const auto eval = bearing_only_control(p[static_cast<size_t>(v)], nbr_pos, nbr_bearing,
                                                   sc.alpha, sc.beta, sc.integrator.sw);
            vel[static_cast<size_t>(v)] = eval.u;
            lam1[static_cast<size_t>(f)] = eval.lambda1;
            u_norm[static_cast<size_t>(f)] = eval.u.norm();

            const double r = static_cast<double>(nbrs.size());
            if (eval.k1 <= std::pow(r, -0.5 * (sc.alpha + 1.0)) ||
                eval.k2 <= std::pow(r, -0.5)) {
              if (gain_warnings < max_recorded_warnings) {
                tr.events.push_back({t, "warning", v + 1,
                                     "GainBoundViolated: k1 = " + std::to_string(eval.k1) +
                                         ", k2 = " + std::to_string(eval.k2)});
                ++gain_warnings;
              }
            }
          } else {
            // Estimator laws: measured lambda1 is a diagnostic only.
            Mat<D> m_i = Mat<D>::zero();
            for (int jn : nbrs)
              m_i += projection_matrix(bearing(p[static_cast<size_t>(v)], p[static_cast<size_t>(jn)]));
            lam1[static_cast<size_t>(f)] = min_eigenvalue_sym(m_i);

            received.clear();
            nbr_bearing.clear();
            for (size_t a = 0; a < nbrs.size(); ++a) {
              const int jn = nbrs[a];
              received.push_back(sc.graph.is_leader(jn) ? p[static_cast<size_t>(jn)]
                                                        : est[static_cast<size_t>(jn - l)]);
              nbr_bearing.push_back(
                  sc.spec.desired[static_cast<size_t>(edge_ids[static_cast<size_t>(f)][a])]);
            }
            est_vel[static_cast<size_t>(f)] =
                sc.law == LawType::fixed_time_estimator
                    ? fixed_time_estimator_rhs(est[static_cast<size_t>(f)], received, nbr_bearing,
                                               sc.alpha, sc.rho, sc.gamma[static_cast<size_t>(f)],
                                               sc.integrator.sw)
                    : estimator_rhs(est[static_cast<size_t>(f)], received, nbr_bearing, sc.alpha,
                                    sc.gamma[static_cast<size_t>(f)], sc.integrator.sw);
            vel[static_cast<size_t>(v)] = tracking_rhs(p[static_cast<size_t>(v)], est[static_cast<size_t>(f)],
                                                       sc.alpha, sc.beta, sc.integrator.sw);
            u_norm[static_cast<size_t>(f)] = vel[static_cast<size_t>(v)].norm();
          }
        }
      } else {
        est_vel[0] = sc.target_velocity.eval(t, 0.0);
        for (int i = 0; i < n; ++i) {
          if (sc.law == LawType::estimator_tracking_obstacle) {
            if constexpr (D == 2) {
              vel[static_cast<size_t>(i)] = obstacle_avoid_control(
                  p[static_cast<size_t>(i)], est[0], *sc.obstacle, sc.alpha, sc.beta, sc.integrator.sw);
            }
          } else {
            vel[static_cast<size_t>(i)] =
                tracking_rhs(p[static_cast<size_t>(i)], est[0], sc.alpha, sc.beta, sc.integrator.sw);
          }
          u_norm[static_cast<size_t>(i)] = vel[static_cast<size_t>(i)].norm();
        }
      }
    } catch (const Error& e) {
      detail::record_abort(tr, e.fault(), e.what(), t);
      break;
    }

    // Lyapunov-descent check for the bearing-only law, active for followers
    // whose neighborhood has settled; forward Euler may overshoot by O(h).
    if (formation && sc.law == LawType::bearing_only && s > 0) {
      for (int f = 0; f < nf; ++f) {
        bool nbrs_done = true;
        for (int jn : sc.graph.neighbor_sets[static_cast<size_t>(l + f)])
          if (!sc.graph.is_leader(jn) && tr.converged_at[static_cast<size_t>(jn - l)] < 0.0)
            nbrs_done = false;
        if (!nbrs_done) continue;
        const double dv = 0.5 * (pos_err[static_cast<size_t>(f)] * pos_err[static_cast<size_t>(f)] -
                                 prev_err[static_cast<size_t>(f)] * prev_err[static_cast<size_t>(f)]);
        if (dv > 10.0 * h * sc.beta) {
          if (lyapunov_warnings < max_recorded_warnings) {
            tr.events.push_back({t, "warning", l + f + 1,
                                 "LyapunovAscent: dV = " + std::to_string(dv)});
            ++lyapunov_warnings;
          } else {
            ++lyapunov_suppressed;
          }
        }
      }
    }
    prev_err = pos_err;

    // Convergence bookkeeping at full step resolution. Followers are visited
    // in index order, so a neighbor crossing this same step is already seen.
    for (int i = 0; i < err_count; ++i) {
      const double e = pos_err[static_cast<size_t>(i)];
      if (e < thr) {
        if (tr.crossing[static_cast<size_t>(i)] < 0.0) {
          tr.crossing[static_cast<size_t>(i)] = t;
          tr.events.push_back({t, "crossed", l + i + 1, "position error below threshold"});
        }
        if (tr.gated_crossing[static_cast<size_t>(i)] < 0.0) {
          bool gate_open = true;
          if (formation)
            for (int jn : sc.graph.neighbor_sets[static_cast<size_t>(l + i)])
              if (!sc.graph.is_leader(jn) &&
                  tr.gated_crossing[static_cast<size_t>(jn - l)] < 0.0)
                gate_open = false;
          if (gate_open) tr.gated_crossing[static_cast<size_t>(i)] = t;
        }
        if (++dwell_count[static_cast<size_t>(i)] == sc.convergence.dwell &&
            tr.converged_at[static_cast<size_t>(i)] < 0.0) {
          const double t0 = t - static_cast<double>(sc.convergence.dwell - 1) * h;
          tr.converged_at[static_cast<size_t>(i)] = t0;
          tr.events.push_back({t0, "converged", l + i + 1,
                               "held below threshold for " +
                                   std::to_string(sc.convergence.dwell) + " steps"});
        }
      } else {
        dwell_count[static_cast<size_t>(i)] = 0;
      }
    }
    if (formation && sc.uses_estimators())
      for (int f = 0; f < nf; ++f)
        if (est_err[static_cast<size_t>(f)] < thr && tr.estimator_crossing[static_cast<size_t>(f)] < 0.0) {
          tr.estimator_crossing[static_cast<size_t>(f)] = t;
          tr.events.push_back({t, "estimator_crossed", l + f + 1,
                               "estimate error below threshold"});
        }

    // Obstacle entry/exit markers.
    if constexpr (D == 2) {
      if (!formation && sc.obstacle) {
        for (int i = 0; i < n; ++i) {
          const char in_ball =
              (p[static_cast<size_t>(i)] - sc.obstacle->position).norm() < sc.obstacle->d ? 1 : 0;
          if (in_ball != inside_obstacle[static_cast<size_t>(i)]) {
            tr.events.push_back({t, in_ball ? "obstacle_enter" : "obstacle_exit", i + 1, ""});
            inside_obstacle[static_cast<size_t>(i)] = in_ball;
          }
        }
      }
    }

    // Sample row.
    if (s % sc.integrator.stride == 0) {
      tr.times.push_back(t);
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < D; ++c) tr.positions.push_back(p[static_cast<size_t>(i)][c]);
      for (size_t e = 0; e < est.size(); ++e)
        for (int c = 0; c < D; ++c) tr.estimates.push_back(est[e][c]);
      for (int k = 0; k < m; ++k) tr.bearing_errors.push_back(edge_err[static_cast<size_t>(k)]);
      for (int i = 0; i < err_count; ++i) tr.position_errors.push_back(pos_err[static_cast<size_t>(i)]);
      if (formation && sc.uses_estimators())
        for (int f = 0; f < nf; ++f) tr.estimate_errors.push_back(est_err[static_cast<size_t>(f)]);
      if (formation)
        for (int f = 0; f < nf; ++f) tr.lambda1.push_back(lam1[static_cast<size_t>(f)]);
      for (int i = 0; i < err_count; ++i) tr.control_norm.push_back(u_norm[static_cast<size_t>(i)]);
    }

    if (s == steps) break;

    // Simultaneous forward-Euler update.
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] += h * vel[static_cast<size_t>(i)];
    for (size_t e = 0; e < est.size(); ++e) est[e] += h * est_vel[e];

    bool finite = true;
    for (const auto& v : p)
      if (!v.all_finite()) finite = false;
    for (const auto& v : est)
      if (!v.all_finite()) finite = false;
    if (!finite) {
      detail::record_abort(tr, Fault::NonFiniteState,
                           "state became non-finite after the update", t + h);
      break;
    }

    if (formation) {
      const int seg = sc.profile.segment_index(t + h);
      if (prev_segment >= 0 && seg != prev_segment)
        tr.events.push_back({t + h, "phase", 0, "profile segment " + std::to_string(seg + 1)});
      prev_segment = seg;
    }
  }

  if (lyapunov_suppressed > 0)
    tr.events.push_back({tr.times.empty() ? 0.0 : tr.times.back(), "warning", 0,
                         "LyapunovAscent: " + std::to_string(lyapunov_suppressed) +
                             " further occurrences suppressed"});
  return tr;
}

}  // namespace bfm
