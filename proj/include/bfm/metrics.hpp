#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bfm/bearing_spec.hpp"
#include "bfm/geom.hpp"
#include "bfm/sim.hpp"

namespace bfm {

// Settling-time increment for one follower: with squared-error Lyapunov value
// v0 and descent rate eta * (2 V)^{(1+alpha)/2}, the error reaches zero within
// 2 v0^{(1-alpha)/2} / (eta (1 - alpha)). Returns +inf when alpha >= 1.
inline double settling_increment(double v0, double eta, double alpha) {
  if (alpha >= 1.0 || eta <= 0.0) return std::numeric_limits<double>::infinity();
  if (v0 <= 0.0) return 0.0;
  return 2.0 * std::pow(v0, 0.5 * (1.0 - alpha)) / (eta * (1.0 - alpha));
}

// Rate constant for one follower: 2^{(alpha+1)/2} / max_j |z*_ij|^alpha where
// z*_ij are the desired displacements to its neighbors.
inline double descent_rate(double max_zstar, double alpha) {
  if (max_zstar <= 0.0) return 0.0;
  return std::pow(2.0, 0.5 * (alpha + 1.0)) / std::pow(max_zstar, alpha);
}

// Cumulative a-priori settling bounds, one per follower in insertion order.
// Each follower's clock starts when the previous one is settled; Lyapunov
// values are taken at t = 0 against targets cascaded from the initial leader
// positions.
template <int D>
inline std::vector<double> theoretical_bounds(const BearingSpec<D>& spec,
                                              const std::vector<Vec<D>>& initial_positions,
                                              double alpha) {
  const int l = spec.graph.l;
  const int nf = spec.graph.followers();
  std::vector<Vec<D>> leaders(initial_positions.begin(), initial_positions.begin() + l);
  const auto targets = cascade_targets(spec, leaders);

  std::vector<double> bounds(static_cast<size_t>(nf), 0.0);
  double t_prev = 0.0;
  for (int f = 0; f < nf; ++f) {
    const double err =
        (initial_positions[static_cast<size_t>(l + f)] - targets[static_cast<size_t>(l + f)]).norm();
    const double eta = descent_rate(spec.follower_max_zstar[static_cast<size_t>(f)], alpha);
    t_prev += settling_increment(0.5 * err * err, eta, alpha);
    bounds[static_cast<size_t>(f)] = t_prev;
  }
  return bounds;
}

// A-posteriori bounds from a recorded trace: the same recursion, but each
// follower's Lyapunov value is read off the trace at the previous follower's
// bound (nearest sample at or after it), so early phases use the error that
// actually remained rather than the initial one.
inline std::vector<double> posterior_bounds(const SimTrace& tr, double alpha) {
  const int nf = tr.meta.err_count();
  std::vector<double> bounds(static_cast<size_t>(nf), 0.0);
  if (tr.samples() == 0 || tr.meta.l == 0) return bounds;

  double t_prev = 0.0;
  for (int f = 0; f < nf; ++f) {
    int s = 0;
    while (s + 1 < tr.samples() && tr.times[static_cast<size_t>(s)] < t_prev) ++s;
    const double err = tr.pos_err(s, f);
    const double eta = descent_rate(tr.meta.follower_max_zstar[static_cast<size_t>(f)], alpha);
    t_prev += settling_increment(0.5 * err * err, eta, alpha);
    bounds[static_cast<size_t>(f)] = t_prev;
  }
  return bounds;
}

struct FollowerReport {
  int vertex = 0;  // 1-indexed
  double crossing = -1.0;
  double gated_crossing = -1.0;
  double converged_at = -1.0;
  double estimator_crossing = -1.0;
  double bound_apriori = 0.0;
  double bound_aposteriori = 0.0;
  bool bound_checked = false;
  bool bound_satisfied = false;
  double max_bearing_error_settled = -1.0;  // over own edges, after dwell, outside scaling
};

struct RunReport {
  std::string scenario;
  bool aborted = false;
  std::string abort_fault;
  double abort_time = -1.0;
  bool all_converged = false;
  bool all_bounds_satisfied = false;
  double max_bearing_error_settled = -1.0;
  int warning_count = 0;
  std::vector<FollowerReport> followers;
  std::vector<std::string> files;  // everything the run wrote, report included
};

namespace detail {

inline bool in_scaling_window(const TraceMeta& meta, double t) {
  for (const auto& [a, b] : meta.scaling_windows)
    if (t >= a && t < b) return true;
  return false;
}

}  // namespace detail

// Bound slack: measured time may exceed the a-posteriori bound by 5% before
// the check is reported as failed.
inline constexpr double k_bound_slack = 1.05;

inline RunReport compute_metrics(const SimTrace& tr, const std::vector<double>& apriori) {
  RunReport rep;
  rep.scenario = tr.meta.name;
  rep.aborted = tr.meta.aborted;
  rep.abort_fault = tr.meta.abort_fault;
  rep.abort_time = tr.meta.abort_time;
  for (const auto& ev : tr.events)
    if (ev.kind == "warning") ++rep.warning_count;

  const int nf = tr.meta.err_count();
  const bool formation = tr.meta.l > 0;
  const auto aposteriori = formation ? posterior_bounds(tr, tr.meta.alpha) : std::vector<double>();

  rep.all_converged = !tr.meta.aborted;
  rep.all_bounds_satisfied = formation && !tr.meta.aborted;
  for (int f = 0; f < nf; ++f) {
    FollowerReport fr;
    fr.vertex = tr.meta.l + f + 1;
    fr.crossing = tr.crossing[static_cast<size_t>(f)];
    fr.gated_crossing = tr.gated_crossing[static_cast<size_t>(f)];
    fr.converged_at = tr.converged_at[static_cast<size_t>(f)];
    if (f < static_cast<int>(tr.estimator_crossing.size()))
      fr.estimator_crossing = tr.estimator_crossing[static_cast<size_t>(f)];
    if (fr.converged_at < 0.0) rep.all_converged = false;

    if (formation) {
      fr.bound_apriori = f < static_cast<int>(apriori.size()) ? apriori[static_cast<size_t>(f)] : 0.0;
      fr.bound_aposteriori = aposteriori[static_cast<size_t>(f)];
      fr.bound_checked = std::isfinite(fr.bound_aposteriori);
      fr.bound_satisfied = fr.bound_checked && fr.gated_crossing >= 0.0 &&
                           fr.gated_crossing <= k_bound_slack * fr.bound_aposteriori;
      if (fr.bound_checked && !fr.bound_satisfied) rep.all_bounds_satisfied = false;

      // Steady-state bearing error over this follower's edges, measured from
      // the dwell-confirmed time onward and outside scaling windows, where
      // leader motion rescales the shape and the error is transiently large.
      if (fr.converged_at >= 0.0) {
        double worst = 0.0;
        for (int s = 0; s < tr.samples(); ++s) {
          const double t = tr.times[static_cast<size_t>(s)];
          if (t < fr.converged_at || detail::in_scaling_window(tr.meta, t)) continue;
          for (size_t k = 0; k < tr.meta.edges.size(); ++k)
            if (tr.meta.edges[k].first == tr.meta.l + f)
              worst = std::max(worst, tr.bearing_err(s, static_cast<int>(k)));
        }
        fr.max_bearing_error_settled = worst;
        rep.max_bearing_error_settled = std::max(rep.max_bearing_error_settled, worst);
      }
    }
    rep.followers.push_back(fr);
  }
  return rep;
}

inline nlohmann::json report_to_json(const RunReport& rep) {
  nlohmann::json j;
  j["scenario"] = rep.scenario;
  j["aborted"] = rep.aborted;
  if (rep.aborted) {
    j["abort_fault"] = rep.abort_fault;
    j["abort_time"] = rep.abort_time;
  }
  j["all_converged"] = rep.all_converged;
  j["all_bounds_satisfied"] = rep.all_bounds_satisfied;
  j["max_bearing_error_settled"] = rep.max_bearing_error_settled;
  j["warning_count"] = rep.warning_count;
  j["files"] = rep.files;
  j["followers"] = nlohmann::json::array();
  for (const auto& fr : rep.followers) {
    nlohmann::json f;
    f["vertex"] = fr.vertex;
    f["crossing"] = fr.crossing;
    f["gated_crossing"] = fr.gated_crossing;
    f["converged_at"] = fr.converged_at;
    f["estimator_crossing"] = fr.estimator_crossing;
    f["bound_apriori"] = fr.bound_apriori;
    f["bound_aposteriori"] = fr.bound_aposteriori;
    f["bound_checked"] = fr.bound_checked;
    f["bound_satisfied"] = fr.bound_satisfied;
    f["max_bearing_error_settled"] = fr.max_bearing_error_settled;
    j["followers"].push_back(f);
  }
  return j;
}

}  // namespace bfm
