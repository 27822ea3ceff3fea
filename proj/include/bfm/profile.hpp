#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bfm/errors.hpp"
#include "bfm/geom.hpp"

namespace bfm {

// Declarative velocity function: v(t) = base + slope*(t - t_ref) +
// cos_amp * cos(cos_omega * t). Covers ramps and the sinusoidal target drift
// used by the tracking scenarios.
template <int D>
struct VelocityFn {
  Vec<D> base{};
  Vec<D> slope{};
  Vec<D> cos_amp{};
  double cos_omega = 0.0;

  Vec<D> eval(double t, double t_ref) const {
    Vec<D> v = base + (t - t_ref) * slope;
    if (cos_omega != 0.0 || !(cos_amp.norm_sq() == 0.0))
      v += std::cos(cos_omega * t) * cos_amp;
    return v;
  }
};

// One piece of the leader reference: translational velocity shared by all
// leaders plus an optional uniform-scaling gain. Segment k covers
// [t_end(k-1), t_end(k)), with the final endpoint inclusive.
template <int D>
struct ProfileSegment {
  double t_end = 0.0;
  VelocityFn<D> translational{};
  double scale_gain = 0.0;  // k_scale; negative shrinks, positive grows
};

template <int D>
struct LeaderProfile {
  std::vector<ProfileSegment<D>> segments;

  double horizon() const { return segments.empty() ? 0.0 : segments.back().t_end; }

  int segment_index(double t) const {
    if (segments.empty())
      throw Error(Fault::ProfileExhausted, "leader profile has no segments");
    if (t < 0.0 || t > horizon() + 1e-9)
      throw Error(Fault::ProfileExhausted,
                  "t = " + std::to_string(t) + " outside profile horizon [0, " +
                      std::to_string(horizon()) + "]");
    for (size_t k = 0; k < segments.size(); ++k)
      if (t < segments[k].t_end) return static_cast<int>(k);
    return static_cast<int>(segments.size()) - 1;
  }

  double segment_start(int idx) const {
    return idx == 0 ? 0.0 : segments[static_cast<size_t>(idx - 1)].t_end;
  }

  Vec<D> translational_velocity(double t) const {
    const int k = segment_index(t);
    return segments[static_cast<size_t>(k)].translational.eval(t, segment_start(k));
  }

  double scale_gain_at(double t) const {
    return segments[static_cast<size_t>(segment_index(t))].scale_gain;
  }

  // Closed intervals on which the profile rescales the formation.
  std::vector<std::pair<double, double>> scaling_windows() const {
    std::vector<std::pair<double, double>> w;
    for (size_t k = 0; k < segments.size(); ++k) {
      if (segments[k].scale_gain == 0.0) continue;
      const double t0 = k == 0 ? 0.0 : segments[k - 1].t_end;
      if (!w.empty() && w.back().second == t0)
        w.back().second = segments[k].t_end;
      else
        w.emplace_back(t0, segments[k].t_end);
    }
    return w;
  }
};

// Per-leader velocities: common translational part plus the scaling component
// k_scale * (p_i - centroid) / (stacked deviation norm). The scaling direction
// is the unit vector of the stacked deviation, taken blockwise per leader.
template <int D>
inline std::vector<Vec<D>> leader_velocity(const LeaderProfile<D>& profile,
                                           const std::vector<Vec<D>>& leader_positions,
                                           double t) {
  const int l = static_cast<int>(leader_positions.size());
  const Vec<D> f = profile.translational_velocity(t);
  const double ks = profile.scale_gain_at(t);

  std::vector<Vec<D>> v(static_cast<size_t>(l), f);
  if (ks == 0.0) return v;

  Vec<D> centroid = Vec<D>::zero();
  for (const Vec<D>& p : leader_positions) centroid += p;
  centroid *= 1.0 / l;

  double stack_sq = 0.0;
  for (const Vec<D>& p : leader_positions) stack_sq += (p - centroid).norm_sq();
  const double stack_norm = std::sqrt(stack_sq);
  if (!(stack_norm > k_eps_zero))
    throw Error(Fault::DegenerateScaling,
                "scaling requested while all leaders coincide (deviation norm = " +
                    std::to_string(stack_norm) + ")");

  const double c = ks / stack_norm;
  for (int i = 0; i < l; ++i) v[static_cast<size_t>(i)] += c * (leader_positions[static_cast<size_t>(i)] - centroid);
  return v;
}

// Supremum of per-leader speed over the horizon, for the beta > sup |v*|
// validation. The translational part is sampled densely per segment; the
// scaling contribution uses the largest per-leader share of the stacked
// deviation, which is invariant under the profile's own motion (translation
// preserves deviations, scaling rescales numerator and denominator alike).
template <int D>
inline double max_leader_speed(const LeaderProfile<D>& profile,
                               const std::vector<Vec<D>>& leader_positions) {
  Vec<D> centroid = Vec<D>::zero();
  for (const Vec<D>& p : leader_positions) centroid += p;
  centroid *= 1.0 / static_cast<double>(leader_positions.size());
  double stack_sq = 0.0;
  double max_dev = 0.0;
  for (const Vec<D>& p : leader_positions) {
    const double d2 = (p - centroid).norm_sq();
    stack_sq += d2;
    max_dev = std::max(max_dev, std::sqrt(d2));
  }
  const double max_frac = stack_sq > 0.0 ? max_dev / std::sqrt(stack_sq) : 0.0;

  double sup = 0.0;
  const int samples_per_segment = 4096;
  for (size_t k = 0; k < profile.segments.size(); ++k) {
    const double t0 = k == 0 ? 0.0 : profile.segments[k - 1].t_end;
    const double t1 = profile.segments[k].t_end;
    const auto& seg = profile.segments[k];
    for (int s = 0; s <= samples_per_segment; ++s) {
      const double t = t0 + (t1 - t0) * (static_cast<double>(s) / samples_per_segment);
      double speed = seg.translational.eval(t, t0).norm();
      if (seg.scale_gain != 0.0) speed += std::fabs(seg.scale_gain) * max_frac;
      sup = std::max(sup, speed);
    }
  }
  return sup;
}

}  // namespace bfm
