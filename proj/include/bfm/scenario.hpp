#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bfm/bearing_spec.hpp"
#include "bfm/control.hpp"
#include "bfm/errors.hpp"
#include "bfm/geom.hpp"
#include "bfm/graph.hpp"
#include "bfm/profile.hpp"

namespace bfm {

enum class LawType {
  bearing_only,
  estimator_tracking,
  estimator_tracking_obstacle,
  fixed_time_estimator,
};

inline const char* law_name(LawType t) {
  switch (t) {
    case LawType::bearing_only: return "bearing_only";
    case LawType::estimator_tracking: return "estimator_tracking";
    case LawType::estimator_tracking_obstacle: return "estimator_tracking_obstacle";
    case LawType::fixed_time_estimator: return "fixed_time_estimator";
  }
  return "unknown";
}

enum class ScenarioKind { formation, target_tracking };

struct ConvergenceSettings {
  double threshold = 1e-3;  // on the follower position (or tracking) error
  int dwell = 50;           // consecutive steps below threshold for the converged event
};

struct IntegratorSettings {
  double h = 1e-3;
  double duration = 1.0;
  Switching sw{};
  int stride = 1;  // sampling stride in steps

  long steps() const { return std::lround(duration / h); }
};

// A fully validated, ready-to-run description of one experiment.
template <int D>
struct Scenario {
  std::string name = "scenario";
  ScenarioKind kind = ScenarioKind::formation;

  // Formation experiments.
  FormationGraph graph;
  BearingSpec<D> spec;
  std::vector<Vec<D>> initial_positions;  // all n agents
  std::vector<Vec<D>> initial_estimates;  // one per follower (estimator laws)
  LeaderProfile<D> profile;

  // Target-tracking experiments: independent agents chasing one virtual
  // target whose position integrates the declared velocity exactly.
  std::vector<Vec<D>> agent_positions;
  Vec<D> target_start{};
  VelocityFn<D> target_velocity{};

  LawType law = LawType::bearing_only;
  double alpha = 0.5;
  double beta = 2.0;
  double rho = 0.0;
  std::vector<double> gamma;  // per follower
  std::optional<Obstacle> obstacle;

  IntegratorSettings integrator;
  ConvergenceSettings convergence;
  std::string out_dir;

  std::uint64_t estimate_seed = 0;
  bool estimates_seeded = false;

  bool uses_estimators() const {
    return kind == ScenarioKind::formation && law != LawType::bearing_only;
  }
};

namespace detail {

// Deterministic uniform draw in [0,1): top 53 bits of the engine output.
// Avoids std::uniform_real_distribution, whose stream is not specified
// identically across standard-library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <int D>
inline Vec<D> vec_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != static_cast<size_t>(D))
    throw Error(Fault::ParseError,
                what + " must be an array of " + std::to_string(D) + " numbers");
  Vec<D> v{};
  for (int i = 0; i < D; ++i) {
    if (!j[static_cast<size_t>(i)].is_number())
      throw Error(Fault::ParseError, what + " component " + std::to_string(i) +
                                         " is not a number");
    v[i] = j[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

template <int D>
inline std::vector<Vec<D>> vec_list_from_json(const nlohmann::json& j,
                                              const std::string& what) {
  if (!j.is_array()) throw Error(Fault::ParseError, what + " must be an array");
  std::vector<Vec<D>> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(vec_from_json<D>(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

template <int D>
inline VelocityFn<D> velocity_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_object()) throw Error(Fault::ParseError, what + " must be an object");
  VelocityFn<D> fn;
  if (j.contains("base")) fn.base = vec_from_json<D>(j.at("base"), what + ".base");
  if (j.contains("slope")) fn.slope = vec_from_json<D>(j.at("slope"), what + ".slope");
  if (j.contains("cos_amp")) fn.cos_amp = vec_from_json<D>(j.at("cos_amp"), what + ".cos_amp");
  if (j.contains("cos_omega")) fn.cos_omega = j.at("cos_omega").get<double>();
  return fn;
}

template <int D>
inline bool all_finite(const std::vector<Vec<D>>& vs) {
  for (const auto& v : vs)
    if (!v.all_finite()) return false;
  return true;
}

// Rank of the leader deviation matrix; >= 2 means non-collinear.
template <int D>
inline bool leaders_non_collinear(const std::vector<Vec<D>>& leaders) {
  Vec<D> centroid = Vec<D>::zero();
  for (const auto& p : leaders) centroid += p;
  centroid *= 1.0 / static_cast<double>(leaders.size());
  DenseMatrix dev(static_cast<int>(leaders.size()), D);
  for (size_t i = 0; i < leaders.size(); ++i)
    for (int c = 0; c < D; ++c) dev.at(static_cast<int>(i), c) = (leaders[i] - centroid)[c];
  return numeric_rank(dev) >= 2;
}

}  // namespace detail

inline int scenario_dimension(const nlohmann::json& j) {
  if (!j.contains("dimension") || !j.at("dimension").is_number_integer())
    throw Error(Fault::ParseError, "scenario needs an integer 'dimension' field");
  const int d = j.at("dimension").get<int>();
  if (d != 2 && d != 3)
    throw Error(Fault::ParseError, "dimension must be 2 or 3, got " + std::to_string(d));
  return d;
}

template <int D>
inline Scenario<D> scenario_from_json(const nlohmann::json& j) {
  if (scenario_dimension(j) != D)
    throw Error(Fault::ParseError, "scenario dimension does not match requested build");

  std::vector<Violation> violations;
  auto flag = [&violations](Fault f, const std::string& msg) {
    violations.push_back({f, msg});
  };

  Scenario<D> sc;
  try {
    if (j.contains("name")) sc.name = j.at("name").get<std::string>();

    const std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "formation";
    if (kind == "formation")
      sc.kind = ScenarioKind::formation;
    else if (kind == "target_tracking")
      sc.kind = ScenarioKind::target_tracking;
    else
      throw Error(Fault::ParseError, "unknown scenario kind '" + kind + "'");

    // Law block.
    const auto& jlaw = j.at("law");
    const std::string law = jlaw.at("type").get<std::string>();
    if (law == "bearing_only")
      sc.law = LawType::bearing_only;
    else if (law == "estimator_tracking")
      sc.law = LawType::estimator_tracking;
    else if (law == "estimator_tracking_obstacle")
      sc.law = LawType::estimator_tracking_obstacle;
    else if (law == "fixed_time_estimator")
      sc.law = LawType::fixed_time_estimator;
    else
      throw Error(Fault::ParseError, "unknown law type '" + law + "'");

    sc.alpha = jlaw.value("alpha", 0.5);
    sc.beta = jlaw.value("beta", 2.0);
    sc.rho = jlaw.value("rho", 0.0);

    if (jlaw.contains("switch")) {
      const auto& jsw = jlaw.at("switch");
      const std::string mode = jsw.value("mode", "raw_sign");
      if (mode == "raw_sign" || mode == "raw")
        sc.integrator.sw.mode = SwitchMode::raw_sign;
      else if (mode == "boundary_layer" || mode == "layer")
        sc.integrator.sw.mode = SwitchMode::boundary_layer;
      else
        throw Error(Fault::ParseError, "unknown switching mode '" + mode + "'");
      sc.integrator.sw.layer_eps = jsw.value("eps", 1e-4);
    }

    if (j.contains("obstacle")) {
      const auto& jo = j.at("obstacle");
      Obstacle obs;
      if constexpr (D == 2) obs.position = detail::vec_from_json<2>(jo.at("position"), "obstacle.position");
      obs.d = jo.at("activation_radius").get<double>();
      obs.d_max = jo.value("sensing_range", 2.0 * obs.d);
      obs.k = jo.at("gain").get<double>();
      sc.obstacle = obs;
    }

    // Integrator block.
    if (j.contains("integrator")) {
      const auto& ji = j.at("integrator");
      sc.integrator.h = ji.value("step", 1e-3);
      sc.integrator.duration = ji.at("duration").get<double>();
      sc.integrator.stride = ji.value("stride", 1);
    } else {
      throw Error(Fault::ParseError, "scenario needs an 'integrator' block with a duration");
    }

    if (j.contains("convergence")) {
      const auto& jc = j.at("convergence");
      sc.convergence.threshold = jc.value("threshold", 1e-3);
      sc.convergence.dwell = jc.value("dwell", 50);
    }

    sc.out_dir = j.contains("output") ? j.at("output").value("dir", "out/" + sc.name)
                                      : "out/" + sc.name;

    if (sc.kind == ScenarioKind::formation) {
      // Graph block.
      const auto& jg = j.at("graph");
      const int l = jg.at("leaders").get<int>();
      std::vector<std::vector<int>> follower_lists;
      for (const auto& jf : jg.at("followers")) {
        std::vector<int> nbrs;
        for (const auto& v : jf.at("neighbors")) nbrs.push_back(v.get<int>() - 1);
        follower_lists.push_back(std::move(nbrs));
      }
      sc.graph = build_acyclic_lf_graph(l, follower_lists);
      validate_acyclic(sc.graph);

      // Bearing block: target configuration (recommended) or explicit bearings.
      const auto& jb = j.at("bearings");
      std::vector<Vec<D>> leader_init;
      if (j.contains("initial") && j.at("initial").contains("leaders"))
        leader_init = detail::vec_list_from_json<D>(j.at("initial").at("leaders"),
                                                    "initial.leaders");

      if (jb.contains("target_config")) {
        const auto p_star =
            detail::vec_list_from_json<D>(jb.at("target_config"), "bearings.target_config");
        sc.spec = spec_from_target_config(sc.graph, p_star);
        if (leader_init.empty())
          leader_init.assign(p_star.begin(), p_star.begin() + sc.graph.l);
      } else if (jb.contains("desired")) {
        if (leader_init.empty())
          throw Error(Fault::ParseError,
                      "explicit desired bearings need initial.leaders for the cascade");
        const auto desired = detail::vec_list_from_json<D>(jb.at("desired"), "bearings.desired");
        sc.spec = spec_from_bearings(sc.graph, desired, leader_init);
      } else {
        throw Error(Fault::ParseError,
                    "bearings block needs 'target_config' or 'desired'");
      }

      if (static_cast<int>(leader_init.size()) != sc.graph.l)
        throw Error(Fault::ParseError, "initial.leaders must list one position per leader");

      // Initial follower positions: absolute list, offsets from target, or at target.
      const std::vector<Vec<D>> targets_at_t0 = cascade_targets(sc.spec, leader_init);
      sc.initial_positions = targets_at_t0;
      for (int v = 0; v < sc.graph.l; ++v)
        sc.initial_positions[static_cast<size_t>(v)] = leader_init[static_cast<size_t>(v)];

      if (j.contains("initial") && j.at("initial").contains("followers")) {
        const auto& jf = j.at("initial").at("followers");
        if (jf.is_array()) {
          const auto fpos = detail::vec_list_from_json<D>(jf, "initial.followers");
          if (static_cast<int>(fpos.size()) != sc.graph.followers())
            throw Error(Fault::ParseError, "initial.followers must list one position per follower");
          for (int f = 0; f < sc.graph.followers(); ++f)
            sc.initial_positions[static_cast<size_t>(sc.graph.l + f)] = fpos[static_cast<size_t>(f)];
        } else if (jf.is_object() && jf.contains("offsets")) {
          const auto offs = detail::vec_list_from_json<D>(jf.at("offsets"),
                                                          "initial.followers.offsets");
          if (static_cast<int>(offs.size()) != sc.graph.followers())
            throw Error(Fault::ParseError, "initial.followers.offsets must list one offset per follower");
          const double scale = jf.value("scale", 1.0);
          for (int f = 0; f < sc.graph.followers(); ++f)
            sc.initial_positions[static_cast<size_t>(sc.graph.l + f)] += scale * offs[static_cast<size_t>(f)];
        } else {
          throw Error(Fault::ParseError,
                      "initial.followers must be a position list or an {offsets, scale} object");
        }
      }

      // Estimator initial states.
      if (sc.uses_estimators()) {
        const int nf = sc.graph.followers();
        sc.initial_estimates.assign(static_cast<size_t>(nf), Vec<D>::zero());
        bool resolved = false;
        if (j.contains("initial") && j.at("initial").contains("estimates")) {
          const auto& je = j.at("initial").at("estimates");
          if (je.contains("values")) {
            const auto vals = detail::vec_list_from_json<D>(je.at("values"),
                                                            "initial.estimates.values");
            if (static_cast<int>(vals.size()) != nf)
              throw Error(Fault::ParseError, "initial.estimates.values must list one point per follower");
            sc.initial_estimates = vals;
            resolved = true;
          } else if (je.contains("offsets")) {
            const auto offs = detail::vec_list_from_json<D>(je.at("offsets"),
                                                            "initial.estimates.offsets");
            if (static_cast<int>(offs.size()) != nf)
              throw Error(Fault::ParseError, "initial.estimates.offsets must list one offset per follower");
            const double scale = je.value("scale", 1.0);
            for (int f = 0; f < nf; ++f)
              sc.initial_estimates[static_cast<size_t>(f)] =
                  targets_at_t0[static_cast<size_t>(sc.graph.l + f)] + scale * offs[static_cast<size_t>(f)];
            resolved = true;
          } else if (je.contains("box")) {
            const auto lo = detail::vec_from_json<D>(je.at("box").at("min"), "estimates.box.min");
            const auto hi = detail::vec_from_json<D>(je.at("box").at("max"), "estimates.box.max");
            for (int c = 0; c < D; ++c)
              if (!(lo[c] < hi[c]))
                throw Error(Fault::ParseError, "estimates.box must have min < max per component");
            sc.estimate_seed = je.at("box").value("seed", 0);
            sc.estimates_seeded = true;
            std::mt19937_64 rng(sc.estimate_seed);
            for (int f = 0; f < nf; ++f)
              for (int c = 0; c < D; ++c)
                sc.initial_estimates[static_cast<size_t>(f)][c] =
                    lo[c] + detail::uniform01(rng) * (hi[c] - lo[c]);
            resolved = true;
          } else if (je.contains("offset_box")) {
            // seeded random draw around each follower's own target point;
            // scales with the formation where an absolute box would not
            const auto& jb2 = je.at("offset_box");
            const auto lo = detail::vec_from_json<D>(jb2.at("min"), "estimates.offset_box.min");
            const auto hi = detail::vec_from_json<D>(jb2.at("max"), "estimates.offset_box.max");
            for (int c = 0; c < D; ++c)
              if (!(lo[c] < hi[c]))
                throw Error(Fault::ParseError,
                            "estimates.offset_box must have min < max per component");
            sc.estimate_seed = jb2.value("seed", 0);
            sc.estimates_seeded = true;
            std::mt19937_64 rng(sc.estimate_seed);
            for (int f = 0; f < nf; ++f) {
              Vec<D> off{};
              for (int c = 0; c < D; ++c)
                off[c] = lo[c] + detail::uniform01(rng) * (hi[c] - lo[c]);
              sc.initial_estimates[static_cast<size_t>(f)] =
                  targets_at_t0[static_cast<size_t>(sc.graph.l + f)] + off;
            }
            resolved = true;
          }
        }
        if (!resolved)
          for (int f = 0; f < nf; ++f)
            sc.initial_estimates[static_cast<size_t>(f)] =
                sc.initial_positions[static_cast<size_t>(sc.graph.l + f)];
      }

      // Leader profile.
      if (!j.contains("profile"))
        throw Error(Fault::ParseError, "formation scenario needs a 'profile' array");
      for (const auto& js : j.at("profile")) {
        ProfileSegment<D> seg;
        seg.t_end = js.at("until").get<double>();
        if (js.contains("velocity"))
          seg.translational = detail::velocity_from_json<D>(js.at("velocity"), "profile.velocity");
        seg.scale_gain = js.value("scale_gain", 0.0);
        sc.profile.segments.push_back(seg);
      }
    } else {
      // Target tracking.
      sc.agent_positions = detail::vec_list_from_json<D>(j.at("agents"), "agents");
      const auto& jt = j.at("virtual_target");
      sc.target_start = detail::vec_from_json<D>(jt.at("start"), "virtual_target.start");
      sc.target_velocity = detail::velocity_from_json<D>(jt.at("velocity"),
                                                         "virtual_target.velocity");
    }
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Fault::ParseError, e.what());
  }

  // ---- Semantic validation (collects all violations) ----

  if (!(sc.alpha > 0.0 && sc.alpha < 1.0))
    flag(Fault::ValidationError,
         "alpha must lie in (0,1), got " + std::to_string(sc.alpha));
  if (!(sc.beta > 0.0))
    flag(Fault::ValidationError, "beta must be positive, got " + std::to_string(sc.beta));

  if (!(sc.integrator.h > 0.0))
    flag(Fault::ValidationError, "integrator step must be positive");
  if (!(sc.integrator.duration >= sc.integrator.h))
    flag(Fault::ValidationError, "duration must be at least one step");
  if (sc.integrator.h > 0.0) {
    const double ratio = sc.integrator.duration / sc.integrator.h;
    if (std::fabs(ratio - std::lround(ratio)) > 1e-6)
      flag(Fault::ValidationError,
           "duration must be an integer multiple of the step (duration/h = " +
               std::to_string(ratio) + ")");
    else if (sc.integrator.stride < 1 || sc.integrator.steps() % sc.integrator.stride != 0)
      flag(Fault::ValidationError,
           "sampling stride must divide the step count " +
               std::to_string(sc.integrator.steps()));
  }
  if (sc.integrator.sw.mode == SwitchMode::boundary_layer &&
      !(sc.integrator.sw.layer_eps > 0.0))
    flag(Fault::ValidationError, "boundary layer width must be positive");
  if (!(sc.convergence.threshold > 0.0) || sc.convergence.dwell < 1)
    flag(Fault::ValidationError, "convergence needs threshold > 0 and dwell >= 1");

  if (sc.kind == ScenarioKind::formation) {
    std::vector<Vec<D>> leaders(sc.initial_positions.begin(),
                                sc.initial_positions.begin() + sc.graph.l);
    if (!detail::all_finite(sc.initial_positions))
      flag(Fault::ValidationError, "initial positions must be finite");
    if (!detail::leaders_non_collinear(leaders))
      flag(Fault::ValidationError,
           "leaders must not be in collinear positions");

    if (sc.profile.segments.empty()) {
      flag(Fault::ValidationError, "leader profile must have at least one segment");
    } else {
      double prev = 0.0;
      bool ordered = true;
      for (const auto& seg : sc.profile.segments) {
        if (!(seg.t_end > prev)) {
          flag(Fault::ValidationError,
               "profile segment end times must be strictly increasing");
          ordered = false;
          break;
        }
        prev = seg.t_end;
      }
      if (ordered) {
        if (sc.profile.horizon() + 1e-9 < sc.integrator.duration)
          flag(Fault::ProfileExhausted,
               "duration " + std::to_string(sc.integrator.duration) +
                   " exceeds the profile horizon " + std::to_string(sc.profile.horizon()));
        const double sup = max_leader_speed(sc.profile, leaders);
        if (!(sc.beta > sup))
          flag(Fault::ValidationError,
               "beta must strictly exceed the peak leader speed (beta = " + std::to_string(sc.beta) +
                   ", sup = " + std::to_string(sup) + ")");
      }
    }

    if (sc.law == LawType::estimator_tracking_obstacle) {
      if constexpr (D != 2) {
        flag(Fault::ValidationError, "the obstacle law is defined for dimension 2 only");
      }
      flag(Fault::ValidationError,
           "the obstacle law runs in target_tracking scenarios, not formation scenarios");
    }

    if (sc.uses_estimators()) {
      const int nf = sc.graph.followers();
      if (!detail::all_finite(sc.initial_estimates))
        flag(Fault::ValidationError, "initial estimates must be finite");

      // Resolve gamma: "auto", scalar, or per-follower array; enforce the
      // sign-gain floor per follower.
      std::vector<double> bounds(static_cast<size_t>(nf));
      for (int f = 0; f < nf; ++f) bounds[static_cast<size_t>(f)] = gamma_required(sc.spec, f, sc.beta);
      const auto& jlaw = j.at("law");
      if (!jlaw.contains("gamma") || (jlaw.at("gamma").is_string() &&
                                      jlaw.at("gamma").get<std::string>() == "auto")) {
        sc.gamma = bounds;
      } else if (jlaw.at("gamma").is_number()) {
        sc.gamma.assign(static_cast<size_t>(nf), jlaw.at("gamma").get<double>());
      } else if (jlaw.at("gamma").is_array()) {
        if (static_cast<int>(jlaw.at("gamma").size()) != nf) {
          flag(Fault::ValidationError, "gamma array must list one gain per follower");
        } else {
          sc.gamma.clear();
          for (const auto& v : jlaw.at("gamma")) sc.gamma.push_back(v.get<double>());
        }
      } else {
        flag(Fault::ValidationError, "gamma must be 'auto', a number, or an array");
      }
      if (static_cast<int>(sc.gamma.size()) == nf) {
        for (int f = 0; f < nf; ++f) {
          if (sc.gamma[static_cast<size_t>(f)] + 1e-12 < bounds[static_cast<size_t>(f)])
            flag(Fault::ValidationError,
                 "gamma for follower " + std::to_string(sc.graph.l + f + 1) + " is " +
                     std::to_string(sc.gamma[static_cast<size_t>(f)]) +
                     ", below the required " + std::to_string(bounds[static_cast<size_t>(f)]) +
                     " (operator-norm form would ask " +
                     std::to_string(gamma_operator_norm_form(sc.spec, f, sc.beta)) + ")");
        }
      }
      if (sc.law == LawType::fixed_time_estimator && !(sc.rho > 1.0))
        flag(Fault::ValidationError,
             "fixed-time estimator needs rho > 1, got " + std::to_string(sc.rho));
    }
  } else {
    if (sc.agent_positions.empty())
      flag(Fault::ValidationError, "target_tracking scenario needs at least one agent");
    if (!detail::all_finite(sc.agent_positions))
      flag(Fault::ValidationError, "agent positions must be finite");
    if (sc.law != LawType::estimator_tracking && sc.law != LawType::estimator_tracking_obstacle)
      flag(Fault::ValidationError,
           "target_tracking supports the tracking laws only, got " +
               std::string(law_name(sc.law)));
    if (sc.law == LawType::estimator_tracking_obstacle) {
      if constexpr (D != 2)
        flag(Fault::ValidationError, "the obstacle law is defined for dimension 2 only");
      if (!sc.obstacle)
        flag(Fault::ValidationError, "obstacle law selected but no obstacle block given");
    }
    if (sc.obstacle) {
      if (!(sc.obstacle->d > 0.0 && sc.obstacle->d < sc.obstacle->d_max))
        flag(Fault::ValidationError,
             "obstacle needs 0 < activation_radius < sensing_range");
      if (!(sc.obstacle->k > 1.0))
        flag(Fault::ValidationError, "obstacle gain must exceed 1");
    }

    // Tracking margin: the pursuer's sign-term gain must exceed the target's
    // top speed, or the agent cannot catch up.
    double sup = 0.0;
    const int samples = 8192;
    for (int s = 0; s <= samples; ++s) {
      const double t = sc.integrator.duration * (static_cast<double>(s) / samples);
      sup = std::max(sup, sc.target_velocity.eval(t, 0.0).norm());
    }
    if (!(sc.beta > sup))
      flag(Fault::ValidationError,
           "beta must strictly exceed the target's peak speed (beta = " + std::to_string(sc.beta) +
               ", sup = " + std::to_string(sup) + ")");
  }

  if (!violations.empty()) throw ValidationFailure(std::move(violations));
  return sc;
}

template <int D>
inline Scenario<D> load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Fault::IoError, "cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Fault::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json<D>(j);
}

inline nlohmann::json read_scenario_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Fault::IoError, "cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Fault::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return j;
}

}  // namespace bfm
