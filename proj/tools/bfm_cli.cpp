// Command-line front end: validate scenarios, run simulations, and inspect
// formation specs (settling-time bounds, rigidity diagnostics).
//
// Exit codes: 0 success, 1 invalid input, 2 run aborted mid-flight.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bfm/bfm.hpp"

namespace {

void print_error_json(const bfm::Error& e) {
  nlohmann::json j;
  j["fault"] = bfm::fault_name(e.fault());
  j["message"] = e.what();
  if (const auto* vf = dynamic_cast<const bfm::ValidationFailure*>(&e)) {
    j["violations"] = nlohmann::json::array();
    for (const auto& v : vf->violations())
      j["violations"].push_back({{"fault", bfm::fault_name(v.fault)}, {"message", v.message}});
  }
  std::cerr << j.dump(2) << "\n";
}

struct RunOptions {
  std::string scenario_path;
  std::string out_dir;
  double step = 0.0;
  std::string mode;
  int stride = 0;
};

template <int D>
void apply_overrides(bfm::Scenario<D>& sc, const RunOptions& opt) {
  if (opt.step > 0.0) {
    sc.integrator.h = opt.step;
    const double ratio = sc.integrator.duration / opt.step;
    if (std::abs(ratio - std::llround(ratio)) > 1e-6)
      throw bfm::Error(bfm::Fault::ValidationError,
                       "duration is not an integer multiple of the overridden step");
    if (sc.integrator.steps() % sc.integrator.stride != 0) sc.integrator.stride = 1;
  }
  if (opt.stride > 0) {
    if (sc.integrator.steps() % opt.stride != 0)
      throw bfm::Error(bfm::Fault::ValidationError, "stride must divide the step count");
    sc.integrator.stride = opt.stride;
  }
  if (!opt.mode.empty()) {
    if (opt.mode == "raw")
      sc.integrator.sw.mode = bfm::SwitchMode::raw_sign;
    else if (opt.mode == "layer")
      sc.integrator.sw.mode = bfm::SwitchMode::boundary_layer;
    else
      throw bfm::Error(bfm::Fault::ValidationError, "mode must be 'raw' or 'layer'");
  }
  if (!opt.out_dir.empty()) sc.out_dir = opt.out_dir;
  if (sc.out_dir.empty()) sc.out_dir = "out/" + sc.name;
}

template <int D>
int run_scenario(const nlohmann::json& doc, const RunOptions& opt) {
  auto sc = bfm::scenario_from_json<D>(doc);
  apply_overrides(sc, opt);

  std::vector<double> apriori;
  if (sc.kind == bfm::ScenarioKind::formation)
    apriori = bfm::theoretical_bounds(sc.spec, sc.initial_positions, sc.alpha);

  const auto trace = bfm::run(sc);
  auto files = bfm::export_trace(trace, sc.out_dir);

  const auto traj_path = (std::filesystem::path(sc.out_dir) / "trajectory.svg").string();
  const auto err_path = (std::filesystem::path(sc.out_dir) / "errors.svg").string();
  bfm::write_trajectory_svg(trace, traj_path);
  bfm::write_error_svg(trace, err_path);
  files.push_back(traj_path);
  files.push_back(err_path);

  auto report = bfm::compute_metrics(trace, apriori);
  const auto report_path = (std::filesystem::path(sc.out_dir) / "report.json").string();
  report.files = files;
  report.files.push_back(report_path);
  {
    std::ofstream out(report_path);
    out << bfm::report_to_json(report).dump(2) << "\n";
    if (!out) throw bfm::Error(bfm::Fault::IoError, "write failed for " + report_path);
  }
  files.push_back(report_path);

  std::printf("scenario   %s (%dD, %s, %s)\n", trace.meta.name.c_str(), D,
              trace.meta.law.c_str(), trace.meta.mode.c_str());
  std::printf("steps      %ld x h=%g (%d samples)\n", sc.integrator.steps(), sc.integrator.h,
              trace.samples());
  for (const auto& fr : report.followers) {
    std::printf("agent %-3d  crossed=%s converged=%s", fr.vertex,
                fr.crossing < 0 ? "never" : bfm::fmt_double(fr.crossing).c_str(),
                fr.converged_at < 0 ? "never" : bfm::fmt_double(fr.converged_at).c_str());
    if (fr.bound_checked)
      std::printf(" bound=%.4g %s", fr.bound_aposteriori, fr.bound_satisfied ? "ok" : "MISSED");
    std::printf("\n");
  }
  if (report.warning_count > 0) std::printf("warnings   %d\n", report.warning_count);
  for (const auto& f : files) std::printf("wrote      %s\n", f.c_str());

  if (trace.meta.aborted) {
    std::fprintf(stderr, "aborted at t=%g: %s (%s)\n", trace.meta.abort_time,
                 trace.meta.abort_message.c_str(), trace.meta.abort_fault.c_str());
    return 2;
  }
  return 0;
}

template <int D>
int print_bounds(const nlohmann::json& doc) {
  auto sc = bfm::scenario_from_json<D>(doc);
  if (sc.kind != bfm::ScenarioKind::formation)
    throw bfm::Error(bfm::Fault::ValidationError, "bounds requires a formation scenario");
  const auto bounds = bfm::theoretical_bounds(sc.spec, sc.initial_positions, sc.alpha);

  nlohmann::json j;
  j["scenario"] = sc.name;
  j["alpha"] = sc.alpha;
  j["followers"] = nlohmann::json::array();
  for (size_t f = 0; f < bounds.size(); ++f) {
    const int v = sc.graph.l + static_cast<int>(f) + 1;
    j["followers"].push_back({{"vertex", v},
                              {"settling_bound", bounds[f]},
                              {"max_desired_displacement", sc.spec.follower_max_zstar[f]}});
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

template <int D>
int print_rigidity(const nlohmann::json& doc) {
  auto sc = bfm::scenario_from_json<D>(doc);
  if (sc.kind != bfm::ScenarioKind::formation)
    throw bfm::Error(bfm::Fault::ValidationError, "rigidity requires a formation scenario");

  std::vector<bfm::Vec<D>> config;
  if (sc.spec.has_target()) {
    config = sc.spec.target_config;
  } else {
    std::vector<bfm::Vec<D>> leaders(sc.initial_positions.begin(),
                                     sc.initial_positions.begin() + sc.graph.l);
    config = bfm::cascade_targets(sc.spec, leaders);
  }

  const int kdim = bfm::rigidity_kernel_dimension(sc.graph, config);
  nlohmann::json j;
  j["scenario"] = sc.name;
  j["dimension"] = D;
  j["agents"] = sc.graph.n;
  j["leaders"] = sc.graph.l;
  j["rigidity_kernel_dimension"] = kdim;
  j["infinitesimally_bearing_rigid"] = kdim == D + 1;
  j["follower_block_min_eigenvalue"] = bfm::follower_block_min_eigenvalue(sc.graph, config);
  j["followers"] = nlohmann::json::array();
  for (int f = 0; f < sc.graph.followers(); ++f) {
    j["followers"].push_back(
        {{"vertex", sc.graph.l + f + 1},
         {"lambda1", sc.spec.follower_lambda1[static_cast<size_t>(f)]},
         {"gamma_floor", bfm::gamma_required(sc.spec, f, sc.beta)},
         {"gamma_operator_norm_floor", bfm::gamma_operator_norm_form(sc.spec, f, sc.beta)}});
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int dispatch(const std::string& cmd, const std::string& path, const RunOptions& opt) {
  const auto doc = bfm::read_scenario_json(path);
  const int dim = bfm::scenario_dimension(doc);

  if (cmd == "validate") {
    // Full parse + semantic validation; reaching this point means both passed.
    if (dim == 2)
      bfm::scenario_from_json<2>(doc);
    else
      bfm::scenario_from_json<3>(doc);
    std::printf("valid\n");
    return 0;
  }
  if (cmd == "run") return dim == 2 ? run_scenario<2>(doc, opt) : run_scenario<3>(doc, opt);
  if (cmd == "bounds") return dim == 2 ? print_bounds<2>(doc) : print_bounds<3>(doc);
  return dim == 2 ? print_rigidity<2>(doc) : print_rigidity<3>(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bearing-based formation maneuvering toolkit"};
  app.require_subcommand(1);

  RunOptions opt;

  auto* run_cmd = app.add_subcommand("run", "integrate a scenario and write its trace");
  run_cmd->add_option("scenario", opt.scenario_path, "scenario JSON file")->required();
  run_cmd->add_option("--out", opt.out_dir, "output directory (overrides the scenario)");
  run_cmd->add_option("--step", opt.step, "integration step override");
  run_cmd->add_option("--mode", opt.mode, "switching mode: raw | layer");
  run_cmd->add_option("--stride", opt.stride, "sampling stride override");

  auto* validate_cmd = app.add_subcommand("validate", "check a scenario file and exit");
  validate_cmd->add_option("scenario", opt.scenario_path, "scenario JSON file")->required();

  auto* bounds_cmd = app.add_subcommand("bounds", "print per-follower settling-time bounds");
  bounds_cmd->add_option("scenario", opt.scenario_path, "scenario JSON file")->required();

  auto* rigidity_cmd =
      app.add_subcommand("rigidity", "print rigidity and estimator-gain diagnostics");
  rigidity_cmd->add_option("scenario", opt.scenario_path, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return dispatch(cmd, opt.scenario_path, opt);
  } catch (const bfm::Error& e) {
    print_error_json(e);
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json j;
    j["fault"] = "Unexpected";
    j["message"] = e.what();
    std::cerr << j.dump(2) << "\n";
    return 1;
  }
}
