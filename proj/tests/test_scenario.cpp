#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bfm/bfm.hpp"
#include "test_support.hpp"

using nlohmann::json;

namespace {

std::string shipped(const char* file) {
  return std::string(BFM_SCENARIO_DIR) + "/" + file;
}

// Smallest valid formation config the loader accepts; tests mutate one field
// at a time from here.
json base_formation() {
  return json::parse(R"({
    "name": "fixture",
    "kind": "formation",
    "dimension": 2,
    "graph": {
      "leaders": 3,
      "followers": [
        {"neighbors": [1, 2, 3]},
        {"neighbors": [1, 2, 4]}
      ]
    },
    "bearings": {
      "target_config": [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [1.0, 1.0], [2.0, 2.0]]
    },
    "law": {"type": "bearing_only", "alpha": 0.5, "beta": 2.0},
    "profile": [{"until": 1.0, "velocity": {"base": [0.0, 0.0]}}],
    "integrator": {"step": 0.001, "duration": 1.0, "stride": 1},
    "convergence": {"threshold": 0.001, "dwell": 10}
  })");
}

json base_tracking() {
  return json::parse(R"({
    "name": "chase",
    "kind": "target_tracking",
    "dimension": 2,
    "agents": [[1.0, 0.0], [0.0, 1.0]],
    "virtual_target": {
      "start": [0.0, 0.0],
      "velocity": {"base": [0.1, 0.0]}
    },
    "law": {"type": "estimator_tracking", "alpha": 0.5, "beta": 1.0},
    "integrator": {"step": 0.001, "duration": 1.0, "stride": 1},
    "convergence": {"threshold": 0.001, "dwell": 10}
  })");
}

std::vector<bfm::Violation> expect_rejected(const json& j) {
  try {
    (void)bfm::scenario_from_json<2>(j);
  } catch (const bfm::ValidationFailure& f) {
    return f.violations();
  }
  FAIL("scenario should have been rejected");
  return {};
}

bool mentions(const std::vector<bfm::Violation>& vs, const std::string& needle) {
  for (const auto& v : vs)
    if (v.message.find(needle) != std::string::npos) return true;
  return false;
}

bool has_fault(const std::vector<bfm::Violation>& vs, bfm::Fault f) {
  for (const auto& v : vs)
    if (v.fault == f) return true;
  return false;
}

}  // namespace

TEST_CASE("the twelve-agent reference scenario loads and resolves") {
  const auto sc = bfm::load_scenario<2>(shipped("sim1.json"));

  CHECK(sc.kind == bfm::ScenarioKind::formation);
  CHECK(sc.graph.n == 12);
  CHECK(sc.graph.l == 4);
  CHECK(sc.graph.followers() == 8);
  CHECK(sc.graph.m() == 24);
  CHECK(sc.law == bfm::LawType::bearing_only);
  CHECK(sc.alpha == 0.5);
  CHECK(sc.beta == 2.0);
  CHECK(sc.profile.segments.size() == 5);
  CHECK(sc.profile.horizon() == 35.0);
  CHECK(sc.integrator.steps() == 35000);

  // Leaders start at the reference shape, followers at shape + offset.
  CHECK(sc.initial_positions[0][0] == 0.0);
  CHECK(sc.initial_positions[3][0] == -9.0);
  CHECK(sc.initial_positions[4][0] == Catch::Approx(-9.0 + 0.20));
  CHECK(sc.initial_positions[4][1] == Catch::Approx(9.0 - 0.10));

  // First follower edge: vertex 5 toward vertex 1, a pure diagonal.
  REQUIRE(sc.spec.desired.size() == 24);
  CHECK(sc.spec.desired[0][0] == Catch::Approx(std::sqrt(0.5)));
  CHECK(sc.spec.desired[0][1] == Catch::Approx(-std::sqrt(0.5)));
}

TEST_CASE("all shipped scenario files validate") {
  const char* files[] = {"sim1.json", "sim2.json", "obstacle.json",
                         "fixedtime.json", "minimal.json"};
  for (const char* f : files) {
    INFO(f);
    const auto j = bfm::read_scenario_json(shipped(f));
    REQUIRE(bfm::scenario_dimension(j) == 2);
    CHECK_NOTHROW(bfm::scenario_from_json<2>(j));
  }
}

TEST_CASE("scenario dimension is checked before anything else") {
  auto j = base_formation();
  CHECK(bfm::scenario_dimension(j) == 2);
  CHECK_THROWS_AS(bfm::scenario_from_json<3>(j), bfm::Error);

  j["dimension"] = 4;
  CHECK_THROWS_AS(bfm::scenario_dimension(j), bfm::Error);
  j.erase("dimension");
  CHECK_THROWS_AS(bfm::scenario_dimension(j), bfm::Error);
}

TEST_CASE("malformed JSON files are reported as parse failures") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "bfm_bad_scenario.json";
  {
    std::ofstream out(path);
    out << "{ \"name\": \"broken\", ";
  }
  try {
    (void)bfm::load_scenario<2>(path.string());
    FAIL("expected a parse error");
  } catch (const bfm::Error& e) {
    CHECK(e.fault() == bfm::Fault::ParseError);
  }
  fs::remove(path);

  try {
    (void)bfm::load_scenario<2>((fs::temp_directory_path() / "no_such_file.json").string());
    FAIL("expected an io error");
  } catch (const bfm::Error& e) {
    CHECK(e.fault() == bfm::Fault::IoError);
  }
}

TEST_CASE("structural graph problems surface from the loader") {
  auto j = base_formation();
  j["graph"]["leaders"] = 2;
  try {
    (void)bfm::scenario_from_json<2>(j);
    FAIL("two leaders must be rejected");
  } catch (const bfm::Error& e) {
    CHECK(e.fault() == bfm::Fault::TooFewLeaders);
  }

  j = base_formation();
  j["graph"]["followers"][0]["neighbors"] = {1, 2, 5};  // later vertex
  try {
    (void)bfm::scenario_from_json<2>(j);
    FAIL("forward reference must be rejected");
  } catch (const bfm::Error& e) {
    CHECK(e.fault() == bfm::Fault::ForwardReference);
  }
}

TEST_CASE("law parameter ranges are enforced") {
  auto j = base_formation();
  j["law"]["alpha"] = 1.0;
  CHECK(mentions(expect_rejected(j), "alpha"));

  j = base_formation();
  j["law"]["alpha"] = 0.0;
  CHECK(mentions(expect_rejected(j), "alpha"));

  j = base_formation();
  j["law"]["beta"] = -1.0;
  CHECK(mentions(expect_rejected(j), "beta"));

  j = base_formation();
  j["law"]["type"] = "gradient_descent";
  CHECK_THROWS_AS(bfm::scenario_from_json<2>(j), bfm::Error);
}

TEST_CASE("sign gain must dominate the leader motion") {
  auto j = base_formation();
  j["profile"][0]["velocity"]["base"] = {3.0, 0.0};
  const auto vs = expect_rejected(j);
  CHECK(mentions(vs, "peak leader speed"));
}

TEST_CASE("integrator settings are cross-checked") {
  auto j = base_formation();
  j["integrator"]["duration"] = 1.0005;
  CHECK(mentions(expect_rejected(j), "integer multiple"));

  j = base_formation();
  j["integrator"]["stride"] = 7;  // does not divide 1000 steps
  CHECK(mentions(expect_rejected(j), "stride"));

  j = base_formation();
  j["integrator"]["step"] = -0.001;
  CHECK(mentions(expect_rejected(j), "step"));

  j = base_formation();
  j.erase("integrator");
  CHECK_THROWS_AS(bfm::scenario_from_json<2>(j), bfm::Error);

  j = base_formation();
  j["convergence"]["threshold"] = -1.0;
  CHECK(mentions(expect_rejected(j), "convergence"));

  j = base_formation();
  j["convergence"]["dwell"] = 0;
  CHECK(mentions(expect_rejected(j), "convergence"));
}

TEST_CASE("profile problems are collected with context") {
  auto j = base_formation();
  j["profile"] = json::array({json{{"until", 1.0}}, json{{"until", 0.5}}});
  CHECK(mentions(expect_rejected(j), "strictly increasing"));

  j = base_formation();
  j["profile"][0]["until"] = 0.5;  // horizon below the 1s duration
  CHECK(has_fault(expect_rejected(j), bfm::Fault::ProfileExhausted));

  j = base_formation();
  j["profile"] = json::array();
  CHECK(mentions(expect_rejected(j), "at least one segment"));
}

TEST_CASE("collinear leader placements are rejected") {
  auto j = base_formation();
  j["bearings"]["target_config"] =
      json::array({json{0.0, 0.0}, json{1.0, 0.0}, json{2.0, 0.0},
                   json{1.0, 1.0}, json{2.0, 2.0}});
  CHECK(mentions(expect_rejected(j), "collinear"));
}

TEST_CASE("boundary layer switching parses and validates") {
  auto j = base_formation();
  j["law"]["switch"] = json{{"mode", "boundary_layer"}, {"eps", 0.001}};
  auto sc = bfm::scenario_from_json<2>(j);
  CHECK(sc.integrator.sw.mode == bfm::SwitchMode::boundary_layer);
  CHECK(sc.integrator.sw.layer_eps == 0.001);

  j["law"]["switch"]["eps"] = -1.0;
  CHECK(mentions(expect_rejected(j), "boundary layer"));

  j["law"]["switch"] = json{{"mode", "bang_bang"}};
  CHECK_THROWS_AS(bfm::scenario_from_json<2>(j), bfm::Error);
}

TEST_CASE("explicit desired bearings need leader anchors") {
  auto j = base_formation();
  const auto sc_ref = bfm::scenario_from_json<2>(base_formation());
  json desired = json::array();
  for (const auto& g : sc_ref.spec.desired) desired.push_back({g[0], g[1]});
  j["bearings"] = json{{"desired", desired}};

  // Without initial.leaders there is no anchor for the cascade.
  CHECK_THROWS_AS(bfm::scenario_from_json<2>(j), bfm::Error);

  j["initial"] = json{{"leaders", json::array({json{0.0, 0.0}, json{2.0, 0.0}, json{0.0, 2.0}})}};
  const auto sc = bfm::scenario_from_json<2>(j);
  REQUIRE(sc.spec.desired.size() == sc_ref.spec.desired.size());
  for (size_t k = 0; k < sc.spec.desired.size(); ++k)
    CHECK((sc.spec.desired[k] - sc_ref.spec.desired[k]).norm() < 1e-12);
  // Followers spawn at the cascade targets.
  CHECK((sc.initial_positions[3] - sc_ref.initial_positions[3]).norm() < 1e-12);
}

TEST_CASE("initial follower placements accept absolute and offset forms") {
  auto j = base_formation();
  j["initial"] = json{{"followers", json::array({json{5.0, 5.0}, json{6.0, 6.0}})}};
  auto sc = bfm::scenario_from_json<2>(j);
  CHECK(sc.initial_positions[3][0] == 5.0);
  CHECK(sc.initial_positions[4][1] == 6.0);

  j["initial"]["followers"] = json{{"offsets", json::array({json{0.1, 0.0}, json{0.0, -0.1}})},
                                   {"scale", 2.0}};
  sc = bfm::scenario_from_json<2>(j);
  CHECK(sc.initial_positions[3][0] == Catch::Approx(1.0 + 0.2));
  CHECK(sc.initial_positions[4][1] == Catch::Approx(2.0 - 0.2));

  j["initial"]["followers"] = json::array({json{5.0, 5.0}});  // one short
  CHECK_THROWS_AS(bfm::scenario_from_json<2>(j), bfm::Error);
}

TEST_CASE("gamma resolves from auto, scalar, and per-follower forms") {
  auto j = base_formation();
  j["law"]["type"] = "estimator_tracking";
  j["law"]["gamma"] = "auto";
  auto sc = bfm::scenario_from_json<2>(j);
  REQUIRE(sc.gamma.size() == 2);
  for (int f = 0; f < 2; ++f)
    CHECK(sc.gamma[static_cast<size_t>(f)] ==
          Catch::Approx(bfm::gamma_required(sc.spec, f, sc.beta)));

  j["law"]["gamma"] = 10.0;
  sc = bfm::scenario_from_json<2>(j);
  CHECK(sc.gamma == std::vector<double>{10.0, 10.0});

  j["law"]["gamma"] = {11.0, 12.0};
  sc = bfm::scenario_from_json<2>(j);
  CHECK(sc.gamma == std::vector<double>{11.0, 12.0});

  j["law"]["gamma"] = {11.0};
  CHECK(mentions(expect_rejected(j), "one gain per follower"));

  j["law"]["gamma"] = true;
  CHECK(mentions(expect_rejected(j), "gamma"));
}

TEST_CASE("a sign gain below the per-follower floor is refused") {
  auto j = base_formation();
  j["law"]["type"] = "estimator_tracking";
  j["law"]["gamma"] = "auto";
  const auto sc = bfm::scenario_from_json<2>(j);
  const double floor0 = sc.gamma[0];

  j["law"]["gamma"] = 0.5 * floor0;
  const auto vs = expect_rejected(j);
  CHECK(mentions(vs, "below the required"));
  // The alternative, looser reading of the gain bound is surfaced alongside.
  CHECK(mentions(vs, "operator-norm"));
}

TEST_CASE("the fixed-time law needs a superlinear exponent") {
  auto j = base_formation();
  j["law"]["type"] = "fixed_time_estimator";
  j["law"]["gamma"] = "auto";
  j["law"]["rho"] = 1.0;
  CHECK(mentions(expect_rejected(j), "rho > 1"));

  j["law"]["rho"] = 2.0;
  const auto sc = bfm::scenario_from_json<2>(j);
  CHECK(sc.rho == 2.0);
  CHECK(sc.uses_estimators());
}

TEST_CASE("seeded estimate boxes are reproducible") {
  auto j = base_formation();
  j["law"]["type"] = "estimator_tracking";
  j["law"]["gamma"] = "auto";
  j["initial"] = json{{"estimates", json{{"box", json{{"min", json{-1.0, -1.0}},
                                                      {"max", json{1.0, 1.0}},
                                                      {"seed", 3}}}}}};
  const auto a = bfm::scenario_from_json<2>(j);
  const auto b = bfm::scenario_from_json<2>(j);
  REQUIRE(a.initial_estimates.size() == 2);
  CHECK(a.estimates_seeded);
  CHECK(a.estimate_seed == 3);
  for (size_t f = 0; f < 2; ++f)
    for (int c = 0; c < 2; ++c) {
      CHECK(a.initial_estimates[f][c] == b.initial_estimates[f][c]);
      CHECK(a.initial_estimates[f][c] >= -1.0);
      CHECK(a.initial_estimates[f][c] < 1.0);
    }

  j["initial"]["estimates"]["box"]["seed"] = 4;
  const auto c = bfm::scenario_from_json<2>(j);
  bool any_differs = false;
  for (size_t f = 0; f < 2; ++f)
    if ((a.initial_estimates[f] - c.initial_estimates[f]).norm() > 0.0) any_differs = true;
  CHECK(any_differs);

  j["initial"]["estimates"]["box"]["min"] = {2.0, 2.0};  // min >= max
  CHECK_THROWS_AS(bfm::scenario_from_json<2>(j), bfm::Error);
}

TEST_CASE("offset boxes draw around each follower's own target") {
  auto j = base_formation();
  j["law"]["type"] = "estimator_tracking";
  j["law"]["gamma"] = "auto";
  j["initial"] = json{{"estimates", json{{"offset_box", json{{"min", json{-0.5, -0.5}},
                                                             {"max", json{0.5, 0.5}},
                                                             {"seed", 7}}}}}};
  const auto a = bfm::scenario_from_json<2>(j);
  const auto b = bfm::scenario_from_json<2>(j);
  REQUIRE(a.initial_estimates.size() == 2);

  // Targets of the two followers in the base fixture.
  const bfm::Vec<2> t0{1.0, 1.0}, t1{2.0, 2.0};
  CHECK((a.initial_estimates[0] - t0).norm() <= std::sqrt(0.5));
  CHECK((a.initial_estimates[1] - t1).norm() <= std::sqrt(0.5));
  for (size_t f = 0; f < 2; ++f)
    CHECK((a.initial_estimates[f] - b.initial_estimates[f]).norm() == 0.0);

  // Each follower gets its own draw, not a shared one.
  const auto d0 = a.initial_estimates[0] - t0;
  const auto d1 = a.initial_estimates[1] - t1;
  CHECK((d0 - d1).norm() > 1e-6);
}

TEST_CASE("estimates default to the initial positions when unspecified") {
  auto j = base_formation();
  j["law"]["type"] = "estimator_tracking";
  j["law"]["gamma"] = "auto";
  j["initial"] = json{{"followers", json{{"offsets",
                                          json::array({json{0.3, 0.0}, json{0.0, 0.3}})}}}};
  const auto sc = bfm::scenario_from_json<2>(j);
  REQUIRE(sc.initial_estimates.size() == 2);
  for (int f = 0; f < 2; ++f)
    CHECK((sc.initial_estimates[static_cast<size_t>(f)] -
           sc.initial_positions[static_cast<size_t>(3 + f)])
              .norm() == 0.0);
}

TEST_CASE("the obstacle law only runs in tracking scenarios") {
  auto j = base_formation();
  j["law"]["type"] = "estimator_tracking_obstacle";
  j["law"]["gamma"] = "auto";
  j["obstacle"] = json{{"position", json{0.0, 0.0}}, {"activation_radius", 0.5}, {"gain", 5.0}};
  CHECK(mentions(expect_rejected(j), "target_tracking"));
}

TEST_CASE("tracking scenarios reject formation-only laws and slow gains") {
  auto j = base_tracking();
  j["law"]["type"] = "bearing_only";
  CHECK(mentions(expect_rejected(j), "tracking laws only"));

  j = base_tracking();
  j["law"]["beta"] = 0.05;  // below the 0.1 target speed
  CHECK(mentions(expect_rejected(j), "target's peak speed"));

  j = base_tracking();
  j["agents"] = json::array();
  CHECK(mentions(expect_rejected(j), "at least one agent"));
}

TEST_CASE("obstacle settings are range-checked") {
  auto j = base_tracking();
  j["law"]["type"] = "estimator_tracking_obstacle";
  j["obstacle"] = json{{"position", json{0.5, 0.5}},
                       {"activation_radius", 0.5},
                       {"sensing_range", 1.0},
                       {"gain", 5.0}};
  const auto sc = bfm::scenario_from_json<2>(j);
  REQUIRE(sc.obstacle.has_value());
  CHECK(sc.obstacle->d == 0.5);
  CHECK(sc.obstacle->d_max == 1.0);
  CHECK(sc.obstacle->k == 5.0);

  j["obstacle"]["gain"] = 0.5;
  CHECK(mentions(expect_rejected(j), "gain must exceed 1"));

  j["obstacle"]["gain"] = 5.0;
  j["obstacle"]["sensing_range"] = 0.25;  // inside the activation radius
  CHECK(mentions(expect_rejected(j), "activation_radius < sensing_range"));

  j = base_tracking();
  j["law"]["type"] = "estimator_tracking_obstacle";  // no obstacle block at all
  CHECK(mentions(expect_rejected(j), "no obstacle block"));

  // The sensing range defaults to twice the activation radius.
  j["obstacle"] = json{{"position", json{0.5, 0.5}}, {"activation_radius", 0.4}, {"gain", 2.0}};
  const auto sc2 = bfm::scenario_from_json<2>(j);
  CHECK(sc2.obstacle->d_max == Catch::Approx(0.8));
}

TEST_CASE("the planar obstacle law cannot be requested in three dimensions") {
  auto j = json::parse(R"({
    "name": "chase3",
    "kind": "target_tracking",
    "dimension": 3,
    "agents": [[1.0, 0.0, 0.0]],
    "virtual_target": {"start": [0.0, 0.0, 0.0], "velocity": {"base": [0.1, 0.0, 0.0]}},
    "law": {"type": "estimator_tracking_obstacle", "alpha": 0.5, "beta": 1.0},
    "integrator": {"step": 0.001, "duration": 1.0, "stride": 1}
  })");
  try {
    (void)bfm::scenario_from_json<3>(j);
    FAIL("3d obstacle law should be rejected");
  } catch (const bfm::ValidationFailure& f) {
    CHECK(mentions(f.violations(), "dimension 2 only"));
  }
}

TEST_CASE("every violation is reported at once, not just the first") {
  auto j = base_formation();
  j["law"]["alpha"] = 2.0;
  j["law"]["beta"] = -1.0;
  j["integrator"]["duration"] = 1.0005;
  j["convergence"]["dwell"] = 0;
  const auto vs = expect_rejected(j);
  CHECK(vs.size() >= 4);
  CHECK(mentions(vs, "alpha"));
  CHECK(mentions(vs, "beta"));
  CHECK(mentions(vs, "integer multiple"));
  CHECK(mentions(vs, "convergence"));
}

TEST_CASE("three-dimensional formation scenarios load") {
  auto j = json::parse(R"({
    "name": "tetra",
    "kind": "formation",
    "dimension": 3,
    "graph": {"leaders": 3, "followers": [{"neighbors": [1, 2, 3]}]},
    "bearings": {"target_config": [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0],
                                   [0.0, 2.0, 0.0], [0.7, 0.7, 1.5]]},
    "law": {"type": "bearing_only", "alpha": 0.5, "beta": 1.0},
    "profile": [{"until": 1.0, "velocity": {"base": [0.0, 0.0, 0.0]}}],
    "integrator": {"step": 0.001, "duration": 1.0, "stride": 1}
  })");
  const auto sc = bfm::scenario_from_json<3>(j);
  CHECK(sc.graph.n == 4);
  CHECK(sc.spec.desired.size() == 3);
  CHECK(sc.initial_positions[3][2] == Catch::Approx(1.5));
}
