#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "privgame/errors.hpp"
#include "support.hpp"

using namespace privgame;
using privgame::testing::scalar_example_model;

namespace {

const std::string kScenarioDir = PRIVGAME_SCENARIO_DIR;

Scenario scalar_example_scenario() { return {scalar_example_model(), 1.0}; }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("privgame_test_" + name);
}

}  // namespace

TEST_CASE("delta sweep on the two-by-two example") {
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(0.5 * i);
  const auto records = run_delta_sweep(scalar_example_scenario(), grid, false, {});
  REQUIRE(records.size() == grid.size());
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i].malicious_mse_closed >= records[i - 1].malicious_mse_closed - 1e-9);
    CHECK(records[i].receiver_mse_closed >= records[i - 1].receiver_mse_closed - 1e-9);
    CHECK_FALSE(records[i].receiver_mse_mc.has_value());
  }
  CHECK(records.front().receiver_mse_closed <= 1e-12);
  CHECK(std::abs(records.back().malicious_mse_closed - 1.0) < 1e-2);
  CHECK(records.back().v_xw == 0.8);
}

TEST_CASE("single-point sweep and simulated columns") {
  const std::vector<double> grid{0.0};
  const auto records = run_delta_sweep(scalar_example_scenario(), grid, true, {20'000, 3, 4096});
  REQUIRE(records.size() == 1);
  CHECK(records[0].receiver_mse_mc.has_value());
  CHECK(std::abs(*records[0].malicious_mse_mc - 0.36) < 0.05);
}

TEST_CASE("sweep contract checks") {
  const std::vector<double> unsorted{1.0, 0.5}, empty{};
  CHECK_THROWS_AS(run_delta_sweep(scalar_example_scenario(), unsorted, false, {}), ContractViolation);
  CHECK_THROWS_AS(run_delta_sweep(scalar_example_scenario(), empty, false, {}), ContractViolation);
  const Scenario bad{scalar_example_model(1.0), 1.0};
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(run_delta_sweep(bad, one, false, {}), ValidationError);
}

TEST_CASE("correlation grid: degradation, independence column, infeasible edge") {
  const std::vector<double> deltas{1.0};
  const std::vector<double> vxw{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const auto g = run_correlation_grid(scalar_example_scenario(), deltas, vxw, {});
  REQUIRE(g.size() == 6);
  CHECK(*g[0].receiver_mse_closed <= 1e-12);
  for (std::size_t i = 1; i < 5; ++i) {
    CHECK(*g[i].receiver_mse_closed >= *g[i - 1].receiver_mse_closed);
  }
  CHECK_FALSE(g[5].feasible);
  CHECK_FALSE(g[5].receiver_mse_closed.has_value());

  const std::vector<double> many{0.0, 0.5, 2.0, 30.0};
  const std::vector<double> zero{0.0};
  for (const auto& r : run_correlation_grid(scalar_example_scenario(), many, zero, {})) {
    CHECK(*r.receiver_mse_closed <= 1e-12);
  }
}

TEST_CASE("grid parsing") {
  const auto range = parse_grid("0:1:0.25");
  CHECK(range == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_grid("0:10:0.1").size() == 101);
  CHECK(parse_grid("0.5,1,2") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK_THROWS_AS(parse_grid("1:0:0.1"), ScenarioIoError);
  CHECK_THROWS_AS(parse_grid("a,b"), ScenarioIoError);
  const auto def = default_delta_grid();
  CHECK(def.size() == 104);
  CHECK(def.back() == 100.0);
}

TEST_CASE("property: CSV records survive a round trip bit for bit") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<SweepRecord> sweep;
  std::vector<GridRecord> grid;
  for (int i = 0; i < 200; ++i) {
    SweepRecord r{u(rng), u(rng), u(rng) * 1e-9, u(rng), std::nullopt, std::nullopt, u(rng), i % 5};
    if (i % 2) {
      r.receiver_mse_mc = u(rng) * 1e-300;
      r.malicious_mse_mc = u(rng);
    }
    sweep.push_back(r);
    GridRecord gr{u(rng), u(rng), std::nullopt, i % 3 != 0};
    if (gr.feasible) gr.receiver_mse_closed = u(rng) / 7.0;
    grid.push_back(gr);
  }
  std::stringstream ss;
  write_sweep_csv(ss, sweep);
  CHECK(read_sweep_csv(ss) == sweep);
  std::stringstream gs;
  write_grid_csv(gs, grid);
  CHECK(read_grid_csv(gs) == grid);

  std::stringstream bad("nope\n1,2\n");
  CHECK_THROWS_AS(read_sweep_csv(bad), ScenarioIoError);
}

TEST_CASE("sweep output is deterministic") {
  const auto grid = parse_grid("0:2:0.5");
  const SimulationConfig config{5000, 9, 1024};
  std::stringstream a, b;
  write_sweep_csv(a, run_delta_sweep(scalar_example_scenario(), grid, true, config));
  write_sweep_csv(b, run_delta_sweep(scalar_example_scenario(), grid, true, config));
  CHECK(a.str() == b.str());
}

TEST_CASE("scenario parsing") {
  const Scenario s = load_scenario(kScenarioDir + "/scalar_example.json");
  CHECK(s.model.dims().n_z == 0);
  CHECK(s.model.V_xw()(0, 0) == 0.8);
  CHECK(s.delta == 1.0);

  const Scenario side = load_scenario(kScenarioDir + "/side_info.json");
  const Scenario again = parse_scenario(scenario_to_json(side));
  CHECK(again.model.joint_covariance() == side.model.joint_covariance());
  CHECK(again.model.dims().n_y == 2);

  CHECK_THROWS_AS(load_scenario(kScenarioDir + "/scalar_example_singular.json"), ValidationError);
  CHECK_THROWS_AS(load_scenario(kScenarioDir + "/missing.json"), ScenarioIoError);
  using nlohmann::json;
  CHECK_THROWS_AS(parse_scenario(json::parse(R"({"dims": {"n_x": 1}})")), ScenarioIoError);
  CHECK_THROWS_AS(parse_scenario(json::parse(
                      R"({"dims": {"n_x":1,"n_w":1,"n_y":1}, "V_xx":[[1]], "V_ww":[[1]],
                          "V_xw":[[0.1]], "delta": -1})")),
                  ScenarioIoError);
  CHECK_THROWS_AS(parse_scenario(json::parse(
                      R"({"dims": {"n_x":2,"n_w":1,"n_y":1}, "V_xx":[[1,0],[0]], "V_ww":[[1]],
                          "V_xw":[[0.1],[0]], "delta": 1})")),
                  ScenarioIoError);
  CHECK_THROWS_AS(parse_scenario(json::parse(
                      R"({"dims": {"n_x":2,"n_w":1,"n_y":1}, "V_xx":[[1]], "V_ww":[[1]],
                          "V_xw":[[0.1]], "delta": 1})")),
                  StructuralError);
}

TEST_CASE("policy documents round trip") {
  const EquilibriumSolution s = solve_general(scalar_example_model(0.8, 2), PrivacyRatio(1.0));
  const SenderPolicy p = parse_policy(policy_to_json(s.sender), {1, 1, 0, 2});
  CHECK(p.xw_gain() == s.sender.xw_gain());
  CHECK(p.V_vv == s.sender.V_vv);
}

TEST_CASE("cli: solve, validate, verify exit codes") {
  const CliRun solved = cli({"solve", kScenarioDir + "/scalar_example.json", "--delta", "1"});
  CHECK(solved.code == 0);
  CHECK(solved.out.find("sender_cost      -0.6") != std::string::npos);

  const CliRun invalid = cli({"validate", kScenarioDir + "/scalar_example_singular.json"});
  CHECK(invalid.code == 1);
  CHECK(invalid.out.find("not positive definite") != std::string::npos);
  CHECK(cli({"validate", kScenarioDir + "/side_info.json"}).code == 0);
  CHECK(cli({"solve", kScenarioDir + "/scalar_example_singular.json"}).code == 1);

  CHECK(cli({"verify", kScenarioDir + "/scalar_example.json", "--trials", "300", "--restarts", "10"}).code == 0);
  CHECK(cli({"verify", kScenarioDir + "/side_info.json", "--trials", "300", "--restarts", "10"}).code == 0);
  const CliRun corrupted = cli({"verify", kScenarioDir + "/scalar_example.json", "--delta", "0", "--policy",
                                kScenarioDir + "/scalar_example_halved_policy.json"});
  CHECK(corrupted.code == 2);
  CHECK(corrupted.out.find("FAIL") != std::string::npos);
}

TEST_CASE("cli: usage and I/O errors") {
  CHECK(cli({"solve", kScenarioDir + "/scalar_example.json", "--bogus"}).code == 3);
  CHECK(cli({}).code == 3);
  CHECK(cli({"solve", "/nonexistent/scenario.json"}).code == 3);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli: sweeps write CSV") {
  const auto sweep_path = temp_path("sweep.csv");
  const CliRun s = cli({"sweep-delta", kScenarioDir + "/scalar_example.json", "--grid", "0:1:0.5", "--simulate",
                        "--samples", "2000", "--out", sweep_path.string()});
  CHECK(s.code == 0);
  std::ifstream sf(sweep_path);
  const auto records = read_sweep_csv(sf);
  CHECK(records.size() == 3);
  CHECK(records[0].receiver_mse_mc.has_value());

  const auto grid_path = temp_path("grid.csv");
  const CliRun g = cli({"sweep-grid", kScenarioDir + "/scalar_example.json", "--delta-grid", "0.5,1",
                        "--vxw-grid", "0:1:0.5", "--out", grid_path.string()});
  CHECK(g.code == 0);
  std::ifstream gf(grid_path);
  const auto grid = read_grid_csv(gf);
  REQUIRE(grid.size() == 6);
  CHECK_FALSE(grid[2].feasible);

  const CliRun sim = cli({"simulate", kScenarioDir + "/scalar_example.json", "--samples", "5000", "--seed", "4"});
  CHECK(sim.code == 0);
  CHECK(sim.out.find("malicious_mse") != std::string::npos);

  std::filesystem::remove(sweep_path);
  std::filesystem::remove(grid_path);
}
