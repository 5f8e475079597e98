#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

#include "privgame/errors.hpp"
#include "privgame/experiments.hpp"

namespace privgame {

namespace {

const Eigen::IOFormat kRowFormat(Eigen::FullPrecision, 0, ", ", "; ", "", "", "[", "]");

std::string show(const Matrix& m) {
  if (m.size() == 0) return "[]";
  std::ostringstream os;
  os << m.format(kRowFormat);
  return os.str();
}

void print_solution(std::ostream& out, const EquilibriumSolution& s) {
  out << std::setprecision(12);
  out << "delta            " << s.delta << '\n'
      << "K_x              " << show(s.sender.K_x) << '\n'
      << "K_w              " << show(s.sender.K_w) << '\n'
      << "K_z              " << show(s.sender.K_z) << '\n'
      << "V_vv             " << show(s.sender.V_vv) << '\n'
      << "receiver gain_y  " << show(s.receiver.gain_y) << '\n'
      << "receiver gain_z  " << show(s.receiver.gain_z) << '\n'
      << "malicious gain_y " << show(s.malicious.gain_y) << '\n'
      << "malicious gain_z " << show(s.malicious.gain_z) << '\n'
      << "receiver_mse     " << s.receiver_mse << '\n'
      << "malicious_mse    " << s.malicious_mse << '\n'
      << "sender_cost      " << s.sender_cost << '\n'
      << "eigenvalues      [";
  for (std::size_t i = 0; i < s.diagnostics.eigenvalues.size(); ++i) {
    out << (i ? ", " : "") << s.diagnostics.eigenvalues[i];
  }
  out << "]\nactive_rank      " << s.diagnostics.active_rank << '\n';
}

template <typename Record>
void emit_csv(const std::string& path, std::ostream& out, std::span<const Record> records,
              void (*writer)(std::ostream&, std::span<const Record>)) {
  if (path.empty()) {
    writer(out, records);
    return;
  }
  std::ofstream file(path);
  if (!file) throw ScenarioIoError("cannot write " + path);
  writer(file, records);
  if (!file) throw ScenarioIoError("write failed for " + path);
  out << "wrote " << records.size() << " records to " << path << '\n';
}

SweepRecord record_of(const GaussianModel& model, const EquilibriumSolution& s) {
  SweepRecord r;
  r.delta = s.delta;
  r.v_xw = model.V_xw()(0, 0);
  r.receiver_mse_closed = s.receiver_mse;
  r.malicious_mse_closed = s.malicious_mse;
  r.sender_cost = s.sender_cost;
  r.active_rank = s.diagnostics.active_rank;
  return r;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria of the Gaussian privacy game", "privgame_cli"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, policy_path, grid_text, delta_grid_text, vxw_grid_text;
  std::optional<double> delta_override;
  std::size_t samples = 1'000'000, chunk = 1 << 16;
  std::uint64_t seed = 0;
  int trials = 1000, restarts = 50;
  bool simulate = false, parallel = false;

  auto* validate = app.add_subcommand("validate", "check a scenario's covariance");
  validate->add_option("scenario", scenario_path)->required();

  auto* solve = app.add_subcommand("solve", "compute the informative equilibrium");
  solve->add_option("scenario", scenario_path)->required();
  solve->add_option("--delta", delta_override, "privacy ratio (overrides the file)");
  solve->add_option("--out", out_path, "CSV output path");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo check of the equilibrium costs");
  sim->add_option("scenario", scenario_path)->required();
  sim->add_option("--delta", delta_override);
  sim->add_option("--samples", samples)->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed);
  sim->add_option("--chunk", chunk)->check(CLI::PositiveNumber);
  sim->add_flag("--parallel", parallel, "accumulate chunks on several threads");
  sim->add_option("--out", out_path);

  auto* verify = app.add_subcommand("verify", "deviation, separation and oracle checks");
  verify->add_option("scenario", scenario_path)->required();
  verify->add_option("--delta", delta_override);
  verify->add_option("--trials", trials)->check(CLI::NonNegativeNumber);
  verify->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed);
  verify->add_option("--policy", policy_path, "verify this sender policy instead of solving");

  auto* sweep = app.add_subcommand("sweep-delta", "privacy-ratio sweep");
  sweep->add_option("scenario", scenario_path)->required();
  sweep->add_option("--grid", grid_text, "a:b:step or comma list");
  sweep->add_flag("--simulate", simulate);
  sweep->add_option("--samples", samples)->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed);
  sweep->add_option("--out", out_path);

  auto* grid = app.add_subcommand("sweep-grid", "privacy ratio x V_xw grid");
  grid->add_option("scenario", scenario_path)->required();
  grid->add_option("--delta-grid", delta_grid_text)->required();
  grid->add_option("--vxw-grid", vxw_grid_text)->required();
  grid->add_option("--out", out_path);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kIo;
  }

  try {
    if (validate->parsed()) {
      const Scenario s = read_scenario_file(scenario_path);
      const ValidationReport report = validate_model(s.model);
      if (report.ok()) {
        out << "ok\n";
        return exit_code::kOk;
      }
      for (const auto& v : report.violations) out << "violation: " << v << '\n';
      return exit_code::kValidation;
    }

    const Scenario scenario = load_scenario(scenario_path);
    const GaussianModel& model = scenario.model;
    const PrivacyRatio delta(delta_override.value_or(scenario.delta));

    if (solve->parsed()) {
      const EquilibriumSolution s = solve_scenario(model, delta);
      print_solution(out, s);
      if (!out_path.empty()) {
        const std::vector<SweepRecord> rows{record_of(model, s)};
        emit_csv<SweepRecord>(out_path, out, rows, &write_sweep_csv);
      }
      return exit_code::kOk;
    }

    if (sim->parsed()) {
      const EquilibriumSolution s = solve_scenario(model, delta);
      const SimulationConfig config{samples, seed, chunk};
      const MonteCarloResult mc =
          monte_carlo_costs(model, s.sender, s.receiver, s.malicious, delta, config,
                            parallel ? ExecutionMode::Parallel : ExecutionMode::Sequential);
      out << std::setprecision(10) << "samples        " << mc.samples << '\n'
          << "receiver_mse   closed " << s.receiver_mse << "  mc " << mc.empirical.receiver_mse
          << " +- " << mc.receiver_se << '\n'
          << "malicious_mse  closed " << s.malicious_mse << "  mc " << mc.empirical.malicious_mse
          << " +- " << mc.malicious_se << '\n';
      if (!out_path.empty()) {
        SweepRecord r = record_of(model, s);
        r.receiver_mse_mc = mc.empirical.receiver_mse;
        r.malicious_mse_mc = mc.empirical.malicious_mse;
        const std::vector<SweepRecord> rows{r};
        emit_csv<SweepRecord>(out_path, out, rows, &write_sweep_csv);
      }
      return exit_code::kOk;
    }

    if (verify->parsed()) {
      bool ok = true;
      EquilibriumSolution s;
      if (!policy_path.empty()) {
        s = evaluate_policy(model, load_policy(policy_path, model.dims()), delta);
      } else {
        s = solve_scenario(model, delta);
      }
      const DeviationReport sender = check_sender_deviation(model, s, delta, trials, seed);
      out << std::setprecision(6) << "sender deviation     trials " << sender.trials
          << "  best improvement " << sender.best_improvement << "  "
          << (sender.passed ? "PASS" : "FAIL") << '\n';
      ok = ok && sender.passed;

      const auto est = check_estimator_optimality(model, message_moments(model, s.sender),
                                                  s.receiver, s.malicious, 200, seed);
      out << "estimator optimality residual " << std::max(est.receiver.orthogonality_residual,
                                                          est.malicious.orthogonality_residual)
          << "  " << (est.passed() ? "PASS" : "FAIL") << '\n';
      ok = ok && est.passed();

      const bool separated = check_coalition_separation(model, s, delta, CoalitionWeight(1.0));
      out << "coalition separation " << (separated ? "PASS" : "FAIL") << '\n';
      ok = ok && separated;

      if (policy_path.empty()) {
        const OracleResult oracle = oracle_solve(model, delta, restarts, seed);
        const Matrix xi = conditional_covariance(model).xi;
        const double solver = sender_trace_objective(ConditionalCovariance{xi}, model.dims().n_x,
                                                     delta, s.sender.xw_gain());
        const bool beaten = oracle.objective < solver - kOracleTolerance;
        out << std::setprecision(12) << "oracle objective     " << oracle.objective
            << "  solver " << solver << "  " << (beaten ? "FAIL (oracle better)" : "PASS")
            << '\n';
        ok = ok && !beaten;
      }
      out << "affine deviations only; a pass is falsification evidence, not proof\n";
      return ok ? exit_code::kOk : exit_code::kVerification;
    }

    if (sweep->parsed()) {
      const std::vector<double> g = grid_text.empty() ? default_delta_grid() : parse_grid(grid_text);
      const SimulationConfig config{samples, seed, chunk};
      const auto records = run_delta_sweep(scenario, g, simulate, config);
      emit_csv<SweepRecord>(out_path, out, records, &write_sweep_csv);
      return exit_code::kOk;
    }

    if (grid->parsed()) {
      const auto deltas = parse_grid(delta_grid_text);
      const auto vxw = parse_grid(vxw_grid_text);
      const auto records = run_correlation_grid(scenario, deltas, vxw, SimulationConfig{});
      emit_csv<GridRecord>(out_path, out, records, &write_grid_csv);
      return exit_code::kOk;
    }
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations()) err << "violation: " << v << '\n';
    return exit_code::kValidation;
  } catch (const StructuralError& e) {
    err << "violation: " << e.what() << '\n';
    return exit_code::kValidation;
  } catch (const ScenarioIoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kIo;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kIo;
  } catch (const DegenerateMessageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kVerification;
  }
  return exit_code::kIo;
}

}  // namespace privgame
