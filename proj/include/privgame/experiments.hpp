#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "privgame/scenario_io.hpp"
#include "privgame/verification.hpp"

namespace privgame {

/// One point of a privacy-ratio sweep.
struct SweepRecord {
  double delta = 0.0;
  double v_xw = 0.0;
  double receiver_mse_closed = 0.0;
  double malicious_mse_closed = 0.0;
  std::optional<double> receiver_mse_mc;
  std::optional<double> malicious_mse_mc;
  double sender_cost = 0.0;
  int active_rank = 0;

  bool operator==(const SweepRecord&) const = default;
};

/// One point of the (delta, V_xw) grid. Infeasible points carry no cost.
struct GridRecord {
  double delta = 0.0;
  double v_xw = 0.0;
  std::optional<double> receiver_mse_closed;
  bool feasible = false;

  bool operator==(const GridRecord&) const = default;
};

/// Solves at one privacy ratio: solve_scalar for n_y == 1, otherwise solve_general.
EquilibriumSolution solve_scenario(const GaussianModel& model, PrivacyRatio delta);

/// Grid must be nonempty, nonnegative and ascending. Point i simulates with
/// seed config.seed + i.
std::vector<SweepRecord> run_delta_sweep(const Scenario& scenario,
                                         std::span<const double> delta_grid, bool simulate,
                                         const SimulationConfig& config);

/// Every entry of V_xw is set to the grid value; points whose joint covariance
/// is not positive definite are reported with feasible = false.
std::vector<GridRecord> run_correlation_grid(const Scenario& scenario_template,
                                             std::span<const double> delta_grid,
                                             std::span<const double> v_xw_grid,
                                             const SimulationConfig& config);

/// "a:b:step" (inclusive of b) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

/// 0 to 10 in steps of 0.1, then 20, 50, 100.
std::vector<double> default_delta_grid();

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);
void write_grid_csv(std::ostream& out, std::span<const GridRecord> records);
std::vector<GridRecord> read_grid_csv(std::istream& in);

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kVerification = 2;
inline constexpr int kIo = 3;
}  // namespace exit_code

/// Command-line entry point; args exclude the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace privgame
