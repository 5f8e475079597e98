#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "privgame/equilibrium.hpp"

namespace privgame {

struct SimulationConfig {
  std::size_t sample_count = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t chunk_size = 1 << 16;
};

enum class ExecutionMode { Sequential, Parallel };

/// One chunk of game realizations; column j of every matrix is sample j.
struct SampleChunk {
  std::size_t first_index = 0;
  Matrix x, w, z, y;

  Index size() const noexcept { return x.cols(); }
};

/// Streams realizations of (x, w, z, y) chunk by chunk.
///
/// (x, w, z) is drawn as L g with L the Cholesky factor of the joint
/// covariance and g standard normal; v = V_vv^{1/2} h. Chunk k is drawn from
/// its own engine seeded with (seed, k), so any chunk can be regenerated
/// independently of the others.
class GameSampler {
 public:
  GameSampler(const GaussianModel& model, SenderPolicy policy, SimulationConfig config);

  std::size_t chunk_count() const noexcept;
  SampleChunk chunk(std::size_t k) const;

  /// Visit every chunk in order.
  void for_each(const std::function<void(const SampleChunk&)>& visit) const;

 private:
  Dimensions dims_;
  SenderPolicy policy_;
  SimulationConfig config_;
  Matrix joint_factor_;
  Matrix noise_factor_;
};

struct MonteCarloResult {
  CostBreakdown empirical;
  double receiver_se = 0.0;
  double malicious_se = 0.0;
  std::size_t samples = 0;
};

/// Empirical mean-square errors of the given estimators with standard errors
/// of the mean. Samples are never stored; accumulation is compensated.
/// Chunk partial sums are always combined in chunk order, so parallel mode is
/// expected to match sequential mode, but only statistical agreement is
/// promised; sequential mode is the reproducibility reference.
MonteCarloResult monte_carlo_costs(const GaussianModel& model, const SenderPolicy& sender,
                                   const EstimatorPolicy& receiver,
                                   const EstimatorPolicy& malicious, PrivacyRatio delta,
                                   const SimulationConfig& config,
                                   ExecutionMode mode = ExecutionMode::Sequential);

enum class Player { Sender, Receiver, Malicious };

std::string to_string(Player player);

/// Result of a sampling-based search for a profitable unilateral deviation.
/// Only affine deviations are tried, so a pass is evidence, not proof.
struct DeviationReport {
  Player tested_player = Player::Sender;
  int trials = 0;
  double reference_cost = 0.0;
  /// Smallest (deviation cost - reference cost); negative means a deviation helped.
  double best_improvement = 0.0;
  /// Largest entry of the estimation error / observation cross-covariance
  /// (estimators only).
  double orthogonality_residual = 0.0;
  bool passed = false;
};

inline constexpr double kDeviationTolerance = 1e-8;
inline constexpr double kOrthogonalityTolerance = 1e-9;

/// Tries `trials` alternative affine sender policies against best-responding
/// estimators. The reference is the solution's sender policy evaluated the
/// same way.
DeviationReport check_sender_deviation(const GaussianModel& model,
                                       const EquilibriumSolution& solution, PrivacyRatio delta,
                                       int trials, std::uint64_t seed);

struct EstimatorOptimalityReport {
  DeviationReport receiver;
  DeviationReport malicious;

  bool passed() const noexcept { return receiver.passed && malicious.passed; }
};

/// Orthogonality-principle residuals plus random perturbations of each gain.
EstimatorOptimalityReport check_estimator_optimality(const GaussianModel& model,
                                                     const MessageMoments& moments,
                                                     const EstimatorPolicy& receiver,
                                                     const EstimatorPolicy& malicious,
                                                     int trials = 200, std::uint64_t seed = 0);

/// Weight on the eavesdropper's error when one entity sets both estimators.
class CoalitionWeight {
 public:
  explicit CoalitionWeight(double vartheta);

  double value() const noexcept { return vartheta_; }

 private:
  double vartheta_;
};

inline constexpr double kSeparationTolerance = 1e-9;

/// Minimizes receiver_mse + vartheta * malicious_mse jointly over both linear
/// gain sets (dense normal equations of the stacked problem) and checks the
/// result equals the solution's individual gains.
bool check_coalition_separation(const GaussianModel& model, const EquilibriumSolution& solution,
                                PrivacyRatio delta, CoalitionWeight weight);

struct OracleResult {
  Matrix xw_gain;  // best K = [K_x K_w] found, feasible
  double objective = 0.0;  // trace(K Xi D Xi K^T)
  double sender_cost = 0.0;
  int evaluations = 0;
};

/// Random-restart Nelder-Mead over K on {K Xi K^T <= I}. Infeasible points
/// are pulled onto the boundary by dividing K by the square root of the
/// largest eigenvalue of K Xi K^T.
OracleResult oracle_solve(const GaussianModel& model, PrivacyRatio delta, int restarts,
                          std::uint64_t seed);

inline constexpr double kOracleTolerance = 1e-6;

struct GeneralSolveCheck {
  EquilibriumSolution solution;
  OracleResult oracle;
  double solver_objective = 0.0;
  /// False when the oracle found a feasible K better by more than kOracleTolerance.
  bool equilibrium = false;
};

/// solve_general() gated by oracle_solve().
GeneralSolveCheck solve_general_checked(const GaussianModel& model, PrivacyRatio delta,
                                        int restarts, std::uint64_t seed);

}  // namespace privgame
