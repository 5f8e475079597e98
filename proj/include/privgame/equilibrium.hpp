#pragma once

#include <vector>

#include "privgame/estimation.hpp"

namespace privgame {

struct SolverDiagnostics {
  /// Ascending eigenvalues of Xi^{1/2} diag(-I, delta I) Xi^{1/2}.
  std::vector<double> eigenvalues;
  /// Number of negative eigenvalues used by the sender (<= n_y).
  int active_rank = 0;
};

/// How the estimators react when the sender changes its policy.
enum class EstimatorResponse {
  LeastMeanSquare,  // recompute the least-mean-square gains for the new policy
  IgnoreMessage,    // keep using z alone (babbling)
};

struct EquilibriumSolution {
  SenderPolicy sender;
  EstimatorPolicy receiver;
  EstimatorPolicy malicious;
  double delta = 0.0;
  double receiver_mse = 0.0;
  double malicious_mse = 0.0;
  double sender_cost = 0.0;
  SolverDiagnostics diagnostics;
  EstimatorResponse response = EstimatorResponse::LeastMeanSquare;
};

struct EstimatorPair {
  EstimatorPolicy receiver;
  EstimatorPolicy malicious;
};

/// Xi^{1/2} diag(-I, delta I) Xi^{1/2}, symmetrized.
Matrix sender_objective_matrix(const ConditionalCovariance& conditional, Index n_x,
                               PrivacyRatio delta);

/// trace(K Xi D Xi K^T) for K = [K_x K_w].
double sender_trace_objective(const ConditionalCovariance& conditional, Index n_x,
                              PrivacyRatio delta, const Matrix& xw_gain);

/// Least-mean-square estimators of x and w from (y, z).
/// Throws DegenerateMessageError when cov(y, z) is singular; no pseudo-inverse fallback.
EstimatorPair lmmse_gains(const GaussianModel& model, const MessageMoments& moments);

/// Pair a sender policy with best-responding estimators and closed-form costs.
EquilibriumSolution evaluate_policy(const GaussianModel& model, const SenderPolicy& sender,
                                    PrivacyRatio delta);

/// Scalar-message equilibrium: K = (Xi^{-1/2} e)^T with e the unit eigenvector
/// of the smallest eigenvalue of the sender objective matrix. The policy is
/// deterministic (V_vv = 0). Requires n_y == 1.
EquilibriumSolution solve_scalar(const GaussianModel& model, PrivacyRatio delta);

/// Any n_y: rows of L = K Xi^{1/2} are the orthonormal eigenvectors of the
/// min(n_y, #negative) most negative eigenvalues, remaining rows zero, and
/// V_vv = I - K Xi K^T.
EquilibriumSolution solve_general(const GaussianModel& model, PrivacyRatio delta);

/// Uninformative equilibrium: y ~ N(0, I) independent of everything, both
/// estimators use z alone.
EquilibriumSolution babbling_equilibrium(const GaussianModel& model, PrivacyRatio delta);

inline constexpr double kMaxKappaCondition = 1e12;

/// Replace the message y by kappa * y. Gains are recomputed; the errors do
/// not change. Throws ContractViolation for singular or ill-conditioned kappa.
EquilibriumSolution scale_equilibrium(const GaussianModel& model,
                                      const EquilibriumSolution& solution, const Matrix& kappa);

}  // namespace privgame
