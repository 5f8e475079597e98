#pragma once

#include "privgame/gaussian_model.hpp"

namespace privgame {

struct CostBreakdown {
  double receiver_mse = 0.0;        // E||x - x_hat||^2
  double malicious_mse = 0.0;       // E||w - w_hat||^2
  double sender_cost = 0.0;         // receiver_mse - delta * malicious_mse
  double baseline_receiver = 0.0;   // trace(V_xx - V_xz V_zz^-1 V_zx)
  double baseline_malicious = 0.0;  // trace(V_ww - V_wz V_zz^-1 V_zw)
};

/// Quadratic-form representation of the sender's cost for normalized messages.
///
/// With T = [I 0 -V_xz V_zz^-1; 0 I -V_wz V_zz^-1] (which maps the stacked
/// cross-covariance [V_xy; V_wy; V_zy] to the cross-covariance of (x, w) and y
/// conditioned on z):
///   Z    = T^T diag(-I, delta I) T
///   Q    = T^T Xi^-1 T
///   Q_pp = Xi
struct CostOperator {
  Matrix Z;
  Matrix Q;
  Matrix Q_pp;
  Matrix T;
  double delta = 0.0;
};

CostOperator cost_operator(const GaussianModel& model, PrivacyRatio delta);

double baseline_receiver_mse(const GaussianModel& model);
double baseline_malicious_mse(const GaussianModel& model);

/// Exact least-mean-square errors of the receiver and the eavesdropper given
/// the message moments. Throws DegenerateMessageError if cov(y, z) is singular.
CostBreakdown costs_from_moments(const GaussianModel& model, const MessageMoments& moments,
                                 PrivacyRatio delta);

enum class EstimationTarget { State, Private };

/// E||target - (gain_y y + gain_z z)||^2 for an arbitrary linear estimator.
double linear_estimator_mse(const GaussianModel& model, const MessageMoments& moments,
                            EstimationTarget target, const EstimatorPolicy& estimator);

inline constexpr double kNormalizationTolerance = 1e-9;

/// Residual norm of V_yy - V_yz V_zz^-1 V_zy - I.
double normalization_residual(const GaussianModel& model, const MessageMoments& moments);

/// Sender cost through the quadratic form:
///   baseline_receiver - delta * baseline_malicious + trace(s^T Z s),
/// s = [V_xy; V_wy; V_zy]. Only valid for normalized moments; anything else
/// is a ContractViolation (rescale the message with scale_equilibrium first).
double sender_cost_quadratic(const CostOperator& op, const MessageMoments& moments,
                             PrivacyRatio delta, const GaussianModel& model);

struct Feasibility {
  bool feasible = false;
  /// Smallest eigenvalue of I - s^T Q s. Negative means infeasible.
  double margin = 0.0;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

/// Evaluates s^T Q s <= I in its reduced form C^T Xi^-1 C with C = T s.
Feasibility feasibility_check(const CostOperator& op, const MessageMoments& moments,
                              const ConditionalCovariance& conditional);

}  // namespace privgame
