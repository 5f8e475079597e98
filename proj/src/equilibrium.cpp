#include "privgame/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "privgame/errors.hpp"

namespace privgame {

namespace {

SenderPolicy split_gain(const Dimensions& d, const Matrix& xw_gain, Matrix V_vv) {
  SenderPolicy p;
  p.K_x = xw_gain.leftCols(d.n_x);
  p.K_w = xw_gain.rightCols(d.n_w);
  p.K_z = Matrix::Zero(xw_gain.rows(), d.n_z);
  p.V_vv = std::move(V_vv);
  return p;
}

std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

EquilibriumSolution assemble(const GaussianModel& model, SenderPolicy sender, PrivacyRatio delta,
                             SolverDiagnostics diagnostics) {
  const MessageMoments moments = message_moments(model, sender);
  EstimatorPair gains = lmmse_gains(model, moments);
  const CostBreakdown costs = costs_from_moments(model, moments, delta);
  EquilibriumSolution s;
  s.sender = std::move(sender);
  s.receiver = std::move(gains.receiver);
  s.malicious = std::move(gains.malicious);
  s.delta = delta.value();
  s.receiver_mse = costs.receiver_mse;
  s.malicious_mse = costs.malicious_mse;
  s.sender_cost = costs.sender_cost;
  s.diagnostics = std::move(diagnostics);
  return s;
}

}  // namespace

Matrix sender_objective_matrix(const ConditionalCovariance& conditional, Index n_x,
                               PrivacyRatio delta) {
  const Matrix root = linalg::sqrtm_psd(conditional.xi);
  const Index n_w = conditional.xi.rows() - n_x;
  return linalg::symmetrize(root * delta.weight_matrix(n_x, n_w) * root);
}

double sender_trace_objective(const ConditionalCovariance& conditional, Index n_x,
                              PrivacyRatio delta, const Matrix& xw_gain) {
  const Index n_w = conditional.xi.rows() - n_x;
  const Matrix kxi = xw_gain * conditional.xi;
  return (kxi * delta.weight_matrix(n_x, n_w) * kxi.transpose()).trace();
}

EstimatorPair lmmse_gains(const GaussianModel& model, const MessageMoments& moments) {
  const auto& d = model.dims();
  const Index ny = moments.V_yy.rows();
  Matrix uu(ny + d.n_z, ny + d.n_z);
  uu << moments.V_yy, moments.V_zy.transpose(), moments.V_zy, model.V_zz();
  Matrix rhs(ny + d.n_z, d.n_x + d.n_w);
  // [V_ux V_uw] with u = (y, z)
  rhs.leftCols(d.n_x) << moments.V_xy.transpose(), model.V_xz().transpose();
  rhs.rightCols(d.n_w) << moments.V_wy.transpose(), model.V_wz().transpose();

  Matrix solved;
  if (!linalg::spd_solve(uu, rhs, solved)) {
    throw DegenerateMessageError(
        "lmmse_gains: covariance of (y, z) is singular; regularize the message or use the "
        "babbling estimators");
  }
  const Matrix gx = solved.leftCols(d.n_x).transpose();
  const Matrix gw = solved.rightCols(d.n_w).transpose();
  EstimatorPair pair;
  pair.receiver = {gx.leftCols(ny), gx.rightCols(d.n_z)};
  pair.malicious = {gw.leftCols(ny), gw.rightCols(d.n_z)};
  return pair;
}

EquilibriumSolution evaluate_policy(const GaussianModel& model, const SenderPolicy& sender,
                                    PrivacyRatio delta) {
  const ConditionalCovariance cond = conditional_covariance(model);
  const Matrix m = sender_objective_matrix(cond, model.dims().n_x, delta);
  SolverDiagnostics diag;
  diag.eigenvalues =
      to_vector(Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues());
  diag.active_rank = static_cast<int>(Eigen::FullPivLU<Matrix>(sender.xw_gain()).rank());
  return assemble(model, sender, delta, std::move(diag));
}

EquilibriumSolution solve_scalar(const GaussianModel& model, PrivacyRatio delta) {
  const auto& d = model.dims();
  if (d.n_y != 1) {
    std::ostringstream os;
    os << "solve_scalar: needs a scalar message (n_y = 1, got " << d.n_y
       << "); use solve_general";
    throw ContractViolation(os.str());
  }
  const ConditionalCovariance cond = conditional_covariance(model);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sender_objective_matrix(cond, d.n_x, delta));
  if (!(es.eigenvalues()(0) < 0.0)) {
    throw std::logic_error("solve_scalar: smallest eigenvalue is not negative");
  }
  Matrix direction = es.eigenvectors().col(0);
  linalg::orient_columns(direction);
  direction.normalize();
  const Matrix gain = (linalg::inv_sqrtm_pd(cond.xi) * direction).transpose();

  SolverDiagnostics diag{to_vector(es.eigenvalues()), 1};
  return assemble(model, split_gain(d, gain, Matrix::Zero(1, 1)), delta, std::move(diag));
}

EquilibriumSolution solve_general(const GaussianModel& model, PrivacyRatio delta) {
  const auto& d = model.dims();
  const ConditionalCovariance cond = conditional_covariance(model);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sender_objective_matrix(cond, d.n_x, delta));
  const Vector& lambda = es.eigenvalues();  // ascending

  // Eigenvalues that are zero in exact arithmetic (delta = 0) must not count.
  const double cutoff = -1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  Index negative = 0;
  while (negative < lambda.size() && lambda(negative) < cutoff) ++negative;
  const Index active = std::min<Index>(d.n_y, negative);

  Matrix directions = es.eigenvectors().leftCols(active);
  linalg::orient_columns(directions);
  Matrix l = Matrix::Zero(d.n_y, d.xw());
  l.topRows(active) = directions.transpose();

  const Matrix gain = l * linalg::inv_sqrtm_pd(cond.xi);
  // Exactly I - L L^T in exact arithmetic; clipping removes rounding-level negatives.
  const Matrix V_vv = linalg::clip_to_psd(Matrix::Identity(d.n_y, d.n_y) -
                                          gain * cond.xi * gain.transpose());
  SolverDiagnostics diag{to_vector(lambda), static_cast<int>(active)};
  return assemble(model, split_gain(d, gain, V_vv), delta, std::move(diag));
}

EquilibriumSolution babbling_equilibrium(const GaussianModel& model, PrivacyRatio delta) {
  require_valid(model);
  const auto& d = model.dims();
  EquilibriumSolution s;
  s.sender.K_x = Matrix::Zero(d.n_y, d.n_x);
  s.sender.K_w = Matrix::Zero(d.n_y, d.n_w);
  s.sender.K_z = Matrix::Zero(d.n_y, d.n_z);
  s.sender.V_vv = Matrix::Identity(d.n_y, d.n_y);
  s.receiver.gain_y = Matrix::Zero(d.n_x, d.n_y);
  s.malicious.gain_y = Matrix::Zero(d.n_w, d.n_y);
  if (d.n_z > 0) {
    const auto llt = model.V_zz().llt();
    s.receiver.gain_z = llt.solve(model.V_xz().transpose()).transpose();
    s.malicious.gain_z = llt.solve(model.V_wz().transpose()).transpose();
  } else {
    s.receiver.gain_z = Matrix::Zero(d.n_x, 0);
    s.malicious.gain_z = Matrix::Zero(d.n_w, 0);
  }
  s.delta = delta.value();
  s.receiver_mse = baseline_receiver_mse(model);
  s.malicious_mse = baseline_malicious_mse(model);
  s.sender_cost = s.receiver_mse - delta.value() * s.malicious_mse;
  const ConditionalCovariance cond = conditional_covariance(model);
  s.diagnostics.eigenvalues = to_vector(
      Eigen::SelfAdjointEigenSolver<Matrix>(sender_objective_matrix(cond, d.n_x, delta),
                                            Eigen::EigenvaluesOnly)
          .eigenvalues());
  s.diagnostics.active_rank = 0;
  s.response = EstimatorResponse::IgnoreMessage;
  return s;
}

EquilibriumSolution scale_equilibrium(const GaussianModel& model,
                                      const EquilibriumSolution& solution, const Matrix& kappa) {
  const Index ny = solution.sender.message_dim();
  if (kappa.rows() != ny || kappa.cols() != ny) {
    throw ContractViolation("scale_equilibrium: kappa must be n_y x n_y");
  }
  const double cond = kappa.allFinite() ? linalg::condition_number(kappa)
                                        : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxKappaCondition)) {
    std::ostringstream os;
    os << "scale_equilibrium: kappa is singular or ill-conditioned (condition number " << cond
       << ")";
    throw ContractViolation(os.str());
  }
  SenderPolicy sender;
  sender.K_x = kappa * solution.sender.K_x;
  sender.K_w = kappa * solution.sender.K_w;
  sender.K_z = kappa * solution.sender.K_z;
  sender.V_vv = linalg::symmetrize(kappa * solution.sender.V_vv * kappa.transpose());
  EquilibriumSolution scaled =
      assemble(model, std::move(sender), PrivacyRatio(solution.delta), solution.diagnostics);
  scaled.response = solution.response;
  return scaled;
}

}  // namespace privgame
