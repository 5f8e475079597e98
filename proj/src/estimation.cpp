#include "privgame/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "privgame/errors.hpp"

namespace privgame {

PrivacyRatio::PrivacyRatio(double delta) : delta_(delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ContractViolation("privacy ratio must be a finite nonnegative number");
  }
}

Matrix PrivacyRatio::weight_matrix(Index n_x, Index n_w) const {
  Vector d(n_x + n_w);
  d.head(n_x).setConstant(-1.0);
  d.tail(n_w).setConstant(delta_);
  return d.asDiagonal();
}

Matrix SenderPolicy::xw_gain() const {
  Matrix k(K_x.rows(), K_x.cols() + K_w.cols());
  k << K_x, K_w;
  return k;
}

Matrix SenderPolicy::full_gain() const {
  Matrix k(K_x.rows(), K_x.cols() + K_w.cols() + K_z.cols());
  k << K_x, K_w, K_z;
  return k;
}

Vector EstimatorPolicy::estimate(const Vector& y, const Vector& z) const {
  Vector e = gain_y * y;
  if (z.size() > 0) e += gain_z * z;
  return e;
}

namespace {

// T = [I 0 -V_xz V_zz^-1; 0 I -V_wz V_zz^-1]
Matrix conditioning_map(const GaussianModel& model) {
  const auto& d = model.dims();
  Matrix t = Matrix::Zero(d.xw(), d.joint());
  t.leftCols(d.xw()).setIdentity();
  if (d.n_z > 0) {
    const Matrix c = model.xw_z_covariance();
    t.rightCols(d.n_z) = -model.V_zz().llt().solve(c.transpose()).transpose();
  }
  return t;
}

double clamp_nonnegative(double v) { return std::max(v, 0.0); }

}  // namespace

CostOperator cost_operator(const GaussianModel& model, PrivacyRatio delta) {
  const auto& d = model.dims();
  const ConditionalCovariance cond = conditional_covariance(model);
  CostOperator op;
  op.T = conditioning_map(model);
  op.delta = delta.value();
  op.Z = linalg::symmetrize(op.T.transpose() * delta.weight_matrix(d.n_x, d.n_w) * op.T);
  op.Q = linalg::symmetrize(op.T.transpose() * cond.xi.llt().solve(op.T));
  op.Q_pp = cond.xi;
  return op;
}

double baseline_receiver_mse(const GaussianModel& model) {
  double b = model.V_xx().trace();
  if (model.dims().n_z > 0) {
    b -= (model.V_xz() * model.V_zz().llt().solve(model.V_xz().transpose())).trace();
  }
  return clamp_nonnegative(b);
}

double baseline_malicious_mse(const GaussianModel& model) {
  double b = model.V_ww().trace();
  if (model.dims().n_z > 0) {
    b -= (model.V_wz() * model.V_zz().llt().solve(model.V_wz().transpose())).trace();
  }
  return clamp_nonnegative(b);
}

CostBreakdown costs_from_moments(const GaussianModel& model, const MessageMoments& moments,
                                 PrivacyRatio delta) {
  const auto& d = model.dims();
  const Index ny = moments.V_yy.rows();
  // Observation u = (y, z).
  Matrix uu(ny + d.n_z, ny + d.n_z);
  uu << moments.V_yy, moments.V_zy.transpose(), moments.V_zy, model.V_zz();
  Matrix xu(d.n_x, ny + d.n_z);
  xu << moments.V_xy, model.V_xz();
  Matrix wu(d.n_w, ny + d.n_z);
  wu << moments.V_wy, model.V_wz();

  Matrix solved;
  Matrix rhs(ny + d.n_z, d.n_x + d.n_w);
  rhs << xu.transpose(), wu.transpose();
  if (!linalg::spd_solve(uu, rhs, solved)) {
    throw DegenerateMessageError("costs_from_moments: covariance of (y, z) is singular");
  }
  CostBreakdown c;
  c.baseline_receiver = baseline_receiver_mse(model);
  c.baseline_malicious = baseline_malicious_mse(model);
  c.receiver_mse = clamp_nonnegative(model.V_xx().trace() - (xu * solved.leftCols(d.n_x)).trace());
  c.malicious_mse =
      clamp_nonnegative(model.V_ww().trace() - (wu * solved.rightCols(d.n_w)).trace());
  c.sender_cost = c.receiver_mse - delta.value() * c.malicious_mse;
  return c;
}

double linear_estimator_mse(const GaussianModel& model, const MessageMoments& moments,
                            EstimationTarget target, const EstimatorPolicy& estimator) {
  const bool state = target == EstimationTarget::State;
  const Matrix& v_tt = state ? model.V_xx() : model.V_ww();
  const Matrix& v_ty = state ? moments.V_xy : moments.V_wy;
  const Matrix& v_tz = state ? model.V_xz() : model.V_wz();
  // E||t - G_y y - G_z z||^2 = tr V_tt - 2 tr(G_y V_yt + G_z V_zt) + tr(G V_uu G^T)
  const Matrix& gy = estimator.gain_y;
  const Matrix& gz = estimator.gain_z;
  double mse = v_tt.trace();
  mse -= 2.0 * ((gy * v_ty.transpose()).trace() + (gz * v_tz.transpose()).trace());
  mse += (gy * moments.V_yy * gy.transpose()).trace();
  mse += 2.0 * (gy * moments.V_zy.transpose() * gz.transpose()).trace();
  mse += (gz * model.V_zz() * gz.transpose()).trace();
  return mse;
}

double normalization_residual(const GaussianModel& model, const MessageMoments& moments) {
  Matrix cond = moments.V_yy;
  if (model.dims().n_z > 0) {
    cond -= moments.V_zy.transpose() * model.V_zz().llt().solve(moments.V_zy);
  }
  return (cond - Matrix::Identity(cond.rows(), cond.cols())).norm();
}

double sender_cost_quadratic(const CostOperator& op, const MessageMoments& moments,
                             PrivacyRatio delta, const GaussianModel& model) {
  if (delta.value() != op.delta) {
    throw ContractViolation("sender_cost_quadratic: operator was built for a different delta");
  }
  const double residual = normalization_residual(model, moments);
  if (residual > kNormalizationTolerance) {
    std::ostringstream os;
    os << "sender_cost_quadratic: message is not normalized (|V_yy - V_yz V_zz^-1 V_zy - I| = "
       << residual << "); rescale it with scale_equilibrium first";
    throw ContractViolation(os.str());
  }
  const Matrix s = moments.stacked_cross();
  return baseline_receiver_mse(model) - delta.value() * baseline_malicious_mse(model) +
         (s.transpose() * op.Z * s).trace();
}

Feasibility feasibility_check(const CostOperator& op, const MessageMoments& moments,
                              const ConditionalCovariance& conditional) {
  const Matrix c = op.T * moments.stacked_cross();
  const Matrix q = c.transpose() * conditional.xi.llt().solve(c);
  const Index ny = q.rows();
  Feasibility f;
  f.margin = linalg::min_eigenvalue(Matrix::Identity(ny, ny) - q);
  f.feasible = f.margin >= -kFeasibilityTolerance;
  return f;
}

}  // namespace privgame
