#include "privgame/gaussian_model.hpp"

#include <cmath>
#include <sstream>

#include "privgame/errors.hpp"

namespace privgame {

namespace {

void expect_shape(const char* name, const Matrix& m, Index rows, Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << ": expected " << rows << "x" << cols << ", got " << m.rows() << "x"
       << m.cols();
    throw StructuralError(os.str());
  }
}

// Default-constructed z-blocks stand for "absent" and get the right empty shape.
Matrix or_empty(Matrix m, Index rows, Index cols) {
  if (m.size() == 0) return Matrix::Zero(rows, cols);
  return m;
}

double asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace

GaussianModel::GaussianModel(Dimensions dims, Matrix V_xx, Matrix V_ww, Matrix V_xw,
                             Matrix V_zz, Matrix V_xz, Matrix V_wz)
    : dims_(dims),
      V_xx_(std::move(V_xx)),
      V_ww_(std::move(V_ww)),
      V_zz_(or_empty(std::move(V_zz), dims.n_z, dims.n_z)),
      V_xw_(std::move(V_xw)),
      V_xz_(or_empty(std::move(V_xz), dims.n_x, dims.n_z)),
      V_wz_(or_empty(std::move(V_wz), dims.n_w, dims.n_z)) {
  if (dims_.n_x < 1 || dims_.n_w < 1 || dims_.n_y < 1 || dims_.n_z < 0) {
    std::ostringstream os;
    os << "dims: need n_x, n_w, n_y >= 1 and n_z >= 0 (got n_x=" << dims_.n_x
       << ", n_w=" << dims_.n_w << ", n_z=" << dims_.n_z << ", n_y=" << dims_.n_y << ")";
    throw StructuralError(os.str());
  }
  expect_shape("V_xx", V_xx_, dims_.n_x, dims_.n_x);
  expect_shape("V_ww", V_ww_, dims_.n_w, dims_.n_w);
  expect_shape("V_zz", V_zz_, dims_.n_z, dims_.n_z);
  expect_shape("V_xw", V_xw_, dims_.n_x, dims_.n_w);
  expect_shape("V_xz", V_xz_, dims_.n_x, dims_.n_z);
  expect_shape("V_wz", V_wz_, dims_.n_w, dims_.n_z);
}

Matrix GaussianModel::joint_covariance() const {
  const Index nx = dims_.n_x, nw = dims_.n_w, nz = dims_.n_z;
  Matrix s(dims_.joint(), dims_.joint());
  s.block(0, 0, nx, nx) = V_xx_;
  s.block(0, nx, nx, nw) = V_xw_;
  s.block(0, nx + nw, nx, nz) = V_xz_;
  s.block(nx, 0, nw, nx) = V_xw_.transpose();
  s.block(nx, nx, nw, nw) = V_ww_;
  s.block(nx, nx + nw, nw, nz) = V_wz_;
  s.block(nx + nw, 0, nz, nx) = V_xz_.transpose();
  s.block(nx + nw, nx, nz, nw) = V_wz_.transpose();
  s.block(nx + nw, nx + nw, nz, nz) = V_zz_;
  return s;
}

Matrix GaussianModel::xw_covariance() const {
  return joint_covariance().topLeftCorner(dims_.xw(), dims_.xw());
}

Matrix GaussianModel::xw_z_covariance() const {
  Matrix c(dims_.xw(), dims_.n_z);
  c << V_xz_, V_wz_;
  return c;
}

GaussianModel GaussianModel::with_message_dim(Index n_y) const {
  Dimensions d = dims_;
  d.n_y = n_y;
  return GaussianModel(d, V_xx_, V_ww_, V_xw_, V_zz_, V_xz_, V_wz_);
}

GaussianModel GaussianModel::with_V_xw(Matrix V_xw) const {
  return GaussianModel(dims_, V_xx_, V_ww_, std::move(V_xw), V_zz_, V_xz_, V_wz_);
}

ValidationReport validate_model(const GaussianModel& model, double pd_tolerance) {
  ValidationReport report;
  const auto check_symmetric = [&](const char* name, const Matrix& m) {
    const double scale = m.size() ? std::max(1.0, m.cwiseAbs().maxCoeff()) : 1.0;
    if (asymmetry(m) > 1e-12 * scale) report.violations.push_back(std::string(name) + " is not symmetric");
  };
  check_symmetric("V_xx", model.V_xx());
  check_symmetric("V_ww", model.V_ww());
  check_symmetric("V_zz", model.V_zz());

  const Matrix joint = model.joint_covariance();
  if (!joint.allFinite()) {
    report.violations.push_back("joint covariance has non-finite entries");
    return report;
  }
  const double scale = joint.diagonal().cwiseAbs().maxCoeff();
  const double lambda_min = linalg::min_eigenvalue(joint);
  if (!(lambda_min > pd_tolerance * scale)) {
    std::ostringstream os;
    os.precision(6);
    os << "joint covariance is not positive definite (smallest eigenvalue " << lambda_min;
    if (std::abs(lambda_min) <= pd_tolerance * scale) os << ", singular";
    os << ")";
    report.violations.push_back(os.str());
  }
  return report;
}

void require_valid(const GaussianModel& model) {
  auto report = validate_model(model);
  if (!report.ok()) throw ValidationError(std::move(report.violations));
}

ConditionalCovariance conditional_covariance(const GaussianModel& model) {
  require_valid(model);
  Matrix xi = model.xw_covariance();
  if (model.dims().n_z > 0) {
    const Matrix c = model.xw_z_covariance();
    xi -= c * model.V_zz().llt().solve(c.transpose());
  }
  return {linalg::symmetrize(xi)};
}

Matrix MessageMoments::stacked_cross() const {
  Matrix s(V_xy.rows() + V_wy.rows() + V_zy.rows(), V_yy.rows());
  s << V_xy, V_wy, V_zy;
  return s;
}

void check_policy_shape(const GaussianModel& model, const SenderPolicy& policy) {
  const auto& d = model.dims();
  const Index ny = d.n_y;
  expect_shape("K_x", policy.K_x, ny, d.n_x);
  expect_shape("K_w", policy.K_w, ny, d.n_w);
  expect_shape("K_z", policy.K_z, ny, d.n_z);
  expect_shape("V_vv", policy.V_vv, ny, ny);
}

MessageMoments message_moments(const GaussianModel& model, const SenderPolicy& policy) {
  check_policy_shape(model, policy);
  if (!linalg::is_psd(policy.V_vv)) {
    throw ContractViolation("message_moments: V_vv is not positive semidefinite");
  }
  const auto& d = model.dims();
  const Matrix sigma = model.joint_covariance();
  const Matrix k = policy.full_gain();
  const Matrix cross = sigma * k.transpose();
  MessageMoments m;
  m.V_xy = cross.topRows(d.n_x);
  m.V_wy = cross.middleRows(d.n_x, d.n_w);
  m.V_zy = cross.bottomRows(d.n_z);
  m.V_yy = linalg::symmetrize(k * cross + policy.V_vv);
  return m;
}

Matrix joint_with_message(const GaussianModel& model, const MessageMoments& moments) {
  const Index ny = moments.V_yy.rows();
  const Index n = model.dims().joint();
  Matrix j(ny + n, ny + n);
  const Matrix s = moments.stacked_cross();
  j.topLeftCorner(ny, ny) = moments.V_yy;
  j.topRightCorner(ny, n) = s.transpose();
  j.bottomLeftCorner(n, ny) = s;
  j.bottomRightCorner(n, n) = model.joint_covariance();
  return j;
}

}  // namespace privgame
