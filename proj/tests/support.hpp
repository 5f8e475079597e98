#pragma once

// Test-only helpers: model generators and oracles that do not go through the
// library's solver path.

#include <cmath>
#include <random>

#include "privgame/experiments.hpp"

namespace privgame::testing {

inline GaussianModel scalar_example_model(double v_xw = 0.8, Index n_y = 1) {
  return GaussianModel({1, 1, 0, n_y}, Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0),
                       Matrix::Constant(1, 1, v_xw));
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

/// Random well-conditioned SPD joint covariance cut into blocks.
inline GaussianModel random_model(std::mt19937_64& rng, Dimensions d) {
  const Index n = d.joint();
  const Matrix a = random_matrix(n, n, rng);
  const Matrix s = a * a.transpose() / static_cast<double>(n) + 0.2 * Matrix::Identity(n, n);
  const Index x = 0, w = d.n_x, z = d.n_x + d.n_w;
  return GaussianModel(d, s.block(x, x, d.n_x, d.n_x), s.block(w, w, d.n_w, d.n_w),
                       s.block(x, w, d.n_x, d.n_w), s.block(z, z, d.n_z, d.n_z),
                       s.block(x, z, d.n_x, d.n_z), s.block(w, z, d.n_w, d.n_z));
}

inline Dimensions random_dims(std::mt19937_64& rng, Index max_xw, Index max_z, Index max_y) {
  std::uniform_int_distribution<Index> xw(1, max_xw), z(0, max_z), y(1, max_y);
  return {xw(rng), xw(rng), z(rng), y(rng)};
}

/// Random sender policy normalized so that K Xi K^T + V_vv = I, with a random
/// K_z thrown in.
inline SenderPolicy random_normalized_policy(const GaussianModel& model, std::mt19937_64& rng) {
  const auto& d = model.dims();
  const Matrix xi = conditional_covariance(model).xi;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix k = random_matrix(d.n_y, d.xw(), rng);
  const double top =
      Eigen::SelfAdjointEigenSolver<Matrix>(k * xi * k.transpose()).eigenvalues().maxCoeff();
  k *= u(rng) / std::sqrt(top);
  SenderPolicy p;
  p.K_x = k.leftCols(d.n_x);
  p.K_w = k.rightCols(d.n_w);
  p.K_z = random_matrix(d.n_y, d.n_z, rng);
  p.V_vv = Matrix::Identity(d.n_y, d.n_y) - k * xi * k.transpose();
  p.V_vv = 0.5 * (p.V_vv + p.V_vv.transpose()).eval();
  return p;
}

struct ScalarOutcome {
  double receiver_mse;
  double malicious_mse;
  double sender_cost;
  double k_x;
  double k_w;
};

/// Scalar (n_x = n_w = n_y = 1, no side information) costs of y = k_x x + k_w w
/// with best-responding estimators, in plain arithmetic.
inline ScalarOutcome scalar_costs(double vxx, double vww, double vxw, double delta, double kx,
                                  double kw) {
  const double vxy = vxx * kx + vxw * kw;
  const double vwy = vxw * kx + vww * kw;
  const double vyy = kx * kx * vxx + 2 * kx * kw * vxw + kw * kw * vww;
  const double r = vxx - vxy * vxy / vyy;
  const double m = vww - vwy * vwy / vyy;
  return {r, m, r - delta * m, kx, kw};
}

/// Dense search over the ellipse K Xi K^T = 1 parametrized by angle, refined by
/// golden-section search around the best grid point.
inline ScalarOutcome scalar_ellipse_search(double vxx, double vww, double vxw, double delta,
                                           int grid = 200000) {
  const auto at = [&](double theta) {
    const double ux = std::cos(theta), uw = std::sin(theta);
    const double q = ux * ux * vxx + 2 * ux * uw * vxw + uw * uw * vww;
    return scalar_costs(vxx, vww, vxw, delta, ux / std::sqrt(q), uw / std::sqrt(q));
  };
  const double pi = std::acos(-1.0);
  double best_theta = 0.0, best = at(0.0).sender_cost;
  for (int i = 1; i < grid; ++i) {
    const double th = pi * i / grid;  // y and -y are equivalent
    const double c = at(th).sender_cost;
    if (c < best) {
      best = c;
      best_theta = th;
    }
  }
  double lo = best_theta - pi / grid, hi = best_theta + pi / grid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (at(a).sender_cost < at(b).sender_cost) hi = b; else lo = a;
  }
  return at(0.5 * (lo + hi));
}

}  // namespace privgame::testing
