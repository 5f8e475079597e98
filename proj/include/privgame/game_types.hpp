#pragma once

#include "privgame/linalg.hpp"

namespace privgame {

/// Weight the sender places on hiding w from the eavesdropper relative to
/// helping the receiver estimate x. Must be nonnegative.
class PrivacyRatio {
 public:
  explicit PrivacyRatio(double delta);

  double value() const noexcept { return delta_; }

  /// diag(-I_{n_x}, delta * I_{n_w}), the sender's weight on the (x, w) block.
  Matrix weight_matrix(Index n_x, Index n_w) const;

 private:
  double delta_;
};

/// Affine message rule y = K_x x + K_w w + K_z z + v, v ~ N(0, V_vv)
/// independent of (x, w, z).
struct SenderPolicy {
  Matrix K_x;   // n_y x n_x
  Matrix K_w;   // n_y x n_w
  Matrix K_z;   // n_y x n_z
  Matrix V_vv;  // n_y x n_y, symmetric PSD

  Index message_dim() const noexcept { return V_vv.rows(); }

  /// [K_x K_w]
  Matrix xw_gain() const;
  /// [K_x K_w K_z]
  Matrix full_gain() const;
};

/// Deterministic linear estimator: estimate = gain_y * y + gain_z * z.
struct EstimatorPolicy {
  Matrix gain_y;
  Matrix gain_z;

  Vector estimate(const Vector& y, const Vector& z) const;
};

}  // namespace privgame
