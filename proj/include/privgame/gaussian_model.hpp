#pragma once

#include <string>
#include <vector>

#include "privgame/game_types.hpp"

namespace privgame {

struct Dimensions {
  Index n_x = 1;
  Index n_w = 1;
  Index n_z = 0;  // 0 = no side information
  Index n_y = 1;

  Index xw() const noexcept { return n_x + n_w; }
  Index joint() const noexcept { return n_x + n_w + n_z; }
};

/// Zero-mean jointly Gaussian (x, w, z), stored as covariance blocks.
///
/// Construction checks block shapes against the dimensions; positive
/// definiteness is checked separately by validate_model() so that invalid
/// scenarios can still be loaded and reported on. z-blocks are
/// zero-dimensional when n_z == 0.
class GaussianModel {
 public:
  GaussianModel(Dimensions dims, Matrix V_xx, Matrix V_ww, Matrix V_xw,
                Matrix V_zz = Matrix(0, 0), Matrix V_xz = Matrix(), Matrix V_wz = Matrix());

  const Dimensions& dims() const noexcept { return dims_; }
  const Matrix& V_xx() const noexcept { return V_xx_; }
  const Matrix& V_ww() const noexcept { return V_ww_; }
  const Matrix& V_zz() const noexcept { return V_zz_; }
  const Matrix& V_xw() const noexcept { return V_xw_; }
  const Matrix& V_xz() const noexcept { return V_xz_; }
  const Matrix& V_wz() const noexcept { return V_wz_; }

  /// Covariance of (x, w, z), assembled on demand.
  Matrix joint_covariance() const;
  /// Unconditional covariance of (x, w).
  Matrix xw_covariance() const;
  /// Cross-covariance [V_xz; V_wz].
  Matrix xw_z_covariance() const;

  GaussianModel with_message_dim(Index n_y) const;
  GaussianModel with_V_xw(Matrix V_xw) const;

 private:
  Dimensions dims_;
  Matrix V_xx_, V_ww_, V_zz_, V_xw_, V_xz_, V_wz_;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

inline constexpr double kDefaultPdTolerance = 1e-10;

/// Symmetry of the diagonal blocks and positive definiteness of the joint
/// covariance. `pd_tolerance` is relative to the largest diagonal entry.
ValidationReport validate_model(const GaussianModel& model,
                                double pd_tolerance = kDefaultPdTolerance);

/// Throws ValidationError when validate_model() reports violations.
void require_valid(const GaussianModel& model);

/// Covariance of (x, w) given z.
struct ConditionalCovariance {
  Matrix xi;
};

ConditionalCovariance conditional_covariance(const GaussianModel& model);

/// Second moments of the message y = K_x x + K_w w + K_z z + v.
struct MessageMoments {
  Matrix V_yy;  // n_y x n_y
  Matrix V_xy;  // n_x x n_y
  Matrix V_wy;  // n_w x n_y
  Matrix V_zy;  // n_z x n_y

  /// [V_xy; V_wy; V_zy]
  Matrix stacked_cross() const;
};

MessageMoments message_moments(const GaussianModel& model, const SenderPolicy& policy);

/// Covariance of (y, x, w, z) implied by the model and the message moments.
Matrix joint_with_message(const GaussianModel& model, const MessageMoments& moments);

/// Throws StructuralError if the policy's blocks do not fit the model.
void check_policy_shape(const GaussianModel& model, const SenderPolicy& policy);

}  // namespace privgame
