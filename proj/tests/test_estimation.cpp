#include <doctest.h>

#include "privgame/errors.hpp"
#include "support.hpp"

using namespace privgame;
using privgame::testing::random_dims;
using privgame::testing::random_model;
using privgame::testing::random_normalized_policy;
using privgame::testing::scalar_example_model;

namespace {

SenderPolicy babbling_policy(const Dimensions& d) {
  return {Matrix::Zero(d.n_y, d.n_x), Matrix::Zero(d.n_y, d.n_w), Matrix::Zero(d.n_y, d.n_z),
          Matrix::Identity(d.n_y, d.n_y)};
}

}  // namespace

TEST_CASE("babbling moments give the baseline errors") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const GaussianModel m = random_model(rng, random_dims(rng, 3, 2, 2));
    const CostBreakdown c =
        costs_from_moments(m, message_moments(m, babbling_policy(m.dims())), PrivacyRatio(2.0));
    CHECK(c.receiver_mse == doctest::Approx(c.baseline_receiver).epsilon(1e-12));
    CHECK(c.malicious_mse == doctest::Approx(c.baseline_malicious).epsilon(1e-12));
    CHECK(c.sender_cost == doctest::Approx(c.receiver_mse - 2.0 * c.malicious_mse));
  }
}

TEST_CASE("revealing x in the two-by-two example") {
  const GaussianModel m = scalar_example_model();
  SenderPolicy y_is_x{Matrix::Constant(1, 1, 1.0), Matrix::Zero(1, 1), Matrix::Zero(1, 0),
                      Matrix::Zero(1, 1)};
  const CostBreakdown c = costs_from_moments(m, message_moments(m, y_is_x), PrivacyRatio(0.0));
  CHECK(std::abs(c.receiver_mse) < 1e-15);
  // w_hat = 0.8 y, error 1 - 0.64
  CHECK(c.malicious_mse == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(c.sender_cost == c.receiver_mse);
}

TEST_CASE("degenerate message covariance is an explicit error") {
  const GaussianModel m = scalar_example_model();
  SenderPolicy silent{Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 0),
                      Matrix::Zero(1, 1)};
  CHECK_THROWS_AS(costs_from_moments(m, message_moments(m, silent), PrivacyRatio(1.0)),
                  DegenerateMessageError);
}

TEST_CASE("cost operator matches its defining congruence") {
  std::mt19937_64 rng(9);
  const GaussianModel m = random_model(rng, {2, 2, 2, 1});
  const CostOperator op = cost_operator(m, PrivacyRatio(0.7));
  const Matrix vzz_inv = m.V_zz().inverse();
  const Matrix a = m.V_xz() * vzz_inv, b = m.V_wz() * vzz_inv;
  // Written out block by block: -I, +A on the first row; +delta I, -delta B on the second.
  Matrix z = Matrix::Zero(6, 6);
  z.block(0, 0, 2, 2) = -Matrix::Identity(2, 2);
  z.block(0, 4, 2, 2) = a;
  z.block(2, 2, 2, 2) = 0.7 * Matrix::Identity(2, 2);
  z.block(2, 4, 2, 2) = -0.7 * b;
  z.block(4, 0, 2, 2) = a.transpose();
  z.block(4, 2, 2, 2) = -0.7 * b.transpose();
  z.block(4, 4, 2, 2) = -vzz_inv * (m.V_xz().transpose() * m.V_xz() -
                                    0.7 * m.V_wz().transpose() * m.V_wz()) * vzz_inv;
  CHECK((op.Z - z).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((op.Q_pp - conditional_covariance(m).xi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadratic sender cost: zero cross moments leave the baseline difference") {
  std::mt19937_64 rng(13);
  const GaussianModel m = random_model(rng, {2, 1, 1, 2});
  const PrivacyRatio delta(1.5);
  const double q = sender_cost_quadratic(cost_operator(m, delta),
                                         message_moments(m, babbling_policy(m.dims())), delta, m);
  CHECK(q == doctest::Approx(baseline_receiver_mse(m) - 1.5 * baseline_malicious_mse(m)));
}

TEST_CASE("quadratic sender cost rejects unnormalized messages") {
  const GaussianModel m = scalar_example_model();
  SenderPolicy p{Matrix::Constant(1, 1, 2.0), Matrix::Zero(1, 1), Matrix::Zero(1, 0),
                 Matrix::Zero(1, 1)};
  const PrivacyRatio delta(1.0);
  CHECK_THROWS_AS(sender_cost_quadratic(cost_operator(m, delta), message_moments(m, p), delta, m),
                  ContractViolation);
  CHECK_THROWS_AS(sender_cost_quadratic(cost_operator(m, PrivacyRatio(2.0)),
                                        message_moments(m, babbling_policy(m.dims())), delta, m),
                  ContractViolation);
}

TEST_CASE("property: quadratic form agrees with the direct least-mean-square cost") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> du(0.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const GaussianModel m = random_model(rng, random_dims(rng, 4, 4, 4));
    const PrivacyRatio delta(i % 10 == 0 ? 0.0 : du(rng));
    const MessageMoments mm = message_moments(m, random_normalized_policy(m, rng));
    const CostBreakdown direct = costs_from_moments(m, mm, delta);
    const double quad = sender_cost_quadratic(cost_operator(m, delta), mm, delta, m);
    CHECK(std::abs(quad - direct.sender_cost) <= 1e-9);
    CHECK(direct.receiver_mse <= direct.baseline_receiver + 1e-9);
    CHECK(direct.malicious_mse <= direct.baseline_malicious + 1e-9);
    if (delta.value() == 0.0) CHECK(direct.sender_cost == direct.receiver_mse);
  }
}

TEST_CASE("feasibility of zero, scaled and equilibrium moments") {
  const GaussianModel m = scalar_example_model();
  const PrivacyRatio delta(1.0);
  const CostOperator op = cost_operator(m, delta);
  const ConditionalCovariance cond = conditional_covariance(m);

  const Feasibility zero = feasibility_check(op, message_moments(m, babbling_policy(m.dims())), cond);
  CHECK(zero.feasible);
  CHECK(zero.margin == doctest::Approx(1.0));

  const EquilibriumSolution eq = solve_scalar(m, delta);
  const Feasibility at_eq = feasibility_check(op, message_moments(m, eq.sender), cond);
  CHECK(at_eq.feasible);
  CHECK(std::abs(at_eq.margin) < 1e-9);  // constraint is active

  MessageMoments grown = message_moments(m, eq.sender);
  grown.V_xy *= 1.5;
  grown.V_wy *= 1.5;
  CHECK_FALSE(feasibility_check(op, grown, cond).feasible);
}

TEST_CASE("feasibility equals the full-joint Schur complement test") {
  // Oracle: s^T Sigma^-1 s <= V_yy - V_yz V_zz^-1 V_zy + V_yz V_zz^-1 V_zy,
  // i.e. PSD of the joint (y, x, w, z) covariance.
  std::mt19937_64 rng(19);
  for (int i = 0; i < 50; ++i) {
    const GaussianModel m = random_model(rng, random_dims(rng, 3, 2, 2));
    const MessageMoments mm = message_moments(m, random_normalized_policy(m, rng));
    const Feasibility f =
        feasibility_check(cost_operator(m, PrivacyRatio(1.0)), mm, conditional_covariance(m));
    CHECK(f.feasible);
    CHECK(linalg::is_psd(joint_with_message(m, mm), 1e-9));
  }
}

TEST_CASE("large privacy ratio drives the eavesdropper to its prior") {
  const GaussianModel m = scalar_example_model();
  const EquilibriumSolution eq = solve_scalar(m, PrivacyRatio(100.0));
  const CostBreakdown c = costs_from_moments(m, message_moments(m, eq.sender), PrivacyRatio(100.0));
  CHECK(std::abs(c.malicious_mse - 1.0) < 1e-2);
}
