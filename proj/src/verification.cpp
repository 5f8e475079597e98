#include "privgame/verification.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <thread>

#include "privgame/errors.hpp"
#include "privgame/nelder_mead.hpp"

namespace privgame {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct ChunkSums {
  CompensatedSum receiver, receiver_sq, malicious, malicious_sq;
};

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

Matrix standard_normal(Index rows, Index cols, std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(engine);
  return g;
}

double standard_error(double sum, double sum_sq, std::size_t n) {
  if (n < 2) return 0.0;
  const double nd = static_cast<double>(n);
  const double var = std::max(0.0, (sum_sq - sum * sum / nd) / (nd - 1.0));
  return std::sqrt(var / nd);
}

double largest_eigenvalue_of_gram(const Matrix& xw_gain, const Matrix& xi) {
  return linalg::max_eigenvalue(xw_gain * xi * xw_gain.transpose());
}

// Pull K onto {K Xi K^T <= I} by uniform rescaling. Huge iterates are
// brought to unit scale first so that K Xi K^T cannot overflow.
Matrix project_to_ellipsoid(Matrix k, const Matrix& xi) {
  const double scale = k.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw ContractViolation("project_to_ellipsoid: non-finite gain");
  if (scale == 0.0) return k;
  const double top = largest_eigenvalue_of_gram(k / scale, xi);  // of K Xi K^T / scale^2
  if (top * scale * scale > 1.0) k /= scale * std::sqrt(top);
  return k;
}

}  // namespace

GameSampler::GameSampler(const GaussianModel& model, SenderPolicy policy, SimulationConfig config)
    : dims_(model.dims()), policy_(std::move(policy)), config_(config) {
  require_valid(model);
  check_policy_shape(model, policy_);
  if (config_.sample_count < 1 || config_.chunk_size < 1) {
    throw ContractViolation("SimulationConfig: sample_count and chunk_size must be positive");
  }
  joint_factor_ = model.joint_covariance().llt().matrixL();
  noise_factor_ = linalg::sqrtm_psd(policy_.V_vv);
}

std::size_t GameSampler::chunk_count() const noexcept {
  return (config_.sample_count + config_.chunk_size - 1) / config_.chunk_size;
}

SampleChunk GameSampler::chunk(std::size_t k) const {
  const std::size_t first = k * config_.chunk_size;
  const auto m = static_cast<Index>(std::min(config_.chunk_size, config_.sample_count - first));
  auto engine = chunk_engine(config_.seed, k);
  const Matrix xwz = joint_factor_ * standard_normal(dims_.joint(), m, engine);
  const Matrix v = noise_factor_ * standard_normal(dims_.n_y, m, engine);

  SampleChunk c;
  c.first_index = first;
  c.x = xwz.topRows(dims_.n_x);
  c.w = xwz.middleRows(dims_.n_x, dims_.n_w);
  c.z = xwz.bottomRows(dims_.n_z);
  c.y = policy_.full_gain() * xwz + v;
  return c;
}

void GameSampler::for_each(const std::function<void(const SampleChunk&)>& visit) const {
  for (std::size_t k = 0; k < chunk_count(); ++k) visit(chunk(k));
}

MonteCarloResult monte_carlo_costs(const GaussianModel& model, const SenderPolicy& sender,
                                   const EstimatorPolicy& receiver,
                                   const EstimatorPolicy& malicious, PrivacyRatio delta,
                                   const SimulationConfig& config, ExecutionMode mode) {
  const GameSampler sampler(model, sender, config);
  const std::size_t chunks = sampler.chunk_count();
  std::vector<ChunkSums> partial(chunks);

  const auto accumulate = [&](std::size_t k) {
    const SampleChunk c = sampler.chunk(k);
    const Vector er = (c.x - receiver.gain_y * c.y - receiver.gain_z * c.z).colwise().squaredNorm();
    const Vector em =
        (c.w - malicious.gain_y * c.y - malicious.gain_z * c.z).colwise().squaredNorm();
    ChunkSums& s = partial[k];
    for (Index j = 0; j < c.size(); ++j) {
      s.receiver.add(er(j));
      s.receiver_sq.add(er(j) * er(j));
      s.malicious.add(em(j));
      s.malicious_sq.add(em(j) * em(j));
    }
  };

  if (mode == ExecutionMode::Parallel && chunks > 1) {
    const std::size_t workers =
        std::min<std::size_t>(chunks, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < chunks; k += workers) accumulate(k);
      });
    }
  } else {
    for (std::size_t k = 0; k < chunks; ++k) accumulate(k);
  }

  CompensatedSum r, r2, m, m2;
  for (const auto& s : partial) {
    r.add(s.receiver.value());
    r2.add(s.receiver_sq.value());
    m.add(s.malicious.value());
    m2.add(s.malicious_sq.value());
  }
  const std::size_t n = config.sample_count;
  const double nd = static_cast<double>(n);
  MonteCarloResult out;
  out.samples = n;
  out.empirical.receiver_mse = r.value() / nd;
  out.empirical.malicious_mse = m.value() / nd;
  out.empirical.sender_cost = out.empirical.receiver_mse - delta.value() * out.empirical.malicious_mse;
  out.empirical.baseline_receiver = baseline_receiver_mse(model);
  out.empirical.baseline_malicious = baseline_malicious_mse(model);
  out.receiver_se = standard_error(r.value(), r2.value(), n);
  out.malicious_se = standard_error(m.value(), m2.value(), n);
  return out;
}

std::string to_string(Player player) {
  switch (player) {
    case Player::Sender: return "sender";
    case Player::Receiver: return "receiver";
    case Player::Malicious: return "malicious";
  }
  return "unknown";
}

namespace {

// Sender cost of `sender` once the estimators have responded to it.
std::optional<double> responded_cost(const GaussianModel& model, const EquilibriumSolution& eq,
                                     const SenderPolicy& sender, PrivacyRatio delta) {
  const MessageMoments moments = message_moments(model, sender);
  if (eq.response == EstimatorResponse::IgnoreMessage) {
    return linear_estimator_mse(model, moments, EstimationTarget::State, eq.receiver) -
           delta.value() *
               linear_estimator_mse(model, moments, EstimationTarget::Private, eq.malicious);
  }
  try {
    return costs_from_moments(model, moments, delta).sender_cost;
  } catch (const DegenerateMessageError&) {
    return std::nullopt;
  }
}

}  // namespace

DeviationReport check_sender_deviation(const GaussianModel& model,
                                       const EquilibriumSolution& solution, PrivacyRatio delta,
                                       int trials, std::uint64_t seed) {
  const auto& d = model.dims();
  const Matrix xi = conditional_covariance(model).xi;
  const Index ny = solution.sender.message_dim();
  const Matrix identity = Matrix::Identity(ny, ny);

  DeviationReport report;
  report.tested_player = Player::Sender;
  const auto reference = responded_cost(model, solution, solution.sender, delta);
  if (!reference) throw DegenerateMessageError("check_sender_deviation: reference policy is degenerate");
  report.reference_cost = *reference;
  report.best_improvement = std::numeric_limits<double>::infinity();

  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Matrix k0 = solution.sender.xw_gain();
  const double k0_scale = std::max(1.0, k0.norm());

  for (int t = 0; t < trials; ++t) {
    SenderPolicy alt;
    Matrix k;
    switch (t % 4) {
      case 0: {  // local perturbation of the equilibrium gain
        const double eps = std::pow(10.0, -4.0 + 3.0 * unit(engine)) * k0_scale;
        k = project_to_ellipsoid(k0 + eps * standard_normal(ny, d.xw(), engine), xi);
        break;
      }
      case 1: {  // random point on the constraint boundary
        k = standard_normal(ny, d.xw(), engine);
        k /= std::sqrt(largest_eigenvalue_of_gram(k, xi));
        break;
      }
      case 2: {  // random interior point
        k = standard_normal(ny, d.xw(), engine);
        k *= unit(engine) / std::sqrt(largest_eigenvalue_of_gram(k, xi));
        break;
      }
      default: {  // unnormalized affine policy with arbitrary noise
        k = std::pow(10.0, -1.0 + 2.0 * unit(engine)) * standard_normal(ny, d.xw(), engine);
        const Matrix a = standard_normal(ny, ny, engine) * std::pow(10.0, -1.0 + 2.0 * unit(engine));
        alt.V_vv = linalg::symmetrize(a * a.transpose());
        break;
      }
    }
    if (alt.V_vv.size() == 0) {
      alt.V_vv = linalg::symmetrize(identity - k * xi * k.transpose());
    }
    alt.K_x = k.leftCols(d.n_x);
    alt.K_w = k.rightCols(d.n_w);
    alt.K_z = (t % 8 < 4) ? Matrix::Zero(ny, d.n_z) : Matrix(standard_normal(ny, d.n_z, engine));

    const auto cost = responded_cost(model, solution, alt, delta);
    if (!cost) continue;
    ++report.trials;
    report.best_improvement = std::min(report.best_improvement, *cost - report.reference_cost);
  }
  if (report.trials == 0) report.best_improvement = 0.0;
  const double scale = std::max(1.0, std::abs(report.reference_cost));
  report.passed = report.best_improvement >= -kDeviationTolerance * scale;
  return report;
}

namespace {

DeviationReport check_one_estimator(const GaussianModel& model, const MessageMoments& moments,
                                    EstimationTarget target, const EstimatorPolicy& estimator,
                                    int trials, std::mt19937_64& engine) {
  const auto& d = model.dims();
  const Index ny = moments.V_yy.rows();
  const bool state = target == EstimationTarget::State;
  const Index nt = state ? d.n_x : d.n_w;

  DeviationReport report;
  report.tested_player = state ? Player::Receiver : Player::Malicious;

  // Cross-covariance of the error with u = (y, z): V_tu - G V_uu.
  Matrix uu(ny + d.n_z, ny + d.n_z);
  uu << moments.V_yy, moments.V_zy.transpose(), moments.V_zy, model.V_zz();
  Matrix tu(nt, ny + d.n_z);
  tu << (state ? moments.V_xy : moments.V_wy), (state ? model.V_xz() : model.V_wz());
  Matrix g(nt, ny + d.n_z);
  g << estimator.gain_y, estimator.gain_z;
  const Matrix residual = tu - g * uu;
  report.orthogonality_residual = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;

  report.reference_cost = linear_estimator_mse(model, moments, target, estimator);
  report.best_improvement = std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  for (int t = 0; t < trials; ++t) {
    Matrix gp = g;
    const double eps = std::pow(10.0, -6.0 + 5.0 * unit(engine));
    if (t % 2 == 0) {
      const auto i = static_cast<Index>(unit(engine) * static_cast<double>(gp.rows())) % gp.rows();
      const auto j = static_cast<Index>(unit(engine) * static_cast<double>(gp.cols())) % gp.cols();
      gp(i, j) += (normal(engine) < 0 ? -eps : eps);
    } else {
      gp += eps * standard_normal(gp.rows(), gp.cols(), engine);
    }
    const EstimatorPolicy alt{gp.leftCols(ny), gp.rightCols(d.n_z)};
    const double cost = linear_estimator_mse(model, moments, target, alt);
    ++report.trials;
    report.best_improvement = std::min(report.best_improvement, cost - report.reference_cost);
  }
  if (report.trials == 0) report.best_improvement = 0.0;

  const double moment_scale = std::max(1.0, uu.size() ? uu.cwiseAbs().maxCoeff() : 1.0);
  const double cost_scale = std::max(1.0, std::abs(report.reference_cost));
  report.passed = report.orthogonality_residual <= kOrthogonalityTolerance * moment_scale &&
                  report.best_improvement >= -kDeviationTolerance * cost_scale;
  return report;
}

}  // namespace

EstimatorOptimalityReport check_estimator_optimality(const GaussianModel& model,
                                                     const MessageMoments& moments,
                                                     const EstimatorPolicy& receiver,
                                                     const EstimatorPolicy& malicious, int trials,
                                                     std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  EstimatorOptimalityReport r;
  r.receiver = check_one_estimator(model, moments, EstimationTarget::State, receiver, trials, engine);
  r.malicious =
      check_one_estimator(model, moments, EstimationTarget::Private, malicious, trials, engine);
  return r;
}

CoalitionWeight::CoalitionWeight(double vartheta) : vartheta_(vartheta) {
  if (!(vartheta > 0.0) || !std::isfinite(vartheta)) {
    throw ContractViolation("coalition weight vartheta must be positive");
  }
}

bool check_coalition_separation(const GaussianModel& model, const EquilibriumSolution& solution,
                                PrivacyRatio /*delta*/, CoalitionWeight weight) {
  const auto& d = model.dims();
  const MessageMoments moments = message_moments(model, solution.sender);
  const Index ny = moments.V_yy.rows();
  const Index nu = ny + d.n_z;
  const Index p_r = d.n_x * nu;
  const Index p = (d.n_x + d.n_w) * nu;

  // Parameter vector: receiver gain [G_y G_z] then eavesdropper gain, both column-major.
  const auto unpack = [&](const Vector& g) {
    const Eigen::Map<const Matrix> gr(g.data(), d.n_x, nu);
    const Eigen::Map<const Matrix> gm(g.data() + p_r, d.n_w, nu);
    return std::pair{EstimatorPolicy{gr.leftCols(ny), gr.rightCols(d.n_z)},
                     EstimatorPolicy{gm.leftCols(ny), gm.rightCols(d.n_z)}};
  };
  const auto joint = [&](const Vector& g) {
    const auto [r, m] = unpack(g);
    return linear_estimator_mse(model, moments, EstimationTarget::State, r) +
           weight.value() * linear_estimator_mse(model, moments, EstimationTarget::Private, m);
  };

  // The joint cost is quadratic, c - 2 b^T g + g^T A g, so unit-step
  // differences recover A and b exactly up to rounding.
  const Vector zero = Vector::Zero(p);
  const double j0 = joint(zero);
  Vector single(p);
  Vector b(p);
  for (Index i = 0; i < p; ++i) {
    Vector e = zero;
    e(i) = 1.0;
    single(i) = joint(e);
    b(i) = 0.25 * (joint(-e) - single(i));
  }
  Matrix a(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i; j < p; ++j) {
      Vector e = zero;
      e(i) += 1.0;
      e(j) += 1.0;
      const double second = joint(e) - single(i) - single(j) + j0;
      a(i, j) = a(j, i) = 0.5 * second;
    }
  }
  const Vector g = a.ldlt().solve(b);
  const auto [jr, jm] = unpack(g);

  const auto close = [](const Matrix& x, const Matrix& y) {
    if (x.size() == 0) return true;
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    return (x - y).cwiseAbs().maxCoeff() <= kSeparationTolerance * scale;
  };
  return close(jr.gain_y, solution.receiver.gain_y) && close(jr.gain_z, solution.receiver.gain_z) &&
         close(jm.gain_y, solution.malicious.gain_y) && close(jm.gain_z, solution.malicious.gain_z);
}

OracleResult oracle_solve(const GaussianModel& model, PrivacyRatio delta, int restarts,
                          std::uint64_t seed) {
  const auto& d = model.dims();
  const ConditionalCovariance cond = conditional_covariance(model);
  const Index ny = d.n_y;
  const Index p = ny * d.xw();

  OracleResult best;
  best.objective = std::numeric_limits<double>::infinity();
  const auto reshape = [&](const Vector& v) { return Matrix(Eigen::Map<const Matrix>(v.data(), ny, d.xw())); };
  const auto objective = [&](const Vector& v) {
    const Matrix k = project_to_ellipsoid(reshape(v), cond.xi);
    return sender_trace_objective(cond, d.n_x, delta, k);
  };

  std::mt19937_64 engine(seed);
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Matrix k0 = standard_normal(ny, d.xw(), engine);
    k0 /= std::sqrt(largest_eigenvalue_of_gram(k0, cond.xi));
    Vector x = Eigen::Map<const Vector>(k0.data(), p);

    NelderMeadOptions opts;
    opts.initial_step = 0.25 * std::max(1e-3, x.cwiseAbs().maxCoeff());
    opts.max_evaluations = 400 * static_cast<int>(p + 1);
    NelderMeadResult run = nelder_mead(objective, x, opts);
    best.evaluations += run.evaluations;
    // Outside the ellipsoid the objective is constant along rays, so the
    // simplex may drift outward; restart from the projected point.
    const auto recentre = [&](NelderMeadResult& r) {
      const Matrix k = project_to_ellipsoid(reshape(r.x), cond.xi);
      r.x = Eigen::Map<const Vector>(k.data(), p);
    };
    recentre(run);
    // Restarting the simplex around the incumbent escapes premature collapse.
    for (int polish = 0; polish < 8; ++polish) {
      opts.initial_step = std::max(1e-6, 0.05 * std::pow(0.3, polish)) *
                          std::max(1e-3, run.x.cwiseAbs().maxCoeff());
      NelderMeadResult next = nelder_mead(objective, run.x, opts);
      best.evaluations += next.evaluations;
      const bool stalled = run.f - next.f < 1e-14;
      if (next.f < run.f) run = std::move(next);
      recentre(run);
      if (stalled) break;
    }
    if (run.f < best.objective) {
      best.objective = run.f;
      best.xw_gain = project_to_ellipsoid(reshape(run.x), cond.xi);
    }
  }
  best.objective = sender_trace_objective(cond, d.n_x, delta, best.xw_gain);
  best.sender_cost = baseline_receiver_mse(model) - delta.value() * baseline_malicious_mse(model) +
                     best.objective;
  return best;
}

GeneralSolveCheck solve_general_checked(const GaussianModel& model, PrivacyRatio delta,
                                        int restarts, std::uint64_t seed) {
  GeneralSolveCheck check{solve_general(model, delta), oracle_solve(model, delta, restarts, seed)};
  const auto& lambda = check.solution.diagnostics.eigenvalues;
  for (Index i = 0; i < model.dims().n_y && i < static_cast<Index>(lambda.size()); ++i) {
    check.solver_objective += std::min(lambda[static_cast<std::size_t>(i)], 0.0);
  }
  check.equilibrium = check.oracle.objective >= check.solver_objective - kOracleTolerance;
  return check;
}

}  // namespace privgame
