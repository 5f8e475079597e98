#include "privgame/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace privgame {

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& options) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const Index n = x0.size();
  std::vector<Vector> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  int evals = 0;
  const auto eval = [&](const Vector& x) {
    ++evals;
    return f(x);
  };

  for (Index i = 0; i < n; ++i) {
    const double step = x0(i) != 0.0 ? options.initial_step * std::max(1.0, std::abs(x0(i)))
                                     : options.initial_step;
    simplex[i + 1](i) += step;
  }
  for (Index i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<Index> order(n + 1);
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] < values[b]; });
    const Index best = order.front(), worst = order.back(), second = order[n - 1];

    double spread = 0.0;
    for (Index i = 0; i <= n; ++i) {
      spread = std::max(spread, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
    }
    if (std::abs(values[worst] - values[best]) <=
            options.f_tolerance * (std::abs(values[best]) + options.f_tolerance) &&
        spread <= options.x_tolerance * std::max(1.0, simplex[best].cwiseAbs().maxCoeff())) {
      break;
    }
    if (spread <= 1e-15) break;

    Vector centroid = Vector::Zero(n);
    for (Index i = 0; i <= n; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Vector reflected = centroid + kReflect * (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const Vector expanded = centroid + kExpand * (reflected - centroid);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Vector contracted = outside ? Vector(centroid + kContract * (reflected - centroid))
                                      : Vector(centroid + kContract * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + kShrink * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(it - values.begin());
  return {simplex[idx], *it, evals};
}

}  // namespace privgame
