#pragma once

#include <functional>

#include "privgame/linalg.hpp"

namespace privgame {

struct NelderMeadOptions {
  double initial_step = 0.1;
  double f_tolerance = 1e-14;
  double x_tolerance = 1e-12;
  int max_evaluations = 20000;
};

struct NelderMeadResult {
  Vector x;
  double f = 0.0;
  int evaluations = 0;
};

/// Downhill simplex minimization of an unconstrained function.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& options = {});

}  // namespace privgame
