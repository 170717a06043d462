#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace jsvqa {

struct CobylaOptions {
  double rho_begin = 0.5;
  double rho_end = 1e-4;
  int max_evaluations = 1000;
};

struct CobylaResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  int evaluations = 0;
  bool reached_rho_end = false;  // false = stopped on the evaluation budget
};

// Derivative-free trust-region minimization in the COBYLA style: a simplex of
// n+1 points carries a linear interpolation model, the model is minimized on
// a ball of radius rho, and rho shrinks from rho_begin to rho_end when steps
// stop paying off. Deterministic for a deterministic objective; throws on a
// non-finite objective value.
CobylaResult cobyla_minimize(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> x0, const CobylaOptions& options);

}  // namespace jsvqa
