#pragma once

#include <span>
#include <vector>

namespace securescan {

/// Smooth objective over a flat parameter vector.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> x) = 0;
  /// Writes the gradient into `grad` and returns the value.
  virtual double value_and_gradient(std::span<const double> x, std::span<double> grad) = 0;
};

struct OptimizerOptions {
  int max_iters = 1000;
  double grad_tol = 1e-6;      // stop when ||grad||_inf < grad_tol
  double armijo = 1e-4;        // sufficient-decrease constant
  double backtrack = 0.5;
  int max_backtracks = 60;
};

struct OptimizerResult {
  std::vector<double> x;
  std::vector<double> loss_history;  // one entry per accepted iterate, non-increasing
  int iterations = 0;
  bool converged = false;
  double grad_inf_norm = 0.0;
};

/// Full-batch gradient descent. Each trial step starts from the
/// Barzilai-Borwein estimate and is halved until the Armijo condition holds,
/// so every accepted iterate strictly lowers the objective.
OptimizerResult minimize(Objective& f, std::vector<double> x0, const OptimizerOptions& opts = {});

}  // namespace securescan
