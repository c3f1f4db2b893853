#include "securescan/optimizer.hpp"

#include <cmath>

#include "securescan/error.hpp"
#include "securescan/kernels.hpp"

namespace securescan {

OptimizerResult minimize(Objective& f, std::vector<double> x0, const OptimizerOptions& opts) {
  const std::size_t d = f.dimension();
  if (x0.size() != d) throw Error(ErrorKind::DimensionMismatch, "initial point has wrong dimension");

  OptimizerResult r;
  r.x = std::move(x0);
  std::vector<double> grad(d), prev_grad(d), trial(d), step(d);

  double fx = f.value_and_gradient(r.x, grad);
  r.loss_history.push_back(fx);
  double t = 1.0 / std::fmax(1.0, std::sqrt(kernels::sum_squares(grad)));

  for (int it = 0;; ++it) {
    r.grad_inf_norm = kernels::max_abs(grad);
    if (r.grad_inf_norm < opts.grad_tol) {
      r.converged = true;
      break;
    }
    if (it >= opts.max_iters) break;

    const double slope = -kernels::sum_squares(grad);  // directional derivative along -grad
    double ft = 0.0;
    bool accepted = false;
    for (int b = 0; b <= opts.max_backtracks; ++b) {
      trial = r.x;
      kernels::axpy(-t, grad, trial);
      ft = f.value(trial);
      if (std::isfinite(ft) && ft <= fx + opts.armijo * t * slope) {
        accepted = true;
        break;
      }
      t *= opts.backtrack;
    }
    if (!accepted || !(ft < fx)) break;  // no representable decrease left

    for (std::size_t i = 0; i < d; ++i) step[i] = trial[i] - r.x[i];
    prev_grad = grad;
    r.x.swap(trial);
    fx = f.value_and_gradient(r.x, grad);
    r.loss_history.push_back(fx);
    r.iterations = it + 1;

    // Barzilai-Borwein step for the next trial; keep the last accepted step
    // when curvature along the step is not positive.
    double sy = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double y = grad[i] - prev_grad[i];
      sy += step[i] * y;
      ss += step[i] * step[i];
    }
    if (sy > 0.0 && std::isfinite(ss / sy)) t = std::fmin(ss / sy, 1e10);
  }
  return r;
}

}  // namespace securescan
