#include <cmath>

#include "securescan/kernels.hpp"

namespace securescan::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

double sparse_dot(const double* dense, const std::uint32_t* idx, const double* val,
                  std::size_t nnz) {
  double s = 0.0;
  for (std::size_t k = 0; k < nnz; ++k) s += dense[idx[k]] * val[k];
  return s;
}

}  // namespace securescan::kernels::scalar
