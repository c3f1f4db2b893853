#pragma once
// Arithmetic inner loops shared by training and inference.
//
// Each kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is chosen once per process from the CPU
// feature bits; SECURESCAN_KERNELS=scalar forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace securescan::kernels {

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // sum_k dense[idx[k]] * val[k]
  double (*sparse_dot)(const double* dense, const std::uint32_t* idx, const double* val,
                       std::size_t nnz);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
double sparse_dot(const double* dense, const std::uint32_t* idx, const double* val,
                  std::size_t nnz);
}  // namespace scalar

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// The table selected for this process.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum_squares(std::span<const double> x) {
  return active().sum_squares(x.data(), x.size());
}
inline double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }
inline double sparse_dot(std::span<const double> dense, std::span<const std::uint32_t> idx,
                         std::span<const double> val) {
  return active().sparse_dot(dense.data(), idx.data(), val.data(), idx.size());
}

}  // namespace securescan::kernels
