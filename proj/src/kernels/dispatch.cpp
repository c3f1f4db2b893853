#include <cstdlib>
#include <string_view>

#include "securescan/kernels.hpp"

namespace securescan::kernels {

const KernelTable* avx2_table_compiled();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  if (const char* env = std::getenv("SECURESCAN_KERNELS"); env && std::string_view(env) == "scalar")
    return scalar_table();
  if (const KernelTable* t = avx2_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &scalar::dot, &scalar::axpy, &scalar::sum_squares,
                                 &scalar::max_abs, &scalar::sparse_dot};
  return table;
}

const KernelTable* avx2_table() {
  static const KernelTable* table = cpu_has_avx2() ? avx2_table_compiled() : nullptr;
  return table;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace securescan::kernels
