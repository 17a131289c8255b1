#include <algorithm>
#include <limits>

#include "kernels_impl.hpp"

namespace refcon::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void min_plus_row_scalar(double offset, const double* src, double* dst,
                         std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) dst[j] = std::min(dst[j], offset + src[j]);
}

bool or_row_scalar(const std::uint64_t* src, std::uint64_t* dst,
                   std::size_t n) {
  std::uint64_t changed = 0;
  for (std::size_t w = 0; w < n; ++w) {
    const std::uint64_t merged = dst[w] | src[w];
    changed |= merged ^ dst[w];
    dst[w] = merged;
  }
  return changed != 0;
}

void ratio_min_max_scalar(const double* num, const double* den, std::size_t n,
                          double* min_out, double* max_out) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double r = num[k] / den[k];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  *min_out = lo;
  *max_out = hi;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar,
                                 min_plus_row_scalar, or_row_scalar,
                                 ratio_min_max_scalar};
  return table;
}

}  // namespace refcon::kernels
