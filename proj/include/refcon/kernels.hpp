#pragma once

// Data-parallel inner loops shared by the graph, LP and index code.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The variant is chosen once at runtime from CPU
// features; setting REFCON_SIMD=scalar forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>

namespace refcon::kernels {

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // dst[j] = min(dst[j], offset + src[j])
  void (*min_plus_row)(double offset, const double* src, double* dst,
                       std::size_t n);
  // dst |= src; returns true when any bit of dst changed
  bool (*or_row)(const std::uint64_t* src, std::uint64_t* dst, std::size_t n);
  // min and max of num[k] / den[k]
  void (*ratio_min_max)(const double* num, const double* den, std::size_t n,
                        double* min_out, double* max_out);
};

const KernelTable& scalar_kernels();

// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();

// The table used by the library.
const KernelTable& active();

// Overrides the runtime choice (tests and benchmarking). Passing nullptr
// restores automatic selection.
void set_active(const KernelTable* table);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}

inline void min_plus_row(double offset, std::span<const double> src,
                         std::span<double> dst) {
  active().min_plus_row(offset, src.data(), dst.data(), dst.size());
}

inline bool or_row(std::span<const std::uint64_t> src,
                   std::span<std::uint64_t> dst) {
  return active().or_row(src.data(), dst.data(), dst.size());
}

struct RatioRange {
  double min;
  double max;
};

inline RatioRange ratio_min_max(std::span<const double> num,
                                std::span<const double> den) {
  RatioRange r{};
  active().ratio_min_max(num.data(), den.data(), num.size(), &r.min, &r.max);
  return r;
}

}  // namespace refcon::kernels
