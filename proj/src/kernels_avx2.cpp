#include <algorithm>
#include <limits>

#include "kernels_impl.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define REFCON_HAVE_AVX2 1
#include <immintrin.h>
#endif

namespace refcon::kernels::detail {

#if REFCON_HAVE_AVX2

#define REFCON_AVX2 __attribute__((target("avx2,fma")))

namespace {

REFCON_AVX2 double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

REFCON_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4),
                           _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

REFCON_AVX2 void axpy_avx2(double alpha, const double* x, double* y,
                           std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d vy = _mm256_loadu_pd(y + k);
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), vy));
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

REFCON_AVX2 void min_plus_row_avx2(double offset, const double* src,
                                   double* dst, std::size_t n) {
  const __m256d vo = _mm256_set1_pd(offset);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d cand = _mm256_add_pd(vo, _mm256_loadu_pd(src + j));
    // min(dst, cand) keeps dst on ties, matching std::min(dst, cand)
    const __m256d cur = _mm256_loadu_pd(dst + j);
    _mm256_storeu_pd(dst + j, _mm256_min_pd(cand, cur));
  }
  for (; j < n; ++j) dst[j] = std::min(dst[j], offset + src[j]);
}

REFCON_AVX2 bool or_row_avx2(const std::uint64_t* src, std::uint64_t* dst,
                             std::size_t n) {
  __m256i changed = _mm256_setzero_si256();
  std::size_t w = 0;
  for (; w + 4 <= n; w += 4) {
    const __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + w));
    const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + w));
    const __m256i merged = _mm256_or_si256(d, s);
    changed = _mm256_or_si256(changed, _mm256_xor_si256(merged, d));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + w), merged);
  }
  bool any = !_mm256_testz_si256(changed, changed);
  for (; w < n; ++w) {
    const std::uint64_t merged = dst[w] | src[w];
    any |= merged != dst[w];
    dst[w] = merged;
  }
  return any;
}

REFCON_AVX2 void ratio_min_max_avx2(const double* num, const double* den,
                                    std::size_t n, double* min_out,
                                    double* max_out) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  if (n >= 4) {
    __m256d vlo = _mm256_set1_pd(lo);
    __m256d vhi = _mm256_set1_pd(hi);
    for (; k + 4 <= n; k += 4) {
      const __m256d r =
          _mm256_div_pd(_mm256_loadu_pd(num + k), _mm256_loadu_pd(den + k));
      vlo = _mm256_min_pd(vlo, r);
      vhi = _mm256_max_pd(vhi, r);
    }
    alignas(32) double buf[4];
    _mm256_store_pd(buf, vlo);
    lo = std::min({buf[0], buf[1], buf[2], buf[3]});
    _mm256_store_pd(buf, vhi);
    hi = std::max({buf[0], buf[1], buf[2], buf[3]});
  }
  for (; k < n; ++k) {
    const double r = num[k] / den[k];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  *min_out = lo;
  *max_out = hi;
}

}  // namespace

const KernelTable* avx2_table_if_compiled() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, min_plus_row_avx2,
                                 or_row_avx2, ratio_min_max_avx2};
  return &table;
}

#else

const KernelTable* avx2_table_if_compiled() { return nullptr; }

#endif

}  // namespace refcon::kernels::detail
