#include "noble/simd.hpp"

#include <immintrin.h>

namespace noble {

double product_sum_scalar(const double* w, const double* const* factors, int nf, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double p = w[i];
    for (int f = 0; f < nf; ++f) p *= factors[f][i];
    s += p;
  }
  return s;
}

__attribute__((target("avx2,fma"))) double product_sum_avx2(const double* w, const double* const* factors,
                                                             int nf, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_loadu_pd(w + i);
    for (int f = 0; f < nf; ++f) p = _mm256_mul_pd(p, _mm256_loadu_pd(factors[f] + i));
    acc = _mm256_add_pd(acc, p);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    double p = w[i];
    for (int f = 0; f < nf; ++f) p *= factors[f][i];
    s += p;
  }
  return s;
}

bool avx2_available() {
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
}

double product_sum(const double* w, const double* const* factors, int nf, std::size_t n) {
  return avx2_available() ? product_sum_avx2(w, factors, nf, n) : product_sum_scalar(w, factors, nf, n);
}

std::string simd_backend() { return avx2_available() ? "avx2" : "scalar"; }

}  // namespace noble
