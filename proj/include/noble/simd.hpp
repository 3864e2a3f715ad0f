#pragma once

#include <cstddef>
#include <string>

namespace noble {

// sum_i w[i] * prod_f factors[f][i] in double precision.
double product_sum_scalar(const double* w, const double* const* factors, int nf, std::size_t n);
double product_sum_avx2(const double* w, const double* const* factors, int nf, std::size_t n);
// Picks AVX2 when the CPU reports avx2 and fma, scalar otherwise.
double product_sum(const double* w, const double* const* factors, int nf, std::size_t n);

bool avx2_available();
std::string simd_backend();

}  // namespace noble
