#include <immintrin.h>

#include <algorithm>

#include "lrsi/simd.hpp"
#include "pairwise.hpp"

namespace lrsi::simd::avx2 {
namespace {

// One row of C, columns [j0, cols), scalar tail.
void tail_columns(ConstSplitView a, ConstSplitView b, SplitView c, std::size_t i,
                  std::size_t j0) {
    for (std::size_t j = j0; j < b.cols; ++j) {
        double sr = 0.0, si = 0.0;
        for (std::size_t p = 0; p < a.cols; ++p) {
            const double ar = a.re[i * a.ld + p];
            const double ai = a.im[i * a.ld + p];
            const double br = b.re[p * b.ld + j];
            const double bi = b.im[p * b.ld + j];
            sr += ar * br - ai * bi;
            si += ar * bi + ai * br;
        }
        c.re[i * c.ld + j] = sr;
        c.im[i * c.ld + j] = si;
    }
}

// Rows i and i+1 (or just i when `two` is false), 8 columns starting at j.
template <bool Two>
void block_2x8(ConstSplitView a, ConstSplitView b, SplitView c, std::size_t i, std::size_t j) {
    __m256d r00 = _mm256_setzero_pd(), r01 = _mm256_setzero_pd();
    __m256d i00 = _mm256_setzero_pd(), i01 = _mm256_setzero_pd();
    __m256d r10 = _mm256_setzero_pd(), r11 = _mm256_setzero_pd();
    __m256d i10 = _mm256_setzero_pd(), i11 = _mm256_setzero_pd();
    const double* a0r = a.re + i * a.ld;
    const double* a0i = a.im + i * a.ld;
    const double* a1r = a0r + a.ld;
    const double* a1i = a0i + a.ld;
    for (std::size_t p = 0; p < a.cols; ++p) {
        const double* br = b.re + p * b.ld + j;
        const double* bi = b.im + p * b.ld + j;
        const __m256d br0 = _mm256_loadu_pd(br);
        const __m256d br1 = _mm256_loadu_pd(br + 4);
        const __m256d bi0 = _mm256_loadu_pd(bi);
        const __m256d bi1 = _mm256_loadu_pd(bi + 4);
        {
            const __m256d ar = _mm256_broadcast_sd(a0r + p);
            const __m256d ai = _mm256_broadcast_sd(a0i + p);
            r00 = _mm256_fmadd_pd(ar, br0, r00);
            r00 = _mm256_fnmadd_pd(ai, bi0, r00);
            r01 = _mm256_fmadd_pd(ar, br1, r01);
            r01 = _mm256_fnmadd_pd(ai, bi1, r01);
            i00 = _mm256_fmadd_pd(ar, bi0, i00);
            i00 = _mm256_fmadd_pd(ai, br0, i00);
            i01 = _mm256_fmadd_pd(ar, bi1, i01);
            i01 = _mm256_fmadd_pd(ai, br1, i01);
        }
        if constexpr (Two) {
            const __m256d ar = _mm256_broadcast_sd(a1r + p);
            const __m256d ai = _mm256_broadcast_sd(a1i + p);
            r10 = _mm256_fmadd_pd(ar, br0, r10);
            r10 = _mm256_fnmadd_pd(ai, bi0, r10);
            r11 = _mm256_fmadd_pd(ar, br1, r11);
            r11 = _mm256_fnmadd_pd(ai, bi1, r11);
            i10 = _mm256_fmadd_pd(ar, bi0, i10);
            i10 = _mm256_fmadd_pd(ai, br0, i10);
            i11 = _mm256_fmadd_pd(ar, bi1, i11);
            i11 = _mm256_fmadd_pd(ai, br1, i11);
        }
    }
    double* c0r = c.re + i * c.ld + j;
    double* c0i = c.im + i * c.ld + j;
    _mm256_storeu_pd(c0r, r00);
    _mm256_storeu_pd(c0r + 4, r01);
    _mm256_storeu_pd(c0i, i00);
    _mm256_storeu_pd(c0i + 4, i01);
    if constexpr (Two) {
        _mm256_storeu_pd(c0r + c.ld, r10);
        _mm256_storeu_pd(c0r + c.ld + 4, r11);
        _mm256_storeu_pd(c0i + c.ld, i10);
        _mm256_storeu_pd(c0i + c.ld + 4, i11);
    }
}

}  // namespace

void cgemm(ConstSplitView a, ConstSplitView b, SplitView c) {
    const std::size_t jv = b.cols - b.cols % 8;
    std::size_t i = 0;
    for (; i + 1 < a.rows; i += 2) {
        for (std::size_t j = 0; j < jv; j += 8) block_2x8<true>(a, b, c, i, j);
        tail_columns(a, b, c, i, jv);
        tail_columns(a, b, c, i + 1, jv);
    }
    if (i < a.rows) {
        for (std::size_t j = 0; j < jv; j += 8) block_2x8<false>(a, b, c, i, j);
        tail_columns(a, b, c, i, jv);
    }
}

void column_abs2_sums(ConstSplitView t, double* out) {
    const std::size_t n = t.cols;
    if (t.rows == 0) {
        std::fill(out, out + n, 0.0);
        return;
    }
    const std::size_t nv = n - n % 4;
    auto block = [&](std::size_t lo, std::size_t hi, double* dst) {
        std::fill(dst, dst + n, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            const double* r = t.re + i * t.ld;
            const double* m = t.im + i * t.ld;
            std::size_t j = 0;
            for (; j < nv; j += 4) {
                const __m256d vr = _mm256_loadu_pd(r + j);
                const __m256d vm = _mm256_loadu_pd(m + j);
                __m256d acc = _mm256_loadu_pd(dst + j);
                acc = _mm256_add_pd(acc, _mm256_fmadd_pd(vm, vm, _mm256_mul_pd(vr, vr)));
                _mm256_storeu_pd(dst + j, acc);
            }
            for (; j < n; ++j) dst[j] += r[j] * r[j] + m[j] * m[j];
        }
    };
    auto add = [&](double* dst, const double* src) {
        std::size_t j = 0;
        for (; j < nv; j += 4)
            _mm256_storeu_pd(dst + j, _mm256_add_pd(_mm256_loadu_pd(dst + j), _mm256_loadu_pd(src + j)));
        for (; j < n; ++j) dst[j] += src[j];
    };
    detail::pairwise_rows(0, t.rows, out, n, block, add);
}

}  // namespace lrsi::simd::avx2
