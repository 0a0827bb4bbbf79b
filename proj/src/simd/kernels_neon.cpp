#include <arm_neon.h>

#include <algorithm>

#include "lrsi/simd.hpp"
#include "pairwise.hpp"

namespace lrsi::simd::neon {

void cgemm(ConstSplitView a, ConstSplitView b, SplitView c) {
    const std::size_t jv = b.cols - b.cols % 2;
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* cr = c.re + i * c.ld;
        double* ci = c.im + i * c.ld;
        std::fill(cr, cr + c.cols, 0.0);
        std::fill(ci, ci + c.cols, 0.0);
        for (std::size_t p = 0; p < a.cols; ++p) {
            const double arv = a.re[i * a.ld + p];
            const double aiv = a.im[i * a.ld + p];
            const float64x2_t ar = vdupq_n_f64(arv);
            const float64x2_t ai = vdupq_n_f64(aiv);
            const double* br = b.re + p * b.ld;
            const double* bi = b.im + p * b.ld;
            std::size_t j = 0;
            for (; j < jv; j += 2) {
                const float64x2_t vbr = vld1q_f64(br + j);
                const float64x2_t vbi = vld1q_f64(bi + j);
                float64x2_t vr = vld1q_f64(cr + j);
                float64x2_t vi = vld1q_f64(ci + j);
                vr = vfmaq_f64(vr, ar, vbr);
                vr = vfmsq_f64(vr, ai, vbi);
                vi = vfmaq_f64(vi, ar, vbi);
                vi = vfmaq_f64(vi, ai, vbr);
                vst1q_f64(cr + j, vr);
                vst1q_f64(ci + j, vi);
            }
            for (; j < b.cols; ++j) {
                cr[j] += arv * br[j] - aiv * bi[j];
                ci[j] += arv * bi[j] + aiv * br[j];
            }
        }
    }
}

void column_abs2_sums(ConstSplitView t, double* out) {
    const std::size_t n = t.cols;
    if (t.rows == 0) {
        std::fill(out, out + n, 0.0);
        return;
    }
    const std::size_t nv = n - n % 2;
    auto block = [&](std::size_t lo, std::size_t hi, double* dst) {
        std::fill(dst, dst + n, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            const double* r = t.re + i * t.ld;
            const double* m = t.im + i * t.ld;
            std::size_t j = 0;
            for (; j < nv; j += 2) {
                const float64x2_t vr = vld1q_f64(r + j);
                const float64x2_t vm = vld1q_f64(m + j);
                const float64x2_t sq = vfmaq_f64(vmulq_f64(vr, vr), vm, vm);
                vst1q_f64(dst + j, vaddq_f64(vld1q_f64(dst + j), sq));
            }
            for (; j < n; ++j) dst[j] += r[j] * r[j] + m[j] * m[j];
        }
    };
    auto add = [&](double* dst, const double* src) {
        for (std::size_t j = 0; j < n; ++j) dst[j] += src[j];
    };
    detail::pairwise_rows(0, t.rows, out, n, block, add);
}

}  // namespace lrsi::simd::neon
