#include <algorithm>

#include "lrsi/simd.hpp"
#include "pairwise.hpp"

namespace lrsi::simd::scalar {

void cgemm(ConstSplitView a, ConstSplitView b, SplitView c) {
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* cr = c.re + i * c.ld;
        double* ci = c.im + i * c.ld;
        std::fill(cr, cr + c.cols, 0.0);
        std::fill(ci, ci + c.cols, 0.0);
        for (std::size_t p = 0; p < a.cols; ++p) {
            const double ar = a.re[i * a.ld + p];
            const double ai = a.im[i * a.ld + p];
            const double* br = b.re + p * b.ld;
            const double* bi = b.im + p * b.ld;
            for (std::size_t j = 0; j < b.cols; ++j) {
                cr[j] += ar * br[j] - ai * bi[j];
                ci[j] += ar * bi[j] + ai * br[j];
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
    auto block = [&](std::size_t lo, std::size_t hi, double* dst) {
        std::fill(dst, dst + n, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            const double* r = t.re + i * t.ld;
            const double* m = t.im + i * t.ld;
            for (std::size_t j = 0; j < n; ++j) {
                const double sq = r[j] * r[j];
                dst[j] += sq + m[j] * m[j];
            }
        }
    };
    auto add = [&](double* dst, const double* src) {
        for (std::size_t j = 0; j < n; ++j) dst[j] += src[j];
    };
    detail::pairwise_rows(0, t.rows, out, n, block, add);
}

}  // namespace lrsi::simd::scalar
