#include <atomic>
#include <stdexcept>

#include "lrsi/simd.hpp"

namespace lrsi::simd {
namespace {

bool cpu_has(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(LRSI_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(LRSI_HAVE_NEON_TU)
            return true;  // mandatory on AArch64
#else
            return false;
#endif
    }
    return false;
}

Isa best() {
    if (cpu_has(Isa::avx2)) return Isa::avx2;
    if (cpu_has(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{best()};
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

Isa detected_isa() { return best(); }
Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    if (!cpu_has(isa)) throw std::runtime_error(std::string("simd variant unavailable: ") + isa_name(isa));
    current().store(isa, std::memory_order_relaxed);
}

void reset_isa() { current().store(best(), std::memory_order_relaxed); }

static void check_gemm(ConstSplitView a, ConstSplitView b, SplitView c) {
    if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols)
        throw std::invalid_argument("cgemm: shape mismatch");
}

void cgemm(ConstSplitView a, ConstSplitView b, SplitView c) {
    check_gemm(a, b, c);
    switch (active_isa()) {
#if defined(LRSI_HAVE_AVX2_TU)
        case Isa::avx2: avx2::cgemm(a, b, c); return;
#endif
#if defined(LRSI_HAVE_NEON_TU)
        case Isa::neon: neon::cgemm(a, b, c); return;
#endif
        default: scalar::cgemm(a, b, c); return;
    }
}

void column_abs2_sums(ConstSplitView t, double* out) {
    switch (active_isa()) {
#if defined(LRSI_HAVE_AVX2_TU)
        case Isa::avx2: avx2::column_abs2_sums(t, out); return;
#endif
#if defined(LRSI_HAVE_NEON_TU)
        case Isa::neon: neon::column_abs2_sums(t, out); return;
#endif
        default: scalar::column_abs2_sums(t, out); return;
    }
}

}  // namespace lrsi::simd
