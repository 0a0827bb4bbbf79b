#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lrsi::simd {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
// Best instruction set supported by both this build and the running CPU.
Isa detected_isa();
// Instruction set currently used by the dispatching entry points.
Isa active_isa();
// Force a particular variant (tests, benchmarks). Throws if unavailable.
void force_isa(Isa isa);
// Undo force_isa().
void reset_isa();

// Row-major matrices with real and imaginary parts stored separately.
struct ConstSplitView {
    const double* re;
    const double* im;
    std::size_t rows;
    std::size_t cols;
    std::size_t ld;
};

struct SplitView {
    double* re;
    double* im;
    std::size_t rows;
    std::size_t cols;
    std::size_t ld;
    operator ConstSplitView() const { return {re, im, rows, cols, ld}; }
};

class SplitMatrix {
public:
    SplitMatrix() = default;
    SplitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), re_(rows * cols, 0.0), im_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::complex<double> get(std::size_t i, std::size_t j) const {
        return {re_[i * cols_ + j], im_[i * cols_ + j]};
    }
    void set(std::size_t i, std::size_t j, std::complex<double> v) {
        re_[i * cols_ + j] = v.real();
        im_[i * cols_ + j] = v.imag();
    }
    double* re_row(std::size_t i) { return re_.data() + i * cols_; }
    double* im_row(std::size_t i) { return im_.data() + i * cols_; }
    const double* re_row(std::size_t i) const { return re_.data() + i * cols_; }
    const double* im_row(std::size_t i) const { return im_.data() + i * cols_; }

    SplitView view() { return {re_.data(), im_.data(), rows_, cols_, cols_}; }
    ConstSplitView view() const { return {re_.data(), im_.data(), rows_, cols_, cols_}; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> re_;
    std::vector<double> im_;
};

// C = A * B (overwrites C). Shapes must agree.
void cgemm(ConstSplitView a, ConstSplitView b, SplitView c);

// out[j] = sum_i |T(i,j)|^2, pairwise reduction over i in a fixed order.
void column_abs2_sums(ConstSplitView t, double* out);

// Variant entry points, exposed for equivalence tests.
namespace scalar {
void cgemm(ConstSplitView a, ConstSplitView b, SplitView c);
void column_abs2_sums(ConstSplitView t, double* out);
}  // namespace scalar
namespace avx2 {
void cgemm(ConstSplitView a, ConstSplitView b, SplitView c);
void column_abs2_sums(ConstSplitView t, double* out);
}  // namespace avx2
namespace neon {
void cgemm(ConstSplitView a, ConstSplitView b, SplitView c);
void column_abs2_sums(ConstSplitView t, double* out);
}  // namespace neon

}  // namespace lrsi::simd
