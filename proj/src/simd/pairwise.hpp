#pragma once

#include <cstddef>
#include <vector>

namespace lrsi::simd::detail {

inline constexpr std::size_t kPairwiseBlock = 16;

// Pairwise reduction over rows [lo, hi). `block(lo, hi, dst)` writes the
// linear sum of a short row range into dst; `add(dst, src)` accumulates.
// Split points depend only on the row count, so every variant reduces in
// the same order.
template <class Block, class Add>
void pairwise_rows(std::size_t lo, std::size_t hi, double* dst, std::size_t width,
                   const Block& block, const Add& add) {
    if (hi - lo <= kPairwiseBlock) {
        block(lo, hi, dst);
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::vector<double> tmp(width);
    pairwise_rows(lo, mid, dst, width, block, add);
    pairwise_rows(mid, hi, tmp.data(), width, block, add);
    add(dst, tmp.data());
}

}  // namespace lrsi::simd::detail
