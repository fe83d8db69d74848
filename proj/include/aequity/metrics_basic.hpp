#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "aequity/common.hpp"

namespace aequity {

/// Mann-Whitney AUROC: the fraction of (positive, negative) pairs where the
/// positive scores higher, ties counted 0.5. Computed through midranks, which
/// is algebraically identical to the pairwise count.
/// Throws StatError when labels contain a single class.
inline double auroc(std::span<const double> scores, std::span<const double> labels) {
    if (scores.size() != labels.size()) throw DataError("auroc: size mismatch");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (double y : labels) {
        if (y != 0.0 && y != 1.0) throw DataError("auroc: labels must be 0/1");
        if (y == 1.0) ++n_pos;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw StatError("AUROC undefined: labels contain a single class");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks over tied score runs; rank sum of positives gives U
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1.0) rank_sum_pos += midrank;
        }
        i = j + 1;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Tolerant variant for internal training loops: single-class labels score
/// 0.5 instead of throwing.
inline double auroc_or_half(std::span<const double> scores, std::span<const double> labels) {
    try {
        return auroc(scores, labels);
    } catch (const StatError&) {
        return 0.5;
    }
}

}  // namespace aequity
