#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "bcplab/errors.hpp"
#include "bcplab/rational.hpp"
#include "bcplab/sparse_set.hpp"

namespace bcplab {

/// J(a,b) = |a∩b| / (|a|+|b|−|a∩b|), exact.
inline Rational jaccard(const SparseSet& a, const SparseSet& b) {
    require_same_universe(a, b);
    if (a.empty() && b.empty())
        throw UndefinedSimilarityError("Jaccard of two empty sets is undefined");
    std::uint64_t x = intersection_size(a, b);
    return make_rational(x, a.size() + b.size() - x);
}

/// Symmetric difference size |a|+|b|−2|a∩b|.
inline std::uint64_t hamming_distance(const SparseSet& a, const SparseSet& b) {
    std::uint64_t x = intersection_size(a, b);
    return a.size() + b.size() - 2 * x;
}

/// Hamming→Jaccard identity: (|a|+|b|−d_H) / (|a|+|b|+d_H).
inline Rational jaccard_from_hamming(std::uint64_t size_a, std::uint64_t size_b,
                                     std::uint64_t dh) {
    std::uint64_t total = size_a + size_b;
    if (dh > total)
        throw ValidationError("Hamming distance exceeds |a|+|b| (negative intersection)");
    if ((total - dh) % 2 != 0)
        throw ValidationError("|a|+|b|−d_H must be even (intersection integrality)");
    if (total + dh == 0)
        throw UndefinedSimilarityError("Jaccard of two empty sets is undefined");
    return make_rational(total - dh, total + dh);
}

/// BB(a,b) = |a∩b| / max(|a|,|b|).
inline Rational braun_blanquet(const SparseSet& a, const SparseSet& b) {
    require_same_universe(a, b);
    if (a.empty() && b.empty())
        throw UndefinedSimilarityError("Braun-Blanquet of two empty sets is undefined");
    std::uint64_t x = intersection_size(a, b);
    return make_rational(x, std::max(a.size(), b.size()));
}

}  // namespace bcplab
