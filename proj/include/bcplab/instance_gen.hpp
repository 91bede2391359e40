#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bcplab/instance.hpp"
#include "bcplab/rng.hpp"
#include "bcplab/sparse_set.hpp"

namespace bcplab {

/// Declarative generator request, accepted as JSON by the CLI.
struct GenSpec {
    enum class Kind { ov, rubinstein_shape, random };

    Kind kind = Kind::random;
    std::uint64_t n = 1;
    std::uint64_t seed = 0;
    // ov
    std::uint64_t m_ov = 0;
    // rubinstein_shape
    std::uint64_t T = 0, m = 0;
    bool plant = false;
    // random
    std::uint64_t d = 0, size_lo = 0, size_hi = 0;
};

namespace detail {

/// Uniform k-subset of [0, D) by Floyd's algorithm; deterministic in rng state.
inline std::vector<std::uint64_t> random_subset(std::uint64_t D, std::uint64_t k,
                                                SplitMix64& rng) {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(k * 2);
    for (std::uint64_t j = D - k; j < D; ++j) {
        std::uint64_t t = rng.next_below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
}

}  // namespace detail

/// 2n random 0/1 vectors of dimension m_ov as support sets; each coordinate
/// set independently with probability 1/2.
inline BcpInstance gen_ov(std::uint64_t n, std::uint64_t m_ov, std::uint64_t seed) {
    if (n < 1 || m_ov < 1) throw ValidationError("gen_ov needs n ≥ 1 and m_ov ≥ 1");
    BcpInstance inst;
    inst.universe_size = m_ov;
    auto draw = [&](std::uint64_t stream) {
        SplitMix64 rng(derive_seed(seed, stream));
        std::vector<std::uint64_t> ids;
        for (std::uint64_t e = 0; e < m_ov; ++e)
            if (rng.next_bool()) ids.push_back(e);
        return make_sparse_set(std::move(ids), m_ov);
    };
    for (std::uint64_t r = 0; r < n; ++r) inst.red.push_back(draw(r));
    for (std::uint64_t b = 0; b < n; ++b) inst.blue.push_back(draw(n + b));
    return inst;
}

/// The quadratic baseline for orthogonal vectors: first lexicographic
/// disjoint red/blue pair, or none.
inline std::optional<std::pair<std::size_t, std::size_t>> ov_brute_check(const BcpInstance& inst) {
    inst.validate();
    for (std::size_t r = 0; r < inst.red.size(); ++r)
        for (std::size_t b = 0; b < inst.blue.size(); ++b)
            if (intersection_size(inst.red[r], inst.blue[b]) == 0) return {{r, b}};
    return std::nullopt;
}

/// Fixed-shape hard-instance generator: n red (Tm)-subsets and n blue
/// m-subsets of a 2Tm universe. With plant=true, pair (0,0) is constructed
/// with blue ⊂ red, so its Hamming distance is exactly Tm − m = m(T−1) and
/// its Jaccard is exactly 1/T.
inline std::pair<BcpInstance, std::optional<std::pair<std::size_t, std::size_t>>>
gen_rubinstein_shape(std::uint64_t n, std::uint64_t T, std::uint64_t m, bool plant,
                     std::uint64_t seed) {
    if (n < 1 || T < 2 || m < 2) throw ValidationError("gen_rubinstein_shape needs n ≥ 1, T ≥ 2, m ≥ 2");
    const std::uint64_t D = 2 * T * m;
    if (D - 1 > kMaxElementId) throw CapacityError("universe 2Tm exceeds 32-bit id capacity");
    BcpInstance inst;
    inst.universe_size = D;
    auto draw = [&](std::uint64_t stream, std::uint64_t k) {
        SplitMix64 rng(derive_seed(seed, stream));
        return make_sparse_set(detail::random_subset(D, k, rng), D);
    };
    for (std::uint64_t r = 0; r < n; ++r) inst.red.push_back(draw(r, T * m));
    for (std::uint64_t b = 0; b < n; ++b) inst.blue.push_back(draw(n + b, m));

    std::optional<std::pair<std::size_t, std::size_t>> planted;
    if (plant) {
        SplitMix64 rng(derive_seed(seed, 2 * n));
        std::vector<std::uint64_t> sub;
        {
            // blue* is a uniform m-subset of red*'s elements
            const auto& star = inst.red[0].elements;
            auto pick = detail::random_subset(star.size(), m, rng);
            for (std::uint64_t idx : pick) sub.push_back(star[idx]);
        }
        inst.blue[0] = make_sparse_set(std::move(sub), D);
        planted = {{0, 0}};
    }
    return {std::move(inst), planted};
}

/// Unstructured fuzz fodder: sizes uniform in [size_lo, size_hi], elements a
/// uniform subset of that size.
inline BcpInstance gen_random(std::uint64_t n, std::uint64_t d, std::uint64_t size_lo,
                              std::uint64_t size_hi, std::uint64_t seed) {
    if (n < 1 || d < 1) throw ValidationError("gen_random needs n ≥ 1 and d ≥ 1");
    if (!(size_lo <= size_hi && size_hi <= d))
        throw ValidationError("need 0 ≤ size_lo ≤ size_hi ≤ d");
    BcpInstance inst;
    inst.universe_size = d;
    auto draw = [&](std::uint64_t stream) {
        SplitMix64 rng(derive_seed(seed, stream));
        std::uint64_t k = size_lo + rng.next_below(size_hi - size_lo + 1);
        if (k == 0) return make_sparse_set({}, d);
        return make_sparse_set(detail::random_subset(d, k, rng), d);
    };
    for (std::uint64_t r = 0; r < n; ++r) inst.red.push_back(draw(r));
    for (std::uint64_t b = 0; b < n; ++b) inst.blue.push_back(draw(n + b));
    return inst;
}

inline BcpInstance generate(const GenSpec& spec,
                            std::optional<std::pair<std::size_t, std::size_t>>* planted = nullptr) {
    switch (spec.kind) {
        case GenSpec::Kind::ov:
            if (planted) planted->reset();
            return gen_ov(spec.n, spec.m_ov, spec.seed);
        case GenSpec::Kind::rubinstein_shape: {
            auto [inst, p] = gen_rubinstein_shape(spec.n, spec.T, spec.m, spec.plant, spec.seed);
            if (planted) *planted = p;
            return std::move(inst);
        }
        case GenSpec::Kind::random:
            if (planted) planted->reset();
            return gen_random(spec.n, spec.d, spec.size_lo, spec.size_hi, spec.seed);
    }
    throw ValidationError("unknown generator kind");
}

}  // namespace bcplab
