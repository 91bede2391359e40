#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bcplab/instance.hpp"
#include "bcplab/parallel.hpp"
#include "bcplab/rational.hpp"
#include "bcplab/similarity.hpp"
#include "bcplab/sparse_set.hpp"

namespace bcplab {

enum class Measure { jaccard, braun_blanquet };

namespace detail {

struct PairResult {
    std::size_t r = 0, b = 0;
    std::uint64_t num = 0, den = 1;

    // a/b > c/d via 128-bit cross multiplication; exact.
    bool better_than(const PairResult& other) const {
        using u128 = unsigned __int128;
        return static_cast<u128>(num) * other.den > static_cast<u128>(other.num) * den;
    }
    bool same_value(const PairResult& other) const {
        using u128 = unsigned __int128;
        return static_cast<u128>(num) * other.den == static_cast<u128>(other.num) * den;
    }
};

inline PairResult eval_pair(std::uint64_t x, std::uint64_t sa, std::uint64_t sb,
                            Measure measure) {
    PairResult p;
    p.num = x;
    p.den = measure == Measure::jaccard ? sa + sb - x : std::max(sa, sb);
    return p;
}

// Dense representation pays off when sets are not much sparser than the
// word count of the universe.
inline bool use_dense_scan(const BcpInstance& inst) {
    std::uint64_t words = (inst.universe_size + 63) / 64;
    std::size_t nsets = inst.red.size() + inst.blue.size();
    if (words * nsets * 8 > (3ULL << 29)) return false;  // 1.5 GiB cap on bit rows
    std::uint64_t total_ids = 0;
    for (const auto& s : inst.red) total_ids += s.size();
    for (const auto& s : inst.blue) total_ids += s.size();
    std::uint64_t avg = total_ids / nsets;
    return words <= 16 || words <= 4 * avg;
}

}  // namespace detail

/// Exhaustive argmax over A×B; ties broken by smallest (red, blue) index pair.
/// The ground-truth oracle for every probabilistic component.
inline std::pair<std::pair<std::size_t, std::size_t>, Rational> brute_force_max(
    const BcpInstance& inst, Measure measure = Measure::jaccard) {
    inst.validate();
    for (const auto* coll : {&inst.red, &inst.blue})
        for (const SparseSet& s : *coll)
            if (s.empty())
                throw UndefinedSimilarityError("brute force requires nonempty sets");

    const std::size_t nr = inst.red.size(), nb = inst.blue.size();
    bool dense = detail::use_dense_scan(inst);
    std::vector<DenseBits> red_bits, blue_bits;
    if (dense) {
        red_bits.reserve(nr);
        blue_bits.reserve(nb);
        for (const auto& s : inst.red) red_bits.emplace_back(s, inst.universe_size);
        for (const auto& s : inst.blue) blue_bits.emplace_back(s, inst.universe_size);
    }

    unsigned workers = thread_budget();
    std::vector<detail::PairResult> best_per_chunk(std::max<std::size_t>(workers, 1));
    for (auto& p : best_per_chunk) p = {static_cast<std::size_t>(-1), 0, 0, 1};

    parallel_chunks(nr, [&](unsigned chunk, std::size_t lo, std::size_t hi) {
        detail::PairResult best{static_cast<std::size_t>(-1), 0, 0, 1};
        bool have = false;
        for (std::size_t r = lo; r < hi; ++r) {
            for (std::size_t b = 0; b < nb; ++b) {
                std::uint64_t x = dense
                    ? DenseBits::intersection_popcount(red_bits[r], blue_bits[b])
                    : intersection_size(inst.red[r], inst.blue[b]);
                auto cand = detail::eval_pair(x, inst.red[r].size(), inst.blue[b].size(), measure);
                cand.r = r;
                cand.b = b;
                if (!have || cand.better_than(best)) {
                    best = cand;
                    have = true;
                }
            }
        }
        best_per_chunk[chunk] = best;
    });

    // Deterministic reduction: value first, then lexicographic (r, b). Chunks
    // cover ascending red ranges, so scanning in chunk order preserves the
    // tie-break of the single-threaded scan.
    detail::PairResult best = best_per_chunk[0];
    for (std::size_t c = 1; c < best_per_chunk.size(); ++c) {
        const auto& cand = best_per_chunk[c];
        if (cand.r == static_cast<std::size_t>(-1)) continue;
        if (best.r == static_cast<std::size_t>(-1) || cand.better_than(best)) best = cand;
    }
    return {{best.r, best.b}, make_rational(best.num, best.den)};
}

/// Decision semantics: report the max pair whenever its similarity reaches the
/// lower threshold (covers both the certain case ≥ upper and the gray zone),
/// otherwise report none.
inline DecisionOutcome brute_force_decide(const BcpInstance& inst, const Thresholds& th,
                                          Measure measure = Measure::jaccard) {
    if (th.units != Thresholds::Units::similarity)
        throw ValidationError("brute_force_decide expects similarity thresholds");
    auto [pair, sim] = brute_force_max(inst, measure);
    if (sim >= Rational(th.lower)) return DecisionOutcome::pair(pair.first, pair.second, sim);
    return DecisionOutcome::none();
}

}  // namespace bcplab
