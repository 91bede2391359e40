#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "bcplab/instance.hpp"
#include "bcplab/rng.hpp"
#include "bcplab/similarity.hpp"

namespace bcplab {

/// Calibration of the MinHash LSH scheme: bucket keys are k concatenated
/// MinHashes, repeated L times with fresh hash functions.
struct LshParams {
    std::uint32_t k = 1;         // concatenation length
    std::uint32_t L = 1;         // repetitions / tables
    double rho = 1.0;            // ln(1/j1)/ln(1/j2)
    double eta = 0.01;           // failure budget
    std::uint64_t seed = 0;
    std::uint64_t derived_for_n = 0;
};

/// k = ceil(ln n / ln(1/j2)) makes j2-similar pairs collide with probability
/// ≤ 1/n per repetition; L = ceil(n^rho · ln(1/eta)) makes the overall miss
/// probability for a j1-similar pair at most eta.
inline LshParams derive_lsh_params(std::uint64_t n, const Thresholds& th, double eta,
                                   std::uint64_t seed) {
    if (n < 2) throw ValidationError("derive_lsh_params needs n ≥ 2");
    if (!(0.0 < eta && eta < 1.0)) throw ValidationError("eta must be in (0,1)");
    if (!(0.0 < th.lower && th.upper < 1.0))
        throw ValidationError("LSH calibration needs thresholds strictly inside (0,1)");
    const double j1 = th.upper, j2 = th.lower;
    LshParams p;
    p.k = static_cast<std::uint32_t>(std::ceil(std::log(static_cast<double>(n)) / std::log(1.0 / j2)));
    p.k = std::max<std::uint32_t>(p.k, 1);
    p.rho = std::log(1.0 / j1) / std::log(1.0 / j2);
    p.L = static_cast<std::uint32_t>(
        std::ceil(std::pow(static_cast<double>(n), p.rho) * std::log(1.0 / eta)));
    p.L = std::max<std::uint32_t>(p.L, 1);
    p.eta = eta;
    p.seed = seed;
    p.derived_for_n = n;
    return p;
}

/// Component t is min over x ∈ a of H(seed, rep, t, x). Pure in all arguments.
inline std::vector<std::uint64_t> minhash_signature(const SparseSet& a, std::uint32_t k,
                                                    std::uint64_t rep, std::uint64_t seed) {
    if (a.empty()) throw UndefinedSimilarityError("MinHash signature of an empty set");
    std::vector<std::uint64_t> sig(k, std::numeric_limits<std::uint64_t>::max());
    for (std::uint32_t x : a.elements)
        for (std::uint32_t t = 0; t < k; ++t)
            sig[t] = std::min(sig[t], hash_keyed(seed, rep, t, x));
    return sig;
}

namespace detail {
inline std::uint64_t fold_signature(const std::vector<std::uint64_t>& sig) {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (std::uint64_t v : sig) h = mix64(h ^ v);
    return h;
}
}  // namespace detail

/// Subquadratic decision solver. Per repetition, red and blue sets are
/// bucketed by their k-concatenated signature and candidate pairs sharing a
/// bucket are verified exactly; the first verified pair (lowest repetition,
/// then lowest blue/red index) is returned. Never returns a pair below the
/// lower threshold.
inline DecisionOutcome lsh_decide(const BcpInstance& inst, const Thresholds& th,
                                  const LshParams& params) {
    inst.validate();
    const std::size_t nr = inst.red.size(), nb = inst.blue.size();
    if (params.derived_for_n != nr || nr != nb)
        throw ValidationError("LSH params were not derived for this instance size");
    double expected_rho = std::log(1.0 / th.upper) / std::log(1.0 / th.lower);
    if (std::abs(params.rho - expected_rho) > 1e-12)
        throw ValidationError("LSH params do not match the query thresholds");
    for (const auto* coll : {&inst.red, &inst.blue})
        for (const SparseSet& s : *coll)
            if (s.empty()) throw UndefinedSimilarityError("lsh_decide requires nonempty sets");

    const Rational lower(th.lower);
    for (std::uint32_t rep = 0; rep < params.L; ++rep) {
        std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
        buckets.reserve(nr * 2);
        for (std::size_t r = 0; r < nr; ++r) {
            auto sig = minhash_signature(inst.red[r], params.k, rep, params.seed);
            buckets[detail::fold_signature(sig)].push_back(static_cast<std::uint32_t>(r));
        }
        for (std::size_t b = 0; b < nb; ++b) {
            auto sig = minhash_signature(inst.blue[b], params.k, rep, params.seed);
            auto it = buckets.find(detail::fold_signature(sig));
            if (it == buckets.end()) continue;
            for (std::uint32_t r : it->second) {  // ascending by construction
                Rational sim = jaccard(inst.red[r], inst.blue[b]);
                if (sim >= lower) return DecisionOutcome::pair(r, b, sim);
            }
        }
    }
    return DecisionOutcome::none();
}

}  // namespace bcplab
