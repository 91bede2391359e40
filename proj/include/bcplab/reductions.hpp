#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcplab/instance.hpp"
#include "bcplab/param_plan.hpp"
#include "bcplab/rng.hpp"
#include "bcplab/similarity.hpp"

namespace bcplab {

/// One record per applied reduction stage; the chain is a verifiable
/// certificate of the composed pipeline. Thresholds are (upper, lower) and
/// present only when the stage was driven by a plan.
struct TraceStage {
    std::string op_name;
    std::map<std::string, double> params;
    std::uint64_t universe_before = 0;
    std::uint64_t universe_after = 0;
    std::optional<std::pair<double, double>> thresholds_before;
    std::optional<std::pair<double, double>> thresholds_after;
};

struct ReductionTrace {
    std::vector<TraceStage> stages;
};

namespace detail {
inline SparseSet extend_with_fresh(const SparseSet& s, std::uint64_t old_d, std::uint64_t ell) {
    std::vector<std::uint32_t> ids = s.elements;
    ids.reserve(ids.size() + ell);
    for (std::uint64_t t = 0; t < ell; ++t)
        ids.push_back(static_cast<std::uint32_t>(old_d + t));  // fresh ids sort above old ones
    return sparse_set_from_sorted(std::move(ids), old_d + ell);
}

inline SparseSet rehome(const SparseSet& s, std::uint64_t new_d) {
    return sparse_set_from_sorted(s.elements, new_d);
}
}  // namespace detail

/// g: append ell fresh universe elements to every set of both colors. Every
/// pair's Jaccard moves to (x+ell)/(|a|+|b|-x+ell).
inline BcpInstance add_common(const BcpInstance& inst, std::uint64_t ell) {
    inst.validate();
    std::uint64_t d = inst.universe_size;
    if (d + ell - 1 > kMaxElementId)
        throw CapacityError("add_common would exceed 32-bit id capacity");
    BcpInstance out;
    out.universe_size = d + ell;
    out.red.reserve(inst.red.size());
    out.blue.reserve(inst.blue.size());
    for (const auto& s : inst.red) out.red.push_back(detail::extend_with_fresh(s, d, ell));
    for (const auto& s : inst.blue) out.blue.push_back(detail::extend_with_fresh(s, d, ell));
    return out;
}

/// h: same as add_common but only red sets gain the fresh elements; Jaccard
/// moves to x/(|a|+|b|-x+ell).
inline BcpInstance add_red(const BcpInstance& inst, std::uint64_t ell) {
    inst.validate();
    std::uint64_t d = inst.universe_size;
    if (d + ell - 1 > kMaxElementId)
        throw CapacityError("add_red would exceed 32-bit id capacity");
    BcpInstance out;
    out.universe_size = d + ell;
    out.red.reserve(inst.red.size());
    out.blue.reserve(inst.blue.size());
    for (const auto& s : inst.red) out.red.push_back(detail::extend_with_fresh(s, d, ell));
    for (const auto& s : inst.blue) out.blue.push_back(detail::rehome(s, d + ell));
    return out;
}

/// Tensor a set with itself: id i·d+j for every (i,j) in a×a, universe d².
/// Sizes and intersections square exactly.
inline SparseSet square(const SparseSet& a) {
    std::uint64_t d = a.universe_size;
    if (d > 65536) throw CapacityError("squared universe would exceed 32-bit id capacity");
    std::vector<std::uint32_t> ids;
    ids.reserve(a.size() * a.size());
    for (std::uint32_t i : a.elements)
        for (std::uint32_t j : a.elements)
            ids.push_back(static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) * d + j));
    return sparse_set_from_sorted(std::move(ids), d * d);  // row-major order is already sorted
}

/// Closed form for i exact squarings of a pair with |a∩b|=x, |a|=y, |b|=z:
/// x^(2^i) / (y^(2^i) + z^(2^i) − x^(2^i)).
inline Rational jaccard_after_pure_squaring(std::uint64_t x, std::uint64_t y, std::uint64_t z,
                                            std::uint32_t i) {
    if (x > std::min(y, z)) throw ValidationError("intersection exceeds a set size");
    if (y == 0 && z == 0) throw UndefinedSimilarityError("Jaccard of two empty sets is undefined");
    BigInt X = pow2i(BigInt(x), i);
    BigInt Y = pow2i(BigInt(y), i);
    BigInt Z = pow2i(BigInt(z), i);
    return Rational(X, Y + Z - X);
}

/// s independent uniform draws from [0,d), with replacement. Positions of the
/// descriptor form the universe of sampled sets.
struct SampleDescriptor {
    std::vector<std::uint64_t> ids;
    std::uint64_t universe = 0;  // the ids' source universe, not the output one
};

inline SampleDescriptor draw_sample(std::uint64_t d, std::uint64_t s, std::uint64_t seed) {
    if (d < 1 || s < 1) throw ValidationError("draw_sample needs d ≥ 1 and s ≥ 1");
    SampleDescriptor desc;
    desc.universe = d;
    desc.ids.reserve(s);
    SplitMix64 rng(seed);
    for (std::uint64_t t = 0; t < s; ++t) desc.ids.push_back(rng.next_below(d));
    return desc;
}

/// Positional subsampling: output position t is present iff sample[t] ∈ a.
/// Duplicate draws stay distinct positions, so the same descriptor applied to
/// two sets preserves their intersection structure.
inline SparseSet apply_sample(const SparseSet& a, const SampleDescriptor& sample) {
    if (sample.universe != a.universe_size)
        throw ValidationError("sample was drawn from a different universe");
    if (sample.ids.size() - 1 > kMaxElementId)
        throw CapacityError("sample length exceeds 32-bit id capacity");
    std::vector<std::uint32_t> ids;
    for (std::size_t t = 0; t < sample.ids.size(); ++t)
        if (a.contains(sample.ids[t])) ids.push_back(static_cast<std::uint32_t>(t));
    return sparse_set_from_sorted(std::move(ids), sample.ids.size());
}

namespace detail {

/// One squaring-and-sampling round applied to the whole instance without
/// materializing the squared sets: position q = hi·d+lo belongs to square(a)
/// iff hi ∈ a and lo ∈ a. Membership goes through per-set bitsets (or a single
/// word when the universe is small).
inline BcpInstance square_sample_round(const BcpInstance& inst, std::uint64_t s_j,
                                       std::uint64_t seed) {
    if (s_j < 1) throw ValidationError("sample size must be positive");
    if (s_j - 1 > kMaxElementId) throw CapacityError("sample size exceeds 32-bit id capacity");
    std::uint64_t d = inst.universe_size;
    if (d > kMaxElementId) throw CapacityError("universe too large to square");

    std::vector<std::uint32_t> hi(s_j), lo(s_j);
    {
        SplitMix64 rng(seed);
        for (std::uint64_t t = 0; t < s_j; ++t) {
            std::uint64_t q = rng.next_below(d * d);
            hi[t] = static_cast<std::uint32_t>(q / d);
            lo[t] = static_cast<std::uint32_t>(q % d);
        }
    }

    BcpInstance out;
    out.universe_size = s_j;
    auto transform = [&](const SparseSet& s) {
        std::vector<std::uint32_t> ids;
        if (d <= 64) {
            std::uint64_t mask = 0;
            for (std::uint32_t e : s.elements) mask |= 1ULL << e;
            for (std::uint64_t t = 0; t < s_j; ++t)
                if ((mask >> hi[t]) & (mask >> lo[t]) & 1u)
                    ids.push_back(static_cast<std::uint32_t>(t));
        } else {
            DenseBits bits(s, d);
            for (std::uint64_t t = 0; t < s_j; ++t)
                if (bits.test(hi[t]) && bits.test(lo[t]))
                    ids.push_back(static_cast<std::uint32_t>(t));
        }
        return sparse_set_from_sorted(std::move(ids), s_j);
    };
    out.red.reserve(inst.red.size());
    out.blue.reserve(inst.blue.size());
    for (const auto& s : inst.red) out.red.push_back(transform(s));
    for (const auto& s : inst.blue) out.blue.push_back(transform(s));
    return out;
}

}  // namespace detail

/// f iterated: per round, square every set (universe d→d²), then apply one
/// shared positional sample of the round's size (universe d²→s_j).
inline std::pair<BcpInstance, ReductionTrace> square_and_sample(
    const BcpInstance& inst, std::uint32_t iterations,
    const std::vector<std::uint64_t>& sample_sizes, std::uint64_t seed) {
    inst.validate();
    if (iterations < 1) throw ValidationError("square_and_sample needs iterations ≥ 1");
    if (sample_sizes.size() != iterations)
        throw ValidationError("need one sample size per iteration");
    BcpInstance cur = inst;
    ReductionTrace trace;
    for (std::uint32_t j = 1; j <= iterations; ++j) {
        std::uint64_t round_seed = derive_seed(seed, j);
        TraceStage stage;
        stage.op_name = "square_and_sample";
        stage.params = {{"iteration", static_cast<double>(j)},
                        {"sample_size", static_cast<double>(sample_sizes[j - 1])},
                        {"seed", static_cast<double>(round_seed)}};
        stage.universe_before = cur.universe_size;
        cur = detail::square_sample_round(cur, sample_sizes[j - 1], round_seed);
        stage.universe_after = cur.universe_size;
        trace.stages.push_back(std::move(stage));
    }
    return {std::move(cur), std::move(trace)};
}

/// Concentration band of the sampled Jaccard around the pure-squaring value
/// E: [((1−γ)/(1+4γ))^(2^i)·E, ((1+γ)/(1−4γ))^(2^i)·E].
inline std::pair<double, double> lemma43_envelope(std::uint64_t x, std::uint64_t y,
                                                  std::uint64_t z, std::uint32_t i,
                                                  double gamma) {
    if (!(gamma >= 0.0 && gamma < 0.25)) throw ValidationError("gamma must be in [0, 1/4)");
    double E = to_double(jaccard_after_pure_squaring(x, y, z, i));
    double e = std::exp2(i);
    double low = std::pow((1.0 - gamma) / (1.0 + 4.0 * gamma), e) * E;
    double high = std::pow((1.0 + gamma) / (1.0 - 4.0 * gamma), e) * E;
    return {low, high};
}

/// The composed hardening pipeline: add_common(ell_delta) → i rounds of
/// squaring-and-sampling → add_red(ell_alpha), all constants from the plan.
/// The input must have the fixed shape the plan was built for: n red sets of
/// size Tm, n blue sets of size m, universe 2Tm. The trace's final upper
/// threshold equals plan.j1 by construction.
inline std::pair<BcpInstance, ReductionTrace> harden_pipeline(const BcpInstance& inst,
                                                              const ParamPlan& plan,
                                                              std::uint64_t seed) {
    inst.validate();
    const std::uint64_t T = plan.T, m = plan.m;
    if (inst.red.size() != plan.n || inst.blue.size() != plan.n)
        throw ValidationError("instance size differs from the plan's n");
    if (inst.universe_size != 2 * T * m)
        throw ValidationError("instance universe must be 2Tm");
    for (const auto& s : inst.red)
        if (s.size() != T * m) throw ValidationError("every red set must have size Tm");
    for (const auto& s : inst.blue)
        if (s.size() != m) throw ValidationError("every blue set must have size m");

    double Td = static_cast<double>(T);
    std::pair<double, double> base{1.0 / Td, 1.0 / (2.0 * Td + 1.0)};
    ReductionTrace trace;

    std::uint64_t ell_delta = ell_for_delta(T * m, plan.delta);
    TraceStage g;
    g.op_name = "add_common";
    g.params = {{"ell", static_cast<double>(ell_delta)}, {"delta", plan.delta}};
    g.universe_before = inst.universe_size;
    g.thresholds_before = base;
    BcpInstance cur = add_common(inst, ell_delta);
    g.universe_after = cur.universe_size;
    g.thresholds_after = {plan.stage_thresholds.j1d, plan.stage_thresholds.j2d};
    trace.stages.push_back(std::move(g));

    if (plan.i >= 1) {
        auto prev = trace.stages.back().thresholds_after;
        auto [sampled, ftrace] = square_and_sample(cur, plan.i, plan.sample_sizes, seed);
        cur = std::move(sampled);
        for (std::uint32_t j = 1; j <= plan.i; ++j) {
            TraceStage& stage = ftrace.stages[j - 1];
            stage.thresholds_before = prev;
            auto [j1s, j2s] = stage_thresholds_after_f(plan.delta, T, j, plan.gamma);
            stage.thresholds_after = {j1s, j2s};
            prev = stage.thresholds_after;
            trace.stages.push_back(std::move(stage));
        }
    }

    std::uint64_t ell_alpha = ell_for_alpha(cur.max_set_size(), plan.alpha);
    TraceStage h;
    h.op_name = "add_red";
    h.params = {{"ell", static_cast<double>(ell_alpha)}, {"alpha", plan.alpha}};
    h.universe_before = cur.universe_size;
    h.thresholds_before = {plan.stage_thresholds.j1s, plan.stage_thresholds.j2s};
    cur = add_red(cur, ell_alpha);
    h.universe_after = cur.universe_size;
    h.thresholds_after = {plan.j1, plan.stage_thresholds.j2a};
    trace.stages.push_back(std::move(h));

    return {std::move(cur), std::move(trace)};
}

}  // namespace bcplab
