#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bcplab/instance_gen.hpp"
#include "bcplab/reductions.hpp"

using namespace bcplab;

namespace {
BcpInstance pair_inst(std::uint64_t d, std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
    BcpInstance inst;
    inst.universe_size = d;
    inst.red.push_back(make_sparse_set(std::move(a), d));
    inst.blue.push_back(make_sparse_set(std::move(b), d));
    return inst;
}

SparseSet subset_of_universe(std::uint64_t mask, std::uint64_t d) {
    std::vector<std::uint64_t> ids;
    for (std::uint64_t e = 0; e < d; ++e)
        if ((mask >> e) & 1u) ids.push_back(e);
    return make_sparse_set(ids, d);
}
}  // namespace

TEST_CASE("add_common moves Jaccard to (x+ell)/(|a|+|b|-x+ell)", "[reductions]") {
    auto inst = pair_inst(4, {1}, {2});
    REQUIRE(jaccard(inst.red[0], inst.blue[0]) == 0);
    BcpInstance out = add_common(inst, 2);
    REQUIRE(out.universe_size == 6);
    REQUIRE(jaccard(out.red[0], out.blue[0]) == make_rational(1, 2));

    BcpInstance same = add_common(pair_inst(4, {1, 3}, {1, 3}), 5);
    REQUIRE(jaccard(same.red[0], same.blue[0]) == 1);

    BcpInstance noop = add_common(inst, 0);
    REQUIRE(noop.universe_size == 4);
    REQUIRE(noop.red[0].elements == inst.red[0].elements);
}

TEST_CASE("add_red moves Jaccard to x/(|a|+|b|-x+ell)", "[reductions]") {
    BcpInstance out = add_red(pair_inst(4, {1, 2}, {1, 2}), 2);
    REQUIRE(out.universe_size == 6);
    REQUIRE(jaccard(out.red[0], out.blue[0]) == make_rational(1, 2));

    BcpInstance zero = add_red(pair_inst(4, {1}, {2}), 3);
    REQUIRE(jaccard(zero.red[0], zero.blue[0]) == 0);
}

TEST_CASE("add_common strictly increases and add_red strictly decreases", "[reductions]") {
    SplitMix64 rng(3);
    for (int t = 0; t < 100; ++t) {
        std::uint64_t d = 10;
        auto inst = pair_inst(d, {}, {});
        std::vector<std::uint64_t> ia, ib;
        for (std::uint64_t e = 0; e < d; ++e) {
            if (rng.next_bool()) ia.push_back(e);
            if (rng.next_bool()) ib.push_back(e);
        }
        if (ia.empty()) ia.push_back(0);
        if (ib.empty()) ib.push_back(1);
        inst.red[0] = make_sparse_set(ia, d);
        inst.blue[0] = make_sparse_set(ib, d);
        Rational before = jaccard(inst.red[0], inst.blue[0]);

        BcpInstance g = add_common(inst, 3);
        Rational after_g = jaccard(g.red[0], g.blue[0]);
        bool identical = inst.red[0].elements == inst.blue[0].elements;
        if (!identical) REQUIRE(after_g > before);
        else REQUIRE(after_g == before);

        BcpInstance h = add_red(inst, 3);
        Rational after_h = jaccard(h.red[0], h.blue[0]);
        if (before > 0) REQUIRE(after_h < before);
        else REQUIRE(after_h == 0);
    }
}

TEST_CASE("square is the row-major self product", "[reductions]") {
    SparseSet a = make_sparse_set({0, 2}, 3);
    SparseSet sq = square(a);
    REQUIRE(sq.universe_size == 9);
    REQUIRE(sq.elements == std::vector<std::uint32_t>{0, 2, 6, 8});

    REQUIRE(square(make_sparse_set({}, 4)).universe_size == 16);
    REQUIRE(square(make_sparse_set({}, 4)).empty());

    SparseSet five = make_sparse_set({0, 1, 2, 3, 4}, 6);
    REQUIRE(square(five).size() == 25);

    REQUIRE_THROWS_AS(square(make_sparse_set({0}, 70000)), CapacityError);
}

TEST_CASE("squaring law exhaustive over small universes", "[reductions]") {
    for (std::uint64_t d = 1; d <= 4; ++d) {
        for (std::uint64_t ma = 0; ma < (1ULL << d); ++ma) {
            for (std::uint64_t mb = 0; mb < (1ULL << d); ++mb) {
                if (ma == 0 && mb == 0) continue;
                SparseSet a = subset_of_universe(ma, d), b = subset_of_universe(mb, d);
                std::uint64_t x = intersection_size(a, b);
                REQUIRE(jaccard(square(a), square(b)) ==
                        jaccard_after_pure_squaring(x, a.size(), b.size(), 1));
            }
        }
    }
}

TEST_CASE("jaccard_after_pure_squaring closed form", "[reductions]") {
    REQUIRE(jaccard_after_pure_squaring(2, 3, 3, 1) == make_rational(2, 7));
    REQUIRE(jaccard_after_pure_squaring(2, 3, 4, 0) == make_rational(2, 5));
    for (std::uint32_t i = 0; i < 5; ++i) REQUIRE(jaccard_after_pure_squaring(4, 4, 4, i) == 1);
    REQUIRE_THROWS_AS(jaccard_after_pure_squaring(5, 3, 4, 1), ValidationError);
    REQUIRE_THROWS_AS(jaccard_after_pure_squaring(0, 0, 0, 1), UndefinedSimilarityError);
}

TEST_CASE("draw_sample is deterministic and roughly uniform", "[reductions]") {
    auto s1 = draw_sample(100, 5000, 9);
    auto s2 = draw_sample(100, 5000, 9);
    REQUIRE(s1.ids == s2.ids);

    auto ones = draw_sample(1, 50, 4);
    for (auto id : ones.ids) REQUIRE(id == 0);

    // frequency of one id within 3 sigma of s/d
    std::uint64_t count = 0;
    auto big = draw_sample(10, 100000, 12);
    for (auto id : big.ids)
        if (id == 3) ++count;
    double expect = 10000.0, sigma = std::sqrt(100000 * 0.1 * 0.9);
    REQUIRE(std::abs(static_cast<double>(count) - expect) <= 3 * sigma);
}

TEST_CASE("apply_sample is positional", "[reductions]") {
    SparseSet a = make_sparse_set({1, 3}, 4);
    SampleDescriptor sample{{3, 0, 1, 3}, 4};
    SparseSet out = apply_sample(a, sample);
    REQUIRE(out.universe_size == 4);
    REQUIRE(out.elements == std::vector<std::uint32_t>{0, 2, 3});

    SparseSet full = make_sparse_set({0, 1, 2, 3}, 4);
    REQUIRE(apply_sample(full, sample).size() == 4);
    REQUIRE(apply_sample(make_sparse_set({}, 4), sample).empty());

    SampleDescriptor other{{0}, 9};
    REQUIRE_THROWS_AS(apply_sample(a, other), ValidationError);
}

TEST_CASE("shared sample preserves intersections", "[reductions]") {
    SplitMix64 rng(8);
    for (int t = 0; t < 50; ++t) {
        std::uint64_t d = 40;
        std::vector<std::uint64_t> ia, ib, ix;
        for (std::uint64_t e = 0; e < d; ++e) {
            bool in_a = rng.next_bool(), in_b = rng.next_bool();
            if (in_a) ia.push_back(e);
            if (in_b) ib.push_back(e);
            if (in_a && in_b) ix.push_back(e);
        }
        SparseSet a = make_sparse_set(ia, d), b = make_sparse_set(ib, d);
        SparseSet both = make_sparse_set(ix, d);
        auto sample = draw_sample(d, 200, derive_seed(77, t));
        REQUIRE(intersection_size(apply_sample(a, sample), apply_sample(b, sample)) ==
                apply_sample(both, sample).size());
    }
}

TEST_CASE("full-enumeration sampling equals pure squaring", "[reductions]") {
    std::uint64_t d = 5;
    SparseSet a = make_sparse_set({0, 1, 4}, d);
    SparseSet b = make_sparse_set({1, 2, 4}, d);
    SampleDescriptor identity;
    identity.universe = d * d;
    for (std::uint64_t q = 0; q < d * d; ++q) identity.ids.push_back(q);
    SparseSet sa = apply_sample(square(a), identity);
    SparseSet sb = apply_sample(square(b), identity);
    std::uint64_t x = intersection_size(a, b);
    REQUIRE(jaccard(sa, sb) == jaccard_after_pure_squaring(x, a.size(), b.size(), 1));
}

TEST_CASE("square_and_sample keeps identical sets identical", "[reductions]") {
    BcpInstance inst = pair_inst(12, {0, 3, 7, 9}, {0, 3, 7, 9});
    auto [out, trace] = square_and_sample(inst, 2, {60, 50}, 31);
    REQUIRE(out.red[0].elements == out.blue[0].elements);
    REQUIRE(out.universe_size == 50);
    REQUIRE(trace.stages.size() == 2);
    REQUIRE(trace.stages[0].universe_before == 12);
    REQUIRE(trace.stages[0].universe_after == 60);
    REQUIRE(trace.stages[1].universe_before == 60);
    REQUIRE(trace.stages[1].universe_after == 50);
    REQUIRE_THROWS_AS(square_and_sample(inst, 2, {60}, 31), ValidationError);
}

TEST_CASE("square_and_sample matches per-set square+apply_sample", "[reductions]") {
    // one round must equal the reference composition with the same seed
    BcpInstance inst = pair_inst(9, {0, 2, 5, 8}, {1, 2, 5});
    std::uint64_t seed = 77;
    auto [out, trace] = square_and_sample(inst, 1, {40}, seed);
    (void)trace;
    auto sample = draw_sample(81, 40, derive_seed(seed, 1));
    REQUIRE(out.red[0].elements == apply_sample(square(inst.red[0]), sample).elements);
    REQUIRE(out.blue[0].elements == apply_sample(square(inst.blue[0]), sample).elements);
}

TEST_CASE("lemma43_envelope evaluates the band", "[reductions]") {
    auto [low, high] = lemma43_envelope(2, 3, 3, 1, 0.05);
    REQUIRE(low == Catch::Approx(0.1790674603174603).epsilon(1e-12));
    REQUIRE(high == Catch::Approx(0.4921875).epsilon(1e-12));
    double E = 2.0 / 7.0;
    REQUIRE(low < E);
    REQUIRE(high > E);

    auto [l0, h0] = lemma43_envelope(2, 3, 3, 1, 0.0);
    REQUIRE(l0 == Catch::Approx(E).epsilon(1e-12));
    REQUIRE(h0 == Catch::Approx(E).epsilon(1e-12));

    REQUIRE_THROWS_AS(lemma43_envelope(2, 3, 3, 1, 0.3), ValidationError);
}

TEST_CASE("harden_pipeline produces a consistent certificate", "[reductions]") {
    ParamPlan plan = build_plan(0.9, 2, 8, 32, 0.09, 0.02, 0.1);
    auto [inst, planted] = gen_rubinstein_shape(32, 2, 8, true, 17);
    REQUIRE(planted == std::pair<std::size_t, std::size_t>{0, 0});
    auto [hard, trace] = harden_pipeline(inst, plan, 4242);

    REQUIRE(trace.stages.front().op_name == "add_common");
    REQUIRE(trace.stages.back().op_name == "add_red");
    REQUIRE(trace.stages.size() == 2 + plan.i);
    for (std::size_t t = 1; t < trace.stages.size(); ++t)
        REQUIRE(trace.stages[t].universe_before == trace.stages[t - 1].universe_after);
    for (const auto& st : trace.stages) {
        REQUIRE(st.thresholds_after.has_value());
        REQUIRE(st.thresholds_after->first > 0);
        REQUIRE(st.thresholds_after->first <= 1.0);
        REQUIRE(st.thresholds_after->second > 0);
        REQUIRE(st.thresholds_after->second <= 1.0);
    }
    REQUIRE(trace.stages.front().thresholds_before->first == Catch::Approx(0.5));
    REQUIRE(trace.stages.front().thresholds_before->second == Catch::Approx(0.2));
    REQUIRE(trace.stages.back().thresholds_after->first == plan.j1);  // exact by construction
    REQUIRE(hard.universe_size == trace.stages.back().universe_after);
    REQUIRE(static_cast<double>(hard.universe_size) <= plan.universe_bound);

    // shape mismatch rejected
    auto [wrong, wp] = gen_rubinstein_shape(16, 2, 8, false, 3);
    (void)wp;
    REQUIRE_THROWS_AS(harden_pipeline(wrong, plan, 1), ValidationError);
}

TEST_CASE("harden_pipeline trace thresholds match the stage formulas", "[reductions]") {
    ParamPlan plan = build_plan(0.9, 2, 8, 32, 0.09, 0.02, 0.1);
    auto [inst, planted] = gen_rubinstein_shape(32, 2, 8, true, 21);
    (void)planted;
    auto [hard, trace] = harden_pipeline(inst, plan, 99);
    (void)hard;
    auto [j1d, j2d] = stage_thresholds_after_g(plan.delta, plan.T);
    REQUIRE(trace.stages[0].thresholds_after->first == Catch::Approx(j1d).margin(1e-12));
    REQUIRE(trace.stages[0].thresholds_after->second == Catch::Approx(j2d).margin(1e-12));
    auto [j1s, j2s] = stage_thresholds_after_f(plan.delta, plan.T, plan.i, plan.gamma);
    REQUIRE(trace.stages[plan.i].thresholds_after->first == Catch::Approx(j1s).margin(1e-12));
    REQUIRE(trace.stages[plan.i].thresholds_after->second == Catch::Approx(j2s).margin(1e-12));
    REQUIRE(trace.stages.back().thresholds_after->second ==
            Catch::Approx(plan.stage_thresholds.j2a).margin(1e-12));
}
