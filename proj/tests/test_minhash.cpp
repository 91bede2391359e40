#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bcplab/instance_gen.hpp"
#include "bcplab/minhash.hpp"

using namespace bcplab;

TEST_CASE("derive_lsh_params evaluates the calibration formulas", "[minhash]") {
    LshParams p = derive_lsh_params(1024, Thresholds(0.5, 0.2), 0.01, 7);
    REQUIRE(p.k == 5);
    REQUIRE(p.rho == Catch::Approx(0.43067655807339306).epsilon(1e-12));
    REQUIRE(p.L == 92);
    REQUIRE(p.derived_for_n == 1024);
    // j2^k <= 1/n
    REQUIRE(std::pow(0.2, p.k) <= 1.0 / 1024 + 1e-15);

    LshParams q = derive_lsh_params(2, Thresholds(0.9, 0.5), 0.5, 7);
    REQUIRE(q.k == 1);
    REQUIRE(q.L == 1);
}

TEST_CASE("derive_lsh_params tolerates a vanishing gap", "[minhash]") {
    double j = 0.5;
    LshParams p = derive_lsh_params(64, Thresholds(j, j * (1 - 1e-9)), 0.1, 1);
    REQUIRE(p.rho <= 1.0 + 1e-6);
    REQUIRE(p.L >= 1);
}

TEST_CASE("derive_lsh_params validates the domain", "[minhash]") {
    REQUIRE_THROWS_AS(derive_lsh_params(1, Thresholds(0.5, 0.2), 0.01, 0), ValidationError);
    REQUIRE_THROWS_AS(derive_lsh_params(16, Thresholds(1.0, 0.2), 0.01, 0), ValidationError);
    REQUIRE_THROWS_AS(derive_lsh_params(16, Thresholds(0.5, 0.2), 1.5, 0), ValidationError);
}

TEST_CASE("minhash_signature structure", "[minhash]") {
    SparseSet x = make_sparse_set({5}, 10);
    auto sig = minhash_signature(x, 3, 2, 99);
    for (std::uint32_t t = 0; t < 3; ++t) REQUIRE(sig[t] == hash_keyed(99, 2, t, 5));

    SparseSet a = make_sparse_set({1, 4}, 10);
    SparseSet b = make_sparse_set({2, 7}, 10);
    SparseSet u = make_sparse_set({1, 2, 4, 7}, 10);
    auto sa = minhash_signature(a, 4, 0, 7), sb = minhash_signature(b, 4, 0, 7);
    auto su = minhash_signature(u, 4, 0, 7);
    for (std::uint32_t t = 0; t < 4; ++t) REQUIRE(su[t] == std::min(sa[t], sb[t]));

    REQUIRE(minhash_signature(a, 4, 0, 7) == sa);  // determinism
    REQUIRE_THROWS_AS(minhash_signature(make_sparse_set({}, 4), 2, 0, 7),
                      UndefinedSimilarityError);
}

TEST_CASE("single-hash collision rate tracks Jaccard within 3 sigma", "[minhash]") {
    // J = 1/2 via |a|=2, |b|=1, x=1
    SparseSet a = make_sparse_set({0, 1}, 3);
    SparseSet b = make_sparse_set({0, 2}, 3);
    REQUIRE(jaccard(a, b) == make_rational(1, 3));
    const std::uint64_t trials = 100000;
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t)
        if (minhash_signature(a, 1, t, 5)[0] == minhash_signature(b, 1, t, 5)[0]) ++hits;
    double rate = static_cast<double>(hits) / trials;
    double expect = 1.0 / 3.0;
    double sigma = std::sqrt(expect * (1 - expect) / trials);
    REQUIRE(std::abs(rate - expect) <= 3 * sigma);
}

TEST_CASE("lsh_decide finds identical planted pairs and rejects disjoint ones", "[minhash]") {
    BcpInstance inst;
    inst.universe_size = 40;
    for (std::uint64_t s = 0; s < 8; ++s) {
        inst.red.push_back(make_sparse_set({s, s + 8, s + 16}, 40));
        inst.blue.push_back(make_sparse_set({s + 20, s + 28, 39 - s}, 40));
    }
    inst.blue[3] = inst.red[3];  // identical cross-color pair
    Thresholds th(0.5, 0.2);
    LshParams params = derive_lsh_params(8, th, 0.01, 77);
    auto out = lsh_decide(inst, th, params);
    REQUIRE(out.found.has_value());
    REQUIRE(*out.achieved_similarity >= Rational(0.2));

    BcpInstance disj;
    disj.universe_size = 40;
    for (std::uint64_t s = 0; s < 8; ++s) {
        disj.red.push_back(make_sparse_set({s}, 40));
        disj.blue.push_back(make_sparse_set({20 + s}, 40));
    }
    REQUIRE_FALSE(lsh_decide(disj, th, derive_lsh_params(8, th, 0.01, 77)).found.has_value());
}

TEST_CASE("lsh_decide never returns a pair below the lower threshold", "[minhash]") {
    Thresholds th(0.6, 0.45);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        BcpInstance inst = gen_random(24, 30, 3, 9, derive_seed(123, seed));
        LshParams params = derive_lsh_params(24, th, 0.2, seed);
        auto out = lsh_decide(inst, th, params);
        if (out.found) {
            Rational j = jaccard(inst.red[out.found->first], inst.blue[out.found->second]);
            REQUIRE(j >= Rational(th.lower));
            REQUIRE(j == *out.achieved_similarity);
        }
    }
}

TEST_CASE("lsh_decide is deterministic and validates params", "[minhash]") {
    auto [inst, planted] = gen_rubinstein_shape(32, 2, 6, true, 5);
    (void)planted;
    Thresholds th(0.5, 0.2);
    LshParams params = derive_lsh_params(32, th, 0.05, 21);
    auto a = lsh_decide(inst, th, params);
    auto b = lsh_decide(inst, th, params);
    REQUIRE(a.found == b.found);

    LshParams wrong_n = derive_lsh_params(16, th, 0.05, 21);
    REQUIRE_THROWS_AS(lsh_decide(inst, th, wrong_n), ValidationError);
    Thresholds other(0.7, 0.2);
    REQUIRE_THROWS_AS(lsh_decide(inst, other, params), ValidationError);
}

TEST_CASE("lsh_decide finds a threshold pair in at least 99 of 100 planted runs", "[minhash]") {
    Thresholds th(0.5, 0.2);
    int found = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto [inst, planted] = gen_rubinstein_shape(64, 2, 10, true, derive_seed(400, seed));
        (void)planted;
        LshParams params = derive_lsh_params(64, th, 0.01, derive_seed(500, seed));
        if (lsh_decide(inst, th, params).found) ++found;
    }
    REQUIRE(found >= 99);
}
