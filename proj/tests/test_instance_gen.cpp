#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bcplab/exact_solver.hpp"
#include "bcplab/instance_gen.hpp"
#include "bcplab/similarity.hpp"

using namespace bcplab;

TEST_CASE("gen_ov is deterministic with binomial sizes", "[gen]") {
    BcpInstance a = gen_ov(32, 64, 9);
    BcpInstance b = gen_ov(32, 64, 9);
    REQUIRE(a.universe_size == 64);
    REQUIRE(a.red.size() == 32);
    REQUIRE(a.blue.size() == 32);
    for (std::size_t t = 0; t < 32; ++t) {
        REQUIRE(a.red[t].elements == b.red[t].elements);
        REQUIRE(a.blue[t].elements == b.blue[t].elements);
    }
    double total = 0;
    for (const auto& s : a.red) total += static_cast<double>(s.size());
    for (const auto& s : a.blue) total += static_cast<double>(s.size());
    double mean = total / 64.0;
    double sigma = std::sqrt(64.0 * 0.5 * 0.5 / 64.0);
    REQUIRE(std::abs(mean - 32.0) <= 3 * sigma);
}

TEST_CASE("ov_brute_check finds the first disjoint pair", "[gen]") {
    BcpInstance inst;
    inst.universe_size = 4;
    inst.red.push_back(make_sparse_set({0}, 4));
    inst.blue.push_back(make_sparse_set({1}, 4));
    REQUIRE(ov_brute_check(inst) == std::pair<std::size_t, std::size_t>{0, 0});
    inst.blue[0] = make_sparse_set({0}, 4);
    REQUIRE_FALSE(ov_brute_check(inst).has_value());
}

TEST_CASE("ov_brute_check agrees with the minimum-intersection view", "[gen]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        BcpInstance inst = gen_ov(12, 8, seed);
        bool disjoint_exists = false;
        for (const auto& r : inst.red)
            for (const auto& b : inst.blue)
                if (intersection_size(r, b) == 0) disjoint_exists = true;
        REQUIRE(ov_brute_check(inst).has_value() == disjoint_exists);
    }
}

TEST_CASE("gen_rubinstein_shape structural properties are exact", "[gen]") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto [inst, planted] = gen_rubinstein_shape(16, 4, 10, true, seed);
        REQUIRE(inst.universe_size == 2 * 4 * 10);
        REQUIRE(inst.red.size() == 16);
        REQUIRE(inst.blue.size() == 16);
        for (const auto& s : inst.red) REQUIRE(s.size() == 40);
        for (const auto& s : inst.blue) REQUIRE(s.size() == 10);
        REQUIRE(planted == std::pair<std::size_t, std::size_t>{0, 0});
        REQUIRE(hamming_distance(inst.red[0], inst.blue[0]) == 10 * (4 - 1));
        REQUIRE(jaccard(inst.red[0], inst.blue[0]) == make_rational(1, 4));
        REQUIRE(is_subset(inst.blue[0], inst.red[0]));
    }
}

TEST_CASE("gen_rubinstein_shape without planting", "[gen]") {
    auto [inst, planted] = gen_rubinstein_shape(16, 4, 20, false, 3);
    REQUIRE_FALSE(planted.has_value());
    // background similarity concentrates well below the planted value 1/T
    auto [p, s] = brute_force_max(inst);
    (void)p;
    REQUIRE(s < make_rational(1, 4));
    REQUIRE_THROWS_AS(gen_rubinstein_shape(4, 1, 10, false, 0), ValidationError);
    REQUIRE_THROWS_AS(gen_rubinstein_shape(4, 4, 1, false, 0), ValidationError);
}

TEST_CASE("gen_random honors the size range", "[gen]") {
    BcpInstance full = gen_random(6, 12, 12, 12, 1);
    for (const auto& s : full.red) REQUIRE(s.size() == 12);
    REQUIRE(jaccard(full.red[0], full.blue[0]) == 1);

    BcpInstance empty = gen_random(4, 12, 0, 0, 1);
    for (const auto& s : empty.red) REQUIRE(s.empty());

    BcpInstance a = gen_random(8, 40, 3, 9, 77);
    BcpInstance b = gen_random(8, 40, 3, 9, 77);
    for (std::size_t t = 0; t < 8; ++t) {
        REQUIRE(a.red[t].elements == b.red[t].elements);
        REQUIRE(a.red[t].size() >= 3);
        REQUIRE(a.red[t].size() <= 9);
    }
    REQUIRE_THROWS_AS(gen_random(4, 10, 5, 3, 0), ValidationError);
    REQUIRE_THROWS_AS(gen_random(4, 10, 3, 11, 0), ValidationError);
}
