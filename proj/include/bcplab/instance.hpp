#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcplab/errors.hpp"
#include "bcplab/rational.hpp"
#include "bcplab/sparse_set.hpp"

namespace bcplab {

/// Red collection A, blue collection B, one shared universe.
struct BcpInstance {
    std::vector<SparseSet> red;
    std::vector<SparseSet> blue;
    std::uint64_t universe_size = 0;

    void validate() const {
        if (red.empty() || blue.empty())
            throw ValidationError("instance needs at least one red and one blue set");
        for (const auto* coll : {&red, &blue})
            for (const SparseSet& s : *coll)
                if (s.universe_size != universe_size)
                    throw ValidationError("member set universe differs from instance universe");
    }

    std::size_t max_set_size() const {
        std::size_t m = 0;
        for (const SparseSet& s : red) m = std::max(m, s.size());
        for (const SparseSet& s : blue) m = std::max(m, s.size());
        return m;
    }
};

/// Upper/lower threshold pair. For similarities the good side is ≥ lower and
/// 0 < lower < upper ≤ 1. Reused for Hamming distances (units = distance)
/// where the good side is ≤ and the numeric order flips: upper (h1) < lower (h2).
struct Thresholds {
    enum class Units { similarity, distance };

    double upper = 0;
    double lower = 0;
    Units units = Units::similarity;

    Thresholds() = default;
    Thresholds(double upper_, double lower_, Units units_ = Units::similarity)
        : upper(upper_), lower(lower_), units(units_) {
        if (units == Units::similarity) {
            if (!(0 < lower && lower < upper && upper <= 1.0))
                throw ValidationError("similarity thresholds need 0 < lower < upper ≤ 1");
        } else {
            if (!(0 <= upper && upper < lower))
                throw ValidationError("distance thresholds need 0 ≤ upper < lower");
        }
    }
};

/// Result of a decision query. If a pair is reported, achieved_similarity is
/// its exact similarity and is ≥ the lower threshold used in the query.
struct DecisionOutcome {
    std::optional<std::pair<std::size_t, std::size_t>> found;  // (red index, blue index)
    std::optional<Rational> achieved_similarity;

    static DecisionOutcome none() { return {}; }
    static DecisionOutcome pair(std::size_t r, std::size_t b, Rational sim) {
        DecisionOutcome o;
        o.found = {r, b};
        o.achieved_similarity = std::move(sim);
        return o;
    }
};

}  // namespace bcplab
