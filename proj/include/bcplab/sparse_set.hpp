#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "bcplab/errors.hpp"

namespace bcplab {

/// A subset of the dense integer universe [0, universe_size). Elements are
/// kept strictly increasing; instances are immutable after construction.
struct SparseSet {
    std::vector<std::uint32_t> elements;
    std::uint64_t universe_size = 0;

    std::size_t size() const { return elements.size(); }
    bool empty() const { return elements.empty(); }

    bool contains(std::uint64_t id) const {
        return std::binary_search(elements.begin(), elements.end(), id);
    }
};

inline constexpr std::uint64_t kMaxElementId = 0xffffffffULL;

/// Normalizes (sorts, deduplicates) and validates ids against the universe.
inline SparseSet make_sparse_set(std::vector<std::uint64_t> ids, std::uint64_t d) {
    if (d == 0) throw ValidationError("universe size must be positive");
    SparseSet s;
    s.universe_size = d;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    s.elements.reserve(ids.size());
    for (std::uint64_t id : ids) {
        if (id >= d)
            throw ValidationError("element " + std::to_string(id) + " ≥ universe " +
                                  std::to_string(d));
        if (id > kMaxElementId)
            throw CapacityError("element " + std::to_string(id) + " exceeds 32-bit id capacity");
        s.elements.push_back(static_cast<std::uint32_t>(id));
    }
    return s;
}

/// Internal fast path: already-sorted unique u32 ids, no re-validation.
inline SparseSet sparse_set_from_sorted(std::vector<std::uint32_t> sorted_ids, std::uint64_t d) {
    SparseSet s;
    s.elements = std::move(sorted_ids);
    s.universe_size = d;
    return s;
}

inline void require_same_universe(const SparseSet& a, const SparseSet& b) {
    if (a.universe_size != b.universe_size)
        throw ValidationError("universe mismatch: " + std::to_string(a.universe_size) + " vs " +
                              std::to_string(b.universe_size));
}

inline std::uint64_t intersection_size(const SparseSet& a, const SparseSet& b) {
    require_same_universe(a, b);
    std::uint64_t count = 0;
    auto ia = a.elements.begin(), ib = b.elements.begin();
    while (ia != a.elements.end() && ib != b.elements.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else { ++count; ++ia; ++ib; }
    }
    return count;
}

inline bool is_subset(const SparseSet& a, const SparseSet& b) {
    return intersection_size(a, b) == a.size();
}

/// Flat bitset over a universe; the workhorse for dense pair scans and
/// membership probes during sampling.
struct DenseBits {
    std::vector<std::uint64_t> words;

    DenseBits() = default;
    DenseBits(const SparseSet& s, std::uint64_t universe) {
        words.assign((universe + 63) / 64, 0);
        for (std::uint32_t e : s.elements) words[e >> 6] |= 1ULL << (e & 63);
    }

    bool test(std::uint64_t id) const { return (words[id >> 6] >> (id & 63)) & 1u; }

    static std::uint64_t intersection_popcount(const DenseBits& a, const DenseBits& b) {
        std::uint64_t count = 0;
        std::size_t n = std::min(a.words.size(), b.words.size());
        for (std::size_t i = 0; i < n; ++i) count += std::popcount(a.words[i] & b.words[i]);
        return count;
    }
};

}  // namespace bcplab
