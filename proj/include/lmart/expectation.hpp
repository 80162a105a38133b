#pragma once

// Conditional expectations on a finite weighted sample space.  A partition of
// the point set induces the averaging projection T: per block, the weighted
// mean is assigned to every point of the block, so R(T) is exactly the set of
// block-constant elements.  A filtration is a refining chain of partitions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "lmart/errors.hpp"
#include "lmart/riesz.hpp"

namespace lmart {

struct Partition {
    SpacePtr space;
    std::vector<std::vector<int>> blocks;  // canonical: sorted points, blocks by first point
    std::vector<int> block_of;             // point index -> block index

    std::size_t block_count() const { return blocks.size(); }
};

inline Partition make_partition(SpacePtr space, std::vector<std::vector<int>> blocks) {
    require_space(space);
    const std::size_t n = space->size();
    std::vector<int> owner(n, -1);
    for (auto& blk : blocks) {
        if (blk.empty()) fail(errc::invalid_partition, "empty block");
        std::sort(blk.begin(), blk.end());
        for (int p : blk) {
            if (p < 0 || static_cast<std::size_t>(p) >= n)
                fail(errc::invalid_partition, "block refers to a point outside the space");
            if (owner[p] != -1) fail(errc::invalid_partition, "blocks overlap");
            owner[p] = 1;
        }
    }
    for (std::size_t p = 0; p < n; ++p)
        if (owner[p] == -1) fail(errc::invalid_partition, "blocks do not cover every point");
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    Partition out{std::move(space), std::move(blocks), std::vector<int>(n, -1)};
    for (std::size_t b = 0; b < out.blocks.size(); ++b)
        for (int p : out.blocks[b]) out.block_of[p] = static_cast<int>(b);
    return out;
}

inline Partition trivial_partition(const SpacePtr& space) {
    require_space(space);
    std::vector<int> all(space->size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return make_partition(space, {all});
}

inline Partition discrete_partition(const SpacePtr& space) {
    require_space(space);
    std::vector<std::vector<int>> blocks;
    for (std::size_t i = 0; i < space->size(); ++i) blocks.push_back({static_cast<int>(i)});
    return make_partition(space, std::move(blocks));
}

inline bool operator==(const Partition& a, const Partition& b) {
    return same_space(a.space, b.space) && a.blocks == b.blocks;
}

// true when every block of `fine` sits inside a single block of `coarse`
inline bool refines(const Partition& coarse, const Partition& fine) {
    if (!same_space(coarse.space, fine.space)) return false;
    for (const auto& blk : fine.blocks) {
        int owner = coarse.block_of[blk.front()];
        for (int p : blk)
            if (coarse.block_of[p] != owner) return false;
    }
    return true;
}

// Weighted per-block average, assigned back to every point of the block.
inline Element cond_exp(const Partition& part, const Element& f) {
    require_same_space(part.space, f.space);
    Element out = zero(f.space);
    const auto& w = part.space->weights;
    for (const auto& blk : part.blocks) {
        double mass = 0.0, acc = 0.0;
        for (int p : blk) {
            mass += w[p];
            acc += w[p] * f.values[p];
        }
        const double avg = acc / mass;
        for (int p : blk) out.values[p] = avg;
    }
    return out;
}

// Membership in R(T): block-constant within tol.
inline bool in_range_of(const Partition& part, const Element& f, double tol = kRangeTol) {
    require_same_space(part.space, f.space);
    for (const auto& blk : part.blocks) {
        double lo = f.values[blk.front()], hi = lo;
        for (int p : blk) {
            lo = std::min(lo, f.values[p]);
            hi = std::max(hi, f.values[p]);
        }
        if (hi - lo > tol) return false;
    }
    return true;
}

struct Filtration {
    std::vector<Partition> levels;  // levels[0] is T_1, the coarsest

    std::size_t depth() const { return levels.size(); }
    const Partition& level(std::size_t i) const { return levels.at(i - 1); }  // 1-based
    const SpacePtr& space() const { return levels.front().space; }
};

inline Filtration make_filtration(std::vector<Partition> levels) {
    if (levels.empty()) fail(errc::invalid_partition, "a filtration needs at least one level");
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!same_space(levels[i].space, levels.front().space))
            fail(errc::space_mismatch, "filtration levels live on different spaces");
        if (!refines(levels[i - 1], levels[i]))
            fail(errc::not_refining, "level " + std::to_string(i + 1) + " does not refine level " + std::to_string(i),
                 static_cast<int>(i + 1));
    }
    return Filtration{std::move(levels)};
}

inline bool operator==(const Filtration& a, const Filtration& b) {
    if (a.depth() != b.depth()) return false;
    for (std::size_t i = 0; i < a.depth(); ++i)
        if (!(a.levels[i] == b.levels[i])) return false;
    return true;
}

inline void require_same_filtration(const Filtration& a, const Filtration& b) {
    if (!(a == b)) fail(errc::filtration_mismatch, "operands use different filtrations");
}

constexpr double inf_exponent = std::numeric_limits<double>::infinity();

// Vector-valued norm ||f||_p = T(|f|^p)^{1/p} (blockwise max for p = inf).
struct VectorNorm {
    Element value;
    double p;
};

inline VectorNorm norm_p(const Partition& part, const Element& f, double p) {
    require_same_space(part.space, f.space);
    if (p == inf_exponent) {
        Element out = zero(f.space);
        for (const auto& blk : part.blocks) {
            double m = 0.0;
            for (int q : blk) m = std::max(m, std::fabs(f.values[q]));
            for (int q : blk) out.values[q] = m;
        }
        return VectorNorm{std::move(out), p};
    }
    if (!(p >= 1.0)) fail(errc::bad_exponent, "norm exponent must satisfy p >= 1");
    Element avg = cond_exp(part, power(abs(f), p));
    return VectorNorm{power(avg, 1.0 / p), p};
}

// Martingale norm: componentwise sup over the sequence of norm_p at level 1.
inline VectorNorm martingale_norm_p(const Filtration& filt, const std::vector<Element>& values,
                                    double p) {
    if (values.empty()) fail(errc::bad_argument, "martingale norm of an empty sequence");
    const Partition& t1 = filt.level(1);
    Element acc = norm_p(t1, values.front(), p).value;
    for (std::size_t i = 1; i < values.size(); ++i) acc = sup(acc, norm_p(t1, values[i], p).value);
    return VectorNorm{std::move(acc), p};
}

}  // namespace lmart
