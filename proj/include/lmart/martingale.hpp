#pragma once

// Martingales over finite refining filtrations: sequences f_1..f_N with
// f_k block-constant at level k and T_i f_j = f_i.  Increments use the
// convention Delta f_1 = f_1 (f_0 = 0).  Stopping times are increasing band
// masks whose adaptedness is structural: each mask is a union of blocks of
// its level.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lmart/errors.hpp"
#include "lmart/expectation.hpp"
#include "lmart/riesz.hpp"

namespace lmart {

struct Martingale {
    Filtration filtration;
    std::vector<Element> values;  // values[k-1] = f_k

    std::size_t depth() const { return values.size(); }
    const SpacePtr& space() const { return filtration.space(); }
    const Element& at(std::size_t k) const { return values.at(k - 1); }  // 1-based

    Element increment(std::size_t k) const {  // Delta f_k, Delta f_1 = f_1
        return k == 1 ? values.front() : values.at(k - 1) - values.at(k - 2);
    }
};

// Backward conditioning of a terminal element through every level.
inline Martingale martingale_from_terminal(const Filtration& filt, const Element& terminal) {
    require_same_space(filt.space(), terminal.space);
    std::vector<Element> values;
    values.reserve(filt.depth());
    for (std::size_t i = 1; i <= filt.depth(); ++i) values.push_back(cond_exp(filt.level(i), terminal));
    return Martingale{filt, std::move(values)};
}

inline bool is_martingale(const Filtration& filt, const std::vector<Element>& values,
                          double tol = kMartingaleTol) {
    if (values.empty() || values.size() > filt.depth()) return false;
    for (std::size_t k = 1; k <= values.size(); ++k) {
        if (!same_space(values[k - 1].space, filt.space())) return false;
        if (!in_range_of(filt.level(k), values[k - 1], tol)) return false;
    }
    for (std::size_t i = 1; i < values.size(); ++i)
        for (std::size_t j = i + 1; j <= values.size(); ++j)
            if (!approx_equal(cond_exp(filt.level(i), values[j - 1]), values[i - 1], tol)) return false;
    return true;
}

inline bool is_martingale(const Martingale& f, double tol = kMartingaleTol) {
    return f.depth() == f.filtration.depth() && is_martingale(f.filtration, f.values, tol);
}

inline Martingale add(const Martingale& f, const Martingale& g) {
    require_same_filtration(f.filtration, g.filtration);
    if (f.depth() != g.depth()) fail(errc::mismatch, "martingales have different horizons");
    std::vector<Element> values;
    values.reserve(f.depth());
    for (std::size_t k = 0; k < f.depth(); ++k) values.push_back(f.values[k] + g.values[k]);
    return Martingale{f.filtration, std::move(values)};
}

inline Martingale subtract(const Martingale& f, const Martingale& g) {
    require_same_filtration(f.filtration, g.filtration);
    if (f.depth() != g.depth()) fail(errc::mismatch, "martingales have different horizons");
    std::vector<Element> values;
    values.reserve(f.depth());
    for (std::size_t k = 0; k < f.depth(); ++k) values.push_back(f.values[k] - g.values[k]);
    return Martingale{f.filtration, std::move(values)};
}

// f* = sup_n |f_n|
inline Element maximal(const Martingale& f) {
    Element acc = abs(f.values.front());
    for (std::size_t k = 1; k < f.depth(); ++k) acc = sup(acc, abs(f.values[k]));
    return acc;
}

// S(f) = (sum_k (Delta f_k)^2)^{1/2}
inline Element square_function(const Martingale& f) {
    Element acc = zero(f.space());
    for (std::size_t k = 1; k <= f.depth(); ++k) {
        Element d = f.increment(k);
        acc += d * d;
    }
    return power(acc, 0.5);
}

// Predictable multiplier sequence: v_k is block-constant at level k-1 (v_1 at
// level 1, matching the T_0 := T_1 convention).
struct TransformCoefficients {
    Filtration filtration;
    std::vector<Element> coeffs;
};

inline const Partition& predictable_level(const Filtration& filt, std::size_t k) {
    return filt.level(k <= 1 ? 1 : k - 1);
}

inline Martingale transform(const Martingale& f, const TransformCoefficients& v,
                            double tol = kRangeTol) {
    require_same_filtration(f.filtration, v.filtration);
    if (v.coeffs.size() != f.depth()) fail(errc::mismatch, "coefficient count must match the horizon");
    for (std::size_t k = 1; k <= v.coeffs.size(); ++k) {
        require_same_space(v.coeffs[k - 1].space, f.space());
        if (!in_range_of(predictable_level(f.filtration, k), v.coeffs[k - 1], tol))
            fail(errc::not_predictable,
                 "coefficient " + std::to_string(k) + " is not measurable one level back");
    }
    std::vector<Element> values;
    values.reserve(f.depth());
    Element acc = zero(f.space());
    for (std::size_t k = 1; k <= f.depth(); ++k) {
        acc += v.coeffs[k - 1] * f.increment(k);
        values.push_back(acc);
    }
    return Martingale{f.filtration, std::move(values)};
}

// Increasing band masks P_1 <= ... <= P_N, each a union of level-k blocks.
// P_0 is the empty band by convention.
struct StoppingTime {
    Filtration filtration;
    std::vector<BandMask> masks;

    std::size_t horizon() const { return masks.size(); }
    BandMask mask_at(std::size_t k) const {  // k = 0 -> empty band
        return k == 0 ? empty_band(filtration.space()) : masks.at(k - 1);
    }
};

inline bool mask_is_block_union(const Partition& part, const BandMask& m) {
    if (!same_space(part.space, m.space)) return false;
    for (const auto& blk : part.blocks) {
        const bool first = m[blk.front()];
        for (int p : blk)
            if (m[p] != first) return false;
    }
    return true;
}

inline StoppingTime make_stopping_time(const Filtration& filt, std::vector<BandMask> masks) {
    if (masks.size() != filt.depth())
        fail(errc::mismatch, "mask count must match the filtration depth");
    for (std::size_t k = 1; k <= masks.size(); ++k) {
        require_same_space(masks[k - 1].space, filt.space());
        if (!mask_is_block_union(filt.level(k), masks[k - 1]))
            fail(errc::not_adapted, "mask " + std::to_string(k) + " splits a level-" +
                                        std::to_string(k) + " block");
        if (k > 1 && !is_subband(masks[k - 2], masks[k - 1]))
            fail(errc::not_adapted, "masks must be increasing");
    }
    return StoppingTime{filt, std::move(masks)};
}

// First passage of an adapted nonnegative process above lambda:
// P_k = band of (sup_{i<=k} (x_i - lambda e))^+.
inline StoppingTime threshold_stopping_time(const Filtration& filt, const std::vector<Element>& x,
                                            double lambda, double zero_tol = kBandZeroTol) {
    if (x.size() != filt.depth()) fail(errc::mismatch, "process length must match the depth");
    for (std::size_t k = 1; k <= x.size(); ++k) {
        require_same_space(x[k - 1].space, filt.space());
        if (min_value(x[k - 1]) < 0.0)
            fail(errc::negative_process, "threshold process must be componentwise nonnegative");
        if (!in_range_of(filt.level(k), x[k - 1]))
            fail(errc::not_adapted, "process level " + std::to_string(k) + " is not adapted");
    }
    const Element lam = constant(filt.space(), lambda);
    Element running = zero(filt.space());
    std::vector<BandMask> masks;
    masks.reserve(x.size());
    for (const auto& xk : x) {
        running = sup(running, positive_part(xk - lam));
        masks.push_back(band_of(running, zero_tol));
    }
    return make_stopping_time(filt, std::move(masks));
}

// f_P = sum_k (Delta P_k) f_k; requires P_N to exhaust the space.
inline Element stopped_value(const Martingale& f, const StoppingTime& tau) {
    require_same_filtration(f.filtration, tau.filtration);
    if (f.depth() != tau.horizon()) fail(errc::mismatch, "horizons differ");
    if (!band_full(tau.masks.back()))
        fail(errc::unbounded_stop, "terminal mask must cover the space for the stopped value");
    Element acc = zero(f.space());
    for (std::size_t k = 1; k <= f.depth(); ++k)
        acc += apply_band(difference(tau.mask_at(k), tau.mask_at(k - 1)), f.at(k));
    return acc;
}

// f_{n ^ tau} = sum_{k<=n} P_{k-1}^d Delta f_k, P_0 = empty.
inline std::vector<Element> stopped_sequence(const Martingale& f, const StoppingTime& tau) {
    require_same_filtration(f.filtration, tau.filtration);
    if (f.depth() != tau.horizon()) fail(errc::mismatch, "horizons differ");
    std::vector<Element> out;
    out.reserve(f.depth());
    Element acc = zero(f.space());
    for (std::size_t k = 1; k <= f.depth(); ++k) {
        acc += apply_band(complement(tau.mask_at(k - 1)), f.increment(k));
        out.push_back(acc);
    }
    return out;
}

// Difference of the two nonnegative martingales conditioned from the terminal
// positive and negative parts; f_n = pos_n - neg_n and both one-norms are
// dominated by the one-norm of f.
struct KrickebergParts {
    Martingale pos;
    Martingale neg;
};

inline KrickebergParts krickeberg(const Martingale& f) {
    const Element& terminal = f.values.back();
    return KrickebergParts{martingale_from_terminal(f.filtration, positive_part(terminal)),
                           martingale_from_terminal(f.filtration, negative_part(terminal))};
}

// Step-k indicators of Delta(A v B) against Delta A + Delta B; the join of two
// stopping times advances no faster than the two summands together.
struct BandDeltaBound {
    Element lhs;
    Element rhs;
};

inline std::vector<BandDeltaBound> band_sup_delta_bound(const StoppingTime& a,
                                                        const StoppingTime& b) {
    require_same_filtration(a.filtration, b.filtration);
    std::vector<BandDeltaBound> out;
    out.reserve(a.horizon());
    for (std::size_t k = 1; k <= a.horizon(); ++k) {
        const BandMask jk = join(a.mask_at(k), b.mask_at(k));
        const BandMask jprev = join(a.mask_at(k - 1), b.mask_at(k - 1));
        Element lhs = indicator(difference(jk, jprev));
        Element rhs = indicator(difference(a.mask_at(k), a.mask_at(k - 1))) +
                      indicator(difference(b.mask_at(k), b.mask_at(k - 1)));
        out.push_back(BandDeltaBound{std::move(lhs), std::move(rhs)});
    }
    return out;
}

// Abel-style band resummation for a nonnegative sequence a_1..a_N:
//   P_N ( sum_{k=2}^N P_{k-1}^d a_k ) = sum_{k=2}^N (Delta P_k)(a_2 + ... + a_k).
// Both sides accumulate in ascending k, so they agree bitwise.
inline std::pair<Element, Element> abel_band_identity(const StoppingTime& tau,
                                                      const std::vector<Element>& a) {
    if (a.size() != tau.horizon()) fail(errc::mismatch, "sequence length must match the horizon");
    const SpacePtr& sp = tau.filtration.space();
    for (const auto& ak : a) {
        require_same_space(ak.space, sp);
        if (min_value(ak) < 0.0) fail(errc::negative_process, "sequence must be nonnegative");
    }
    Element inner = zero(sp), rhs = zero(sp), prefix = zero(sp);
    for (std::size_t k = 2; k <= a.size(); ++k) {
        inner += apply_band(complement(tau.mask_at(k - 1)), a[k - 1]);
        prefix += a[k - 1];
        rhs += apply_band(difference(tau.mask_at(k), tau.mask_at(k - 1)), prefix);
    }
    Element lhs = apply_band(tau.mask_at(a.size()), inner);
    return {std::move(lhs), std::move(rhs)};
}

}  // namespace lmart
