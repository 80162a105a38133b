#pragma once

// Weak-type (1,1) measurements for sequence operators on martingales: the
// distributional side lambda T(band indicator of the overshoot) against the
// one-norm, empirical class-A constants over a sample, band domination of
// bounded transforms, and the sign-randomized averages bounded by the square
// function via exact enumeration of sign patterns.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lmart/errors.hpp"
#include "lmart/expectation.hpp"
#include "lmart/gundy.hpp"
#include "lmart/martingale.hpp"
#include "lmart/riesz.hpp"

namespace lmart {

struct SequenceOperator {
    std::string name;
    std::function<Element(const Martingale&)> eval;
};

inline SequenceOperator maximal_operator() {
    return SequenceOperator{"maximal", [](const Martingale& f) { return maximal(f); }};
}

inline SequenceOperator square_function_operator() {
    return SequenceOperator{"square", [](const Martingale& f) { return square_function(f); }};
}

inline SequenceOperator transform_maximal_operator(TransformCoefficients v) {
    return SequenceOperator{"transform",
                            [v = std::move(v)](const Martingale& f) { return maximal(transform(f, v)); }};
}

// lambda T(P e) for the band P generated by (|Lf| - lambda e)^+.
inline Element weak_type_lhs(const Element& lf, double lambda, const Partition& t) {
    if (!(lambda > 0.0)) fail(errc::bad_lambda, "threshold must be positive");
    const Element overshoot = positive_part(abs(lf) - constant(lf.space, lambda));
    return lambda * cond_exp(t, indicator(band_of(overshoot)));
}

struct WeakTypeSides {
    Element lhs;  // lambda T(P_{(|Lf|-lambda e)^+} e)
    Element rhs;  // one-norm of f
};

inline WeakTypeSides weak_type_ratio(const SequenceOperator& op, const Martingale& f,
                                     double lambda) {
    Element lf = op.eval(f);
    Element lhs = weak_type_lhs(lf, lambda, f.filtration.level(1));
    Element rhs = martingale_norm_p(f.filtration, f.values, 1.0).value;
    return WeakTypeSides{std::move(lhs), std::move(rhs)};
}

struct ClassAItem {
    double constant = 0.0;  // smallest empirical C over the sample
    Element worst_lhs;
    Element worst_rhs;
    long worst_index = -1;
};

struct ClassAReport {
    std::string op_name;
    ClassAItem quasi_linearity;
    ClassAItem band_domination;
    ClassAItem l1_increment;
    ClassAItem l2;
};

namespace detail {

inline void class_a_update(ClassAItem& item, Element lhs, Element rhs, long index) {
    const double r = dominance_ratio(lhs, rhs);
    if (item.worst_index < 0 || r > item.constant) {
        item.constant = r;
        item.worst_lhs = std::move(lhs);
        item.worst_rhs = std::move(rhs);
        item.worst_index = index;
    }
}

}  // namespace detail

// Empirical class-A constants: quasi-linearity over consecutive same-filtration
// pairs, band domination by the maximal function, one-norm control by the
// increment mass, and the two-norm comparison.
inline ClassAReport verify_class_a(const SequenceOperator& op,
                                   const std::vector<Martingale>& sample) {
    if (sample.empty()) fail(errc::bad_argument, "class-A verification needs a nonempty sample");
    ClassAReport rep;
    rep.op_name = op.name;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const Martingale& f = sample[i];
        const Partition& t1 = f.filtration.level(1);
        Element lf_abs = abs(op.eval(f));
        detail::class_a_update(rep.band_domination, cond_exp(t1, indicator(band_of(lf_abs))),
                               cond_exp(t1, indicator(band_of(maximal(f)))), static_cast<long>(i));
        Element inc = zero(f.space());
        for (std::size_t k = 1; k <= f.depth(); ++k) inc += abs(f.increment(k));
        detail::class_a_update(rep.l1_increment, cond_exp(t1, lf_abs), cond_exp(t1, inc),
                               static_cast<long>(i));
        detail::class_a_update(rep.l2, power(cond_exp(t1, lf_abs * lf_abs), 0.5),
                               martingale_norm_p(f.filtration, f.values, 2.0).value,
                               static_cast<long>(i));
        if (i + 1 < sample.size() && sample[i + 1].filtration == f.filtration &&
            sample[i + 1].depth() == f.depth()) {
            const Martingale& g = sample[i + 1];
            Element sum_lf = abs(op.eval(add(f, g)));
            detail::class_a_update(rep.quasi_linearity, std::move(sum_lf),
                                   lf_abs + abs(op.eval(g)), static_cast<long>(i));
        }
    }
    return rep;
}

struct TransformBands {
    BandMask h_star;  // band of (T_v f)*
    BandMask f_star;  // band of f*
    BandMask s_h;     // band of S(T_v f)
};

// For |v_k| <= M e the transform lives on the band of f*: both the maximal
// band and the square-function band of h = T_v f sit inside it.
inline TransformBands transform_band_domination(const Martingale& f,
                                                const TransformCoefficients& v, double bound) {
    if (!(bound >= 0.0) || !std::isfinite(bound))
        fail(errc::coefficient_unbounded, "coefficient bound must be finite");
    for (const auto& vk : v.coeffs)
        if (max_abs(vk) > bound + kBandZeroTol)
            fail(errc::coefficient_unbounded, "a coefficient exceeds the declared bound");
    Martingale h = transform(f, v);
    return TransformBands{band_of(maximal(h)), band_of(maximal(f)), band_of(square_function(h))};
}

struct RademacherBound {
    Element avg;     // mean over sign patterns of T|sum_k s_k Delta f_k|
    Element maxavg;  // mean over sign patterns of sup_n T|sum_{k<=n} s_k Delta f_k|
    Element sq;      // T(S(f))
};

// Exact enumeration of all 2^N sign patterns (bit k of the pattern flips
// increment k+1).  Both averages are dominated componentwise by T(S(f)).
inline RademacherBound rademacher_randomized_bound(const Martingale& f) {
    const std::size_t N = f.depth();
    if (N > 14) fail(errc::horizon_too_deep, "sign enumeration is capped at horizon 14");
    if (N == 0) fail(errc::bad_argument, "empty martingale");
    const Partition& t1 = f.filtration.level(1);
    const SpacePtr& sp = f.space();
    std::vector<Element> df;
    df.reserve(N);
    for (std::size_t k = 1; k <= N; ++k) df.push_back(f.increment(k));

    Element avg = zero(sp), maxavg = zero(sp);
    const std::size_t patterns = std::size_t{1} << N;
    for (std::size_t sigma = 0; sigma < patterns; ++sigma) {
        Element g = zero(sp);
        Element level_max = zero(sp);
        for (std::size_t k = 0; k < N; ++k) {
            g += ((sigma >> k) & 1) ? -df[k] : df[k];
            level_max = sup(level_max, cond_exp(t1, abs(g)));
        }
        avg += cond_exp(t1, abs(g));
        maxavg += level_max;
    }
    const double scale = 1.0 / static_cast<double>(patterns);
    return RademacherBound{scale * avg, scale * maxavg, cond_exp(t1, square_function(f))};
}

// Distributional maximal-function side against the one-norm of the square
// function at a fixed threshold.
inline WeakTypeSides maximal_vs_square_sides(const Martingale& f, double lambda) {
    const Partition& t1 = f.filtration.level(1);
    Element lhs = weak_type_lhs(maximal(f), lambda, t1);
    Element rhs = cond_exp(t1, square_function(f));
    return WeakTypeSides{std::move(lhs), std::move(rhs)};
}

}  // namespace lmart
