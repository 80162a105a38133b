#pragma once

// Riemann integration of lattice-valued functions on a real interval.
// Breakpoints are exact rationals and step-function sums are accumulated in
// exact rational arithmetic (each double converts exactly), so refinement
// monotonicity and the Rademacher orthogonality relations hold with no
// floating-point slack.  Sampled functions use dyadic bisection with
// endpoint-plus-midpoint bracketing under a caller-declared bound.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lmart/errors.hpp"
#include "lmart/riesz.hpp"

namespace lmart {

using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_from_string(const std::string& s) {
    try {
        return Rat(s);
    } catch (const std::exception&) {
        fail(errc::parse_error, "not a rational: '" + s + "'");
    }
}

inline std::string rat_to_string(const Rat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

// Refinement budget: dyadic bisection depth cap, overridable via LM_MAX_DEPTH.
inline int refinement_budget() {
    if (const char* env = std::getenv("LM_MAX_DEPTH")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1 && v <= 30) return static_cast<int>(v);
    }
    return 22;
}

struct Partition1D {
    std::vector<Rat> cuts;  // strictly increasing, at least two

    const Rat& a() const { return cuts.front(); }
    const Rat& b() const { return cuts.back(); }
    std::size_t cells() const { return cuts.size() - 1; }
};

inline Partition1D make_partition1d(std::vector<Rat> cuts) {
    if (cuts.size() < 2) fail(errc::bad_partition, "an interval partition needs at least two cuts");
    for (std::size_t i = 1; i < cuts.size(); ++i)
        if (!(cuts[i - 1] < cuts[i])) fail(errc::bad_partition, "cuts must be strictly increasing");
    return Partition1D{std::move(cuts)};
}

inline Partition1D uniform_dyadic(const Rat& a, const Rat& b, int depth) {
    if (!(a < b)) fail(errc::bad_partition, "empty interval");
    if (depth < 0 || depth > refinement_budget())
        fail(errc::depth_exceeded, "dyadic depth " + std::to_string(depth) + " exceeds the budget");
    const std::size_t n = std::size_t{1} << depth;
    std::vector<Rat> cuts;
    cuts.reserve(n + 1);
    const Rat len = b - a;
    for (std::size_t k = 0; k <= n; ++k) cuts.push_back(a + len * Rat(static_cast<long>(k), static_cast<long>(n)));
    return make_partition1d(std::move(cuts));
}

inline Rat mesh(const Partition1D& p) {
    Rat m = 0;
    for (std::size_t i = 1; i < p.cuts.size(); ++i) m = std::max(m, Rat(p.cuts[i] - p.cuts[i - 1]));
    return m;
}

inline bool refines(const Partition1D& coarse, const Partition1D& fine) {
    if (coarse.a() != fine.a() || coarse.b() != fine.b()) return false;
    std::size_t j = 0;
    for (const Rat& c : coarse.cuts) {
        while (j < fine.cuts.size() && fine.cuts[j] < c) ++j;
        if (j == fine.cuts.size() || fine.cuts[j] != c) return false;
    }
    return true;
}

inline Partition1D common_refinement(const Partition1D& p, const Partition1D& q) {
    if (p.a() != q.a() || p.b() != q.b())
        fail(errc::interval_mismatch, "partitions span different intervals");
    std::vector<Rat> cuts;
    cuts.reserve(p.cuts.size() + q.cuts.size());
    std::merge(p.cuts.begin(), p.cuts.end(), q.cuts.begin(), q.cuts.end(), std::back_inserter(cuts));
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return make_partition1d(std::move(cuts));
}

// Piece k holds on the half-open cell [cuts[k], cuts[k+1]); the right endpoint
// b evaluates to the last piece.  Breakpoint values are measure zero and never
// influence integrals.
struct StepFunction {
    Partition1D partition;
    std::vector<Element> pieces;

    const SpacePtr& space() const { return pieces.front().space; }
};

inline StepFunction make_step_function(Partition1D partition, std::vector<Element> pieces) {
    if (pieces.size() != partition.cells())
        fail(errc::bad_partition, "piece count must equal the cell count");
    for (const auto& p : pieces) require_same_space(p.space, pieces.front().space);
    return StepFunction{std::move(partition), std::move(pieces)};
}

inline std::size_t cell_index(const Partition1D& part, const Rat& t) {
    if (t < part.a() || t > part.b()) fail(errc::interval_mismatch, "point outside the interval");
    if (t == part.b()) return part.cells() - 1;
    auto it = std::upper_bound(part.cuts.begin(), part.cuts.end(), t);
    return static_cast<std::size_t>(it - part.cuts.begin()) - 1;
}

inline const Element& value_at(const StepFunction& f, const Rat& t) {
    return f.pieces[cell_index(f.partition, t)];
}

template <class F>
StepFunction map_pieces(const StepFunction& f, F&& fn) {
    std::vector<Element> pieces;
    pieces.reserve(f.pieces.size());
    for (const auto& p : f.pieces) pieces.push_back(fn(p));
    return StepFunction{f.partition, std::move(pieces)};
}

// Re-express f on a refining partition.
inline StepFunction align_to(const StepFunction& f, const Partition1D& fine) {
    if (!refines(f.partition, fine)) fail(errc::bad_partition, "target partition does not refine");
    std::vector<Element> pieces;
    pieces.reserve(fine.cells());
    for (std::size_t k = 0; k < fine.cells(); ++k)
        pieces.push_back(f.pieces[cell_index(f.partition, fine.cuts[k])]);
    return StepFunction{fine, std::move(pieces)};
}

struct RiemannSums {
    Element lower;
    Element upper;
};

namespace detail {

inline std::vector<Rat> exact_zero_acc(std::size_t n) { return std::vector<Rat>(n); }

inline Element acc_to_element(const SpacePtr& space, const std::vector<Rat>& acc) {
    Element out = zero(space);
    for (std::size_t c = 0; c < acc.size(); ++c) out.values[c] = to_double(acc[c]);
    return out;
}

}  // namespace detail

// Darboux sums of a step function over an arbitrary partition of its interval.
// Sup/inf per cell range over the pieces meeting the half-open cell; sums are
// exact, so L is nondecreasing and U nonincreasing under refinement.
inline RiemannSums lower_upper_sums(const StepFunction& f, const Partition1D& alpha) {
    if (alpha.a() != f.partition.a() || alpha.b() != f.partition.b())
        fail(errc::bad_partition, "sum partition must span the function's interval");
    const std::size_t ncomp = f.space()->size();
    auto lo = detail::exact_zero_acc(ncomp), hi = detail::exact_zero_acc(ncomp);
    for (std::size_t j = 0; j < alpha.cells(); ++j) {
        const Rat &l = alpha.cuts[j], &r = alpha.cuts[j + 1];
        const std::size_t first = cell_index(f.partition, l);
        std::size_t last = first;
        while (last + 1 < f.pieces.size() && f.partition.cuts[last + 1] < r) ++last;
        const Rat len = r - l;
        for (std::size_t c = 0; c < ncomp; ++c) {
            double mn = f.pieces[first].values[c], mx = mn;
            for (std::size_t k = first + 1; k <= last; ++k) {
                mn = std::min(mn, f.pieces[k].values[c]);
                mx = std::max(mx, f.pieces[k].values[c]);
            }
            lo[c] += Rat(mn) * len;
            hi[c] += Rat(mx) * len;
        }
    }
    return RiemannSums{detail::acc_to_element(f.space(), lo), detail::acc_to_element(f.space(), hi)};
}

// Exact integral of a step function.
inline Element integrate(const StepFunction& f) {
    const std::size_t ncomp = f.space()->size();
    auto acc = detail::exact_zero_acc(ncomp);
    for (std::size_t k = 0; k < f.pieces.size(); ++k) {
        const Rat len = f.partition.cuts[k + 1] - f.partition.cuts[k];
        for (std::size_t c = 0; c < ncomp; ++c) acc[c] += Rat(f.pieces[k].values[c]) * len;
    }
    return detail::acc_to_element(f.space(), acc);
}

inline StepFunction multiply_step(const StepFunction& f, const StepFunction& g) {
    require_same_space(f.space(), g.space());
    Partition1D common = common_refinement(f.partition, g.partition);
    StepFunction fa = align_to(f, common), ga = align_to(g, common);
    std::vector<Element> pieces;
    pieces.reserve(common.cells());
    for (std::size_t k = 0; k < common.cells(); ++k) pieces.push_back(fa.pieces[k] * ga.pieces[k]);
    return StepFunction{std::move(common), std::move(pieces)};
}

// Integral of the pointwise f-algebra product fg.
inline Element integrable_product(const StepFunction& f, const StepFunction& g) {
    return integrate(multiply_step(f, g));
}

// Signed power integral: contributes (f^+)^p - (f^-)^p per piece.
inline Element integrate_power(const StepFunction& f, double p) {
    if (!(p >= 1.0)) fail(errc::bad_exponent, "power integral needs p >= 1");
    return integrate(map_pieces(
        f, [p](const Element& x) { return power(positive_part(x), p) - power(negative_part(x), p); }));
}

struct HolderSides {
    Element lhs;  // |integral of fg|
    Element rhs;  // p-norm of f times q-norm of g
};

inline HolderSides holder_check(const StepFunction& f, const StepFunction& g, double p, double q) {
    if (!(p > 1.0) || !(q > 1.0) || std::fabs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
        fail(errc::not_conjugate, "exponents must satisfy 1/p + 1/q = 1 with p, q > 1");
    Element lhs = abs(integrable_product(f, g));
    Element fp = integrate(map_pieces(f, [p](const Element& x) { return power(abs(x), p); }));
    Element gq = integrate(map_pieces(g, [q](const Element& x) { return power(abs(x), q); }));
    Element rhs = power(fp, 1.0 / p) * power(gq, 1.0 / q);
    return HolderSides{std::move(lhs), std::move(rhs)};
}

// n-th Rademacher function on [0,1] as a step function: alternating +e / -e on
// the 2^n dyadic cells, starting positive.
inline StepFunction rademacher(int n, const SpacePtr& space) {
    if (n < 1) fail(errc::bad_argument, "Rademacher index starts at 1");
    if (n > refinement_budget())
        fail(errc::depth_exceeded, "Rademacher index " + std::to_string(n) + " exceeds the budget");
    Partition1D cuts = uniform_dyadic(Rat(0), Rat(1), n);
    std::vector<Element> pieces;
    pieces.reserve(cuts.cells());
    const Element e = unit(space);
    for (std::size_t k = 0; k < cuts.cells(); ++k) pieces.push_back((k % 2 == 0) ? e : -e);
    return StepFunction{std::move(cuts), std::move(pieces)};
}

// Pointwise evaluator on exact rational points with a declared bound |f| <= M.
// The bound keeps the bracketing sums sound for callers that honour it.
struct SampledFunction {
    Rat a;
    Rat b;
    std::function<Element(const Rat&)> eval;
    Element bound;
};

inline RiemannSums lower_upper_sums(const SampledFunction& f, const Partition1D& alpha) {
    if (alpha.a() != f.a || alpha.b() != f.b)
        fail(errc::bad_partition, "sum partition must span the function's interval");
    require_space(f.bound.space);
    const std::size_t ncomp = f.bound.space->size();
    Element lo = zero(f.bound.space), hi = zero(f.bound.space);
    for (std::size_t j = 0; j < alpha.cells(); ++j) {
        const Rat &l = alpha.cuts[j], &r = alpha.cuts[j + 1];
        const Element vl = f.eval(l), vm = f.eval((l + r) / 2), vr = f.eval(r);
        require_same_space(vl.space, f.bound.space);
        const double len = to_double(Rat(r - l));
        for (std::size_t c = 0; c < ncomp; ++c) {
            const double cap = f.bound.values[c];
            double mn = std::min({vl.values[c], vm.values[c], vr.values[c]});
            double mx = std::max({vl.values[c], vm.values[c], vr.values[c]});
            mn = std::max(mn, -cap);
            mx = std::min(mx, cap);
            lo.values[c] += mn * len;
            hi.values[c] += mx * len;
        }
    }
    return RiemannSums{std::move(lo), std::move(hi)};
}

// Dyadic bisection until U - L <= tol componentwise; midpoint of the bracket.
inline Element integrate(const SampledFunction& f, const Element& tol, int max_depth = -1) {
    require_same_space(tol.space, f.bound.space);
    const int budget = max_depth < 0 ? refinement_budget() : max_depth;
    for (int depth = 0; depth <= budget; ++depth) {
        RiemannSums s = lower_upper_sums(f, uniform_dyadic(f.a, f.b, depth));
        if (leq(s.upper - s.lower, tol)) return 0.5 * (s.lower + s.upper);
    }
    fail(errc::not_integrable, "bracketing gap did not reach the tolerance within the depth budget");
}

inline Element integrate(const SampledFunction& f, double tol, int max_depth = -1) {
    return integrate(f, constant(f.bound.space, tol), max_depth);
}

// Certifies |g(x) - g(y)| <= k |f(x) - f(y)| componentwise across all pairs of
// common-refinement pieces, which for step functions covers every point pair.
inline bool lipschitz_transfer_check(const StepFunction& f, const StepFunction& g, double k,
                                     double tol = 1e-12) {
    require_same_space(f.space(), g.space());
    Partition1D common = common_refinement(f.partition, g.partition);
    StepFunction fa = align_to(f, common), ga = align_to(g, common);
    const std::size_t m = common.cells(), ncomp = f.space()->size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t c = 0; c < ncomp; ++c) {
                const double df = std::fabs(fa.pieces[i].values[c] - fa.pieces[j].values[c]);
                const double dg = std::fabs(ga.pieces[i].values[c] - ga.pieces[j].values[c]);
                if (dg > k * df + tol) return false;
            }
    return true;
}

}  // namespace lmart
