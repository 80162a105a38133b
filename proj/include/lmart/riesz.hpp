#pragma once

// Finite concrete model of a Dedekind complete vector lattice with a weak
// order unit.  Elements are real vectors indexed by the points of a weighted
// sample space; bands are point subsets acting as order projections; the
// componentwise product makes the model an f-algebra with unit e = (1,...,1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lmart/errors.hpp"

namespace lmart {

inline constexpr double kBandZeroTol = 1e-12;  // |x| <= tol counts as zero for band supports
inline constexpr double kRangeTol = 1e-10;     // block-constancy test for R(T) membership
inline constexpr double kMartingaleTol = 1e-9;

struct SampleSpace {
    std::vector<double> weights;  // strictly positive point masses

    std::size_t size() const { return weights.size(); }
};

using SpacePtr = std::shared_ptr<const SampleSpace>;

inline SpacePtr make_space(std::vector<double> weights) {
    if (weights.empty()) fail(errc::empty_space, "a sample space needs at least one point");
    for (double w : weights)
        if (!(w > 0.0)) fail(errc::non_positive_weight, "point weights must be strictly positive");
    auto s = std::make_shared<SampleSpace>();
    s->weights = std::move(weights);
    return s;
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
    if (a == b) return true;
    return a && b && a->weights == b->weights;
}

inline void require_space(const SpacePtr& s) {
    if (!s || s->size() == 0) fail(errc::empty_space, "element has no sample space");
}

inline void require_same_space(const SpacePtr& a, const SpacePtr& b) {
    require_space(a);
    require_space(b);
    if (!same_space(a, b)) fail(errc::space_mismatch, "operands live on different sample spaces");
}

struct Element {
    SpacePtr space;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

inline Element make_element(SpacePtr space, std::vector<double> values) {
    require_space(space);
    if (values.size() != space->size())
        fail(errc::space_mismatch, "value count does not match the point count");
    return Element{std::move(space), std::move(values)};
}

inline Element constant(const SpacePtr& space, double c) {
    require_space(space);
    return Element{space, std::vector<double>(space->size(), c)};
}

// weak order unit
inline Element unit(const SpacePtr& space) { return constant(space, 1.0); }
inline Element zero(const SpacePtr& space) { return constant(space, 0.0); }

namespace detail {

template <class F>
Element zip(const Element& a, const Element& b, F&& f) {
    require_same_space(a.space, b.space);
    Element out{a.space, std::vector<double>(a.size())};
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = f(a.values[i], b.values[i]);
    return out;
}

template <class F>
Element map(const Element& a, F&& f) {
    Element out{a.space, std::vector<double>(a.size())};
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = f(a.values[i]);
    return out;
}

}  // namespace detail

inline Element operator+(const Element& a, const Element& b) {
    return detail::zip(a, b, [](double x, double y) { return x + y; });
}

inline Element operator-(const Element& a, const Element& b) {
    return detail::zip(a, b, [](double x, double y) { return x - y; });
}

inline Element operator-(const Element& a) {
    return detail::map(a, [](double x) { return -x; });
}

// f-algebra product (componentwise)
inline Element operator*(const Element& a, const Element& b) {
    return detail::zip(a, b, [](double x, double y) { return x * y; });
}

inline Element operator*(double c, const Element& a) {
    return detail::map(a, [c](double x) { return c * x; });
}

inline Element operator*(const Element& a, double c) { return c * a; }

inline Element& operator+=(Element& a, const Element& b) { return a = a + b; }
inline Element& operator-=(Element& a, const Element& b) { return a = a - b; }

inline Element sup(const Element& a, const Element& b) {
    return detail::zip(a, b, [](double x, double y) { return std::max(x, y); });
}

inline Element inf(const Element& a, const Element& b) {
    return detail::zip(a, b, [](double x, double y) { return std::min(x, y); });
}

inline Element abs(const Element& a) {
    return detail::map(a, [](double x) { return std::fabs(x); });
}

inline Element positive_part(const Element& a) {
    return detail::map(a, [](double x) { return std::max(x, 0.0); });
}

inline Element negative_part(const Element& a) {
    return detail::map(a, [](double x) { return std::max(-x, 0.0); });
}

struct LatticeParts {
    Element abs;
    Element pos;
    Element neg;
};

// f = pos - neg, |f| = pos + neg, pos*neg = 0, all exact in this model.
inline LatticeParts lattice_parts(const Element& f) {
    return LatticeParts{abs(f), positive_part(f), negative_part(f)};
}

inline double max_abs(const Element& a) {
    double m = 0.0;
    for (double x : a.values) m = std::max(m, std::fabs(x));
    return m;
}

inline double min_value(const Element& a) {
    double m = a.values.empty() ? 0.0 : a.values[0];
    for (double x : a.values) m = std::min(m, x);
    return m;
}

inline bool leq(const Element& a, const Element& b, double tol = 0.0) {
    require_same_space(a.space, b.space);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.values[i] > b.values[i] + tol) return false;
    return true;
}

inline bool approx_equal(const Element& a, const Element& b, double tol) {
    require_same_space(a.space, b.space);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::fabs(a.values[i] - b.values[i]) > tol) return false;
    return true;
}

// Componentwise p-th power via the functional calculus of the unit interval
// model.  Requires f >= 0; p = 0 yields e on the support convention pow(0,0)=1.
inline Element power(const Element& f, double p) {
    if (!(p >= 0.0)) fail(errc::bad_exponent, "power exponent must be >= 0");
    for (double x : f.values)
        if (x < 0.0) fail(errc::negative_base, "power needs a componentwise nonnegative base");
    return detail::map(f, [p](double x) { return std::pow(x, p); });
}

// Both sides of the p-power gap estimate:
//   p >= 1:    |x^p - y^p| <= p |x - y| (x^{p-1} + y^{p-1})
//   0 < p < 1: |x^p - y^p| <= |x - y|^p
struct PowerGapBounds {
    Element lhs;
    Element rhs;
};

inline PowerGapBounds power_gap_bounds(const Element& x, const Element& y, double p) {
    if (!(p > 0.0)) fail(errc::bad_exponent, "power gap estimate needs p > 0");
    require_same_space(x.space, y.space);
    Element lhs = abs(power(x, p) - power(y, p));
    Element gap = abs(x - y);
    if (p >= 1.0) {
        Element rhs = p * (gap * (power(x, p - 1.0) + power(y, p - 1.0)));
        return PowerGapBounds{std::move(lhs), std::move(rhs)};
    }
    return PowerGapBounds{std::move(lhs), power(gap, p)};
}

struct BandMask {
    SpacePtr space;
    std::vector<std::uint8_t> bits;  // 1 = point belongs to the band

    std::size_t size() const { return bits.size(); }
    bool operator[](std::size_t i) const { return bits[i] != 0; }
};

inline BandMask empty_band(const SpacePtr& space) {
    require_space(space);
    return BandMask{space, std::vector<std::uint8_t>(space->size(), 0)};
}

inline BandMask full_band(const SpacePtr& space) {
    require_space(space);
    return BandMask{space, std::vector<std::uint8_t>(space->size(), 1)};
}

inline BandMask make_band(SpacePtr space, std::vector<std::uint8_t> bits) {
    require_space(space);
    if (bits.size() != space->size())
        fail(errc::space_mismatch, "mask length does not match the point count");
    for (auto& b : bits) b = b ? 1 : 0;
    return BandMask{std::move(space), std::move(bits)};
}

// Band generated by f: the support {|f| > zero_tol}.
inline BandMask band_of(const Element& f, double zero_tol = kBandZeroTol) {
    BandMask m = empty_band(f.space);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::fabs(f.values[i]) > zero_tol) m.bits[i] = 1;
    return m;
}

inline Element apply_band(const BandMask& m, const Element& f) {
    require_same_space(m.space, f.space);
    Element out{f.space, std::vector<double>(f.size())};
    for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = m.bits[i] ? f.values[i] : 0.0;
    return out;
}

inline Element indicator(const BandMask& m) {
    Element out{m.space, std::vector<double>(m.size())};
    for (std::size_t i = 0; i < m.size(); ++i) out.values[i] = m.bits[i] ? 1.0 : 0.0;
    return out;
}

inline BandMask complement(const BandMask& m) {
    BandMask out = m;
    for (auto& b : out.bits) b = b ? 0 : 1;
    return out;
}

inline BandMask join(const BandMask& a, const BandMask& b) {
    require_same_space(a.space, b.space);
    BandMask out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.bits[i] = (a.bits[i] | b.bits[i]) ? 1 : 0;
    return out;
}

inline BandMask meet(const BandMask& a, const BandMask& b) {
    require_same_space(a.space, b.space);
    BandMask out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.bits[i] = (a.bits[i] & b.bits[i]) ? 1 : 0;
    return out;
}

inline BandMask difference(const BandMask& a, const BandMask& b) {
    return meet(a, complement(b));
}

inline bool is_subband(const BandMask& a, const BandMask& b) {
    require_same_space(a.space, b.space);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.bits[i] && !b.bits[i]) return false;
    return true;
}

inline bool band_empty(const BandMask& m) {
    for (auto b : m.bits)
        if (b) return false;
    return true;
}

inline bool band_full(const BandMask& m) {
    for (auto b : m.bits)
        if (!b) return false;
    return true;
}

inline bool operator==(const BandMask& a, const BandMask& b) {
    return same_space(a.space, b.space) && a.bits == b.bits;
}

}  // namespace lmart
