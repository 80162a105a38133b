#pragma once

// Seeded property sweeps.  All randomness flows through mt19937_64 with an
// explicit 53-bit mapping to [0,1); trial t of a run with master seed s uses
// the sub-seed splitmix64(s ^ 0x9E3779B97F4A7C15 * (t+1)), so any trial can be
// replayed in isolation and reports are byte-stable across runs.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lmart/errors.hpp"
#include "lmart/expectation.hpp"
#include "lmart/gundy.hpp"
#include "lmart/martingale.hpp"
#include "lmart/riemann.hpp"
#include "lmart/riesz.hpp"
#include "lmart/weaktype.hpp"

namespace lmart {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
}

struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}
    std::uint64_t next() { return gen(); }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0, 1)
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::size_t index(std::size_t n) {
        return std::min(static_cast<std::size_t>(unit() * static_cast<double>(n)), n - 1);
    }
    bool coin(double p = 0.5) { return unit() < p; }
};

struct HarnessConfig {
    std::uint64_t seed = 42;
    int omega_size = 8;
    int depth = 4;
    int trials = 200;
    std::vector<double> lambda_grid = {0.25, 0.5, 1.0, 2.0};
    double tol = 1e-9;
    bool nonneg_only = false;
    std::string out_path;  // empty writes to stdout; not part of the report
};

inline void validate(const HarnessConfig& cfg) {
    if (cfg.omega_size < 1 || cfg.omega_size > 4096)
        fail(errc::config_invalid, "omega_size must be in [1, 4096]");
    if (cfg.depth < 1 || cfg.depth > 32) fail(errc::config_invalid, "depth must be in [1, 32]");
    if (cfg.trials < 1 || cfg.trials > 1000000)
        fail(errc::config_invalid, "trials must be in [1, 1000000]");
    if (cfg.lambda_grid.empty()) fail(errc::config_invalid, "lambda grid is empty");
    for (double l : cfg.lambda_grid)
        if (!(l > 0.0) || !std::isfinite(l)) fail(errc::config_invalid, "lambda values must be positive");
    if (!(cfg.tol > 0.0) || !std::isfinite(cfg.tol)) fail(errc::config_invalid, "tol must be positive");
}

inline SpacePtr random_space(Rng& rng, int omega) {
    std::vector<double> w(static_cast<std::size_t>(omega));
    for (auto& x : w) x = rng.range(0.25, 1.25);
    return make_space(std::move(w));
}

// Refining chain built by splitting one random block per level; once every
// block is a singleton the remaining levels repeat.
inline Filtration random_filtration(Rng& rng, SpacePtr sp, int depth) {
    std::vector<int> all(sp->size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    std::vector<std::vector<int>> blocks = {all};
    std::vector<Partition> levels;
    levels.push_back(make_partition(sp, blocks));
    for (int d = 1; d < depth; ++d) {
        std::vector<std::size_t> splittable;
        for (std::size_t b = 0; b < blocks.size(); ++b)
            if (blocks[b].size() >= 2) splittable.push_back(b);
        if (!splittable.empty()) {
            const std::size_t b = splittable[rng.index(splittable.size())];
            std::vector<int> left, right;
            do {
                left.clear();
                right.clear();
                for (int p : blocks[b]) (rng.coin() ? left : right).push_back(p);
            } while (left.empty() || right.empty());
            blocks[b] = left;
            blocks.push_back(right);
        }
        levels.push_back(make_partition(sp, blocks));
    }
    return make_filtration(std::move(levels));
}

inline Element random_element(Rng& rng, const SpacePtr& sp, double lo, double hi) {
    Element out = zero(sp);
    for (auto& v : out.values) v = rng.range(lo, hi);
    return out;
}

inline Martingale random_martingale(Rng& rng, int omega, int depth, bool nonneg) {
    SpacePtr sp = random_space(rng, omega);
    Filtration filt = random_filtration(rng, sp, depth);
    Element terminal = nonneg ? random_element(rng, sp, 0.0, 2.0) : random_element(rng, sp, -2.0, 2.0);
    return martingale_from_terminal(filt, terminal);
}

inline Martingale generate_random_martingale(const HarnessConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    return random_martingale(rng, cfg.omega_size, cfg.depth, cfg.nonneg_only);
}

// Increasing block-union masks: each level keeps the previous mask and joins
// every uncovered block with probability grow.
inline StoppingTime random_stopping_time(Rng& rng, const Filtration& filt, double grow = 0.3) {
    std::vector<BandMask> masks;
    BandMask cur = empty_band(filt.space());
    for (std::size_t k = 1; k <= filt.depth(); ++k) {
        const Partition& level = filt.level(k);
        for (const auto& blk : level.blocks) {
            if (cur[blk.front()] || !rng.coin(grow)) continue;
            for (int p : blk) cur.bits[p] = 1;
        }
        masks.push_back(cur);
    }
    return make_stopping_time(filt, std::move(masks));
}

inline TransformCoefficients random_predictable_coefficients(Rng& rng, const Filtration& filt,
                                                             double bound) {
    std::vector<Element> coeffs;
    for (std::size_t k = 1; k <= filt.depth(); ++k) {
        const Partition& level = predictable_level(filt, k);
        Element v = zero(filt.space());
        for (const auto& blk : level.blocks) {
            const double c = rng.range(-bound, bound);
            for (int p : blk) v.values[p] = c;
        }
        coeffs.push_back(std::move(v));
    }
    return TransformCoefficients{filt, std::move(coeffs)};
}

inline StepFunction random_step_function(Rng& rng, const SpacePtr& sp, int max_cells,
                                         double lo, double hi) {
    const int cells = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_cells)));
    std::vector<Rat> cuts;
    cuts.push_back(Rat(0));
    for (int i = 1; i < cells; ++i) cuts.push_back(Rat(static_cast<long>(1 + rng.index(255)), 256));
    cuts.push_back(Rat(1));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Partition1D part = make_partition1d(std::move(cuts));
    std::vector<Element> pieces;
    for (std::size_t k = 0; k < part.cells(); ++k) pieces.push_back(random_element(rng, sp, lo, hi));
    return make_step_function(std::move(part), std::move(pieces));
}

struct CheckRecord {
    std::string name;
    long trials = 0;
    long failures = 0;
    double max_ratio = 0.0;       // worst severity seen; <= 1 + tol means clean
    std::uint64_t worst_seed = 0;  // sub-seed of the arg-max trial, for replay
};

struct SuiteReport {
    HarnessConfig config;
    std::vector<CheckRecord> checks;
    bool pass = false;
};

namespace detail {

class SuiteAccum {
  public:
    void observe(const std::string& name, bool ok, double ratio, std::uint64_t seed) {
        CheckRecord& r = record(name);
        ++r.trials;
        if (!ok) ++r.failures;
        if (r.trials == 1 || ratio > r.max_ratio) {
            r.max_ratio = ratio;
            r.worst_seed = seed;
        }
    }

    std::vector<CheckRecord> take() { return std::move(records_); }

  private:
    CheckRecord& record(const std::string& name) {
        for (auto& r : records_)
            if (r.name == name) return r;
        records_.push_back(CheckRecord{name, 0, 0, 0.0, 0});
        return records_.back();
    }

    std::vector<CheckRecord> records_;
};

inline bool dominated(const Element& lhs, const Element& rhs, double tol) {
    for (std::size_t i = 0; i < lhs.size(); ++i)
        if (lhs.values[i] > rhs.values[i] + tol * (1.0 + std::fabs(rhs.values[i]))) return false;
    return true;
}

inline double equality_severity(const Element& a, const Element& b, double tol) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double dev = std::fabs(a.values[i] - b.values[i]);
        worst = std::max(worst, dev / (tol * (1.0 + std::fabs(b.values[i]))));
    }
    return worst;
}

inline double reconstruction_severity(const GundyDecomposition& d, const Martingale& f,
                                      double tol) {
    double worst = 0.0;
    for (std::size_t n = 0; n < f.depth(); ++n) {
        Element sum = d.u.values[n] + d.v.values[n] + d.w.values[n];
        for (std::size_t i = 0; i < sum.size(); ++i) {
            const double fv = f.values[n].values[i];
            worst = std::max(worst, std::fabs(sum.values[i] - fv) / (tol * (1.0 + std::fabs(fv))));
        }
    }
    return worst;
}

inline void suite_gundy_checks(SuiteAccum& acc, const HarnessConfig& cfg, std::uint64_t tseed,
                               const Martingale& f) {
    const double tol = cfg.tol;
    const bool nonneg = componentwise_nonnegative(f);
    for (double lambda : cfg.lambda_grid) {
        GundyDecomposition d = gundy_decompose(f, lambda);
        const double rec_sev = reconstruction_severity(d, f, tol);
        acc.observe("gundy_reconstruction", rec_sev <= 1.0, rec_sev, tseed);
        acc.observe("gundy_parts_martingale",
                    is_martingale(d.u, tol) && is_martingale(d.v, tol) && is_martingale(d.w, tol),
                    0.0, tseed);
        if (nonneg) {
            double worst = 0.0;
            for (const auto& ek : d.internals->eps) worst = std::max(worst, -min_value(ek));
            acc.observe("gundy_epsilon_nonneg", worst <= 1e-12, worst / 1e-12, tseed);
        }
        for (const std::string& name : pinned_bound_names()) {
            const InequalityRecord* r = d.diagnostics.find(name);
            acc.observe("bound_" + name, r && dominated(r->lhs, r->rhs, tol), r ? r->ratio : 2.0,
                        tseed);
        }

        WeakTypeSides mx = weak_type_ratio(maximal_operator(), f, lambda);
        acc.observe("weak_type_maximal", dominated(mx.lhs, mx.rhs, tol),
                    dominance_ratio(mx.lhs, mx.rhs), tseed);
        WeakTypeSides sq = weak_type_ratio(square_function_operator(), f, lambda);
        const double sq_pin = nonneg ? 3.0 : 6.0;
        acc.observe("weak_type_square", dominated(sq.lhs, sq_pin * sq.rhs, tol),
                    dominance_ratio(sq.lhs, sq.rhs), tseed);
        WeakTypeSides t411 = maximal_vs_square_sides(f, lambda);
        acc.observe("thm411_ratio", true, dominance_ratio(t411.lhs, t411.rhs), tseed);
    }
}

inline void suite_martingale_checks(SuiteAccum& acc, const HarnessConfig& cfg, std::uint64_t tseed,
                                    Rng& rng, const Martingale& f) {
    const double tol = cfg.tol;
    const Partition& t1 = f.filtration.level(1);
    const SpacePtr& sp = f.space();

    acc.observe("generator_martingale", is_martingale(f, tol), 0.0, tseed);

    {
        StoppingTime tau = random_stopping_time(rng, f.filtration);
        std::vector<Element> stopped = stopped_sequence(f, tau);
        double sev = 0.0;
        for (const auto& s : stopped)
            sev = std::max(sev, equality_severity(cond_exp(t1, s), f.values.front(), tol));
        acc.observe("optional_stopping", sev <= 1.0, sev, tseed);

        std::vector<BandMask> masks = tau.masks;
        masks.back() = full_band(sp);
        StoppingTime bounded = make_stopping_time(f.filtration, std::move(masks));
        const double vsev =
            equality_severity(cond_exp(t1, stopped_value(f, bounded)), f.values.front(), tol);
        acc.observe("stopped_value_mean", vsev <= 1.0, vsev, tseed);
    }
    {
        KrickebergParts parts = krickeberg(f);
        double sev = 0.0;
        for (std::size_t n = 0; n < f.depth(); ++n)
            sev = std::max(sev, equality_severity(parts.pos.values[n] - parts.neg.values[n],
                                                  f.values[n], tol));
        acc.observe("krickeberg_reconstruction", sev <= 1.0, sev, tseed);
        Element nf = detail::one_norm(f);
        bool dom = dominated(detail::one_norm(parts.pos), nf, tol) &&
                   dominated(detail::one_norm(parts.neg), nf, tol);
        acc.observe("krickeberg_domination", dom,
                    dominance_ratio(detail::one_norm(parts.pos), nf), tseed);
    }
    {
        StoppingTime a = random_stopping_time(rng, f.filtration);
        StoppingTime b = random_stopping_time(rng, f.filtration);
        bool ok = true;
        double worst = 0.0;
        for (const auto& step : band_sup_delta_bound(a, b)) {
            ok = ok && leq(step.lhs, step.rhs);
            worst = std::max(worst, dominance_ratio(step.lhs, step.rhs));
        }
        acc.observe("lemma_band_join_delta", ok, worst, tseed);

        std::vector<Element> seq;
        for (std::size_t k = 0; k < f.depth(); ++k) seq.push_back(random_element(rng, sp, 0.0, 1.0));
        auto [lhs, rhs] = abel_band_identity(a, seq);
        const double sev = equality_severity(lhs, rhs, 1e-12);
        acc.observe("abel_band_identity", sev <= 1.0, sev, tseed);
    }
    {
        Martingale x = martingale_from_terminal(f.filtration, random_element(rng, sp, 0.0, 2.0));
        StoppingTime tau = threshold_stopping_time(f.filtration, x.values, rng.range(0.25, 1.5));
        double worst = 0.0;
        for (std::size_t k = 1; k <= x.depth(); ++k) {
            Element jump = apply_band(difference(tau.mask_at(k), tau.mask_at(k - 1)), x.increment(k));
            worst = std::max(worst, -min_value(jump));
        }
        acc.observe("lemma_threshold_positivity", worst <= 1e-12, worst / 1e-12, tseed);
    }
    {
        TransformCoefficients v = random_predictable_coefficients(rng, f.filtration, 1.0);
        Martingale h = transform(f, v);
        acc.observe("transform_martingale", is_martingale(h, tol), 0.0, tseed);
        TransformBands bands = transform_band_domination(f, v, 1.0);
        acc.observe("transform_band_inclusion",
                    is_subband(bands.h_star, bands.f_star) && is_subband(bands.s_h, bands.f_star),
                    0.0, tseed);
    }
    {
        Martingale g = martingale_from_terminal(
            f.filtration, random_element(rng, sp, cfg.nonneg_only ? 0.0 : -2.0, 2.0));
        Element lhs = maximal(add(f, g));
        Element rhs = maximal(f) + maximal(g);
        acc.observe("maximal_quasi_linearity", dominated(lhs, rhs, tol),
                    dominance_ratio(lhs, rhs), tseed);
        Element slhs = square_function(add(f, g));
        Element srhs = square_function(f) + square_function(g);
        acc.observe("square_quasi_linearity", dominated(slhs, srhs, tol),
                    dominance_ratio(slhs, srhs), tseed);
    }
    {
        Element inc = zero(sp);
        for (std::size_t k = 1; k <= f.depth(); ++k) inc += abs(f.increment(k));
        acc.observe("square_vs_increment_mass", dominated(square_function(f), inc, tol),
                    dominance_ratio(square_function(f), inc), tseed);
        Element mx = maximal(f);
        bool ok = true;
        for (const auto& v : f.values) ok = ok && leq(abs(v), mx);
        acc.observe("maximal_dominates", ok, 0.0, tseed);
        Element n1 = martingale_norm_p(f.filtration, f.values, 1.0).value;
        Element n2 = martingale_norm_p(f.filtration, f.values, 2.0).value;
        acc.observe("norm_monotone_in_p", dominated(n1, n2, tol), dominance_ratio(n1, n2), tseed);
    }
    {
        Martingale g = f;
        if (g.depth() > 8) {  // enumeration cost is 2^depth; a prefix is still a martingale
            g.filtration.levels.resize(8);
            g.values.resize(8);
        }
        RademacherBound rb = rademacher_randomized_bound(g);
        bool ok = dominated(rb.avg, rb.sq, tol) && dominated(rb.maxavg, rb.sq, tol);
        acc.observe("rademacher_randomized", ok, dominance_ratio(rb.maxavg, rb.sq), tseed);
    }
    {
        static const double ps[] = {1.25, 2.0, 4.0};
        const double p = ps[tseed % 3];
        const double q = p / (p - 1.0);
        StepFunction sf = random_step_function(rng, sp, 8, -2.0, 2.0);
        StepFunction sg = random_step_function(rng, sp, 8, -2.0, 2.0);
        HolderSides hs = holder_check(sf, sg, p, q);
        acc.observe("holder_step_pair", dominated(hs.lhs, hs.rhs, tol),
                    dominance_ratio(hs.lhs, hs.rhs), tseed);
    }
    {
        static const double ps[] = {1.0, 1.5, 2.0, 3.0, 0.25, 0.5, 0.9};
        const double p = ps[tseed % 7];
        Element x = random_element(rng, sp, 0.0, 2.0);
        Element y = random_element(rng, sp, 0.0, 2.0);
        PowerGapBounds pg = power_gap_bounds(x, y, p);
        acc.observe("power_gap_bounds", dominated(pg.lhs, pg.rhs, tol),
                    dominance_ratio(pg.lhs, pg.rhs), tseed);
    }
    {
        StepFunction sf = random_step_function(rng, sp, 6, -2.0, 2.0);
        Partition1D coarse = sf.partition;
        std::vector<Rat> extra = coarse.cuts;
        for (std::size_t i = 1; i < coarse.cuts.size(); ++i)
            extra.push_back((coarse.cuts[i - 1] + coarse.cuts[i]) / 2);
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
        Partition1D fine = make_partition1d(std::move(extra));
        RiemannSums cs = lower_upper_sums(sf, coarse);
        RiemannSums fs = lower_upper_sums(sf, fine);
        bool ok = leq(cs.lower, fs.lower) && leq(fs.upper, cs.upper) &&
                  leq(fs.lower, fs.upper);
        acc.observe("riemann_refinement", ok, 0.0, tseed);
    }
}

}  // namespace detail

inline SuiteReport run_suite(const HarnessConfig& cfg,
                             const std::function<void(Martingale&, long)>& mutate) {
    validate(cfg);
    detail::SuiteAccum acc;

    for (int n = 1; n <= 6; ++n)
        for (int m = 1; m <= 6; ++m) {
            SpacePtr sp = make_space({1.0});
            Element got = integrable_product(rademacher(n, sp), rademacher(m, sp));
            const double want = n == m ? 1.0 : 0.0;
            acc.observe("rademacher_orthonormality", got.values[0] == want, 0.0, cfg.seed);
        }

    for (long t = 0; t < cfg.trials; ++t) {
        const std::uint64_t tseed = trial_seed(cfg.seed, static_cast<std::uint64_t>(t));
        Rng rng(tseed);
        Martingale f = random_martingale(rng, cfg.omega_size, cfg.depth, cfg.nonneg_only);
        if (mutate) mutate(f, t);
        detail::suite_gundy_checks(acc, cfg, tseed, f);
        detail::suite_martingale_checks(acc, cfg, tseed, rng, f);
    }

    SuiteReport report;
    report.config = cfg;
    report.checks = acc.take();
    report.pass = true;
    for (const auto& c : report.checks) report.pass = report.pass && c.failures == 0;
    return report;
}

inline SuiteReport run_suite(const HarnessConfig& cfg) { return run_suite(cfg, nullptr); }

}  // namespace lmart
