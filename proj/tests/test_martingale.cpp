#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "lmart/harness.hpp"
#include "lmart/martingale.hpp"

using namespace lmart;
using testutil::code_of;
using testutil::elem;

namespace {

struct Fix {
    SpacePtr sp = make_space({0.5, 0.5});
    Filtration filt = make_filtration({trivial_partition(sp), discrete_partition(sp)});
};

}  // namespace

TEST_CASE("conditioning a terminal element yields a martingale") {
    Fix fx;
    Martingale f = martingale_from_terminal(fx.filt, elem(fx.sp, {2.0, 0.0}));
    CHECK(f.at(1).values == std::vector<double>{1.0, 1.0});
    CHECK(f.at(2).values == std::vector<double>{2.0, 0.0});
    CHECK(f.increment(1).values == std::vector<double>{1.0, 1.0});
    CHECK(f.increment(2).values == std::vector<double>{1.0, -1.0});
    CHECK(is_martingale(f));
}

TEST_CASE("is_martingale rejects broken sequences") {
    Fix fx;
    // projection inconsistency
    CHECK_FALSE(is_martingale(fx.filt, {elem(fx.sp, {1.0, 1.0}), elem(fx.sp, {2.0, 1.0})}));
    // not adapted at level 1
    CHECK_FALSE(is_martingale(fx.filt, {elem(fx.sp, {2.0, 0.0}), elem(fx.sp, {2.0, 0.0})}));
    CHECK_FALSE(is_martingale(fx.filt, {}));
    // a strict prefix is fine for the vector form, not for the wrapped one
    CHECK(is_martingale(fx.filt, {elem(fx.sp, {1.0, 1.0})}));
    CHECK_FALSE(is_martingale(Martingale{fx.filt, {elem(fx.sp, {1.0, 1.0})}}));
}

TEST_CASE("maximal and square function of the two-step fixture") {
    Fix fx;
    Martingale f = martingale_from_terminal(fx.filt, elem(fx.sp, {2.0, 0.0}));
    CHECK(maximal(f).values == std::vector<double>{2.0, 1.0});
    Element s = square_function(f);
    CHECK_THAT(s.values[0], Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-15));
    CHECK_THAT(s.values[1], Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-15));
}

TEST_CASE("sum and difference stay martingales") {
    Fix fx;
    Martingale f = martingale_from_terminal(fx.filt, elem(fx.sp, {2.0, 0.0}));
    Martingale g = martingale_from_terminal(fx.filt, elem(fx.sp, {0.0, 4.0}));
    CHECK(is_martingale(add(f, g)));
    CHECK(is_martingale(subtract(f, g)));
    CHECK(add(f, g).at(2).values == std::vector<double>{2.0, 4.0});

    SpacePtr other = make_space({1.0, 1.0});
    Martingale h = martingale_from_terminal(
        make_filtration({trivial_partition(other), discrete_partition(other)}),
        elem(other, {1.0, 1.0}));
    CHECK(code_of([&] { add(f, h); }) == errc::filtration_mismatch);
}

TEST_CASE("martingale transforms follow predictable coefficients") {
    Fix fx;
    Martingale f = martingale_from_terminal(fx.filt, elem(fx.sp, {2.0, 0.0}));
    TransformCoefficients v{fx.filt, {unit(fx.sp), -1.0 * unit(fx.sp)}};
    Martingale h = transform(f, v);
    CHECK(h.at(1).values == std::vector<double>{1.0, 1.0});
    CHECK(h.at(2).values == std::vector<double>{0.0, 2.0});
    CHECK(is_martingale(h));

    // both coefficients must be measurable one level back, i.e. constant here
    TransformCoefficients bad1{fx.filt, {elem(fx.sp, {1.0, 0.0}), unit(fx.sp)}};
    CHECK(code_of([&] { transform(f, bad1); }) == errc::not_predictable);
    TransformCoefficients bad2{fx.filt, {unit(fx.sp), elem(fx.sp, {1.0, 0.0})}};
    CHECK(code_of([&] { transform(f, bad2); }) == errc::not_predictable);
    TransformCoefficients short_v{fx.filt, {unit(fx.sp)}};
    CHECK(code_of([&] { transform(f, short_v); }) == errc::mismatch);
}

TEST_CASE("transforms with unit coefficients reproduce the martingale") {
    Rng rng(41);
    for (int t = 0; t < 100; ++t) {
        Martingale f = random_martingale(rng, 2 + static_cast<int>(rng.index(5)),
                                         1 + static_cast<int>(rng.index(4)), false);
        std::vector<Element> ones(f.depth(), unit(f.space()));
        Martingale h = transform(f, TransformCoefficients{f.filtration, ones});
        for (std::size_t k = 1; k <= f.depth(); ++k) CHECK(approx_equal(h.at(k), f.at(k), 1e-12));
        CHECK(is_martingale(h, 1e-9));
    }
}

TEST_CASE("stopping time construction validates structure") {
    Fix fx;
    BandMask w1 = make_band(fx.sp, {1, 0});
    CHECK_NOTHROW(make_stopping_time(fx.filt, {empty_band(fx.sp), w1}));
    // level-1 blocks are the whole space: a proper subset splits one
    CHECK(code_of([&] { make_stopping_time(fx.filt, {w1, w1}); }) == errc::not_adapted);
    CHECK(code_of([&] { make_stopping_time(fx.filt, {full_band(fx.sp), w1}); }) ==
          errc::not_adapted);
    CHECK(code_of([&] { make_stopping_time(fx.filt, {empty_band(fx.sp)}); }) == errc::mismatch);
}

TEST_CASE("first passage above a threshold") {
    SpacePtr sp = make_space({0.5, 0.5});
    Partition disc = discrete_partition(sp);
    Filtration filt = make_filtration({disc, disc});
    std::vector<Element> x = {elem(sp, {2.0, 0.0}), elem(sp, {0.0, 2.0})};
    StoppingTime tau = threshold_stopping_time(filt, x, 1.0);
    CHECK(tau.masks[0].bits == std::vector<std::uint8_t>{1, 0});
    CHECK(band_full(tau.masks[1]));
    // where the passage happens, the process really is above the threshold
    for (std::size_t k = 1; k <= 2; ++k) {
        Element step = indicator(difference(tau.mask_at(k), tau.mask_at(k - 1)));
        for (std::size_t i = 0; i < sp->size(); ++i)
            if (step.values[i] == 1.0) CHECK(x[k - 1].values[i] > 1.0);
    }
    CHECK(code_of([&] {
              threshold_stopping_time(filt, {elem(sp, {-1.0, 0.0}), x[1]}, 1.0);
          }) == errc::negative_process);
    Filtration mixed = make_filtration({trivial_partition(sp), disc});
    CHECK(code_of([&] { threshold_stopping_time(mixed, x, 1.0); }) == errc::not_adapted);
}

TEST_CASE("stopped values and stopped sequences") {
    Fix fx;
    Martingale f = martingale_from_terminal(fx.filt, elem(fx.sp, {2.0, 0.0}));
    StoppingTime late = make_stopping_time(fx.filt, {empty_band(fx.sp), full_band(fx.sp)});
    CHECK(stopped_value(f, late).values == std::vector<double>{2.0, 0.0});
    CHECK(cond_exp(fx.filt.level(1), stopped_value(f, late)).values ==
          std::vector<double>{1.0, 1.0});
    std::vector<Element> seq = stopped_sequence(f, late);
    CHECK(seq[0].values == f.at(1).values);
    CHECK(seq[1].values == f.at(2).values);

    StoppingTime early = make_stopping_time(fx.filt, {full_band(fx.sp), full_band(fx.sp)});
    std::vector<Element> frozen = stopped_sequence(f, early);
    CHECK(frozen[0].values == f.at(1).values);
    CHECK(frozen[1].values == f.at(1).values);
    CHECK(stopped_value(f, early).values == f.at(1).values);

    StoppingTime never = make_stopping_time(fx.filt, {empty_band(fx.sp), empty_band(fx.sp)});
    CHECK(code_of([&] { stopped_value(f, never); }) == errc::unbounded_stop);
    CHECK(stopped_sequence(f, never)[1].values == f.at(2).values);
}

TEST_CASE("optional stopping across seeded martingales") {
    Rng rng(42);
    for (int t = 0; t < 300; ++t) {
        Martingale f = random_martingale(rng, 2 + static_cast<int>(rng.index(7)),
                                         1 + static_cast<int>(rng.index(5)), rng.coin());
        StoppingTime tau = random_stopping_time(rng, f.filtration);
        std::vector<Element> stopped = stopped_sequence(f, tau);
        CHECK(is_martingale(f.filtration, stopped, 1e-9));
        // force a bounded stop so the stopped value exists
        std::vector<BandMask> masks = tau.masks;
        masks.back() = full_band(f.space());
        StoppingTime bounded = make_stopping_time(f.filtration, std::move(masks));
        Element fp = stopped_value(f, bounded);
        CHECK(approx_equal(cond_exp(f.filtration.level(1), fp), f.at(1), 1e-9));
    }
}

TEST_CASE("Krickeberg split of a signed martingale") {
    Fix fx;
    Martingale f{fx.filt, {elem(fx.sp, {0.0, 0.0}), elem(fx.sp, {1.0, -1.0})}};
    REQUIRE(is_martingale(f));
    KrickebergParts parts = krickeberg(f);
    CHECK(parts.pos.at(1).values == std::vector<double>{0.5, 0.5});
    CHECK(parts.pos.at(2).values == std::vector<double>{1.0, 0.0});
    CHECK(parts.neg.at(1).values == std::vector<double>{0.5, 0.5});
    CHECK(parts.neg.at(2).values == std::vector<double>{0.0, 1.0});
}

TEST_CASE("Krickeberg parts dominate and reconstruct") {
    Rng rng(43);
    for (int t = 0; t < 500; ++t) {
        Martingale f = random_martingale(rng, 2 + static_cast<int>(rng.index(7)),
                                         1 + static_cast<int>(rng.index(5)), false);
        KrickebergParts parts = krickeberg(f);
        CHECK(is_martingale(parts.pos, 1e-9));
        CHECK(is_martingale(parts.neg, 1e-9));
        CHECK(min_value(parts.pos.at(1)) >= 0.0);
        CHECK(min_value(parts.neg.at(1)) >= 0.0);
        Element one_norm = martingale_norm_p(f.filtration, f.values, 1.0).value;
        for (std::size_t k = 1; k <= f.depth(); ++k) {
            CHECK(approx_equal(parts.pos.at(k) - parts.neg.at(k), f.at(k), 1e-12));
            CHECK(leq(abs(f.at(k)), parts.pos.at(k) + parts.neg.at(k), 1e-12));
        }
        // the split costs nothing in one-norm
        CHECK(leq(parts.pos.at(1) + parts.neg.at(1), one_norm, 1e-12));
    }
}

TEST_CASE("joined stopping times advance no faster than both summands") {
    SpacePtr sp = make_space({0.5, 0.5});
    Partition disc = discrete_partition(sp);
    Filtration filt = make_filtration({disc, disc});
    BandMask w1 = make_band(sp, {1, 0});
    StoppingTime a = make_stopping_time(filt, {w1, w1});
    StoppingTime b = make_stopping_time(filt, {empty_band(sp), w1});
    std::vector<BandDeltaBound> steps = band_sup_delta_bound(a, b);
    CHECK(steps[0].lhs.values == std::vector<double>{1.0, 0.0});
    CHECK(steps[0].rhs.values == std::vector<double>{1.0, 0.0});
    // b catches up where a already arrived: the join does not move again
    CHECK(steps[1].lhs.values == std::vector<double>{0.0, 0.0});
    CHECK(steps[1].rhs.values == std::vector<double>{1.0, 0.0});

    SpacePtr other = make_space({0.25, 0.75});
    Partition odisc = discrete_partition(other);
    StoppingTime c = make_stopping_time(make_filtration({odisc, odisc}),
                                        {empty_band(other), empty_band(other)});
    CHECK(code_of([&] { band_sup_delta_bound(a, c); }) == errc::filtration_mismatch);
}

TEST_CASE("join delta bound holds exactly for seeded pairs") {
    Rng rng(44);
    for (int t = 0; t < 1000; ++t) {
        SpacePtr sp = random_space(rng, 2 + static_cast<int>(rng.index(7)));
        Filtration filt = random_filtration(rng, sp, 1 + static_cast<int>(rng.index(5)));
        StoppingTime a = random_stopping_time(rng, filt);
        StoppingTime b = random_stopping_time(rng, filt);
        for (const auto& step : band_sup_delta_bound(a, b)) CHECK(leq(step.lhs, step.rhs));
    }
}

TEST_CASE("band resummation identity is exact") {
    Fix fx;
    StoppingTime late = make_stopping_time(fx.filt, {empty_band(fx.sp), full_band(fx.sp)});
    auto [lhs, rhs] = abel_band_identity(late, {elem(fx.sp, {7.0, 9.0}), elem(fx.sp, {3.0, 5.0})});
    CHECK(lhs.values == std::vector<double>{3.0, 5.0});
    CHECK(rhs.values == std::vector<double>{3.0, 5.0});

    Rng rng(45);
    for (int t = 0; t < 300; ++t) {
        SpacePtr sp = random_space(rng, 2 + static_cast<int>(rng.index(7)));
        Filtration filt = random_filtration(rng, sp, 1 + static_cast<int>(rng.index(6)));
        StoppingTime tau = random_stopping_time(rng, filt);
        std::vector<Element> a;
        for (std::size_t k = 0; k < filt.depth(); ++k)
            a.push_back(random_element(rng, sp, 0.0, 2.0));
        auto [l, r] = abel_band_identity(tau, a);
        CHECK(l.values == r.values);
    }
    CHECK(code_of([&] { abel_band_identity(late, {elem(fx.sp, {1.0, 1.0})}); }) == errc::mismatch);
    CHECK(code_of([&] {
              abel_band_identity(late, {elem(fx.sp, {1.0, 1.0}), elem(fx.sp, {-1.0, 1.0})});
          }) == errc::negative_process);
}
