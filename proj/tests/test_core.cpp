#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "bayesdep/core.hpp"
#include "bayesdep/datagen.hpp"

using namespace bayesdep;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("combine: equal evidence is a coin flip") {
    const auto m = combine(PriorOdds(0.0), LogBayesFactor(0.0));
    CHECK(m.lnr() == 0.0);
    CHECK(m.pr() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("combine: a Bayes factor of 10 on equal priors") {
    const auto m = combine(PriorOdds(0.0), LogBayesFactor(std::log(10.0)));
    CHECK(m.logr() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.r() == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(m.pr() == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("combine: prior odds multiply with the Bayes factor") {
    const auto m = combine(PriorOdds(std::log(3.0)), LogBayesFactor(std::log(2.0)));
    CHECK(m.r() == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(m.bf() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("to_view covers the whole family") {
    const DependenceMeasure zero(0.0, 0.0);
    CHECK(to_view(zero, View::pr) == doctest::Approx(0.5));
    CHECK(to_view(DependenceMeasure(std::numbers::ln10, 0.0), View::logr) ==
          doctest::Approx(1.0).epsilon(1e-14));

    const DependenceMeasure bottom(-kInf, 0.0);
    CHECK(to_view(bottom, View::pr) == 0.0);
    CHECK(to_view(bottom, View::r) == 0.0);
    const DependenceMeasure top(kInf, 0.0);
    CHECK(to_view(top, View::pr) == 1.0);
    CHECK(to_view(top, View::r) == kInf);
}

TEST_CASE("round trip lnr -> pr -> lnr away from saturation") {
    // pr carries lnr information only up to ~ulp(1)/(1-pr); past lnr ~ +10 the
    // logistic value itself no longer resolves 1e-12 relative differences
    for (double lnr = -30.0; lnr <= 8.0; lnr += 0.7) {
        const DependenceMeasure m(lnr, 0.0);
        const double back = std::log(m.pr()) - std::log1p(-m.pr());
        CHECK(back == doctest::Approx(lnr).epsilon(1e-12));
    }
}

TEST_CASE("every view is strictly increasing in lnr") {
    datagen::Rng rng(0x5eed5eedULL);
    for (int i = 0; i < 200; ++i) {
        double a = rng.uniform(-30.0, 30.0);
        double b = rng.uniform(-30.0, 30.0);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const DependenceMeasure ma(a, 0.0), mb(b, 0.0);
        for (View view : {View::pr, View::r, View::bf, View::lnr, View::logr})
            CHECK(to_view(ma, view) < to_view(mb, view));
    }
}

TEST_CASE("pr stays in [0,1] and r stays nonnegative") {
    for (double lnr : {-kInf, -800.0, -5.0, 0.0, 5.0, 800.0, kInf}) {
        const DependenceMeasure m(lnr, 0.0);
        CHECK(m.pr() >= 0.0);
        CHECK(m.pr() <= 1.0);
        CHECK(m.r() >= 0.0);
    }
    // no underflow panic far beyond the double exp range
    CHECK(DependenceMeasure(-5000.0, 0.0).pr() == 0.0);
    CHECK(DependenceMeasure(5000.0, 0.0).pr() == 1.0);
}

TEST_CASE("combine is affine in the prior term") {
    const double bf = 1.5;
    for (double prior : {0.25, -0.75, 2.0}) {
        const auto m0 = combine(PriorOdds(prior), LogBayesFactor(bf));
        CHECK(m0.lnr() == prior + bf);  // bit-exact: same expression
        const double delta = 0.5;      // representable shift
        const auto m1 = combine(PriorOdds(prior + delta), LogBayesFactor(bf));
        CHECK(m1.lnr() - m0.lnr() == delta);
    }
}

TEST_CASE("NaN and non-finite priors are rejected at construction") {
    CHECK_THROWS_AS(PriorOdds(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(PriorOdds{kInf}, std::invalid_argument);
    CHECK_THROWS_AS(LogBayesFactor(std::nan("")), std::invalid_argument);
    CHECK_NOTHROW(LogBayesFactor{kInf});
    CHECK_NOTHROW(LogBayesFactor{-kInf});
}

TEST_CASE("PairedDataset enforces its invariants") {
    CHECK_THROWS_AS(PairedDataset::univariate({1.0, 2.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PairedDataset::univariate({1.0, kInf}, {1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PairedDataset({1.0, 2.0, 3.0}, {1.0, 2.0}, 2, 2),
                    std::invalid_argument);

    const PairedDataset d({1.0, 2.0, 3.0, 4.0}, {5.0, 6.0}, 2, 1);
    CHECK(d.size() == 2);
    CHECK(d.dim_x() == 2);
    CHECK(d.x(1)[0] == 3.0);
    CHECK(d.y1(1) == 6.0);

    const PairedDataset s = d.swapped();
    CHECK(s.dim_x() == 1);
    CHECK(s.x1(0) == 5.0);
    CHECK(s.y(1)[1] == 4.0);
}

TEST_CASE("default prior odds are even") {
    CHECK(PriorOdds().log_odds() == 0.0);
}

TEST_CASE("view parsing round-trips the names") {
    for (View v : {View::pr, View::r, View::bf, View::lnr, View::logr})
        CHECK(parse_view(view_name(v)) == v);
    CHECK_THROWS_AS(parse_view("decibel"), std::invalid_argument);
}
