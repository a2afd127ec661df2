#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bayesdep/datagen.hpp"
#include "bayesdep/numerics.hpp"
#include "oracles.hpp"

using namespace bayesdep;
using namespace bayesdep::datagen;

TEST_CASE("every generator is a pure function of (parameters, seed)") {
    const auto a1 = gen_noisy_normal(0.3, 1.0, 0.1, 50, 42);
    const auto a2 = gen_noisy_normal(0.3, 1.0, 0.1, 50, 42);
    CHECK(a1.x_flat() == a2.x_flat());
    CHECK(a1.y_flat() == a2.y_flat());
    const auto b1 = gen_noisy_normal(0.3, 1.0, 0.1, 50, 43);
    CHECK(a1.x_flat() != b1.x_flat());

    const auto c1 = gen_gamma_tcopula(CopulaMode::student_t, 0.5, {}, 30, 7);
    const auto c2 = gen_gamma_tcopula(CopulaMode::student_t, 0.5, {}, 30, 7);
    CHECK(c1.x_flat() == c2.x_flat());

    const auto p1 = gen_phase(PhaseModel::vonmises, 0.5, 3.0, 40, 9);
    const auto p2 = gen_phase(PhaseModel::vonmises, 0.5, 3.0, 40, 9);
    CHECK(p1.theta == p2.theta);

    const auto r1 = gen_rossler(0.1, 0.01, 10, 3, RosslerConfig{.transient_seconds = 50.0});
    const auto r2 = gen_rossler(0.1, 0.01, 10, 3, RosslerConfig{.transient_seconds = 50.0});
    CHECK(r1.x_flat() == r2.x_flat());
}

TEST_CASE("mix derives distinct, reproducible streams") {
    CHECK(mix(1, 2) == mix(1, 2));
    CHECK(mix(1, 2) != mix(1, 3));
    CHECK(mix(1, 2) != mix(2, 1));
    CHECK(mix(0, 0) != 0);
}

TEST_CASE("noisy normal: degenerate correlation, zero-correlation statistics") {
    const auto degenerate = gen_noisy_normal(1.0, 1.0, 0.0, 25, 5);
    for (std::size_t i = 0; i < degenerate.size(); ++i)
        CHECK(degenerate.x1(i) == degenerate.y1(i));

    const auto big = gen_noisy_normal(0.0, 1.0, 0.0, 100000, 6);
    CHECK(std::abs(oracles::pearson(big.x_flat(), big.y_flat())) < 0.01);

    CHECK_THROWS_AS(gen_noisy_normal(1.5, 1.0, 0.0, 5, 1), std::invalid_argument);
}

TEST_CASE("functional: deterministic link and moment checks") {
    const auto exact = gen_functional(FunctionalTruth::h1, 1.0, 0.0, 20, 8);
    for (std::size_t i = 0; i < exact.size(); ++i) CHECK(exact.x1(i) == exact.y1(i));

    const auto h0 = gen_functional(FunctionalTruth::h0, 1.0, 1.0, 100000, 9);
    CHECK(std::abs(oracles::pearson(h0.x_flat(), h0.y_flat())) < 0.01);

    // cov(X, Y) = tau2, var = tau2 + sigma2: correlation 0.5 at tau2 = sigma2 = 1
    const auto h1 = gen_functional(FunctionalTruth::h1, 1.0, 1.0, 100000, 10);
    CHECK(oracles::pearson(h1.x_flat(), h1.y_flat()) == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("gamma t-copula: concordance and margins") {
    const auto indep = gen_gamma_tcopula(CopulaMode::product, 0.0, {}, 100000, 11);
    CHECK(std::abs(oracles::kendall_tau(indep.x_flat(), indep.y_flat())) < 0.01);

    const auto dep = gen_gamma_tcopula(CopulaMode::student_t, 0.7, {}, 100000, 12);
    const double tau_expected = 2.0 / std::numbers::pi * std::asin(0.7);
    CHECK(oracles::kendall_tau(dep.x_flat(), dep.y_flat()) ==
          doctest::Approx(tau_expected).epsilon(0.04));

    // default margins: shape/rate means are 1.0 and 2.0
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < dep.size(); ++i) {
        mx += dep.x1(i);
        my += dep.y1(i);
        CHECK(dep.x1(i) > 0.0);
    }
    mx /= static_cast<double>(dep.size());
    my /= static_cast<double>(dep.size());
    CHECK(mx == doctest::Approx(1.0).epsilon(0.02));
    CHECK(my == doctest::Approx(2.0).epsilon(0.02));

    CHECK_THROWS_AS(gen_gamma_tcopula(CopulaMode::student_t, 1.0, {}, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("rossler: uncoupled oscillators equal independent single runs") {
    RosslerConfig cfg;
    cfg.transient_seconds = 20.0;  // equality is exact, no need for a long transient
    const auto pair = gen_rossler(0.0, 0.0, 5, 77, cfg);

    // re-integrate each oscillator alone from the same derived initial state
    for (int osc = 0; osc < 2; ++osc) {
        Rng ic(mix(77, static_cast<std::uint64_t>(osc)));
        numerics::OdeState s0;
        s0.y = {ic.uniform(-4.0, 4.0), ic.uniform(-4.0, 4.0), ic.uniform(0.0, 2.0)};
        const double w = osc == 0 ? 1.0 + cfg.mismatch : 1.0 - cfg.mismatch;
        numerics::Deriv deriv = [&cfg, w](double, std::span<const double> y,
                                          std::span<double> dy) {
            dy[0] = -w * y[1] - y[2];
            dy[1] = w * y[0] + cfg.a * y[1];
            dy[2] = cfg.b + y[2] * (y[0] - cfg.c);
        };
        std::vector<double> sampled;
        for (int sec = 0; sec < 25; ++sec) {
            const auto chunk = numerics::rk4_integrate(deriv, s0, s0.t + 1.0, cfg.dt);
            s0 = chunk.back();
            s0.dt = 0.0;
            if (sec >= 20) sampled.push_back(s0.y[0]);
        }
        // same integrator, same states: equality up to column standardization
        double mean = 0.0, var = 0.0;
        for (double v : sampled) mean += v;
        mean /= 5.0;
        for (double v : sampled) var += (v - mean) * (v - mean);
        var /= 5.0;
        for (int sec = 0; sec < 5; ++sec) {
            const double got = osc == 0 ? pair.x1(sec) : pair.y1(sec);
            const double want = (sampled[sec] - mean) / std::sqrt(var);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("rossler: mismatch decorrelates, strong coupling synchronizes") {
    const auto uncoupled = gen_rossler(0.0, 0.0, 10000, 13);
    CHECK(std::abs(oracles::pearson(uncoupled.x_flat(), uncoupled.y_flat())) < 0.1);

    const auto coupled = gen_rossler(1.0, 0.0, 1000, 14);
    CHECK(oracles::pearson(coupled.x_flat(), coupled.y_flat()) > 0.9);
}

TEST_CASE("phase sampler: uniform limit and the concentration law") {
    const auto flat = gen_phase(PhaseModel::vonmises, 1.0, 0.0, 100000, 15);
    CHECK(flat.rbar < 0.02);

    // mean resultant length of a von Mises sample approaches I1(k)/I0(k)
    const auto peaked = gen_phase(PhaseModel::vonmises, 0.0, 10.0, 100000, 16);
    CHECK(peaked.rbar ==
          doctest::Approx(numerics::bessel_i1_over_i0(10.0)).epsilon(0.011));
    for (double t : peaked.theta) {
        CHECK(t >= 0.0);
        CHECK(t < 2.0 * std::numbers::pi);
    }

    // 2 N rbar^2 is approximately chi-square(2) under uniform phases
    int below = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        const auto u = gen_phase(PhaseModel::uniform, 0.0, 0.0, 100000, mix(18, r));
        const double stat = 2.0 * 100000.0 * u.rbar * u.rbar;
        if (stat < 9.21) ++below;  // chi-square(2) 99th percentile
    }
    CHECK(below >= 98);
}

TEST_CASE("scenario dispatcher: schema validation and routing") {
    CHECK_THROWS_AS(generate(Scenario{"nosuch", {}}, 10, 1), std::invalid_argument);
    CHECK_THROWS_WITH_AS(generate(Scenario{"noisy-normal", {{"kappa", 1.0}}}, 10, 1),
                         doctest::Contains("kappa"), std::invalid_argument);
    CHECK_THROWS_AS(generate(Scenario{"phase-uniform", {}}, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_phase(Scenario{"noisy-normal", {{"rho", 0.0}}}, 10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate(Scenario{"rossler", {}}, 10, 1), std::invalid_argument);

    // the dispatcher and the direct call agree bit for bit
    const auto via = generate(Scenario{"noisy-normal", {{"rho", 0.2}, {"sigma2", 0.5}}}, 25, 3);
    const auto direct = gen_noisy_normal(0.2, 1.0, 0.5, 25, 3);
    CHECK(via.x_flat() == direct.x_flat());

    const auto phase = generate_phase(Scenario{"phase-vonmises", {{"kappa", 2.0}}}, 25, 3);
    const auto phase_direct = gen_phase(PhaseModel::vonmises, 0.0, 2.0, 25, 3);
    CHECK(phase.theta == phase_direct.theta);
}

TEST_CASE("generated datasets satisfy the paired-data invariants") {
    for (const auto& d :
         {gen_noisy_normal(0.9, 2.0, 0.3, 64, 21), gen_functional(FunctionalTruth::h1, 1.0, 0.2, 64, 22),
          gen_gamma_tcopula(CopulaMode::student_t, -0.4, {}, 64, 23)}) {
        CHECK(d.size() == 64);
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(std::isfinite(d.x1(i)));
            CHECK(std::isfinite(d.y1(i)));
        }
    }
}
