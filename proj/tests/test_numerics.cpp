#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "bayesdep/numerics.hpp"
#include "oracles.hpp"

using namespace bayesdep::numerics;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// I0 and I1 through their integral representations, evaluated by plain Simpson.
double i0_quadrature(double x) {
    return oracles::simpson([x](double t) { return std::exp(x * std::cos(t)); }, 0.0, kPi,
                            20000) /
           kPi;
}
double i1_quadrature(double x) {
    return oracles::simpson(
               [x](double t) { return std::exp(x * std::cos(t)) * std::cos(t); }, 0.0, kPi,
               20000) /
           kPi;
}
}  // namespace

TEST_CASE("log_sum_exp basics") {
    CHECK(log_sum_exp({0.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(log_sum_exp({1000.0, 1000.0}) ==
          doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
    CHECK(log_sum_exp({0.0, -kInf}) == 0.0);
    CHECK(log_sum_exp({-kInf, -kInf}) == -kInf);
    CHECK_THROWS_AS(log_sum_exp(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("log_bessel_i0 values against the quadrature oracle") {
    CHECK(log_bessel_i0(0.0) == 0.0);
    // I0(1) = 1.26606587775200833559... (oracle-confirmed below)
    CHECK(std::exp(log_bessel_i0(1.0)) ==
          doctest::Approx(1.26606587775200834).epsilon(1e-12));
    for (double x = 0.1; x <= 30.0; x += 0.7654) {
        const double oracle = i0_quadrature(x);
        CHECK(std::exp(log_bessel_i0(x)) == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("log_bessel_i0 large-argument behaviour") {
    // direct I0 overflows at 700; the log form must not
    const double v = log_bessel_i0(700.0);
    CHECK(std::isfinite(v));
    const double leading = 700.0 - 0.5 * std::log(2.0 * kPi * 700.0);
    CHECK(v == doctest::Approx(leading).epsilon(1e-3));
    CHECK(v > leading);  // the correction series is positive

    // continuity at the series/asymptotic switch
    const double below = log_bessel_i0(std::nextafter(20.0, 0.0));
    const double above = log_bessel_i0(20.0);
    CHECK(std::abs(below - above) < 1e-9);
}

TEST_CASE("log_bessel_i0 is monotone increasing and convex") {
    double prev = log_bessel_i0(0.0);
    double prev_slope = -kInf;
    for (double x = 0.5; x <= 60.0; x += 0.5) {
        const double cur = log_bessel_i0(x);
        CHECK(cur > prev);
        const double slope = cur - prev;
        CHECK(slope > prev_slope - 1e-12);
        prev_slope = slope;
        prev = cur;
    }
    CHECK_THROWS_AS(log_bessel_i0(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(log_bessel_i0(kInf), std::invalid_argument);
}

TEST_CASE("bessel I1/I0 ratio against the quadrature oracle") {
    for (double x : {0.5, 2.0, 10.0, 19.0, 25.0}) {
        const double oracle = i1_quadrature(x) / i0_quadrature(x);
        CHECK(bessel_i1_over_i0(x) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("integrate: polynomial, normal mass, and the heavy-tail identity") {
    QuadratureSpec spec;
    const auto poly = integrate([](double x) { return 2.0 * std::log(x); }, 0.0, 1.0, spec);
    CHECK(poly.log_value == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));

    const auto gauss = integrate(
        [](double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * kPi); }, -8.0, 8.0, spec);
    CHECK(gauss.log_value == doctest::Approx(0.0).epsilon(1e-12));

    // antiderivative of kappa (1+kappa^2)^{-3/2} is -(1+kappa^2)^{-1/2}
    const auto tail = integrate(
        [](double k) { return std::log(k) - 1.5 * std::log1p(k * k); }, 0.0, kInf, spec);
    CHECK(tail.log_value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("integrate: adaptive Simpson route agrees") {
    QuadratureSpec spec;
    spec.method = QuadratureSpec::Method::adaptive_simpson;
    spec.max_subdivisions = 18;
    const auto poly = integrate([](double x) { return 2.0 * std::log(x); }, 0.0, 1.0, spec);
    CHECK(poly.log_value == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-9));
    const auto tail = integrate(
        [](double k) { return std::log(k) - 1.5 * std::log1p(k * k); }, 0.0, kInf, spec);
    CHECK(tail.log_value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("integrate: refusing to converge raises with the best estimate") {
    QuadratureSpec spec;
    spec.max_subdivisions = 3;
    spec.rel_tol = 1e-14;
    // a spike of width ~1e-4 needs more than 8 panels
    auto spike = [](double x) { return -1e8 * (x - 0.3333) * (x - 0.3333); };
    CHECK_THROWS_AS(integrate(spike, 0.0, 1.0, spec), accuracy_error);
    try {
        integrate(spike, 0.0, 1.0, spec);
    } catch (const accuracy_error& e) {
        CHECK(std::isfinite(e.best_estimate()));
        CHECK(e.err_estimate() >= 0.0);
    }
}

TEST_CASE("Gauss-Legendre convergence order on polynomials") {
    // n-node panels integrate degree 2n-1 exactly; on x^(2n+6) the composite
    // error scales like h^(2n), so halving the panel width divides the error
    // by at least 2^(2n-1).
    for (int nodes : {2, 3, 4}) {
        const double degree = 2.0 * nodes + 6.0;
        auto logf = [degree](double x) { return degree * std::log(x); };
        const double exact = std::log(1.0 / (degree + 1.0));
        const double e4 = std::abs(std::exp(log_gauss_legendre(logf, 0.0, 1.0, 4, nodes)) -
                                   std::exp(exact));
        const double e8 = std::abs(std::exp(log_gauss_legendre(logf, 0.0, 1.0, 8, nodes)) -
                                   std::exp(exact));
        CHECK(e4 / e8 >= std::pow(2.0, 2.0 * nodes - 1.0));
    }
}

TEST_CASE("maximize_scalar on a parabola and on a plateau") {
    const auto quad = maximize_scalar([](double x) { return -(x - 0.3) * (x - 0.3); }, -1.0,
                                      1.0, 1e-8);
    CHECK(quad.argmax == doctest::Approx(0.3).epsilon(1e-7));

    const auto flat = maximize_scalar([](double) { return 2.5; }, -1.0, 1.0, 1e-8);
    CHECK(flat.max == 2.5);
    CHECK(flat.argmax >= -1.0);
    CHECK(flat.argmax <= 1.0);

    CHECK_THROWS_AS(maximize_scalar([](double x) { return x; }, 1.0, 1.0, 1e-8),
                    std::invalid_argument);
}

TEST_CASE("maximize_with_prescan matches a dense grid search") {
    // three-point pseudo-sample profile likelihood of a nu=5 t copula in rho
    const double nu = 5.0;
    const double su[3] = {0.2, 0.7, 0.45};
    const double sv[3] = {0.3, 0.8, 0.4};
    double s[3], w[3];
    for (int i = 0; i < 3; ++i) {
        s[i] = student_t_quantile(su[i], nu);
        w[i] = student_t_quantile(sv[i], nu);
    }
    auto profile = [&](double rho) {
        double sum = 0.0;
        const double omr2 = 1.0 - rho * rho;
        for (int i = 0; i < 3; ++i) {
            const double q = (s[i] * s[i] - 2.0 * rho * s[i] * w[i] + w[i] * w[i]) / omr2;
            sum += -0.5 * std::log(omr2) - 0.5 * (nu + 2.0) * std::log1p(q / nu);
        }
        return sum;
    };
    const auto grid = oracles::grid_search(profile, -0.99, 0.99, 2001);
    const auto opt = maximize_with_prescan(profile, -0.99, 0.99, 1e-9);
    CHECK(std::abs(opt.argmax - grid.argmax) <= grid.spacing);
    CHECK(opt.max >= grid.max - 1e-12);
}

TEST_CASE("student t cdf and quantile") {
    CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(student_t_cdf(kInf, 5.0) == 1.0);
    CHECK(student_t_cdf(-kInf, 5.0) == 0.0);

    // oracle: integrate the t density directly
    const double nu = 5.0;
    auto pdf = [nu](double x) { return std::exp(student_t_log_pdf(x, nu)); };
    for (double x : {-2.0, -0.5, 0.3, 1.0, 2.5}) {
        const double oracle = 0.5 + oracles::simpson(pdf, 0.0, x, 40000);
        CHECK(student_t_cdf(x, nu) == doctest::Approx(oracle).epsilon(1e-10));
    }

    CHECK(student_t_quantile(0.95, 5.0) == doctest::Approx(2.0150483727).epsilon(1e-8));
    CHECK_THROWS_AS(student_t_quantile(0.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(student_t_cdf(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("student t quantile/cdf round trip on a grid") {
    for (double nu : {1.0, 2.5, 5.0, 30.0}) {
        double prev = -kInf;
        for (double p = 0.001; p < 0.9995; p += 0.0498) {
            const double q = student_t_quantile(p, nu);
            CHECK(q > prev);  // strictly increasing
            prev = q;
            CHECK(std::abs(student_t_cdf(q, nu) - p) < 1e-10);
        }
    }
}

TEST_CASE("gamma special functions") {
    CHECK(ln_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(ln_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
    CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-12));

    // digamma consistent with a central difference of ln_gamma
    for (double x : {0.3, 1.0, 2.7, 8.0, 41.5}) {
        const double h = 1e-6 * std::max(1.0, x);
        const double fd = (ln_gamma(x + h) - ln_gamma(x - h)) / (2.0 * h);
        CHECK(digamma(x) == doctest::Approx(fd).epsilon(1e-8));
    }
    // trigamma consistent with a central difference of digamma
    for (double x : {0.7, 3.2, 12.0}) {
        const double h = 1e-6 * std::max(1.0, x);
        const double fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
        CHECK(trigamma(x) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK_THROWS_AS(ln_gamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(digamma(-1.0), std::invalid_argument);
}

TEST_CASE("gamma cdf against direct density integration, quantile inverts") {
    const double shape = 4.0, rate = 4.0;
    auto pdf = [&](double x) { return std::exp(gamma_log_pdf(x, shape, rate)); };
    for (double x : {0.2, 0.8, 1.5, 3.0}) {
        const double oracle = oracles::simpson(pdf, 1e-12, x, 40000);
        CHECK(gamma_cdf(x, shape, rate) == doctest::Approx(oracle).epsilon(1e-9));
    }
    for (double p = 0.02; p < 0.999; p += 0.0971) {
        const double q = gamma_quantile(p, shape, rate);
        CHECK(std::abs(gamma_cdf(q, shape, rate) - p) < 1e-11);
    }
    CHECK_THROWS_AS(gamma_quantile(1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("normal quantile inverts erfc") {
    for (double p = 0.001; p < 0.9995; p += 0.0333) {
        const double z = normal_quantile(p);
        const double back = 0.5 * std::erfc(-z / std::numbers::sqrt2);
        CHECK(back == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("rk4 on the exponential and a full oscillator period") {
    Deriv decay = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = -y[0];
    };
    const auto traj = rk4_integrate(decay, OdeState{0.0, {1.0}, 0.0}, 1.0, 1e-3);
    CHECK(traj.size() == 1001);
    CHECK(traj.back().y[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));

    Deriv osc = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    // dt chosen so one period is an exact step multiple
    const double dt = 2.0 * kPi / 6320.0;
    const auto period = rk4_integrate(osc, OdeState{0.0, {1.0, 0.0}, 0.0}, 2.0 * kPi, dt);
    CHECK(std::abs(period.back().y[0] - 1.0) < 1e-6);
    CHECK(std::abs(period.back().y[1]) < 1e-6);
}

TEST_CASE("rk4 shows 4th-order convergence") {
    Deriv decay = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = -y[0];
    };
    auto err = [&](double dt) {
        const auto traj = rk4_integrate(decay, OdeState{0.0, {1.0}, 0.0}, 1.0, dt);
        return std::abs(traj.back().y[0] - std::exp(-1.0));
    };
    const double ratio = err(8e-3) / err(4e-3);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("rk4 reports divergence with the last valid time") {
    Deriv blowup = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[0] * y[0];
    };
    // dy/dt = y^2 from y(0)=1 blows up at t=1
    CHECK_THROWS_AS(rk4_integrate(blowup, OdeState{0.0, {1.0}, 0.0}, 2.0, 1e-3),
                    divergence_error);
    try {
        rk4_integrate(blowup, OdeState{0.0, {1.0}, 0.0}, 2.0, 1e-3);
    } catch (const divergence_error& e) {
        CHECK(e.last_valid_time() > 0.9);
        CHECK(e.last_valid_time() < 1.1);
    }
}

TEST_CASE("downsample keeps one state per second") {
    Deriv osc = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    const auto traj = rk4_integrate(osc, OdeState{0.0, {1.0, 0.0}, 0.0}, 5.0, 1e-3);
    const auto sampled = downsample_per_second(traj);
    REQUIRE(sampled.size() == 6);
    for (std::size_t s = 0; s < sampled.size(); ++s)
        CHECK(std::abs(sampled[s].t - static_cast<double>(s)) < 1e-9);
}

TEST_CASE("kernels are deterministic") {
    QuadratureSpec spec;
    auto logf = [](double k) { return std::log(k) - 1.5 * std::log1p(k * k); };
    const double a = integrate(logf, 0.0, kInf, spec).log_value;
    const double b = integrate(logf, 0.0, kInf, spec).log_value;
    CHECK(a == b);
    CHECK(log_bessel_i0(17.3) == log_bessel_i0(17.3));
    CHECK(student_t_quantile(0.123, 5.0) == student_t_quantile(0.123, 5.0));
}
