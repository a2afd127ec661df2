#include "bayesdep/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "bayesdep/datagen.hpp"

namespace bayesdep::models {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2Pi = 1.8378770664093454836;  // ln(2 pi)

}  // namespace

LogBayesFactor known_dist_lnbf(const PairedDataset& data, const LogDensity2& log_f1,
                               const LogDensity1& log_f0x, const LogDensity1& log_f0y) {
    double sum = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        const double l1 = log_f1(data.x(n), data.y(n));
        const double l0x = log_f0x(data.x(n));
        const double l0y = log_f0y(data.y(n));
        if (std::isnan(l1) || std::isnan(l0x) || std::isnan(l0y)) {
            std::ostringstream msg;
            msg << "known_dist_lnbf: density returned NaN at sample " << n;
            throw evaluation_error(msg.str(), n);
        }
        sum += l1 - l0x - l0y;
    }
    return LogBayesFactor(sum);
}

LogBayesFactor nested_bic_lnbf(double max_loglik_h0, double max_loglik_h1, int dim_h0,
                               int dim_h1, std::size_t n) {
    if (n < 2) throw std::invalid_argument("nested_bic_lnbf: N must be >= 2");
    if (std::isnan(max_loglik_h0) || std::isnan(max_loglik_h1))
        throw std::invalid_argument("nested_bic_lnbf: NaN log-likelihood");
    if (dim_h1 >= dim_h0 && max_loglik_h1 < max_loglik_h0)
        std::cerr << "nested_bic_lnbf: warning: larger model fits worse "
                     "(check nesting or optimization)\n";
    const double value = (max_loglik_h1 - max_loglik_h0) -
                         0.5 * (dim_h1 - dim_h0) * std::log(static_cast<double>(n));
    return LogBayesFactor(value, /*approximate=*/true);
}

ScatterMatrix ScatterMatrix::from(const PairedDataset& data) {
    if (!data.univariate_xy())
        throw std::invalid_argument("ScatterMatrix: univariate data required");
    ScatterMatrix s;
    for (std::size_t n = 0; n < data.size(); ++n) {
        const double u = data.x1(n), v = data.y1(n);
        s.s11 += u * u;
        s.s12 += u * v;
        s.s22 += v * v;
    }
    return s;
}

void NoisyNormalParams::validate() const {
    if (!(tau2 > 0.0)) throw std::invalid_argument("NoisyNormalParams: tau2 must be > 0");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("NoisyNormalParams: sigma2 must be >= 0");
    if (!(eps >= 0.0) || !(eps < 1.0))
        throw std::invalid_argument("NoisyNormalParams: eps must be in [0, 1)");
    quadrature.validate();
}

LogBayesFactor noisy_normal_lnbf(const PairedDataset& data, const NoisyNormalParams& params) {
    params.validate();
    if (!data.univariate_xy())
        throw std::invalid_argument("noisy_normal_lnbf: univariate data required");
    const double n = static_cast<double>(data.size());
    if (data.size() == 0) return LogBayesFactor(0.0);

    const ScatterMatrix s = ScatterMatrix::from(data);
    const double v0 = params.sigma2 + params.tau2;
    const double log_h0 = -n * kLn2Pi - n * std::log(v0) - s.trace() / (2.0 * v0);

    // Observed pair covariance is sigma2 I + tau2 M(rho); the prior density on
    // the allowed set is 1 / (2 (1 - eps)).
    const double log_q = -std::log(2.0 * (1.0 - params.eps));
    const double diag = params.sigma2 + params.tau2;
    auto log_integrand = [&](double rho) {
        const double off = params.tau2 * rho;
        const double det = (diag - off) * (diag + off);
        if (!(det > 0.0)) return -kInf;
        const double quad = (diag * s.trace() - 2.0 * off * s.s12) / det;
        return log_q - n * kLn2Pi - 0.5 * n * std::log(det) - 0.5 * quad;
    };

    // Two intervals, [-1, -eps] and [eps, 1]; kept separate so no panel
    // straddles the prior truncation points.
    const auto left = numerics::integrate(log_integrand, -1.0, -params.eps, params.quadrature);
    const auto right = numerics::integrate(log_integrand, params.eps, 1.0, params.quadrature);
    const double log_h1 = numerics::log_sum_exp({left.log_value, right.log_value});
    return LogBayesFactor(log_h1 - log_h0);
}

LogBayesFactor functional_lnbf(const PairedDataset& data, double tau2, double sigma2) {
    if (!(tau2 > 0.0)) throw std::invalid_argument("functional_lnbf: tau2 must be > 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("functional_lnbf: sigma2 must be > 0");
    if (!data.univariate_xy())
        throw std::invalid_argument("functional_lnbf: univariate data required");
    const double n = static_cast<double>(data.size());
    if (data.size() == 0) return LogBayesFactor(0.0);

    const double alpha2 = sigma2 / tau2;
    double quad = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double x = data.x1(i), y = data.y1(i);
        const double d = x - y, ss = x * x + y * y;
        quad += d * d / (2.0 * sigma2 * (2.0 + alpha2)) +
                ss / (2.0 * tau2 * (2.0 + alpha2)) - ss / (2.0 * tau2 * (1.0 + alpha2));
    }
    const double value = -0.5 * n * std::log(sigma2) - 0.5 * n * std::log(sigma2 + 2.0 * tau2) +
                         n * std::log(sigma2 + tau2) - quad;
    return LogBayesFactor(value);
}

GammaParams gamma_mle(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("gamma_mle: needs at least 2 values");
    double mean = 0.0, mean_log = 0.0, mean_sq = 0.0;
    for (double v : values) {
        if (!(v > 0.0)) throw std::invalid_argument("gamma_mle: values must be > 0");
        mean += v;
        mean_log += std::log(v);
        mean_sq += v * v;
    }
    const double n = static_cast<double>(values.size());
    mean /= n;
    mean_log /= n;
    mean_sq /= n;
    const double var = mean_sq - mean * mean;
    const double s = std::log(mean) - mean_log;  // > 0 unless all values equal
    if (!(s > 0.0) || !(var > 0.0))
        throw fit_error("gamma_mle: degenerate sample (no spread)");

    double a = mean * mean / var;  // method-of-moments start
    if (!(a > 0.0)) a = 1.0;
    double step = kInf;
    int iter = 0;
    for (; iter < 100; ++iter) {
        const double g = std::log(a) - numerics::digamma(a) - s;
        const double gp = 1.0 / a - numerics::trigamma(a);
        step = g / gp;
        double next = a - step;
        if (!(next > 0.0)) next = 0.5 * a;
        if (std::abs(next - a) <= 1e-12 * a) {
            a = next;
            break;
        }
        a = next;
    }
    if (iter >= 100) {
        std::ostringstream msg;
        msg << "gamma_mle: Newton did not converge (last shape " << a << ", step " << step << ")";
        throw fit_error(msg.str());
    }
    return GammaParams{a, a / mean};
}

double t_copula_log_density(double u, double v, double rho, double nu) {
    if (!(u > 0.0) || !(u < 1.0) || !(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("t_copula_log_density: u, v must be in (0, 1)");
    if (!(std::abs(rho) < 1.0))
        throw std::invalid_argument("t_copula_log_density: |rho| must be < 1");
    const double s = numerics::student_t_quantile(u, nu);
    const double w = numerics::student_t_quantile(v, nu);
    const double omr2 = 1.0 - rho * rho;
    const double q = (s * s - 2.0 * rho * s * w + w * w) / omr2;
    const double log_f2 = numerics::ln_gamma(0.5 * (nu + 2.0)) - numerics::ln_gamma(0.5 * nu) -
                          std::log(nu * std::numbers::pi) - 0.5 * std::log(omr2) -
                          0.5 * (nu + 2.0) * std::log1p(q / nu);
    return log_f2 - numerics::student_t_log_pdf(s, nu) - numerics::student_t_log_pdf(w, nu);
}

namespace {

constexpr double kRhoBracket = 0.99;

struct TScores {
    std::vector<double> s, w;
    double log_f1_sum = 0.0;  // sum of both margins' univariate t log pdfs
};

TScores t_scores(std::span<const double> u, std::span<const double> v, double nu) {
    TScores ts;
    ts.s.reserve(u.size());
    ts.w.reserve(v.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double si = numerics::student_t_quantile(u[i], nu);
        const double wi = numerics::student_t_quantile(v[i], nu);
        ts.s.push_back(si);
        ts.w.push_back(wi);
        ts.log_f1_sum += numerics::student_t_log_pdf(si, nu) +
                         numerics::student_t_log_pdf(wi, nu);
    }
    return ts;
}

double t_copula_profile(const TScores& ts, double rho, double nu) {
    const double omr2 = 1.0 - rho * rho;
    const double lg = numerics::ln_gamma(0.5 * (nu + 2.0)) - numerics::ln_gamma(0.5 * nu) -
                      std::log(nu * std::numbers::pi) - 0.5 * std::log(omr2);
    double sum = 0.0;
    for (std::size_t i = 0; i < ts.s.size(); ++i) {
        const double s = ts.s[i], w = ts.w[i];
        const double q = (s * s - 2.0 * rho * s * w + w * w) / omr2;
        sum += lg - 0.5 * (nu + 2.0) * std::log1p(q / nu);
    }
    return sum - ts.log_f1_sum;
}

}  // namespace

CopulaFit copula_ifm_fit(const PairedDataset& data) {
    if (!data.univariate_xy())
        throw std::invalid_argument("copula_ifm_fit: univariate data required");
    if (data.size() < 5) throw std::invalid_argument("copula_ifm_fit: needs N >= 5");
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!(data.x1(i) > 0.0) || !(data.y1(i) > 0.0))
            throw std::invalid_argument("copula_ifm_fit: data must be strictly positive");

    CopulaFit fit;
    fit.marginal_x = gamma_mle(data.x_flat());
    fit.marginal_y = gamma_mle(data.y_flat());

    const double clamp = 1e-12;
    std::vector<double> u(data.size()), v(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        u[i] = std::clamp(numerics::gamma_cdf(data.x1(i), fit.marginal_x.shape, fit.marginal_x.rate),
                          clamp, 1.0 - clamp);
        v[i] = std::clamp(numerics::gamma_cdf(data.y1(i), fit.marginal_y.shape, fit.marginal_y.rate),
                          clamp, 1.0 - clamp);
    }

    const TScores ts = t_scores(u, v, fit.nu);
    // Unimodal in practice for an elliptical copula likelihood; the pre-scan
    // picks the dominant bracket anyway.
    const auto best = numerics::maximize_with_prescan(
        [&](double rho) { return t_copula_profile(ts, rho, fit.nu); }, -kRhoBracket,
        kRhoBracket, 1e-10);
    fit.rho_hat = best.argmax;
    fit.rho_at_boundary = kRhoBracket - std::abs(fit.rho_hat) < 1e-4;
    if (fit.rho_at_boundary) fit.rho_hat = fit.rho_hat > 0.0 ? kRhoBracket : -kRhoBracket;
    fit.ihat = t_copula_profile(ts, fit.rho_hat, fit.nu) / static_cast<double>(data.size());
    return fit;
}

LogBayesFactor copula_lnbf(const CopulaFit& fit, std::size_t n) {
    if (n < 2) throw std::invalid_argument("copula_lnbf: N must be >= 2");
    // One extra parameter (the copula correlation) under dependence.
    const double value = static_cast<double>(n) * fit.ihat -
                         0.5 * std::log(static_cast<double>(n));
    return LogBayesFactor(value, /*approximate=*/true);
}

PhaseSample PhaseSample::from_angles(std::vector<double> theta) {
    PhaseSample s;
    s.n = theta.size();
    std::complex<double> sum{0.0, 0.0};
    for (double t : theta) {
        if (!std::isfinite(t)) throw std::invalid_argument("PhaseSample: non-finite angle");
        sum += std::polar(1.0, t);
    }
    s.rbar = s.n == 0 ? 0.0 : std::abs(sum) / static_cast<double>(s.n);
    s.rbar = std::min(s.rbar, 1.0);
    s.theta = std::move(theta);
    return s;
}

PhaseSample PhaseSample::from_stats(std::size_t n, double rbar) {
    if (!(rbar >= 0.0) || !(rbar <= 1.0))
        throw std::invalid_argument("PhaseSample: rbar must be in [0, 1]");
    PhaseSample s;
    s.n = n;
    s.rbar = rbar;
    return s;
}

double vonmises_log_integral(std::size_t n, double rbar, const numerics::QuadratureSpec& spec) {
    if (n < 1) throw std::invalid_argument("vonmises_log_integral: N must be >= 1");
    if (!(rbar >= 0.0) || !(rbar <= 1.0))
        throw std::invalid_argument("vonmises_log_integral: rbar must be in [0, 1]");
    // at rbar = 1 the integrand tail grows like kappa^{(N-5)/2}; the integral
    // diverges for N >= 3 (perfect alignment: the analytic limit is +inf)
    if (rbar == 1.0 && n >= 3) return kInf;
    const double nd = static_cast<double>(n);
    const double nr = nd * rbar;
    auto log_integrand = [&](double kappa) {
        if (kappa <= 0.0) return -kInf;
        return std::log(kappa) - 1.5 * std::log1p(kappa * kappa) +
               numerics::log_bessel_i0(nr * kappa) - nd * numerics::log_bessel_i0(kappa);
    };
    return numerics::integrate(log_integrand, 0.0, kInf, spec).log_value;
}

DependenceMeasure vonmises_logr(const PhaseSample& sample, const PriorOdds& prior,
                                const numerics::QuadratureSpec& spec) {
    const double lnbf = vonmises_log_integral(sample.n, sample.rbar, spec);
    return combine(prior, LogBayesFactor(lnbf));
}

N0Curve n0_curve(double rbar, std::span<const std::size_t> n_grid, const PriorOdds& prior,
                 const numerics::QuadratureSpec& spec) {
    if (n_grid.empty()) throw std::invalid_argument("n0_curve: empty N grid");
    if (!std::is_sorted(n_grid.begin(), n_grid.end()))
        throw std::invalid_argument("n0_curve: N grid must be sorted ascending");
    N0Curve curve;
    curve.logr.reserve(n_grid.size());
    double best = kInf;
    for (std::size_t n : n_grid) {
        const double v =
            vonmises_logr(PhaseSample::from_stats(n, rbar), prior, spec).logr();
        curve.logr.push_back(v);
        if (v < best) {  // strict: ties resolve to the smallest N
            best = v;
            curve.n0 = n;
        }
    }
    return curve;
}

ModelComparator make_noisy_normal_comparator(const NoisyNormalParams& params) {
    params.validate();
    return ModelComparator{
        "noisy-normal", 0, 1, /*symmetric_xy=*/true, /*approximate=*/false,
        [params](const PairedDataset& d) { return noisy_normal_lnbf(d, params); }};
}

ModelComparator make_functional_comparator(double tau2, double sigma2) {
    if (!(tau2 > 0.0) || !(sigma2 > 0.0))
        throw std::invalid_argument("make_functional_comparator: tau2, sigma2 must be > 0");
    return ModelComparator{
        "functional", 0, 0, /*symmetric_xy=*/true, /*approximate=*/false,
        [tau2, sigma2](const PairedDataset& d) { return functional_lnbf(d, tau2, sigma2); }};
}

ModelComparator make_copula_comparator(double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("make_copula_comparator: nu must be > 0");
    return ModelComparator{
        "copula", 4, 5, /*symmetric_xy=*/true, /*approximate=*/true,
        [](const PairedDataset& d) { return copula_lnbf(copula_ifm_fit(d), d.size()); }};
}

ModelComparator make_known_normal_comparator(double rho, double tau2) {
    if (!(std::abs(rho) < 1.0))
        throw std::invalid_argument("make_known_normal_comparator: |rho| must be < 1");
    if (!(tau2 > 0.0)) throw std::invalid_argument("make_known_normal_comparator: tau2 must be > 0");
    auto evaluate = [rho, tau2](const PairedDataset& d) {
        if (!d.univariate_xy())
            throw std::invalid_argument("known-normal comparator: univariate data required");
        const double omr2 = 1.0 - rho * rho;
        double sum = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double x = d.x1(i), y = d.y1(i);
            // ln N2(x,y; tau2 M(rho)) - ln N(x; tau2) - ln N(y; tau2)
            sum += -0.5 * std::log(omr2) -
                   (x * x - 2.0 * rho * x * y + y * y) / (2.0 * tau2 * omr2) +
                   (x * x + y * y) / (2.0 * tau2);
        }
        return LogBayesFactor(sum);
    };
    // the pinned density has equal margins and a symmetric quadratic form
    return ModelComparator{"known-normal", 0, 0, /*symmetric_xy=*/true, false, evaluate};
}

TrendReport misspecification_trend(const DatasetGenerator& generator,
                                   const ModelComparator& comparator,
                                   std::span<const std::size_t> n_grid, int replications,
                                   std::uint64_t seed) {
    if (n_grid.size() < 2)
        throw std::invalid_argument("misspecification_trend: need at least 2 grid points");
    if (replications < 1)
        throw std::invalid_argument("misspecification_trend: replications must be >= 1");
    TrendReport report;
    report.n_grid.assign(n_grid.begin(), n_grid.end());
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        std::vector<double> lnr(replications);
        for (int r = 0; r < replications; ++r) {
            const std::uint64_t rs = datagen::mix(datagen::mix(seed, gi), static_cast<std::uint64_t>(r));
            lnr[r] = comparator.evaluate(generator(n_grid[gi], rs)).value();
        }
        std::sort(lnr.begin(), lnr.end());
        report.median_lnr.push_back(lnr[lnr.size() / 2]);
    }
    // least-squares slope of median lnr against N
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        mx += static_cast<double>(n_grid[i]);
        my += report.median_lnr[i];
    }
    mx /= static_cast<double>(n_grid.size());
    my /= static_cast<double>(n_grid.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        const double dx = static_cast<double>(n_grid[i]) - mx;
        sxy += dx * (report.median_lnr[i] - my);
        sxx += dx * dx;
    }
    report.slope = sxy / sxx;
    report.slope_sign = report.slope > 0.0 ? 1 : (report.slope < 0.0 ? -1 : 0);
    return report;
}

namespace {

PairedDataset bivariate_t_sample(double rho, double nu, bool independent, std::size_t n,
                                 std::uint64_t seed) {
    datagen::Rng rng(seed);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        if (independent) {
            const double s1 = std::sqrt(nu / numerics::gamma_quantile(rng.uniform_open(), 0.5 * nu, 0.5));
            const double s2 = std::sqrt(nu / numerics::gamma_quantile(rng.uniform_open(), 0.5 * nu, 0.5));
            x[i] = z1 * s1;
            y[i] = z2 * s2;
        } else {
            const double s = std::sqrt(nu / numerics::gamma_quantile(rng.uniform_open(), 0.5 * nu, 0.5));
            x[i] = z1 * s;
            y[i] = (rho * z1 + std::sqrt(1.0 - rho * rho) * z2) * s;
        }
    }
    return PairedDataset::univariate(std::move(x), std::move(y));
}

}  // namespace

DatasetGenerator correlated_t_generator(double rho, double nu) {
    if (!(std::abs(rho) < 1.0) || !(nu > 0.0))
        throw std::invalid_argument("correlated_t_generator: bad parameters");
    return [rho, nu](std::size_t n, std::uint64_t seed) {
        return bivariate_t_sample(rho, nu, false, n, seed);
    };
}

DatasetGenerator independent_t_generator(double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("independent_t_generator: bad parameters");
    return [nu](std::size_t n, std::uint64_t seed) {
        return bivariate_t_sample(0.0, nu, true, n, seed);
    };
}

}  // namespace bayesdep::models
