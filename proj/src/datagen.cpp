#include "bayesdep/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bayesdep/numerics.hpp"

namespace bayesdep::datagen {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamOdd = 0x632BE59BD9B4E019ULL;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
    state_ += kGolden;
    return scramble(state_);
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return scramble(a + kGolden * (b + kStreamOdd));
}

PairedDataset gen_noisy_normal(double rho, double tau2, double sigma2, std::size_t n,
                               std::uint64_t seed) {
    if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("gen_noisy_normal: |rho| must be <= 1");
    if (!(tau2 > 0.0)) throw std::invalid_argument("gen_noisy_normal: tau2 must be > 0");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("gen_noisy_normal: sigma2 must be >= 0");
    Rng rng(seed);
    const double tau = std::sqrt(tau2), sigma = std::sqrt(sigma2);
    const double comp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = rng.normal(), z2 = rng.normal();
        const double e1 = rng.normal(), e2 = rng.normal();
        u[i] = tau * z1 + sigma * e1;
        v[i] = tau * (rho * z1 + comp * z2) + sigma * e2;
    }
    return PairedDataset::univariate(std::move(u), std::move(v));
}

PairedDataset gen_functional(FunctionalTruth truth, double tau2, double sigma2,
                             std::size_t n, std::uint64_t seed) {
    if (!(tau2 > 0.0)) throw std::invalid_argument("gen_functional: tau2 must be > 0");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("gen_functional: sigma2 must be >= 0");
    Rng rng(seed);
    const double tau = std::sqrt(tau2), sigma = std::sqrt(sigma2);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (truth == FunctionalTruth::h1) {
            const double t = tau * rng.normal();
            x[i] = t + sigma * rng.normal();
            y[i] = t + sigma * rng.normal();
        } else {
            x[i] = tau * rng.normal() + sigma * rng.normal();
            y[i] = tau * rng.normal() + sigma * rng.normal();
        }
    }
    return PairedDataset::univariate(std::move(x), std::move(y));
}

PairedDataset gen_gamma_tcopula(CopulaMode mode, double rho, const GammaMargins& margins,
                                std::size_t n, std::uint64_t seed, double nu) {
    if (mode == CopulaMode::student_t && !(std::abs(rho) < 1.0))
        throw std::invalid_argument("gen_gamma_tcopula: |rho| must be < 1");
    if (!(nu > 0.0)) throw std::invalid_argument("gen_gamma_tcopula: nu must be > 0");
    if (!(margins.x.shape > 0.0) || !(margins.x.rate > 0.0) || !(margins.y.shape > 0.0) ||
        !(margins.y.rate > 0.0))
        throw std::invalid_argument("gen_gamma_tcopula: margin parameters must be > 0");
    Rng rng(seed);
    const double comp = std::sqrt(1.0 - rho * rho);
    const double clamp = 1e-14;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u, v;
        if (mode == CopulaMode::product) {
            u = rng.uniform_open();
            v = rng.uniform_open();
        } else {
            const double z1 = rng.normal(), z2 = rng.normal();
            const double chi2 = numerics::gamma_quantile(rng.uniform_open(), 0.5 * nu, 0.5);
            const double scale = std::sqrt(nu / chi2);
            const double s = z1 * scale;
            const double w = (rho * z1 + comp * z2) * scale;
            u = std::clamp(numerics::student_t_cdf(s, nu), clamp, 1.0 - clamp);
            v = std::clamp(numerics::student_t_cdf(w, nu), clamp, 1.0 - clamp);
        }
        x[i] = numerics::gamma_quantile(u, margins.x.shape, margins.x.rate);
        y[i] = numerics::gamma_quantile(v, margins.y.shape, margins.y.rate);
    }
    return PairedDataset::univariate(std::move(x), std::move(y));
}

PairedDataset gen_rossler(double coupling, double sigma2, std::size_t n_seconds,
                          std::uint64_t seed, const RosslerConfig& config) {
    if (!(coupling >= 0.0)) throw std::invalid_argument("gen_rossler: coupling must be >= 0");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("gen_rossler: sigma2 must be >= 0");
    if (n_seconds < 1) throw std::invalid_argument("gen_rossler: need at least 1 second");
    if (!(config.dt > 0.0)) throw std::invalid_argument("gen_rossler: dt must be > 0");

    const double w1 = 1.0 + config.mismatch, w2 = 1.0 - config.mismatch;
    const double a = config.a, b = config.b, c = config.c, C = coupling;
    auto deriv = [w1, w2, a, b, c, C](double, std::span<const double> s, std::span<double> d) {
        d[0] = -w1 * s[1] - s[2] + C * (s[3] - s[0]);
        d[1] = w1 * s[0] + a * s[1];
        d[2] = b + s[2] * (s[0] - c);
        d[3] = -w2 * s[4] - s[5] + C * (s[0] - s[3]);
        d[4] = w2 * s[3] + a * s[4];
        d[5] = b + s[5] * (s[3] - c);
    };

    numerics::OdeState state;
    state.t = 0.0;
    state.y.resize(6);
    for (int i = 0; i < 2; ++i) {
        Rng ic(mix(seed, static_cast<std::uint64_t>(i)));
        state.y[3 * i + 0] = ic.uniform(-4.0, 4.0);
        state.y[3 * i + 1] = ic.uniform(-4.0, 4.0);
        state.y[3 * i + 2] = ic.uniform(0.0, 2.0);
    }

    std::vector<double> x1, x2;
    x1.reserve(n_seconds);
    x2.reserve(n_seconds);
    const auto total = static_cast<std::size_t>(config.transient_seconds) + n_seconds;
    try {
        // integrate second by second; only the 1 Hz endpoints are kept
        for (std::size_t s = 0; s < total; ++s) {
            auto chunk = numerics::rk4_integrate(deriv, state, state.t + 1.0, config.dt);
            state = chunk.back();
            state.dt = 0.0;
            if (s >= static_cast<std::size_t>(config.transient_seconds)) {
                x1.push_back(state.y[0]);
                x2.push_back(state.y[3]);
            }
        }
    } catch (const numerics::divergence_error& e) {
        std::ostringstream msg;
        msg << "gen_rossler: trajectory diverged (coupling " << coupling << ", seed " << seed
            << ") at t = " << e.last_valid_time();
        throw std::runtime_error(msg.str());
    }

    // standardize before noise so unit signal variance is a valid model input
    auto standardize = [](std::vector<double>& col) {
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        double var = 0.0;
        for (double v : col) var += (v - mean) * (v - mean);
        var /= static_cast<double>(col.size());
        if (!(var > 1e-30)) throw std::runtime_error("gen_rossler: degenerate column variance");
        const double inv_sd = 1.0 / std::sqrt(var);
        for (double& v : col) v = (v - mean) * inv_sd;
    };
    standardize(x1);
    standardize(x2);

    Rng noise(mix(seed, 2));
    const double sigma = std::sqrt(sigma2);
    for (std::size_t i = 0; i < n_seconds; ++i) {
        x1[i] += sigma * noise.normal();
        x2[i] += sigma * noise.normal();
    }
    return PairedDataset::univariate(std::move(x1), std::move(x2));
}

models::PhaseSample gen_phase(PhaseModel model, double mu, double kappa, std::size_t n,
                              std::uint64_t seed) {
    if (!(kappa >= 0.0)) throw std::invalid_argument("gen_phase: kappa must be >= 0");
    Rng rng(seed);
    std::vector<double> theta(n);
    if (model == PhaseModel::uniform || kappa < 1e-12) {
        for (std::size_t i = 0; i < n; ++i) theta[i] = kTwoPi * rng.uniform01();
        return models::PhaseSample::from_angles(std::move(theta));
    }
    // Best-Fisher rejection sampler
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0.0;
        for (;;) {
            const double u1 = rng.uniform_open();
            const double u2 = rng.uniform_open();
            const double z = std::cos(std::numbers::pi * u1);
            f = (1.0 + r * z) / (r + z);
            const double cc = kappa * (r - f);
            if (cc * (2.0 - cc) - u2 > 0.0) break;
            if (std::log(cc / u2) + 1.0 - cc >= 0.0) break;
        }
        const double u3 = rng.uniform01();
        double t = mu + (u3 < 0.5 ? -1.0 : 1.0) * std::acos(std::clamp(f, -1.0, 1.0));
        t = std::fmod(t, kTwoPi);
        if (t < 0.0) t += kTwoPi;
        theta[i] = t;
    }
    return models::PhaseSample::from_angles(std::move(theta));
}

namespace {

const std::map<std::string, std::set<std::string>>& scenario_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"noisy-normal", {"rho", "tau2", "sigma2"}},
        {"functional", {"truth", "tau2", "sigma2"}},
        {"gamma-tcopula",
         {"rho", "nu", "shape_x", "rate_x", "shape_y", "rate_y", "product"}},
        {"rossler", {"C", "sigma2", "mismatch", "transient", "dt"}},
        {"phase-uniform", {}},
        {"phase-vonmises", {"mu", "kappa"}},
    };
    return schema;
}

double param_or(const Scenario& s, const std::string& key, double fallback) {
    auto it = s.params.find(key);
    return it == s.params.end() ? fallback : it->second;
}

}  // namespace

bool is_phase_scenario(const std::string& kind) {
    return kind == "phase-uniform" || kind == "phase-vonmises";
}

const std::set<std::string>& scenario_param_names(const std::string& kind) {
    auto it = scenario_schema().find(kind);
    if (it == scenario_schema().end())
        throw std::invalid_argument("unknown scenario kind '" + kind + "'");
    return it->second;
}

void validate_scenario(const Scenario& scenario) {
    const auto& names = scenario_param_names(scenario.kind);
    for (const auto& [key, value] : scenario.params) {
        if (names.find(key) == names.end())
            throw std::invalid_argument("scenario '" + scenario.kind +
                                        "' does not take parameter '" + key + "'");
        if (!std::isfinite(value))
            throw std::invalid_argument("scenario parameter '" + key + "' is not finite");
    }
}

PairedDataset generate(const Scenario& scenario, std::size_t n, std::uint64_t seed) {
    validate_scenario(scenario);
    if (scenario.kind == "noisy-normal") {
        return gen_noisy_normal(param_or(scenario, "rho", 0.0), param_or(scenario, "tau2", 1.0),
                                param_or(scenario, "sigma2", 0.0), n, seed);
    }
    if (scenario.kind == "functional") {
        const double truth = param_or(scenario, "truth", 1.0);
        return gen_functional(truth != 0.0 ? FunctionalTruth::h1 : FunctionalTruth::h0,
                              param_or(scenario, "tau2", 1.0), param_or(scenario, "sigma2", 0.0),
                              n, seed);
    }
    if (scenario.kind == "gamma-tcopula") {
        GammaMargins margins;
        margins.x = {param_or(scenario, "shape_x", 4.0), param_or(scenario, "rate_x", 4.0)};
        margins.y = {param_or(scenario, "shape_y", 10.0), param_or(scenario, "rate_y", 5.0)};
        const CopulaMode mode = param_or(scenario, "product", 0.0) != 0.0
                                    ? CopulaMode::product
                                    : CopulaMode::student_t;
        return gen_gamma_tcopula(mode, param_or(scenario, "rho", 0.0), margins, n, seed,
                                 param_or(scenario, "nu", 5.0));
    }
    if (scenario.kind == "rossler") {
        RosslerConfig config;
        config.mismatch = param_or(scenario, "mismatch", config.mismatch);
        config.transient_seconds = param_or(scenario, "transient", config.transient_seconds);
        config.dt = param_or(scenario, "dt", config.dt);
        auto it = scenario.params.find("C");
        if (it == scenario.params.end())
            throw std::invalid_argument("rossler scenario requires parameter 'C'");
        return gen_rossler(it->second, param_or(scenario, "sigma2", 0.0), n, seed, config);
    }
    if (is_phase_scenario(scenario.kind))
        throw std::invalid_argument("scenario '" + scenario.kind +
                                    "' produces phase samples, not paired datasets");
    throw std::invalid_argument("unknown scenario kind '" + scenario.kind + "'");
}

models::PhaseSample generate_phase(const Scenario& scenario, std::size_t n,
                                   std::uint64_t seed) {
    validate_scenario(scenario);
    if (scenario.kind == "phase-uniform")
        return gen_phase(PhaseModel::uniform, 0.0, 0.0, n, seed);
    if (scenario.kind == "phase-vonmises") {
        auto it = scenario.params.find("kappa");
        if (it == scenario.params.end())
            throw std::invalid_argument("phase-vonmises scenario requires parameter 'kappa'");
        return gen_phase(PhaseModel::vonmises, param_or(scenario, "mu", 0.0), it->second, n,
                         seed);
    }
    throw std::invalid_argument("scenario '" + scenario.kind + "' is not a phase scenario");
}

}  // namespace bayesdep::datagen
