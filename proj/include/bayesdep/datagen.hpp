#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "bayesdep/core.hpp"
#include "bayesdep/models.hpp"

namespace bayesdep::datagen {

// Splitmix-style 64-bit stream. Constants: the increment is the golden-ratio
// constant 0x9E3779B97F4A7C15; the output scramble multiplies by
// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB with xor-shifts 30/27/31. The
// reproducibility contract is per-build determinism of this repository's own
// outputs, not bit equality with other implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform01();     // [0, 1), 53-bit
    double uniform_open();  // (0, 1)
    double uniform(double lo, double hi);
    double normal();        // Box-Muller, two uniforms per draw

private:
    std::uint64_t state_;
};

/// Stream derivation for replications and grid cells: mix(seed, r) keys the
/// r-th derived stream off a base seed. Splitmix-style scramble of
/// a + GOLDEN * (b + ODD) with GOLDEN = 0x9E3779B97F4A7C15 and
/// ODD = 0x632BE59BD9B4E019.
std::uint64_t mix(std::uint64_t a, std::uint64_t b);

/// Latent bivariate normal (0, tau2 M(rho)) plus independent N(0, sigma2)
/// noise on each coordinate.
PairedDataset gen_noisy_normal(double rho, double tau2, double sigma2, std::size_t n,
                               std::uint64_t seed);

enum class FunctionalTruth { h0, h1 };

/// Shared latent T (h1) or independent latents U, V (h0), both plus noise.
PairedDataset gen_functional(FunctionalTruth truth, double tau2, double sigma2,
                             std::size_t n, std::uint64_t seed);

struct GammaMargins {
    models::GammaParams x{4.0, 4.0};
    models::GammaParams y{10.0, 5.0};
};

enum class CopulaMode { product, student_t };

/// Gamma margins joined by a Student t copula (scaled-normal / chi-square
/// construction), or by the product copula (independent margins).
PairedDataset gen_gamma_tcopula(CopulaMode mode, double rho, const GammaMargins& margins,
                                std::size_t n, std::uint64_t seed, double nu = 5.0);

struct RosslerConfig {
    // Standard coupled-benchmark constants; overridable through Scenario params.
    double a = 0.165;
    double b = 0.2;
    double c = 10.0;
    double mismatch = 0.015;  // omega_{1,2} = 1 +/- mismatch
    double dt = 1e-3;         // integration step, seconds
    double transient_seconds = 500.0;
};

/// Two coupled Rossler oscillators with frequency mismatch; integrates with
/// fixed-step RK4, discards the transient, keeps (x1, x2) at 1 Hz,
/// standardizes each column (zero mean, unit variance) and then adds
/// N(0, sigma2) observation noise. Oscillator i draws its initial state from
/// the derived stream mix(seed, i); the noise stream is mix(seed, 2).
PairedDataset gen_rossler(double coupling, double sigma2, std::size_t n_seconds,
                          std::uint64_t seed, const RosslerConfig& config = RosslerConfig{});

enum class PhaseModel { uniform, vonmises };

/// Circular sample: uniform on [0, 2pi) or von Mises(mu, kappa) via the
/// Best-Fisher rejection sampler.
models::PhaseSample gen_phase(PhaseModel model, double mu, double kappa, std::size_t n,
                              std::uint64_t seed);

/// A named generative scenario with numeric parameters; the sweep runner and
/// the command line resolve axis names against the per-kind schema.
struct Scenario {
    std::string kind;  // noisy-normal | functional | gamma-tcopula | rossler |
                       // phase-uniform | phase-vonmises
    std::map<std::string, double> params;
};

bool is_phase_scenario(const std::string& kind);
const std::set<std::string>& scenario_param_names(const std::string& kind);
void validate_scenario(const Scenario& scenario);

PairedDataset generate(const Scenario& scenario, std::size_t n, std::uint64_t seed);
models::PhaseSample generate_phase(const Scenario& scenario, std::size_t n,
                                   std::uint64_t seed);

}  // namespace bayesdep::datagen
