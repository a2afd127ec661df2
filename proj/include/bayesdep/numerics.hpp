#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bayesdep::numerics {

/// Quadrature did not reach the requested tolerance; carries the best estimate.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& msg, double best_estimate, double err_estimate)
        : std::runtime_error(msg), best_estimate_(best_estimate), err_estimate_(err_estimate) {}
    double best_estimate() const noexcept { return best_estimate_; }
    double err_estimate() const noexcept { return err_estimate_; }

private:
    double best_estimate_, err_estimate_;
};

/// ODE state became non-finite during integration.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& msg, double last_valid_time)
        : std::runtime_error(msg), last_valid_time_(last_valid_time) {}
    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

struct QuadratureSpec {
    enum class Method { gauss_legendre_composite, adaptive_simpson };
    Method method = Method::gauss_legendre_composite;
    double abs_tol = 1e-300;  // linear-scale floor; rel_tol is the workhorse
    double rel_tol = 1e-9;
    int max_subdivisions = 14;  // panel-doubling levels (2^k panels at level k)
    int nodes_per_panel = 12;   // Gauss-Legendre order per panel
    void validate() const;
};

struct LogIntegral {
    double log_value;     // ln of the integral
    double err_estimate;  // relative error estimate |I_k - I_{k-1}| / I_k
    int levels_used;
};

/// ln(sum exp(terms)), max-shifted. Handles -inf terms; throws on empty input.
double log_sum_exp(std::span<const double> terms);
inline double log_sum_exp(std::initializer_list<double> terms) {
    return log_sum_exp(std::span<const double>(terms.begin(), terms.size()));
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre polynomial. Deterministic for a given n.
struct GaussLegendreRule {
    std::vector<double> nodes, weights;
};
GaussLegendreRule gauss_legendre_rule(int n);

/// One composite pass over [a, b] with `panels` equal panels, n-node
/// Gauss-Legendre each, entirely in log space: log_f returns ln f(x).
double log_gauss_legendre(const std::function<double(double)>& log_f, double a,
                          double b, int panels, int nodes_per_panel);

/// Same with composite Simpson (2*panels sub-intervals).
double log_simpson(const std::function<double(double)>& log_f, double a, double b,
                   int panels);

/// ln of the integral of exp(log_f) over [a, b]. b may be +infinity, in which
/// case the substitution x = a + t/(1-t) maps the domain onto [0, 1) and the
/// panel-doubling refinement concentrates nodes near t = 1 along with the
/// rest of the domain. Doubles the panel count until two consecutive passes
/// agree to tolerance; non-convergence raises accuracy_error carrying the
/// best estimate.
LogIntegral integrate(const std::function<double(double)>& log_f, double a, double b,
                      const QuadratureSpec& spec = QuadratureSpec{});

/// ln I0(x) for x >= 0. Power series below x = 20, asymptotic expansion
/// above; the switch point is covered by the oracle tests.
double log_bessel_i0(double x);

/// ln I1(x)/I0(x) would also fit here; only the ratio A(kappa) = I1/I0 is
/// needed by callers (mean resultant length of a von Mises distribution).
double bessel_i1_over_i0(double x);

struct ScalarMax {
    double argmax;
    double max;
};

/// Golden-section bracketing on [lo, hi] followed by one three-point
/// parabolic polish; assumes f unimodal (caller's responsibility).
/// |argmax - true argmax| < tol for unimodal f evaluated exactly; the polish
/// keeps the result reproducible when f carries last-ulp evaluation noise.
/// A constant f degenerates to the midpoint of the final bracket.
ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo,
                          double hi, double tol);

/// Coarse pre-scan (n_prescan uniform points including endpoints) to pick the
/// bracket, then golden-section inside it. Guards callers whose objective is
/// unimodal in practice but not provably so.
ScalarMax maximize_with_prescan(const std::function<double(double)>& f, double lo,
                                double hi, double tol, int n_prescan = 41);

// Student t distribution, nu > 0. cdf via the regularized incomplete beta
// function; quantile by safeguarded Newton on the cdf.
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);
double student_t_log_pdf(double x, double nu);

// Gamma-family special functions, x > 0.
double ln_gamma(double x);
double digamma(double x);
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Gamma distribution in the (shape, rate) parameterization.
double gamma_log_pdf(double x, double shape, double rate);
double gamma_cdf(double x, double shape, double rate);
double gamma_quantile(double p, double shape, double rate);

/// Inverse standard normal cdf (rational approximation + one Halley step).
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b) (continued fraction).
double inc_beta(double a, double b, double x);

struct OdeState {
    double t = 0.0;
    std::vector<double> y;
    double dt = 0.0;  // step used to reach this state (0 for an initial state)
};

using Deriv = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

/// Classical fixed-step 4th-order Runge-Kutta from y0.t to t_end. The returned
/// trajectory holds the state at every step multiple of dt, starting with y0.
/// A non-finite state raises divergence_error with the last valid time.
std::vector<OdeState> rk4_integrate(const Deriv& deriv, const OdeState& y0,
                                    double t_end, double dt);

/// Extracts the state nearest each integer second covered by the trajectory.
std::vector<OdeState> downsample_per_second(std::span<const OdeState> trajectory);

}  // namespace bayesdep::numerics
