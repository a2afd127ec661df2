#include "bayesdep/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bayesdep::numerics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

bool check_finite(double v) { return std::isfinite(v); }

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::invalid_argument("QuadratureSpec: tolerances must be > 0");
    if (nodes_per_panel < 2)
        throw std::invalid_argument("QuadratureSpec: nodes_per_panel must be >= 2");
    if (max_subdivisions < 1)
        throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
}

double log_sum_exp(std::span<const double> terms) {
    if (terms.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    double m = -kInf;
    for (double t : terms) {
        if (std::isnan(t)) throw std::invalid_argument("log_sum_exp: NaN term");
        m = std::max(m, t);
    }
    if (m == -kInf) return -kInf;
    if (m == kInf) return kInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

GaussLegendreRule gauss_legendre_rule(int n) {
    if (n < 2) throw std::invalid_argument("gauss_legendre_rule: n must be >= 2");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-angle initial guess, then Newton on P_n.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double log_gauss_legendre(const std::function<double(double)>& log_f, double a,
                          double b, int panels, int nodes_per_panel) {
    if (!(a < b)) throw std::invalid_argument("log_gauss_legendre: requires a < b");
    if (panels < 1) throw std::invalid_argument("log_gauss_legendre: panels must be >= 1");
    const GaussLegendreRule rule = gauss_legendre_rule(nodes_per_panel);
    const double width = (b - a) / panels;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double h = 0.5 * width;
        const double c = lo + h;
        for (int i = 0; i < nodes_per_panel; ++i) {
            const double x = c + h * rule.nodes[i];
            const double lf = log_f(x);
            if (std::isnan(lf))
                throw std::invalid_argument("log_gauss_legendre: integrand returned NaN");
            terms.push_back(std::log(rule.weights[i] * h) + lf);
        }
    }
    return log_sum_exp(terms);
}

double log_simpson(const std::function<double(double)>& log_f, double a, double b,
                   int panels) {
    if (!(a < b)) throw std::invalid_argument("log_simpson: requires a < b");
    if (panels < 1) throw std::invalid_argument("log_simpson: panels must be >= 1");
    const int segments = 2 * panels;
    const double h = (b - a) / segments;
    std::vector<double> terms;
    terms.reserve(segments + 1);
    for (int i = 0; i <= segments; ++i) {
        const double x = (i == segments) ? b : a + i * h;
        const double w = (i == 0 || i == segments) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double lf = log_f(x);
        if (std::isnan(lf))
            throw std::invalid_argument("log_simpson: integrand returned NaN");
        terms.push_back(std::log(w * h / 3.0) + lf);
    }
    return log_sum_exp(terms);
}

namespace {

// ln|e^prev - e^cur| for the convergence check; -inf when equal.
double log_abs_diff(double prev, double cur) {
    const double hi = std::max(prev, cur), lo = std::min(prev, cur);
    if (hi == lo) return -kInf;
    if (hi == -kInf) return -kInf;
    if (!std::isfinite(hi)) return kInf;
    const double d = -std::expm1(lo - hi);  // in (0, 1]
    return hi + std::log(d);
}

}  // namespace

LogIntegral integrate(const std::function<double(double)>& log_f, double a, double b,
                      const QuadratureSpec& spec) {
    spec.validate();
    if (std::isnan(a) || std::isnan(b) || a == -kInf || b == -kInf || a == kInf)
        throw std::invalid_argument("integrate: bad interval");
    if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");

    std::function<double(double)> g;
    double lo = a, hi = b;
    if (b == kInf) {
        // x = a + t/(1-t) maps [0, 1) onto [a, inf); dx = dt/(1-t)^2. Closed
        // rules touch t = 1, where the substituted integrand has a finite
        // limit for integrable f; clamping just short of 1 evaluates it.
        g = [&log_f, a](double t) {
            const double tc = std::min(t, 1.0 - 1e-9);
            const double omt = 1.0 - tc;
            const double x = a + tc / omt;
            return log_f(x) - 2.0 * std::log(omt);
        };
        lo = 0.0;
        hi = 1.0;
    } else {
        g = log_f;
    }

    const bool simpson = spec.method == QuadratureSpec::Method::adaptive_simpson;
    auto pass = [&](int panels) {
        return simpson ? log_simpson(g, lo, hi, panels)
                       : log_gauss_legendre(g, lo, hi, panels, spec.nodes_per_panel);
    };

    // Panel doubling; converged once two consecutive refinements both sit
    // inside tolerance. The first comparisons are skipped so a narrow peak
    // missed by the coarsest grids cannot fake agreement.
    const int min_level = std::min(3, spec.max_subdivisions);
    double prev = pass(1);
    double cur = prev;
    double err = kInf;
    int small_streak = 0;
    for (int level = 1; level <= spec.max_subdivisions; ++level) {
        cur = pass(1 << level);
        const double ld = log_abs_diff(prev, cur);
        const double tol_log =
            log_sum_exp({std::log(spec.abs_tol), std::log(spec.rel_tol) + cur});
        err = (cur == -kInf) ? 0.0 : std::exp(ld - cur);
        const bool small = ld <= tol_log;
        small_streak = small ? small_streak + 1 : 0;
        if (level >= min_level && small_streak >= 2)
            return LogIntegral{cur, err, level};
        prev = cur;
    }
    throw accuracy_error("integrate: no convergence within max_subdivisions", cur, err);
}

double log_bessel_i0(double x) {
    if (std::isnan(x) || !std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("log_bessel_i0: x must be finite and >= 0");
    if (x < 20.0) {
        // sum_k (x^2/4)^k / (k!)^2 ; direct summation is safe well past the
        // switch point (overflow only near x ~ 700).
        const double q = 0.25 * x * x;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 300; ++k) {
            term *= q / (static_cast<double>(k) * static_cast<double>(k));
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return std::log(sum);
    }
    // I0(x) ~ e^x / sqrt(2 pi x) * [1 + 1/(8x) + 9/(2!(8x)^2) + ...]
    const double inv = 1.0 / x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 10; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= odd * odd / (8.0 * k) * inv;
        sum += term;
    }
    return x - 0.5 * std::log(2.0 * kPi * x) + std::log(sum);
}

double bessel_i1_over_i0(double x) {
    if (std::isnan(x) || !std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("bessel_i1_over_i0: x must be finite and >= 0");
    if (x < 20.0) {
        const double q = 0.25 * x * x;
        double t0 = 1.0, s0 = 1.0;       // I0 series
        double t1 = 0.5 * x, s1 = t1;    // I1 series: (x/2) sum q^k/(k!(k+1)!)
        for (int k = 1; k < 300; ++k) {
            t0 *= q / (static_cast<double>(k) * static_cast<double>(k));
            t1 *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
            s0 += t0;
            s1 += t1;
            if (t0 < s0 * 1e-17 && t1 < s1 * 1e-17) break;
        }
        return s1 / s0;
    }
    // Ratio of the asymptotic series; mu = 4 nu^2 terms.
    auto series = [&](double mu) {
        const double inv = 1.0 / x;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 10; ++k) {
            term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k) * inv;
            sum += term;
        }
        return sum;
    };
    return series(4.0) / series(0.0);
}

ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("maximize_scalar: requires lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("maximize_scalar: tol must be > 0");
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int iter = 0; iter < 400 && (b - a) > tol; ++iter) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fmid = f(mid);

    // Parabolic polish. Below the evaluation-noise floor the golden-section
    // comparisons wander by ~sqrt(noise/f''), so the vertex of a three-point
    // parabola at a spacing well above that floor is both closer to the true
    // maximizer and reproducible under last-ulp perturbations of f.
    const double h = std::max(32.0 * tol, 1e-4 * (hi - lo));
    const double xl = std::max(lo, mid - h), xr = std::min(hi, mid + h);
    if (xl < mid && mid < xr) {
        const double fl = f(xl), fr = f(xr);
        const double dl = mid - xl, dr = xr - mid;
        const double num = dl * dl * (fmid - fr) - dr * dr * (fmid - fl);
        const double den = dl * (fmid - fr) + dr * (fmid - fl);
        if (den != 0.0 && std::isfinite(den)) {
            const double vertex = mid - 0.5 * num / den;
            if (vertex > xl && vertex < xr) return ScalarMax{vertex, f(vertex)};
        }
    }
    return ScalarMax{mid, fmid};
}

ScalarMax maximize_with_prescan(const std::function<double(double)>& f, double lo,
                                double hi, double tol, int n_prescan) {
    if (!(lo < hi)) throw std::invalid_argument("maximize_with_prescan: requires lo < hi");
    if (n_prescan < 3) throw std::invalid_argument("maximize_with_prescan: n_prescan must be >= 3");
    int best = 0;
    double best_val = -kInf;
    const double step = (hi - lo) / (n_prescan - 1);
    for (int i = 0; i < n_prescan; ++i) {
        const double v = f(lo + i * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = lo + std::max(0, best - 1) * step;
    const double b = lo + std::min(n_prescan - 1, best + 1) * step;
    ScalarMax r = maximize_scalar(f, a, b, tol);
    if (best_val > r.max) return ScalarMax{lo + best * step, best_val};
    return r;
}

double ln_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("ln_gamma: x must be finite and > 0");
    return std::lgamma(x);
}

double digamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("digamma: x must be finite and > 0");
    double result = 0.0;
    while (x < 12.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // ln x - 1/(2x) - sum B_2k/(2k x^2k)
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 -
                      inv2 * (1.0 / 120.0 -
                              inv2 * (1.0 / 252.0 -
                                      inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result;
}

double trigamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("trigamma: x must be finite and > 0");
    double result = 0.0;
    while (x < 12.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    result += inv * (1.0 +
                     inv * (0.5 +
                            inv * (1.0 / 6.0 -
                                   inv2 * (1.0 / 30.0 -
                                           inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0))))));
    return result;
}

double inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("inc_beta: a and b must be > 0");
    if (std::isnan(x) || x < 0.0 || x > 1.0)
        throw std::invalid_argument("inc_beta: x must be in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    // continued fraction (Lentz); use the symmetry that converges fast
    auto cf = [](double a_, double b_, double x_) {
        const double fpmin = 1e-300;
        const double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
        double c = 1.0;
        double d = 1.0 - qab * x_ / qap;
        if (std::abs(d) < fpmin) d = fpmin;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= 500; ++m) {
            const int m2 = 2 * m;
            double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < fpmin) d = fpmin;
            c = 1.0 + aa / c;
            if (std::abs(c) < fpmin) c = fpmin;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < fpmin) d = fpmin;
            c = 1.0 + aa / c;
            if (std::abs(c) < fpmin) c = fpmin;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-15) return h;
        }
        throw accuracy_error("inc_beta: continued fraction did not converge", h, 1.0);
    };
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_front) * cf(a, b, x) / a;
    return 1.0 - std::exp(ln_front) * cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw std::invalid_argument("student_t_cdf: nu must be finite and > 0");
    if (std::isnan(x)) throw std::invalid_argument("student_t_cdf: NaN x");
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    const double tail = 0.5 * inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    return x >= 0.0 ? 1.0 - tail : tail;
}

double student_t_log_pdf(double x, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("student_t_log_pdf: nu must be > 0");
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(nu * kPi) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    // Acklam rational approximation, then one Halley step with erfc.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double student_t_quantile(double p, double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw std::invalid_argument("student_t_quantile: nu must be finite and > 0");
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("student_t_quantile: p must be in (0, 1)");
    if (p == 0.5) return 0.0;
    const double z = normal_quantile(p);
    // Cornish-Fisher style start, then safeguarded Newton on the cdf.
    double x = z + (z * z * z + z) / (4.0 * nu);
    double lo = -kInf, hi = kInf;
    for (int iter = 0; iter < 100; ++iter) {
        const double err = student_t_cdf(x, nu) - p;
        if (err > 0.0)
            hi = std::min(hi, x);
        else
            lo = std::max(lo, x);
        if (std::abs(err) < 1e-14) break;
        const double step = err * std::exp(-student_t_log_pdf(x, nu));
        double next = x - step;
        if (!(next > lo) || !(next < hi) || !std::isfinite(next)) {
            if (std::isfinite(lo) && std::isfinite(hi))
                next = 0.5 * (lo + hi);
            else if (std::isfinite(lo))
                next = lo + std::max(1.0, std::abs(lo));
            else
                next = hi - std::max(1.0, std::abs(hi));
        }
        if (next == x) break;
        x = next;
    }
    return x;
}

namespace {

// Regularized lower incomplete gamma by series (x < a+1) or continued
// fraction of Q (otherwise).
double gamma_p_impl(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double ln_pre = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return std::min(1.0, std::exp(ln_pre) * sum);
    }
    const double fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::max(0.0, 1.0 - std::exp(ln_pre) * h);
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_p: a must be > 0");
    if (std::isnan(x) || x < 0.0) throw std::invalid_argument("gamma_p: x must be >= 0");
    return gamma_p_impl(a, x);
}

double gamma_log_pdf(double x, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("gamma_log_pdf: shape and rate must be > 0");
    if (!(x > 0.0)) return -kInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
           rate * x;
}

double gamma_cdf(double x, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("gamma_cdf: shape and rate must be > 0");
    if (std::isnan(x)) throw std::invalid_argument("gamma_cdf: NaN x");
    if (x <= 0.0) return 0.0;
    return gamma_p_impl(shape, rate * x);
}

double gamma_quantile(double p, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("gamma_quantile: shape and rate must be > 0");
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("gamma_quantile: p must be in (0, 1)");
    // Wilson-Hilferty start in the rate=1 scale.
    const double z = normal_quantile(p);
    const double t = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * std::sqrt(shape));
    double x = shape * t * t * t;
    if (!(x > 0.0)) x = shape * std::exp(z / std::sqrt(shape)) * 1e-3 + 1e-12;
    double lo = 0.0, hi = kInf;
    for (int iter = 0; iter < 200; ++iter) {
        const double err = gamma_p_impl(shape, x) - p;
        if (err > 0.0)
            hi = std::min(hi, x);
        else
            lo = std::max(lo, x);
        if (std::abs(err) < 1e-14) break;
        const double lpdf = (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
        double next = x - err * std::exp(-lpdf);
        if (!(next > lo) || !(next < hi) || !std::isfinite(next))
            next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x + 1.0;
        if (next == x) break;
        x = next;
    }
    return x / rate;
}

std::vector<OdeState> rk4_integrate(const Deriv& deriv, const OdeState& y0,
                                    double t_end, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_integrate: dt must be > 0");
    if (!(t_end > y0.t)) throw std::invalid_argument("rk4_integrate: t_end must exceed y0.t");
    for (double v : y0.y)
        if (!check_finite(v)) throw std::invalid_argument("rk4_integrate: non-finite initial state");

    const auto steps = static_cast<long long>(std::llround((t_end - y0.t) / dt));
    const std::size_t dim = y0.y.size();
    std::vector<OdeState> traj;
    traj.reserve(static_cast<std::size_t>(steps) + 1);
    traj.push_back(OdeState{y0.t, y0.y, 0.0});

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), y(y0.y);
    double t = y0.t;
    for (long long s = 0; s < steps; ++s) {
        deriv(t, y, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        deriv(t + 0.5 * dt, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        deriv(t + 0.5 * dt, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
        deriv(t + dt, tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = y0.t + (s + 1) * dt;
        for (std::size_t i = 0; i < dim; ++i)
            if (!check_finite(y[i]))
                throw divergence_error("rk4_integrate: state diverged", traj.back().t);
        traj.push_back(OdeState{t, y, dt});
    }
    return traj;
}

std::vector<OdeState> downsample_per_second(std::span<const OdeState> trajectory) {
    std::vector<OdeState> out;
    if (trajectory.empty()) return out;
    const double t0 = trajectory.front().t;
    const double t1 = trajectory.back().t;
    std::size_t i = 0;
    // times are monotone; advance one cursor across the trajectory
    for (long long s = static_cast<long long>(std::ceil(t0 - 1e-9));
         s <= static_cast<long long>(std::floor(t1 + 1e-9)); ++s) {
        const double target = static_cast<double>(s);
        while (i + 1 < trajectory.size() &&
               std::abs(trajectory[i + 1].t - target) <= std::abs(trajectory[i].t - target))
            ++i;
        out.push_back(trajectory[i]);
    }
    return out;
}

}  // namespace bayesdep::numerics
