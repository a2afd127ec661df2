// Test-only oracles, kept independent of the library code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Plain linear-space composite Simpson; for oracle integrals whose values
/// fit in double.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int segments) {
    if (segments % 2 != 0) ++segments;
    const double h = (b - a) / segments;
    double sum = f(a) + f(b);
    for (int i = 1; i < segments; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

/// Local max-shift log-sum-exp so the oracle does not lean on the library.
inline double lse(std::span<const double> terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (double t : terms) m = std::max(m, t);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

/// Dense-grid trapezoid of exp(log_f) over [a, b] in log space.
inline double log_trapezoid(const std::function<double(double)>& log_f, double a, double b,
                            std::size_t nodes) {
    const double h = (b - a) / static_cast<double>(nodes - 1);
    std::vector<double> terms;
    terms.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double x = a + static_cast<double>(i) * h;
        const double w = (i == 0 || i + 1 == nodes) ? 0.5 * h : h;
        terms.push_back(std::log(w) + log_f(x));
    }
    return lse(terms);
}

struct LogMeanExp {
    double log_mean;  // ln( mean exp(terms) )
    double se_log;    // standard error of log_mean (delta method)
};

inline LogMeanExp log_mean_exp_with_se(std::span<const double> log_terms) {
    const double m = *std::max_element(log_terms.begin(), log_terms.end());
    const double k = static_cast<double>(log_terms.size());
    double mean = 0.0;
    for (double t : log_terms) mean += std::exp(t - m);
    mean /= k;
    double var = 0.0;
    for (double t : log_terms) {
        const double d = std::exp(t - m) - mean;
        var += d * d;
    }
    var /= (k - 1.0);
    return LogMeanExp{m + std::log(mean), std::sqrt(var / k) / mean};
}

struct GridMax {
    double argmax;
    double max;
    double spacing;
};

inline GridMax grid_search(const std::function<double(double)>& f, double lo, double hi,
                           int points) {
    GridMax g{lo, f(lo), (hi - lo) / (points - 1)};
    for (int i = 1; i < points; ++i) {
        const double x = lo + i * g.spacing;
        const double v = f(x);
        if (v > g.max) {
            g.max = v;
            g.argmax = x;
        }
    }
    return g;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

namespace detail {

// counts inversions by merge sort
inline std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                                 std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            buf[k++] = v[j++];
            count += mid - i;
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return count;
}

}  // namespace detail

/// Kendall's tau for continuous (tie-free) data, O(N log N).
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ysorted(n);
    for (std::size_t i = 0; i < n; ++i) ysorted[i] = y[order[i]];
    std::vector<double> buf(n);
    const std::uint64_t discordant = detail::merge_count(ysorted, buf, 0, n);
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return 1.0 - 2.0 * static_cast<double>(discordant) / pairs;
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace oracles
