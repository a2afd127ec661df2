#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bayesdep {

/// N i.i.d. paired observations (x_n, y_n); each side has a fixed dimension.
/// Stored row-major (sample-major), immutable after construction.
class PairedDataset {
public:
    PairedDataset(std::vector<double> x, std::vector<double> y,
                  std::size_t dim_x = 1, std::size_t dim_y = 1)
        : x_(std::move(x)), y_(std::move(y)), dx_(dim_x), dy_(dim_y) {
        if (dx_ < 1 || dy_ < 1)
            throw std::invalid_argument("PairedDataset: dimensions must be >= 1");
        if (x_.size() % dx_ != 0 || y_.size() % dy_ != 0)
            throw std::invalid_argument("PairedDataset: flat sizes not divisible by dimensions");
        n_ = x_.size() / dx_;
        if (y_.size() / dy_ != n_)
            throw std::invalid_argument("PairedDataset: x and y sample counts differ");
        for (double v : x_)
            if (!std::isfinite(v)) throw std::invalid_argument("PairedDataset: non-finite x value");
        for (double v : y_)
            if (!std::isfinite(v)) throw std::invalid_argument("PairedDataset: non-finite y value");
    }

    static PairedDataset univariate(std::vector<double> x, std::vector<double> y) {
        return PairedDataset(std::move(x), std::move(y), 1, 1);
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t dim_x() const noexcept { return dx_; }
    std::size_t dim_y() const noexcept { return dy_; }
    bool univariate_xy() const noexcept { return dx_ == 1 && dy_ == 1; }

    std::span<const double> x(std::size_t n) const { return {x_.data() + n * dx_, dx_}; }
    std::span<const double> y(std::size_t n) const { return {y_.data() + n * dy_, dy_}; }

    // univariate shorthands
    double x1(std::size_t n) const { return x_[n * dx_]; }
    double y1(std::size_t n) const { return y_[n * dy_]; }

    const std::vector<double>& x_flat() const noexcept { return x_; }
    const std::vector<double>& y_flat() const noexcept { return y_; }

    PairedDataset swapped() const { return PairedDataset(y_, x_, dy_, dx_); }

private:
    std::vector<double> x_, y_;
    std::size_t dx_, dy_, n_;
};

/// ln p(H1)/p(H0). Finite by construction: both prior probabilities must be
/// strictly positive.
class PriorOdds {
public:
    explicit PriorOdds(double log_odds = 0.0) : log_odds_(log_odds) {
        if (!std::isfinite(log_odds))
            throw std::invalid_argument("PriorOdds: log odds must be finite");
    }
    double log_odds() const noexcept { return log_odds_; }

private:
    double log_odds_;
};

/// ln p(D|H1)/p(D|H0). +/-infinity is allowed (degenerate known-distribution
/// limits); NaN is rejected. `approximate` marks results whose O(1) term was
/// dropped (BIC-style comparators).
class LogBayesFactor {
public:
    explicit LogBayesFactor(double value, bool approximate = false)
        : value_(value), approximate_(approximate) {
        if (std::isnan(value))
            throw std::invalid_argument("LogBayesFactor: NaN value");
    }
    double value() const noexcept { return value_; }
    bool approximate() const noexcept { return approximate_; }

private:
    double value_;
    bool approximate_;
};

enum class View { pr, r, bf, lnr, logr };

/// The measure family around the log posterior odds lnr = ln p(H1|D)/p(H0|D).
/// All five views are strictly increasing functions of lnr; the prior term is
/// kept so the prior-free Bayes factor view stays recoverable. Probability is
/// materialized through the logistic transform only on demand, so |lnr| values
/// far beyond 700 stay exact in the log domain.
class DependenceMeasure {
public:
    DependenceMeasure(double lnr, double prior_log_odds, bool approximate = false)
        : lnr_(lnr), prior_log_odds_(prior_log_odds), approximate_(approximate) {
        if (std::isnan(lnr)) throw std::invalid_argument("DependenceMeasure: NaN lnr");
        if (!std::isfinite(prior_log_odds))
            throw std::invalid_argument("DependenceMeasure: prior log odds must be finite");
    }

    double lnr() const noexcept { return lnr_; }
    double logr() const noexcept { return lnr_ / std::numbers::ln10; }
    double r() const noexcept { return std::exp(lnr_); }

    double pr() const noexcept {
        // saturates cleanly at lnr = +/-inf (pr = 1 / 0)
        if (lnr_ >= 0.0) return 1.0 / (1.0 + std::exp(-lnr_));
        const double e = std::exp(lnr_);
        return e / (1.0 + e);
    }

    /// Bayes-factor view: posterior odds with the prior odds divided out.
    double bf() const noexcept { return std::exp(lnr_ - prior_log_odds_); }
    double ln_bf() const noexcept { return lnr_ - prior_log_odds_; }

    double prior_log_odds() const noexcept { return prior_log_odds_; }
    bool approximate() const noexcept { return approximate_; }

private:
    double lnr_;
    double prior_log_odds_;
    bool approximate_;
};

/// Bayes updating: posterior log odds = prior log odds + log Bayes factor.
inline DependenceMeasure combine(const PriorOdds& prior, const LogBayesFactor& bf) {
    return DependenceMeasure(prior.log_odds() + bf.value(), prior.log_odds(),
                             bf.approximate());
}

inline double to_view(const DependenceMeasure& m, View view) {
    switch (view) {
        case View::pr: return m.pr();
        case View::r: return m.r();
        case View::bf: return m.bf();
        case View::lnr: return m.lnr();
        case View::logr: return m.logr();
    }
    throw std::invalid_argument("to_view: unknown view");
}

inline View parse_view(std::string_view s) {
    if (s == "pr") return View::pr;
    if (s == "r") return View::r;
    if (s == "bf") return View::bf;
    if (s == "lnr") return View::lnr;
    if (s == "logr") return View::logr;
    throw std::invalid_argument("unknown view '" + std::string(s) +
                                "' (expected pr|r|bf|lnr|logr)");
}

inline const char* view_name(View v) {
    switch (v) {
        case View::pr: return "pr";
        case View::r: return "r";
        case View::bf: return "bf";
        case View::lnr: return "lnr";
        case View::logr: return "logr";
    }
    return "?";
}

}  // namespace bayesdep
