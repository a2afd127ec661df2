#include "bayesdep/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "bayesdep/io.hpp"

namespace bayesdep::experiments {

namespace {

using nlohmann::json;

const std::map<std::string, std::set<std::string>>& comparator_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"noisy-normal", {"tau2", "sigma2", "eps"}},
        {"functional", {"tau2", "sigma2"}},
        {"copula", {"nu"}},
        {"known-normal", {"rho", "tau2"}},
        {"vonmises", {}},
    };
    return schema;
}

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

/// One replication evaluator assembled for a fully resolved cell.
double evaluate_cell_rep(const SweepConfig& config,
                         const std::map<std::string, double>& scenario_params,
                         const std::map<std::string, double>& comparator_params,
                         std::size_t n, std::uint64_t seed, bool& approximate) {
    const PriorOdds prior(config.prior_log_odds);
    datagen::Scenario scenario{config.scenario.kind, scenario_params};

    if (config.comparator == "vonmises") {
        const auto sample = datagen::generate_phase(scenario, n, seed);
        const auto measure = models::vonmises_logr(sample, prior);
        approximate = measure.approximate();
        return measure.logr();
    }

    const PairedDataset data = datagen::generate(scenario, n, seed);
    LogBayesFactor bf(0.0);
    if (config.comparator == "noisy-normal") {
        models::NoisyNormalParams p;
        p.tau2 = param_or(comparator_params, "tau2", 1.0);
        p.sigma2 = param_or(comparator_params, "sigma2", 0.0);
        p.eps = param_or(comparator_params, "eps", 0.0);
        bf = models::noisy_normal_lnbf(data, p);
    } else if (config.comparator == "functional") {
        bf = models::functional_lnbf(data, param_or(comparator_params, "tau2", 1.0),
                                     param_or(comparator_params, "sigma2", 1.0));
    } else if (config.comparator == "copula") {
        bf = models::copula_lnbf(models::copula_ifm_fit(data), data.size());
    } else if (config.comparator == "known-normal") {
        auto it = comparator_params.find("rho");
        if (it == comparator_params.end())
            throw config_error("known-normal comparator requires parameter 'rho'");
        bf = models::make_known_normal_comparator(it->second,
                                                  param_or(comparator_params, "tau2", 1.0))
                 .evaluate(data);
    } else {
        throw config_error("unknown comparator '" + config.comparator + "'");
    }
    const auto measure = combine(prior, bf);
    approximate = measure.approximate();
    return measure.logr();
}

}  // namespace

const std::set<std::string>& comparator_param_names(const std::string& comparator) {
    auto it = comparator_schema().find(comparator);
    if (it == comparator_schema().end())
        throw config_error("unknown comparator '" + comparator + "'");
    return it->second;
}

void SweepConfig::validate() const {
    const auto& cmp_names = comparator_param_names(comparator);
    for (const auto& [key, value] : comparator_params) {
        if (cmp_names.find(key) == cmp_names.end())
            throw config_error("comparator '" + comparator + "' does not take parameter '" +
                               key + "'");
        if (!std::isfinite(value))
            throw config_error("comparator parameter '" + key + "' is not finite");
    }
    try {
        datagen::validate_scenario(scenario);
        datagen::scenario_param_names(scenario.kind);
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
    const bool phase = datagen::is_phase_scenario(scenario.kind);
    if (phase != (comparator == "vonmises"))
        throw config_error("scenario '" + scenario.kind + "' cannot feed comparator '" +
                           comparator + "'");
    if (axes.empty()) throw config_error("sweep needs at least one axis");
    const auto& scen_names = datagen::scenario_param_names(scenario.kind);
    std::set<std::string> seen;
    for (const auto& axis : axes) {
        if (axis.values.empty())
            throw config_error("axis '" + axis.name + "' has no values");
        if (!seen.insert(axis.name).second)
            throw config_error("axis '" + axis.name + "' appears twice");
        if (axis.name == "N") continue;
        const bool in_scenario = scen_names.find(axis.name) != scen_names.end();
        const bool in_comparator = cmp_names.find(axis.name) != cmp_names.end();
        if (!in_scenario && !in_comparator)
            throw config_error("axis '" + axis.name +
                               "' does not resolve against the scenario or comparator schema");
    }
    if (replications < 1) throw config_error("replications must be >= 1");
    if (!base_seed.has_value())
        throw config_error("base_seed is required (sweeps must be reproducible)");
    if (n < 1) throw config_error("n must be >= 1");
    if (!std::isfinite(prior_log_odds)) throw config_error("prior_log_odds must be finite");
}

SweepConfig SweepConfig::from_json(const json& j) {
    static const std::set<std::string> known_keys = {
        "comparator", "comparator_params", "scenario", "axes",       "n",
        "replications", "base_seed",        "prior_log_odds", "output_prefix"};
    if (!j.is_object()) throw config_error("sweep config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (known_keys.find(key) == known_keys.end())
            throw config_error("unknown config key '" + key + "'");

    SweepConfig c;
    try {
        c.comparator = j.at("comparator").get<std::string>();
        if (j.contains("comparator_params"))
            for (const auto& [key, value] : j.at("comparator_params").items())
                c.comparator_params[key] = value.get<double>();
        const auto& s = j.at("scenario");
        c.scenario.kind = s.at("kind").get<std::string>();
        for (const auto& [key, _] : s.items())
            if (key != "kind" && key != "params")
                throw config_error("unknown scenario key '" + key + "'");
        if (s.contains("params"))
            for (const auto& [key, value] : s.at("params").items())
                c.scenario.params[key] = value.get<double>();
        for (const auto& a : j.at("axes")) {
            Axis axis;
            axis.name = a.at("name").get<std::string>();
            axis.values = a.at("values").get<std::vector<double>>();
            c.axes.push_back(std::move(axis));
        }
        if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
        if (j.contains("replications")) c.replications = j.at("replications").get<int>();
        if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("prior_log_odds"))
            c.prior_log_odds = j.at("prior_log_odds").get<double>();
        if (j.contains("output_prefix"))
            c.output_prefix = j.at("output_prefix").get<std::string>();
    } catch (const json::exception& e) {
        throw config_error(std::string("malformed sweep config: ") + e.what());
    }
    c.validate();
    return c;
}

json SweepConfig::to_json() const {
    json j;
    j["comparator"] = comparator;
    j["comparator_params"] = json::object();
    for (const auto& [key, value] : comparator_params) j["comparator_params"][key] = value;
    j["scenario"]["kind"] = scenario.kind;
    j["scenario"]["params"] = json::object();
    for (const auto& [key, value] : scenario.params) j["scenario"]["params"][key] = value;
    j["axes"] = json::array();
    for (const auto& axis : axes)
        j["axes"].push_back({{"name", axis.name}, {"values", axis.values}});
    j["n"] = n;
    j["replications"] = replications;
    if (base_seed) j["base_seed"] = *base_seed;
    j["prior_log_odds"] = prior_log_odds;
    j["output_prefix"] = output_prefix;
    return j;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::span<const double> axis_values,
                               int rep) {
    std::uint64_t h = base_seed;
    for (double v : axis_values) h = datagen::mix(h, std::bit_cast<std::uint64_t>(v));
    return datagen::mix(h, static_cast<std::uint64_t>(rep));
}

double quantile_nearest_rank(std::span<const double> sorted_values, double p) {
    if (sorted_values.empty())
        throw std::invalid_argument("quantile_nearest_rank: empty sample");
    if (!(p > 0.0) || !(p <= 1.0))
        throw std::invalid_argument("quantile_nearest_rank: p must be in (0, 1]");
    const auto m = static_cast<double>(sorted_values.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * m));
    rank = std::max<std::size_t>(1, std::min<std::size_t>(rank, sorted_values.size()));
    return sorted_values[rank - 1];
}

int worker_thread_count() {
    if (const char* env = std::getenv("BAYESDEP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct Cell {
    std::vector<double> axis_values;
    std::map<std::string, double> scenario_params;
    std::map<std::string, double> comparator_params;
    std::size_t n = 0;
};

std::vector<Cell> enumerate_cells(const SweepConfig& config) {
    std::vector<std::size_t> sizes;
    std::size_t total = 1;
    for (const auto& axis : config.axes) {
        sizes.push_back(axis.values.size());
        total *= axis.values.size();
    }
    const auto& cmp_names = comparator_param_names(config.comparator);
    std::vector<Cell> cells;
    cells.reserve(total);
    for (std::size_t index = 0; index < total; ++index) {
        Cell cell;
        cell.scenario_params = config.scenario.params;
        cell.comparator_params = config.comparator_params;
        cell.n = config.n;
        // row-major: last axis varies fastest
        std::size_t rem = index;
        cell.axis_values.resize(config.axes.size());
        for (std::size_t a = config.axes.size(); a-- > 0;) {
            const std::size_t vi = rem % sizes[a];
            rem /= sizes[a];
            cell.axis_values[a] = config.axes[a].values[vi];
        }
        for (std::size_t a = 0; a < config.axes.size(); ++a) {
            const auto& name = config.axes[a].name;
            const double value = cell.axis_values[a];
            if (name == "N") {
                if (!(value >= 1.0))
                    throw config_error("axis 'N' must hold positive sizes");
                cell.n = static_cast<std::size_t>(value);
                continue;
            }
            // a name present in both schemas overrides both, keeping e.g. the
            // generator and comparator sigma2 in lockstep
            bool used = false;
            if (datagen::scenario_param_names(config.scenario.kind).count(name)) {
                cell.scenario_params[name] = value;
                used = true;
            }
            if (cmp_names.count(name)) {
                cell.comparator_params[name] = value;
                used = true;
            }
            if (!used) throw config_error("axis '" + name + "' did not resolve");
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

void write_outputs(const SweepConfig& config, const SweepResult& result) {
    const std::string prefix = config.output_prefix;
    std::ostringstream raw;
    raw << "comparator";
    for (const auto& name : result.axis_names) raw << "," << name;
    raw << ",rep,seed,d_logr,approx_flag\n";
    for (const auto& r : result.records) {
        raw << config.comparator;
        for (double v : r.axis_values) raw << "," << io::format_double(v);
        raw << "," << r.rep << "," << r.seed << "," << io::format_double(r.d_logr) << ","
            << (r.approximate ? 1 : 0) << "\n";
    }
    io::write_text_file(prefix + "_raw.csv", raw.str());

    std::ostringstream sum;
    sum << "comparator";
    for (const auto& name : result.axis_names) sum << "," << name;
    sum << ",m,q25,median,q75,frac_positive,mean\n";
    for (const auto& s : result.summaries) {
        sum << config.comparator;
        for (double v : s.axis_values) sum << "," << io::format_double(v);
        sum << "," << s.m << "," << io::format_double(s.q25) << ","
            << io::format_double(s.median) << "," << io::format_double(s.q75) << ","
            << io::format_double(s.frac_positive) << "," << io::format_double(s.mean) << "\n";
    }
    io::write_text_file(prefix + "_summary.csv", sum.str());
    io::write_text_file(prefix + "_config.json", config.to_json().dump(2) + "\n");
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
    config.validate();
    const std::vector<Cell> cells = enumerate_cells(config);
    const int m = config.replications;
    const std::uint64_t base = *config.base_seed;

    struct Slot {
        RawRecord record;
        std::string error;
        bool failed = false;
    };
    std::vector<Slot> slots(cells.size() * static_cast<std::size_t>(m));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= slots.size()) return;
            const std::size_t ci = task / m;
            const int rep = static_cast<int>(task % m);
            const Cell& cell = cells[ci];
            Slot& slot = slots[task];
            slot.record.cell_index = ci;
            slot.record.axis_values = cell.axis_values;
            slot.record.rep = rep;
            slot.record.seed = replication_seed(base, cell.axis_values, rep);
            try {
                slot.record.d_logr =
                    evaluate_cell_rep(config, cell.scenario_params, cell.comparator_params,
                                      cell.n, slot.record.seed, slot.record.approximate);
            } catch (const std::exception& e) {
                slot.failed = true;
                slot.error = e.what();
            }
        }
    };

    const int threads = std::min<int>(worker_thread_count(), static_cast<int>(slots.size()));
    if (threads > 1) {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    } else {
        worker();
    }

    SweepResult result;
    for (const auto& axis : config.axes) result.axis_names.push_back(axis.name);
    result.records.reserve(slots.size());
    result.summaries.reserve(cells.size());
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        std::vector<double> values;
        values.reserve(m);
        int failures = 0;
        std::string first_error;
        for (int rep = 0; rep < m; ++rep) {
            const Slot& slot = slots[ci * m + rep];
            if (slot.failed) {
                if (failures == 0) first_error = slot.error;
                ++failures;
                continue;
            }
            result.records.push_back(slot.record);
            values.push_back(slot.record.d_logr);
        }
        if (failures > 0 && static_cast<double>(failures) > 0.01 * m) {
            std::ostringstream msg;
            msg << "sweep cell (";
            for (std::size_t a = 0; a < cells[ci].axis_values.size(); ++a)
                msg << (a ? ", " : "") << result.axis_names[a] << "="
                    << cells[ci].axis_values[a];
            msg << ") failed " << failures << "/" << m << " replications: " << first_error;
            throw sweep_error(msg.str());
        }
        CellSummary s;
        s.axis_values = cells[ci].axis_values;
        s.m = static_cast<int>(values.size());
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        s.q25 = quantile_nearest_rank(sorted, 0.25);
        s.median = quantile_nearest_rank(sorted, 0.50);
        s.q75 = quantile_nearest_rank(sorted, 0.75);
        double positives = 0.0, mean = 0.0;
        for (double v : values) {
            if (v > 0.0) positives += 1.0;
            mean += v;
        }
        s.frac_positive = positives / static_cast<double>(values.size());
        s.mean = mean / static_cast<double>(values.size());
        result.summaries.push_back(std::move(s));
    }

    if (!config.output_prefix.empty()) write_outputs(config, result);
    return result;
}

namespace {

double r_squared(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (syy == 0.0) return 1.0;  // constant medians fit any line exactly
    if (sxx == 0.0) return 0.0;
    return (sxy * sxy) / (sxx * syy);
}

}  // namespace

TrendStats trend_stats(std::span<const CellSummary> summaries, std::size_t axis_index,
                       TrendDirection direction) {
    if (summaries.size() < 3)
        throw std::invalid_argument("trend_stats: need at least 3 cells along the axis");
    std::vector<double> axis, medians;
    for (const auto& s : summaries) {
        if (axis_index >= s.axis_values.size())
            throw std::invalid_argument("trend_stats: axis index out of range");
        axis.push_back(s.axis_values[axis_index]);
        medians.push_back(s.median);
    }
    TrendStats stats;
    int monotone = 0;
    for (std::size_t i = 0; i + 1 < medians.size(); ++i) {
        const bool ok = direction == TrendDirection::increasing ? medians[i + 1] > medians[i]
                                                                : medians[i + 1] < medians[i];
        if (ok) ++monotone;
    }
    stats.monotone_fraction =
        static_cast<double>(monotone) / static_cast<double>(medians.size() - 1);
    stats.r2_linear = r_squared(axis, medians);
    std::vector<double> log_axis;
    bool log_ok = true;
    for (double a : axis) {
        if (!(a > 0.0)) {
            log_ok = false;
            break;
        }
        log_axis.push_back(std::log(a));
    }
    stats.r2_log = log_ok ? r_squared(log_axis, medians) : 0.0;
    for (double v : medians)
        stats.sign_pattern.push_back(v > 0.0 ? '+' : (v < 0.0 ? '-' : '0'));
    return stats;
}

ItcTable itc_table(std::span<const std::size_t> n_grid, std::span<const double> rbar_grid,
                   const PriorOdds& prior) {
    if (n_grid.empty() || rbar_grid.empty())
        throw std::invalid_argument("itc_table: grids must be nonempty");
    ItcTable table;
    table.n_grid.assign(n_grid.begin(), n_grid.end());
    table.rbar_grid.assign(rbar_grid.begin(), rbar_grid.end());
    table.logr.resize(n_grid.size() * rbar_grid.size());
    for (std::size_t ri = 0; ri < rbar_grid.size(); ++ri) {
        const auto curve = models::n0_curve(rbar_grid[ri], n_grid, prior);
        for (std::size_t ni = 0; ni < n_grid.size(); ++ni)
            table.logr[ri * n_grid.size() + ni] = curve.logr[ni];
        table.n0.push_back(curve.n0);
        double best = curve.logr[0];
        for (double v : curve.logr) best = std::min(best, v);
        table.n0_value.push_back(best);
    }
    for (std::size_t n : n_grid)
        table.rbar_ref.push_back(1.0 / std::sqrt(static_cast<double>(n)));
    return table;
}

void write_itc_csv(const std::string& out_path, const ItcTable& table) {
    std::string stem = out_path;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv")
        stem = stem.substr(0, stem.size() - 4);

    std::ostringstream main_csv;
    main_csv << "rbar,n,d_logr\n";
    for (std::size_t ri = 0; ri < table.rbar_grid.size(); ++ri)
        for (std::size_t ni = 0; ni < table.n_grid.size(); ++ni)
            main_csv << io::format_double(table.rbar_grid[ri]) << "," << table.n_grid[ni]
                     << "," << io::format_double(table.at(ri, ni)) << "\n";
    io::write_text_file(out_path, main_csv.str());

    std::ostringstream n0_csv;
    n0_csv << "rbar,n0,d_logr_min\n";
    for (std::size_t ri = 0; ri < table.rbar_grid.size(); ++ri)
        n0_csv << io::format_double(table.rbar_grid[ri]) << "," << table.n0[ri] << ","
               << io::format_double(table.n0_value[ri]) << "\n";
    io::write_text_file(stem + "_n0.csv", n0_csv.str());

    std::ostringstream ref_csv;
    ref_csv << "n,rbar_ref\n";
    for (std::size_t ni = 0; ni < table.n_grid.size(); ++ni)
        ref_csv << table.n_grid[ni] << "," << io::format_double(table.rbar_ref[ni]) << "\n";
    io::write_text_file(stem + "_nref.csv", ref_csv.str());
}

}  // namespace bayesdep::experiments
