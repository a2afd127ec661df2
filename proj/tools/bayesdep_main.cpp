// Command-line front end: compute / gen / sweep / itc. Thin wrappers over the
// library; outputs are bit-identical to direct library calls with the same
// parameters and seeds.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bayesdep/core.hpp"
#include "bayesdep/datagen.hpp"
#include "bayesdep/experiments.hpp"
#include "bayesdep/io.hpp"
#include "bayesdep/models.hpp"

namespace {

using bayesdep::LogBayesFactor;
using bayesdep::PairedDataset;
using bayesdep::PriorOdds;
using nlohmann::json;

json json_num(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

struct ComputeOpts {
    std::string model;
    std::string input;
    std::string json_out;
    std::string view = "lnr";
    double prior_log_odds = 0.0;
    double tau2 = 1.0;
    double sigma2 = 0.0;
    double eps = 0.0;
    double rho = 0.0;
    double nu = 5.0;
    double loglik0 = 0.0, loglik1 = 0.0;
    int dim0 = 0, dim1 = 0;
    std::size_t n = 0;
    double rbar = -1.0;
    bool have_rho = false, have_rbar = false, have_n = false, have_input = false;
};

int run_compute(const ComputeOpts& opt) {
    static const std::set<std::string> known_models = {"known",  "noisy-normal", "functional",
                                                       "copula", "vonmises",     "nested-bic"};
    if (known_models.find(opt.model) == known_models.end())
        throw bayesdep::experiments::config_error("unknown model '" + opt.model + "'");
    const PriorOdds prior(opt.prior_log_odds);
    LogBayesFactor bf(0.0);
    std::size_t n = 0;
    json params = json::object();

    if (opt.model == "vonmises") {
        bayesdep::models::PhaseSample sample;
        if (opt.have_rbar || !opt.have_input) {
            if (!opt.have_rbar || !opt.have_n)
                throw bayesdep::experiments::config_error(
                    "vonmises needs --input, or both --rbar and --n");
            sample = bayesdep::models::PhaseSample::from_stats(opt.n, opt.rbar);
        } else {
            sample = bayesdep::io::read_phase_csv(opt.input);
        }
        n = sample.n;
        params["rbar"] = json_num(sample.rbar);
        bf = LogBayesFactor(bayesdep::models::vonmises_log_integral(sample.n, sample.rbar));
    } else if (opt.model == "nested-bic") {
        if (!opt.have_n)
            throw bayesdep::experiments::config_error("nested-bic requires --n");
        n = opt.n;
        params = {{"loglik0", opt.loglik0}, {"loglik1", opt.loglik1},
                  {"dim0", opt.dim0},       {"dim1", opt.dim1}};
        bf = bayesdep::models::nested_bic_lnbf(opt.loglik0, opt.loglik1, opt.dim0, opt.dim1,
                                               opt.n);
    } else {
        if (!opt.have_input)
            throw bayesdep::experiments::config_error("--input is required for model '" +
                                                      opt.model + "'");
        const PairedDataset data = bayesdep::io::read_dataset_csv(opt.input);
        n = data.size();
        if (opt.model == "known") {
            if (!opt.have_rho)
                throw bayesdep::experiments::config_error("model 'known' requires --rho");
            params = {{"rho", opt.rho}, {"tau2", opt.tau2}};
            bf = bayesdep::models::make_known_normal_comparator(opt.rho, opt.tau2)
                     .evaluate(data);
        } else if (opt.model == "noisy-normal") {
            bayesdep::models::NoisyNormalParams p;
            p.tau2 = opt.tau2;
            p.sigma2 = opt.sigma2;
            p.eps = opt.eps;
            params = {{"tau2", p.tau2}, {"sigma2", p.sigma2}, {"eps", p.eps}};
            bf = bayesdep::models::noisy_normal_lnbf(data, p);
        } else if (opt.model == "functional") {
            params = {{"tau2", opt.tau2}, {"sigma2", opt.sigma2}};
            bf = bayesdep::models::functional_lnbf(data, opt.tau2, opt.sigma2);
        } else if (opt.model == "copula") {
            const auto fit = bayesdep::models::copula_ifm_fit(data);
            params = {{"nu", fit.nu},
                      {"rho_hat", json_num(fit.rho_hat)},
                      {"ihat", json_num(fit.ihat)},
                      {"shape_x", json_num(fit.marginal_x.shape)},
                      {"rate_x", json_num(fit.marginal_x.rate)},
                      {"shape_y", json_num(fit.marginal_y.shape)},
                      {"rate_y", json_num(fit.marginal_y.rate)},
                      {"rho_at_boundary", fit.rho_at_boundary}};
            bf = bayesdep::models::copula_lnbf(fit, data.size());
        } else {
            throw bayesdep::experiments::config_error("unknown model '" + opt.model + "'");
        }
    }

    const auto measure = combine(prior, bf);
    const double value = to_view(measure, bayesdep::parse_view(opt.view));
    std::printf("%.6g\n", value);

    json record = {{"model", opt.model},
                   {"params", params},
                   {"N", n},
                   {"prior_log_odds", opt.prior_log_odds},
                   {"lnr", json_num(measure.lnr())},
                   {"views",
                    {{"pr", json_num(measure.pr())},
                     {"r", json_num(measure.r())},
                     {"bf", json_num(measure.bf())},
                     {"lnr", json_num(measure.lnr())},
                     {"logr", json_num(measure.logr())}}},
                   {"approx_flag", measure.approximate()}};
    std::cout << record.dump() << "\n";
    if (!opt.json_out.empty())
        bayesdep::io::write_text_file(opt.json_out, record.dump(2) + "\n");
    return 0;
}

struct GenOpts {
    std::string scenario;
    std::string out;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::map<std::string, double> params;  // only flags the user actually set
};

int run_gen(const GenOpts& opt) {
    std::uint64_t seed = opt.seed;
    if (!opt.have_seed) {
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        std::cerr << "bayesdep gen: no --seed given, drew seed " << seed << "\n";
    }
    bayesdep::datagen::Scenario scenario{opt.scenario, opt.params};
    if (bayesdep::datagen::is_phase_scenario(opt.scenario)) {
        const auto sample = bayesdep::datagen::generate_phase(scenario, opt.n, seed);
        bayesdep::io::write_phase_csv(opt.out, sample);
    } else {
        const auto data = bayesdep::datagen::generate(scenario, opt.n, seed);
        bayesdep::io::write_dataset_csv(opt.out, data);
    }
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_prefix) {
    json j;
    try {
        j = json::parse(bayesdep::io::read_text_file(config_path));
    } catch (const json::exception& e) {
        throw bayesdep::experiments::config_error(std::string("cannot parse config: ") +
                                                  e.what());
    }
    auto config = bayesdep::experiments::SweepConfig::from_json(j);
    if (!out_prefix.empty()) config.output_prefix = out_prefix;
    if (config.output_prefix.empty())
        throw bayesdep::experiments::config_error(
            "config has no output_prefix (or pass --out-prefix)");

    const auto start = std::chrono::steady_clock::now();
    const auto result = bayesdep::experiments::run_sweep(config);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("cells=%zu replications=%d records=%zu elapsed=%.2fs\n",
                result.summaries.size(), config.replications, result.records.size(), elapsed);
    return 0;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    for (char ch : csv + ",") {
        if (ch == ',') {
            if (!cur.empty()) {
                out.push_back(std::stod(cur));
                cur.clear();
            }
        } else {
            cur.push_back(ch);
        }
    }
    return out;
}

int run_itc(const std::string& n_grid_csv, const std::string& rbar_grid_csv,
            const std::string& config_path, const std::string& out, double prior_log_odds) {
    std::vector<std::size_t> n_grid;
    std::vector<double> rbar_grid;
    if (!config_path.empty()) {
        json j;
        try {
            j = json::parse(bayesdep::io::read_text_file(config_path));
            for (const auto& v : j.at("n_grid")) n_grid.push_back(v.get<std::size_t>());
            rbar_grid = j.at("rbar_grid").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw bayesdep::experiments::config_error(std::string("cannot parse config: ") +
                                                      e.what());
        }
    }
    if (!n_grid_csv.empty()) {
        n_grid.clear();
        for (double v : parse_grid(n_grid_csv)) n_grid.push_back(static_cast<std::size_t>(v));
    }
    if (!rbar_grid_csv.empty()) rbar_grid = parse_grid(rbar_grid_csv);
    if (n_grid.empty())
        n_grid = {10, 16, 25, 40, 63, 100, 160, 250, 400, 630, 1000};
    if (rbar_grid.empty())
        rbar_grid = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

    const auto table =
        bayesdep::experiments::itc_table(n_grid, rbar_grid, PriorOdds(prior_log_odds));
    bayesdep::experiments::write_itc_csv(out, table);
    std::printf("cells=%zu out=%s\n", table.logr.size(), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian dependence measures: evidence for dependence between two "
                 "observed systems from paired data"};
    app.require_subcommand(1);

    ComputeOpts copt;
    auto* compute = app.add_subcommand("compute", "evaluate a dependence measure");
    compute->add_option("--model", copt.model,
                        "known|noisy-normal|functional|copula|vonmises|nested-bic")
        ->required();
    auto* in_opt = compute->add_option("--input", copt.input, "dataset CSV (or phase CSV)");
    compute->add_option("--view", copt.view, "pr|r|bf|lnr|logr (default lnr)");
    compute->add_option("--prior-log-odds", copt.prior_log_odds, "ln p(H1)/p(H0), default 0");
    compute->add_option("--tau2", copt.tau2, "signal variance (default 1)");
    compute->add_option("--sigma2", copt.sigma2, "noise variance");
    compute->add_option("--eps", copt.eps, "correlation-prior truncation in [0,1)");
    auto* rho_opt = compute->add_option("--rho", copt.rho, "correlation for model 'known'");
    compute->add_option("--loglik0", copt.loglik0, "max log-likelihood under H0");
    compute->add_option("--loglik1", copt.loglik1, "max log-likelihood under H1");
    compute->add_option("--dim0", copt.dim0, "free parameters under H0");
    compute->add_option("--dim1", copt.dim1, "free parameters under H1");
    auto* n_opt = compute->add_option("--n", copt.n, "sample count (vonmises/nested-bic)");
    auto* rbar_opt =
        compute->add_option("--rbar", copt.rbar, "mean resultant length (vonmises)");
    compute->add_option("--json-out", copt.json_out, "also write the JSON record here");

    GenOpts gopt;
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--scenario", gopt.scenario,
                    "noisy-normal|functional|gamma-tcopula|rossler|phase-uniform|phase-vonmises")
        ->required();
    gen->add_option("--n", gopt.n, "sample count (seconds for rossler)")->required();
    auto* seed_opt = gen->add_option("--seed", gopt.seed, "64-bit seed (drawn+logged if absent)");
    gen->add_option("--out", gopt.out, "output CSV path")->required();
    std::map<std::string, double> gen_values;
    std::map<std::string, CLI::Option*> gen_opts;
    for (const char* name : {"rho", "tau2", "sigma2", "kappa", "mu", "C", "mismatch",
                             "transient", "dt", "nu", "shape_x", "rate_x", "shape_y", "rate_y",
                             "product"}) {
        gen_values[name] = 0.0;
        gen_opts[name] = gen->add_option("--" + std::string(name), gen_values[name],
                                         "scenario parameter");
    }
    std::string gen_truth;
    auto* truth_opt =
        gen->add_option("--truth", gen_truth, "functional scenario: h0|h1 (or 0|1)");

    std::string sweep_config, sweep_prefix;
    auto* sweep = app.add_subcommand("sweep", "run a replicated parameter sweep");
    sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
    sweep->add_option("--out-prefix", sweep_prefix, "override the config output prefix");

    std::string itc_n_grid, itc_rbar_grid, itc_config, itc_out;
    double itc_prior = 0.0;
    auto* itc = app.add_subcommand("itc", "tabulate the circular-coherence measure");
    itc->add_option("--n-grid", itc_n_grid, "comma-separated N values");
    itc->add_option("--rbar-grid", itc_rbar_grid, "comma-separated rbar values");
    itc->add_option("--config", itc_config, "JSON file with n_grid and rbar_grid arrays");
    itc->add_option("--out", itc_out, "output CSV path")->required();
    itc->add_option("--prior-log-odds", itc_prior, "ln p(H1)/p(H0), default 0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    copt.have_input = in_opt->count() > 0;
    copt.have_rho = rho_opt->count() > 0;
    copt.have_n = n_opt->count() > 0;
    copt.have_rbar = rbar_opt->count() > 0;
    gopt.have_seed = seed_opt->count() > 0;
    for (const auto& [name, option] : gen_opts)
        if (option->count() > 0) gopt.params[name] = gen_values[name];
    if (truth_opt->count() > 0) {
        if (gen_truth == "h0")
            gopt.params["truth"] = 0.0;
        else if (gen_truth == "h1")
            gopt.params["truth"] = 1.0;
        else
            gopt.params["truth"] = std::strtod(gen_truth.c_str(), nullptr) != 0.0 ? 1.0 : 0.0;
    }

    try {
        if (app.got_subcommand(compute)) return run_compute(copt);
        if (app.got_subcommand(gen)) return run_gen(gopt);
        if (app.got_subcommand(sweep)) return run_sweep(sweep_config, sweep_prefix);
        if (app.got_subcommand(itc))
            return run_itc(itc_n_grid, itc_rbar_grid, itc_config, itc_out, itc_prior);
        std::cerr << "bayesdep: no subcommand\n";
        return 2;
    } catch (const bayesdep::experiments::config_error& e) {
        std::cerr << "bayesdep: config error: " << e.what() << "\n";
        return 2;
    } catch (const bayesdep::io::parse_error& e) {
        std::cerr << "bayesdep: input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bayesdep: usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "bayesdep: numerical failure: " << e.what() << "\n";
        return 1;
    }
}
