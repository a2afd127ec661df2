#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "bayesdep/core.hpp"
#include "bayesdep/datagen.hpp"
#include "bayesdep/experiments.hpp"
#include "bayesdep/models.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using DenseArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

bayesdep::PairedDataset make_dataset(const DenseArray& x, const DenseArray& y) {
    if (x.ndim() != 1 || y.ndim() != 1)
        throw std::invalid_argument("x and y must be 1-d arrays");
    const double* px = x.data();
    const double* py_ = y.data();
    return bayesdep::PairedDataset::univariate(
        std::vector<double>(px, px + x.shape(0)),
        std::vector<double>(py_, py_ + y.shape(0)));
}

py::array_t<double> to_array(const std::vector<double>& v) {
    // explicit strides: the single-integer array_t constructor produced a
    // stride-0 view under pybind11 3.x
    py::array_t<double> out({static_cast<py::ssize_t>(v.size())},
                            {static_cast<py::ssize_t>(sizeof(double))});
    std::copy(v.begin(), v.end(), static_cast<double*>(out.request().ptr));
    return out;
}

py::tuple dataset_to_arrays(const bayesdep::PairedDataset& d) {
    return py::make_tuple(to_array(d.x_flat()), to_array(d.y_flat()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian dependence measures: evidence for dependence between two "
              "observed systems from paired data";

    py::class_<bayesdep::DependenceMeasure>(m, "DependenceMeasure")
        .def_property_readonly("lnr", &bayesdep::DependenceMeasure::lnr)
        .def_property_readonly("logr", &bayesdep::DependenceMeasure::logr)
        .def_property_readonly("pr", &bayesdep::DependenceMeasure::pr)
        .def_property_readonly("r", &bayesdep::DependenceMeasure::r)
        .def_property_readonly("bf", &bayesdep::DependenceMeasure::bf)
        .def_property_readonly("prior_log_odds", &bayesdep::DependenceMeasure::prior_log_odds)
        .def_property_readonly("approximate", &bayesdep::DependenceMeasure::approximate)
        .def("__repr__", [](const bayesdep::DependenceMeasure& me) {
            return "DependenceMeasure(lnr=" + std::to_string(me.lnr()) + ")";
        });

    m.def(
        "combine",
        [](double prior_log_odds, double lnbf, bool approximate) {
            return bayesdep::combine(bayesdep::PriorOdds(prior_log_odds),
                                     bayesdep::LogBayesFactor(lnbf, approximate));
        },
        "prior_log_odds"_a, "lnbf"_a, "approximate"_a = false,
        "Bayes updating: posterior log odds from prior log odds and a log Bayes factor.");

    py::class_<bayesdep::models::CopulaFit>(m, "CopulaFit")
        .def_property_readonly("shape_x",
                               [](const bayesdep::models::CopulaFit& f) { return f.marginal_x.shape; })
        .def_property_readonly("rate_x",
                               [](const bayesdep::models::CopulaFit& f) { return f.marginal_x.rate; })
        .def_property_readonly("shape_y",
                               [](const bayesdep::models::CopulaFit& f) { return f.marginal_y.shape; })
        .def_property_readonly("rate_y",
                               [](const bayesdep::models::CopulaFit& f) { return f.marginal_y.rate; })
        .def_readonly("rho_hat", &bayesdep::models::CopulaFit::rho_hat)
        .def_readonly("nu", &bayesdep::models::CopulaFit::nu)
        .def_readonly("ihat", &bayesdep::models::CopulaFit::ihat)
        .def_readonly("rho_at_boundary", &bayesdep::models::CopulaFit::rho_at_boundary);

    m.def(
        "noisy_normal_lnbf",
        [](const DenseArray& x, const DenseArray& y, double tau2, double sigma2,
           double eps) {
            bayesdep::models::NoisyNormalParams p;
            p.tau2 = tau2;
            p.sigma2 = sigma2;
            p.eps = eps;
            return bayesdep::models::noisy_normal_lnbf(make_dataset(x, y), p).value();
        },
        "x"_a, "y"_a, "tau2"_a = 1.0, "sigma2"_a = 0.0, "eps"_a = 0.0,
        "Exact log Bayes factor for the noisy bivariate normal pair.");

    m.def(
        "functional_lnbf",
        [](const DenseArray& x, const DenseArray& y, double tau2, double sigma2) {
            return bayesdep::models::functional_lnbf(make_dataset(x, y), tau2, sigma2).value();
        },
        "x"_a, "y"_a, "tau2"_a, "sigma2"_a,
        "Closed-form log Bayes factor for the shared-latent linear link.");

    m.def(
        "known_normal_lnbf",
        [](const DenseArray& x, const DenseArray& y, double rho, double tau2) {
            return bayesdep::models::make_known_normal_comparator(rho, tau2)
                .evaluate(make_dataset(x, y))
                .value();
        },
        "x"_a, "y"_a, "rho"_a, "tau2"_a = 1.0);

    m.def(
        "nested_bic_lnbf",
        [](double loglik0, double loglik1, int dim0, int dim1, std::size_t n) {
            return bayesdep::models::nested_bic_lnbf(loglik0, loglik1, dim0, dim1, n).value();
        },
        "loglik0"_a, "loglik1"_a, "dim0"_a, "dim1"_a, "n"_a);

    m.def(
        "copula_fit",
        [](const DenseArray& x, const DenseArray& y) {
            return bayesdep::models::copula_ifm_fit(make_dataset(x, y));
        },
        "x"_a, "y"_a, "Margins-then-copula fit (gamma margins, Student t copula).");

    m.def(
        "copula_lnbf",
        [](const bayesdep::models::CopulaFit& fit, std::size_t n) {
            return bayesdep::models::copula_lnbf(fit, n).value();
        },
        "fit"_a, "n"_a);

    m.def(
        "vonmises_logr",
        [](std::size_t n, double rbar, double prior_log_odds) {
            return bayesdep::models::vonmises_logr(
                       bayesdep::models::PhaseSample::from_stats(n, rbar),
                       bayesdep::PriorOdds(prior_log_odds))
                .logr();
        },
        "n"_a, "rbar"_a, "prior_log_odds"_a = 0.0,
        "Uniform-vs-von-Mises phase evidence on the log10 odds scale.");

    m.def(
        "n0_curve",
        [](double rbar, const std::vector<std::size_t>& n_grid, double prior_log_odds) {
            const auto curve = bayesdep::models::n0_curve(rbar, n_grid,
                                                          bayesdep::PriorOdds(prior_log_odds));
            return py::make_tuple(curve.n0, curve.logr);
        },
        "rbar"_a, "n_grid"_a, "prior_log_odds"_a = 0.0);

    m.def(
        "gen_noisy_normal",
        [](double rho, double tau2, double sigma2, std::size_t n, std::uint64_t seed) {
            return dataset_to_arrays(
                bayesdep::datagen::gen_noisy_normal(rho, tau2, sigma2, n, seed));
        },
        "rho"_a, "tau2"_a, "sigma2"_a, "n"_a, "seed"_a);

    m.def(
        "gen_functional",
        [](bool h1, double tau2, double sigma2, std::size_t n, std::uint64_t seed) {
            return dataset_to_arrays(bayesdep::datagen::gen_functional(
                h1 ? bayesdep::datagen::FunctionalTruth::h1
                   : bayesdep::datagen::FunctionalTruth::h0,
                tau2, sigma2, n, seed));
        },
        "h1"_a, "tau2"_a, "sigma2"_a, "n"_a, "seed"_a);

    m.def(
        "gen_gamma_tcopula",
        [](double rho, std::size_t n, std::uint64_t seed, bool product, double nu) {
            return dataset_to_arrays(bayesdep::datagen::gen_gamma_tcopula(
                product ? bayesdep::datagen::CopulaMode::product
                        : bayesdep::datagen::CopulaMode::student_t,
                rho, bayesdep::datagen::GammaMargins{}, n, seed, nu));
        },
        "rho"_a, "n"_a, "seed"_a, "product"_a = false, "nu"_a = 5.0);

    m.def(
        "gen_rossler",
        [](double coupling, double sigma2, std::size_t n_seconds, std::uint64_t seed) {
            return dataset_to_arrays(
                bayesdep::datagen::gen_rossler(coupling, sigma2, n_seconds, seed));
        },
        "coupling"_a, "sigma2"_a, "n_seconds"_a, "seed"_a);

    m.def(
        "gen_phase",
        [](bool uniform, double mu, double kappa, std::size_t n, std::uint64_t seed) {
            const auto sample = bayesdep::datagen::gen_phase(
                uniform ? bayesdep::datagen::PhaseModel::uniform
                        : bayesdep::datagen::PhaseModel::vonmises,
                mu, kappa, n, seed);
            return py::make_tuple(to_array(sample.theta), sample.rbar);
        },
        "uniform"_a, "mu"_a = 0.0, "kappa"_a = 0.0, "n"_a = 1, "seed"_a = 0);

    m.def(
        "run_sweep",
        [](const std::string& config_json) {
            const auto config = bayesdep::experiments::SweepConfig::from_json(
                nlohmann::json::parse(config_json));
            const auto result = bayesdep::experiments::run_sweep(config);
            py::list summaries;
            for (const auto& s : result.summaries) {
                py::dict d;
                for (std::size_t a = 0; a < result.axis_names.size(); ++a)
                    d[py::str(result.axis_names[a])] = s.axis_values[a];
                d["m"] = s.m;
                d["q25"] = s.q25;
                d["median"] = s.median;
                d["q75"] = s.q75;
                d["frac_positive"] = s.frac_positive;
                d["mean"] = s.mean;
                summaries.append(d);
            }
            return summaries;
        },
        "config_json"_a,
        "Run a replicated sweep from a JSON config string; returns cell summaries.");

#ifdef VERSION_INFO
#define BAYESDEP_STR_(x) #x
#define BAYESDEP_STR(x) BAYESDEP_STR_(x)
    m.attr("__version__") = BAYESDEP_STR(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
