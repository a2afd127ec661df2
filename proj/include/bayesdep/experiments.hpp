#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bayesdep/core.hpp"
#include "bayesdep/datagen.hpp"
#include "bayesdep/models.hpp"

#include <json.hpp>

namespace bayesdep::experiments {

/// Invalid sweep configuration (unknown axis, missing seed, bad grid).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A grid cell exceeded the tolerated replication failure rate.
class sweep_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Axis {
    std::string name;
    std::vector<double> values;
};

/// Grid of scenario/comparator parameters crossed with M replications. Axis
/// names must resolve against the scenario schema, the comparator schema, or
/// the special name "N" (dataset size).
struct SweepConfig {
    std::string comparator;  // noisy-normal | functional | copula | known-normal | vonmises
    std::map<std::string, double> comparator_params;
    datagen::Scenario scenario;
    std::vector<Axis> axes;
    std::size_t n = 100;          // dataset size when "N" is not an axis
    int replications = 200;
    std::optional<std::uint64_t> base_seed;  // required: sweeps must be reproducible
    double prior_log_odds = 0.0;
    std::string output_prefix;    // empty = in-memory only

    static SweepConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;  // fully resolved copy, for provenance
    void validate() const;
};

const std::set<std::string>& comparator_param_names(const std::string& comparator);

struct RawRecord {
    std::size_t cell_index = 0;
    std::vector<double> axis_values;
    int rep = 0;
    std::uint64_t seed = 0;
    double d_logr = 0.0;
    bool approximate = false;
};

struct CellSummary {
    std::vector<double> axis_values;
    int m = 0;  // successful replications
    double q25 = 0.0, median = 0.0, q75 = 0.0;
    double frac_positive = 0.0;
    double mean = 0.0;
};

struct SweepResult {
    std::vector<std::string> axis_names;
    std::vector<RawRecord> records;      // cell-major, replication order
    std::vector<CellSummary> summaries;  // one per grid cell
};

/// Runs every grid cell for M replications each; cells / replications execute
/// on a worker pool but records land in deterministic (cell, rep) order. A
/// cell failing more than 1% of its replications aborts the sweep. When
/// output_prefix is set, writes <prefix>_raw.csv, <prefix>_summary.csv and
/// <prefix>_config.json.
SweepResult run_sweep(const SweepConfig& config);

/// Stream seed for one replication: cell coordinates and replication index
/// are folded into the base seed, so results do not depend on grid order.
std::uint64_t replication_seed(std::uint64_t base_seed, std::span<const double> axis_values,
                               int rep);

/// Nearest-rank quantile on a sorted sample: value at index ceil(p*m), 1-based.
double quantile_nearest_rank(std::span<const double> sorted_values, double p);

enum class TrendDirection { increasing, decreasing };

struct TrendStats {
    double monotone_fraction = 0.0;  // adjacent median pairs strictly monotone
    double r2_linear = 0.0;          // median vs axis value
    double r2_log = 0.0;             // median vs ln(axis value)
    std::string sign_pattern;        // '+', '-' or '0' per cell median
};

/// Trend summary of cell medians along one axis; the summaries passed in must
/// span exactly that axis. Needs at least 3 cells.
TrendStats trend_stats(std::span<const CellSummary> summaries, std::size_t axis_index,
                       TrendDirection direction);

struct ItcTable {
    std::vector<std::size_t> n_grid;
    std::vector<double> rbar_grid;
    std::vector<double> logr;      // row-major: rbar index * n_grid.size() + n index
    std::vector<std::size_t> n0;   // per rbar: grid argmin of logr
    std::vector<double> n0_value;  // the minimum itself
    std::vector<double> rbar_ref;  // per n: 1/sqrt(N) reference curve

    double at(std::size_t rbar_index, std::size_t n_index) const {
        return logr[rbar_index * n_grid.size() + n_index];
    }
};

ItcTable itc_table(std::span<const std::size_t> n_grid, std::span<const double> rbar_grid,
                   const PriorOdds& prior);

void write_itc_csv(const std::string& out_path, const ItcTable& table);

/// Worker pool width: BAYESDEP_THREADS if set, else hardware concurrency.
int worker_thread_count();

}  // namespace bayesdep::experiments
