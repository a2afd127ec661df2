#pragma once

#include <string>
#include <vector>

#include "bayesdep/core.hpp"
#include "bayesdep/models.hpp"

namespace bayesdep::io {

/// Input could not be parsed (file missing, malformed row, bad header).
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form of a double ("%.17g" trimmed), decimal
/// point, LF line endings. All CSV output funnels through this.
std::string format_double(double v);

// Paired datasets. Univariate files carry the header "x,y"; multivariate
// files start with "# dims: k,m" followed by "x1,..,xk,y1,..,ym".
void write_dataset_csv(const std::string& path, const PairedDataset& data);
PairedDataset read_dataset_csv(const std::string& path);

// Circular samples: single column "theta_rad".
void write_phase_csv(const std::string& path, const models::PhaseSample& sample);
models::PhaseSample read_phase_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bayesdep::io
