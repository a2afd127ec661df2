#include "bayesdep/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bayesdep::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        std::ostringstream msg;
        msg << path << ":" << line_no << ": cannot parse number '" << s << "'";
        throw parse_error(msg.str());
    }
    return v;
}

}  // namespace

std::string format_double(double v) {
    // shortest decimal string that round-trips to the same double
    char best[40];
    std::snprintf(best, sizeof(best), "%.17g", v);
    for (int prec = 1; prec < 17; ++prec) {
        char candidate[40];
        std::snprintf(candidate, sizeof(candidate), "%.*g", prec, v);
        if (std::strtod(candidate, nullptr) == v &&
            std::strlen(candidate) < std::strlen(best))
            std::snprintf(best, sizeof(best), "%s", candidate);
    }
    return best;
}

void write_dataset_csv(const std::string& path, const PairedDataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    if (data.univariate_xy()) {
        out << "x,y\n";
    } else {
        out << "# dims: " << data.dim_x() << "," << data.dim_y() << "\n";
        for (std::size_t j = 0; j < data.dim_x(); ++j) out << "x" << (j + 1) << ",";
        for (std::size_t j = 0; j < data.dim_y(); ++j)
            out << "y" << (j + 1) << (j + 1 == data.dim_y() ? "" : ",");
        out << "\n";
    }
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto x = data.x(n);
        const auto y = data.y(n);
        for (std::size_t j = 0; j < x.size(); ++j) out << format_double(x[j]) << ",";
        for (std::size_t j = 0; j < y.size(); ++j)
            out << format_double(y[j]) << (j + 1 == y.size() ? "" : ",");
        out << "\n";
    }
}

PairedDataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    std::size_t dx = 1, dy = 1;

    if (!std::getline(in, line)) throw parse_error(path + ": empty file");
    ++line_no;
    if (line.rfind("# dims:", 0) == 0) {
        const auto parts = split(line.substr(7), ',');
        if (parts.size() != 2)
            throw parse_error(path + ":1: expected '# dims: k,m'");
        dx = static_cast<std::size_t>(parse_double(parts[0], path, line_no));
        dy = static_cast<std::size_t>(parse_double(parts[1], path, line_no));
        if (dx < 1 || dy < 1) throw parse_error(path + ":1: dimensions must be >= 1");
        if (!std::getline(in, line)) throw parse_error(path + ": missing header line");
        ++line_no;
    }
    // `line` now holds the column header; rows follow
    std::vector<double> xs, ys;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != dx + dy) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected " << (dx + dy) << " columns, got "
                << cells.size();
            throw parse_error(msg.str());
        }
        for (std::size_t j = 0; j < dx; ++j) xs.push_back(parse_double(cells[j], path, line_no));
        for (std::size_t j = 0; j < dy; ++j)
            ys.push_back(parse_double(cells[dx + j], path, line_no));
    }
    try {
        return PairedDataset(std::move(xs), std::move(ys), dx, dy);
    } catch (const std::invalid_argument& e) {
        throw parse_error(path + ": " + e.what());
    }
}

void write_phase_csv(const std::string& path, const models::PhaseSample& sample) {
    if (sample.theta.size() != sample.n)
        throw std::invalid_argument("write_phase_csv: sample has no stored angles");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    out << "theta_rad\n";
    for (double t : sample.theta) out << format_double(t) << "\n";
}

models::PhaseSample read_phase_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw parse_error(path + ": empty file");
    std::size_t line_no = 1;
    std::vector<double> theta;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        theta.push_back(parse_double(split(line, ',')[0], path, line_no));
    }
    return models::PhaseSample::from_angles(std::move(theta));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    out << content;
}

}  // namespace bayesdep::io
