#pragma once

// File formats: delimited angle data in and out, JSON for experiment
// configurations and result sidecars. Anything wrong with user-supplied
// bytes is reported as DataError (or its subclass ParseError, which carries
// a line number), so callers can separate bad input from bad state.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>
#include <numbers>

#include <json.hpp>

#include "angle.hpp"
#include "method.hpp"
#include "montecarlo.hpp"

namespace hypercirc {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : DataError(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class AngleUnit { radians, degrees };

struct CsvOptions {
    AngleUnit unit = AngleUnit::radians;
    bool expect_header = true;
};

// One parsed row: the angle in radians if present (blank and NA cells are
// legal and mean missing), plus the group tag when the file has two columns.
struct AngleRecord {
    std::optional<double> radians;
    std::string group;
};

struct AngleTable {
    std::vector<AngleRecord> rows;
    bool has_group_column = false;
    std::string source;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (const char ch : line) {
        if (ch == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.push_back(trim(current));
    return fields;
}

inline bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA";
}

inline double to_radians(double value, AngleUnit unit) {
    return unit == AngleUnit::radians ? value : value * std::numbers::pi / 180.0;
}

} // namespace detail

// Reads a one or two column angle table. Column one is the angle, optional
// column two a group tag. A header row is consumed when expected; if the
// first cell of the first row parses as a number anyway, the row is treated
// as data so that headerless files given with default options still load.
inline AngleTable read_angle_table(std::istream& in, const CsvOptions& options,
                                   const std::string& source) {
    AngleTable table;
    table.source = source;
    std::string line;
    std::size_t line_no = 0;
    bool saw_columns = false;
    std::size_t columns = 0;
    bool header_pending = options.expect_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() > 2) {
            throw ParseError(source, line_no, "expected one or two columns, got " +
                                                  std::to_string(fields.size()));
        }
        if (header_pending) {
            header_pending = false;
            char* end = nullptr;
            const std::string& first = fields[0];
            std::strtod(first.c_str(), &end);
            const bool numeric = !first.empty() && end == first.c_str() + first.size();
            if (!numeric && !detail::is_missing_token(first)) {
                saw_columns = true;
                columns = fields.size();
                continue;
            }
        }
        if (!saw_columns) {
            saw_columns = true;
            columns = fields.size();
        } else if (fields.size() != columns) {
            throw ParseError(source, line_no, "inconsistent column count");
        }
        AngleRecord rec;
        if (!detail::is_missing_token(fields[0])) {
            char* end = nullptr;
            const double v = std::strtod(fields[0].c_str(), &end);
            if (end != fields[0].c_str() + fields[0].size() || !std::isfinite(v)) {
                throw ParseError(source, line_no, "bad angle value '" + fields[0] + "'");
            }
            rec.radians = detail::to_radians(v, options.unit);
        }
        if (fields.size() == 2) rec.group = fields[1];
        table.rows.push_back(std::move(rec));
    }
    table.has_group_column = columns == 2;
    if (table.rows.empty()) {
        throw ParseError(source, line_no, "no data rows");
    }
    return table;
}

inline AngleTable read_angle_file(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    return read_angle_table(in, options, path);
}

inline void write_angle_csv(std::ostream& out, const CircularSample& sample, AngleUnit unit) {
    out << "angle\n";
    for (const Angle a : sample.angles) {
        const double v = unit == AngleUnit::radians ? a.radians()
                                                    : a.radians() * 180.0 / std::numbers::pi;
        out << format_double(v) << '\n';
    }
}

// JSON spellings for the experiment configuration

inline nlohmann::json to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["mode"] = config.mode == ExperimentMode::size ? "size" : "power";
    j["sample_sizes"] = config.sample_sizes;
    j["kappa_pairs"] = nlohmann::json::array();
    for (const auto& [k1, k2] : config.kappa_pairs) {
        j["kappa_pairs"].push_back({k1, k2});
    }
    j["mu1"] = config.mu1;
    j["mu2_grid"] = config.mu2_grid;
    j["iterations"] = config.iterations;
    j["resamples"] = config.resamples;
    j["alpha"] = config.alpha;
    j["methods"] = nlohmann::json::array();
    for (const Method m : config.methods) {
        j["methods"].push_back(std::string(method_name(m)));
    }
    j["master_seed"] = config.master_seed;
    return j;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig config;
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "size") {
            config.mode = ExperimentMode::size;
        } else if (mode == "power") {
            config.mode = ExperimentMode::power;
        } else {
            throw DataError("config: mode must be \"size\" or \"power\"");
        }
        config.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
        for (const auto& pair : j.at("kappa_pairs")) {
            if (!pair.is_array() || pair.size() != 2) {
                throw DataError("config: each kappa pair must be a two element array");
            }
            config.kappa_pairs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        config.mu1 = j.value("mu1", 0.0);
        config.mu2_grid = j.at("mu2_grid").get<std::vector<double>>();
        config.iterations = j.at("iterations").get<std::size_t>();
        config.resamples = j.value("resamples", std::size_t{999});
        config.alpha = j.value("alpha", 0.05);
        for (const auto& name : j.at("methods")) {
            config.methods.push_back(method_from_name(name.get<std::string>()));
        }
        config.master_seed = j.at("master_seed").get<std::uint64_t>();
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig read_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

// Sidecar with everything the CSV cannot carry: the full configuration, the
// digest, and per-record diagnostics such as skip reasons.
inline nlohmann::json experiment_sidecar(const ExperimentResult& result) {
    nlohmann::json j;
    j["config"] = to_json(result.config);
    j["config_digest"] = result.config_digest;
    j["software_version"] = result.software_version;
    j["records"] = result.records.size();
    nlohmann::json skipped = nlohmann::json::array();
    nlohmann::json failures = nlohmann::json::array();
    for (const CellResult& rec : result.records) {
        nlohmann::json cell;
        cell["n"] = rec.cell.n;
        cell["kappa1"] = rec.cell.kappa1;
        cell["kappa2"] = rec.cell.kappa2;
        cell["mu1"] = rec.cell.mu1;
        cell["mu2"] = rec.cell.mu2;
        cell["method"] = std::string(method_name(rec.method));
        if (rec.skipped) {
            cell["reason"] = rec.skip_reason;
            skipped.push_back(cell);
        } else if (rec.failed_iterations > 0) {
            cell["failed_iterations"] = rec.failed_iterations;
            failures.push_back(cell);
        }
    }
    j["skipped_cells"] = skipped;
    j["failed_cells"] = failures;
    return j;
}

} // namespace hypercirc
