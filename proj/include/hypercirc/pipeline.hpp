#pragma once

// The applied analysis pipeline: take two angle series as they come off
// disk (possibly axial, possibly with holes), optionally fold axial data
// onto the full circle, optionally fill holes with the circular mean of the
// observed values, then fit, embed, and test with any subset of the five
// methods.
//
// Axial folding multiplies angles by four before reduction, which turns
// orientations defined modulo pi/2 into honest circular data. By default
// folding happens before imputation, so imputed values live on the same
// scale as the fitted model; the opposite order is available behind a flag.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "angle.hpp"
#include "baselines.hpp"
#include "disk.hpp"
#include "inference.hpp"
#include "io.hpp"
#include "method.hpp"
#include "von_mises.hpp"

namespace hypercirc {

// An angle series that may contain missing entries, positions preserved
struct RawSeries {
    std::vector<std::optional<double>> radians;
    std::string label;
};

inline RawSeries raw_series_from_table(const AngleTable& table, std::string label) {
    RawSeries series;
    series.label = std::move(label);
    series.radians.reserve(table.rows.size());
    for (const AngleRecord& rec : table.rows) {
        series.radians.push_back(rec.radians);
    }
    return series;
}

inline CircularSample fourfold_transform(const CircularSample& sample) {
    CircularSample out;
    out.label = sample.label;
    out.angles.reserve(sample.size());
    for (const Angle a : sample.angles) {
        out.angles.push_back(Angle(4.0 * a.radians()));
    }
    return out;
}

inline RawSeries fourfold_transform(const RawSeries& series) {
    RawSeries out;
    out.label = series.label;
    out.radians.reserve(series.radians.size());
    for (const std::optional<double>& v : series.radians) {
        if (v.has_value()) {
            out.radians.push_back(Angle::reduce(4.0 * *v));
        } else {
            out.radians.push_back(std::nullopt);
        }
    }
    return out;
}

struct ImputationEntry {
    std::size_t index = 0;
    double imputed_radians = 0.0;
};

// Replaces every missing entry with the circular mean direction of the
// observed ones and logs each replacement. Refuses a series with nothing
// observed, and a series whose observed part has no mean direction.
inline std::pair<CircularSample, std::vector<ImputationEntry>>
impute_circular_mean(const RawSeries& series) {
    CircularSample observed;
    for (const std::optional<double>& v : series.radians) {
        if (v.has_value()) observed.angles.push_back(Angle(*v));
    }
    const std::string who = series.label.empty() ? "series" : series.label;
    if (observed.empty()) {
        throw DataError(who + ": nothing observed, cannot impute");
    }
    std::vector<ImputationEntry> log;
    CircularSample out;
    out.label = series.label;
    if (observed.size() == series.radians.size()) {
        out.angles = observed.angles;
        return {std::move(out), std::move(log)};
    }
    const CircularSummary summary = summarize(observed);
    if (summary.r_bar <= 1e-12) {
        throw DegenerateSampleError(who, who + ": observed values have no mean direction to impute from");
    }
    const Angle mean(std::atan2(summary.s_bar, summary.c_bar));
    out.angles.reserve(series.radians.size());
    for (std::size_t i = 0; i < series.radians.size(); ++i) {
        if (series.radians[i].has_value()) {
            out.angles.push_back(Angle(*series.radians[i]));
        } else {
            out.angles.push_back(mean);
            log.push_back({i, mean.radians()});
        }
    }
    return {std::move(out), std::move(log)};
}

struct AnalyzeOptions {
    bool fourfold = false;
    bool impute = false;
    bool impute_before_transform = false;
    PreferredDirection direction{};
    std::size_t resamples = 2500;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::vector<Method> methods = {Method::poincare_perm, Method::poincare_boot};
};

struct AnalysisReport {
    TwoSampleStatistic observed;
    std::vector<TestReport> disk_tests;
    std::vector<BaselineReport> baseline_tests;
    std::vector<ImputationEntry> imputation1;
    std::vector<ImputationEntry> imputation2;
    AnalyzeOptions options;
    std::string source1;
    std::string source2;
    std::string pipeline_order; // which preprocessing ran, in order
};

namespace detail {

inline CircularSample prepare_series(const RawSeries& raw, const AnalyzeOptions& options,
                                     std::vector<ImputationEntry>& log) {
    const bool has_missing =
        std::any_of(raw.radians.begin(), raw.radians.end(),
                    [](const std::optional<double>& v) { return !v.has_value(); });
    if (has_missing && !options.impute) {
        throw DataError((raw.label.empty() ? "series" : raw.label) +
                        ": missing values present, enable imputation to proceed");
    }
    RawSeries working = raw;
    if (options.fourfold && !options.impute_before_transform) {
        working = fourfold_transform(working);
    }
    if (options.impute_before_transform && options.fourfold) {
        auto [sample, entries] = impute_circular_mean(working);
        log = std::move(entries);
        return fourfold_transform(sample);
    }
    auto [sample, entries] = impute_circular_mean(working);
    log = std::move(entries);
    return sample;
}

inline std::string order_string(const AnalyzeOptions& options) {
    if (options.fourfold && options.impute) {
        return options.impute_before_transform ? "impute-then-transform" : "transform-then-impute";
    }
    if (options.fourfold) return "transform";
    if (options.impute) return "impute";
    return "none";
}

} // namespace detail

inline AnalysisReport analyze(const RawSeries& raw1, const RawSeries& raw2,
                              const AnalyzeOptions& options) {
    AnalysisReport report;
    report.options = options;
    report.pipeline_order = detail::order_string(options);

    const CircularSample s1 = detail::prepare_series(raw1, options, report.imputation1);
    const CircularSample s2 = detail::prepare_series(raw2, options, report.imputation2);

    report.observed = statistic_t(s1, s2, options.direction);

    TestConfig tc;
    tc.direction = options.direction;
    tc.resamples = options.resamples;
    tc.seed = options.seed;
    tc.alpha = options.alpha;
    for (const Method m : options.methods) {
        switch (m) {
            case Method::poincare_perm:
                report.disk_tests.push_back(permutation_test(s1, s2, tc));
                break;
            case Method::poincare_boot:
                report.disk_tests.push_back(bootstrap_test(s1, s2, tc));
                break;
            case Method::z:
                report.baseline_tests.push_back(z_test(s1, s2));
                break;
            case Method::w:
                report.baseline_tests.push_back(w_test(s1, s2));
                break;
            case Method::mww:
                report.baseline_tests.push_back(mww_test(s1, s2));
                break;
        }
    }
    return report;
}

// JSON rendering of the full analysis, stable key order via the library's
// sorted object representation

inline nlohmann::json to_json(const FitResult& fit) {
    nlohmann::json j;
    j["mu"] = fit.params.mu.radians();
    j["kappa"] = fit.params.kappa;
    j["r_bar"] = fit.summary.r_bar;
    j["c_bar"] = fit.summary.c_bar;
    j["s_bar"] = fit.summary.s_bar;
    j["n"] = fit.summary.n;
    j["degenerate"] = fit.degenerate;
    return j;
}

inline nlohmann::json to_json(const DiskPoint& p) {
    return {{"re", p.re()}, {"im", p.im()}};
}

inline nlohmann::json to_json(const TestReport& report) {
    nlohmann::json j;
    j["method"] = report.method == TestMethod::permutation ? "poincare_perm" : "poincare_boot";
    j["t_obs"] = report.t_obs;
    j["p_value"] = report.p_value;
    j["reject"] = report.reject;
    j["alpha"] = report.alpha;
    j["resamples"] = report.resamples;
    j["seed"] = report.seed;
    j["mu0"] = report.mu0.radians();
    j["d1"] = report.observed.d1;
    j["d2"] = report.observed.d2;
    j["degenerate_resamples"] = report.degenerate_resamples;
    j["degenerate_warning"] = report.degenerate_warning;
    return j;
}

inline nlohmann::json to_json(const BaselineReport& report) {
    nlohmann::json j;
    switch (report.method) {
        case BaselineMethod::z: j["method"] = "z"; break;
        case BaselineMethod::w: j["method"] = "w"; break;
        case BaselineMethod::mww: j["method"] = "mww"; break;
    }
    j["statistic"] = report.statistic;
    j["p_value"] = report.p_value;
    j["reference_distribution"] = report.reference_distribution;
    j["clamped"] = report.clamped;
    return j;
}

inline nlohmann::json to_json(const AnalysisReport& report) {
    nlohmann::json j;
    j["fits"]["group1"] = to_json(report.observed.fit1);
    j["fits"]["group2"] = to_json(report.observed.fit2);
    j["embeddings"]["group1"] = to_json(report.observed.xi1);
    j["embeddings"]["group2"] = to_json(report.observed.xi2);
    j["embeddings"]["d1"] = report.observed.d1;
    j["embeddings"]["d2"] = report.observed.d2;
    j["embeddings"]["t_obs"] = report.observed.value;
    j["tests"] = nlohmann::json::array();
    for (const TestReport& t : report.disk_tests) j["tests"].push_back(to_json(t));
    for (const BaselineReport& t : report.baseline_tests) j["tests"].push_back(to_json(t));
    const auto log_json = [](const std::vector<ImputationEntry>& log) {
        nlohmann::json arr = nlohmann::json::array();
        for (const ImputationEntry& e : log) {
            arr.push_back({{"index", e.index}, {"value", e.imputed_radians}});
        }
        return arr;
    };
    j["imputation_log"]["group1"] = log_json(report.imputation1);
    j["imputation_log"]["group2"] = log_json(report.imputation2);
    j["provenance"]["software_version"] = kVersionString;
    j["provenance"]["seed"] = report.options.seed;
    j["provenance"]["resamples"] = report.options.resamples;
    j["provenance"]["alpha"] = report.options.alpha;
    j["provenance"]["mu0"] = report.options.direction.mu0.radians();
    j["provenance"]["fourfold"] = report.options.fourfold;
    j["provenance"]["impute"] = report.options.impute;
    j["provenance"]["pipeline_order"] = report.pipeline_order;
    j["provenance"]["source1"] = report.source1;
    j["provenance"]["source2"] = report.source2;
    return j;
}

} // namespace hypercirc
