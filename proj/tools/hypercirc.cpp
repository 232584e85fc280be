// Command line front end. Every numeric value is printed through
// shortest-round-trip formatting, so identical inputs (including seeds)
// produce byte-identical output.
//
// Exit codes: 0 success, 2 unreadable or malformed input data,
// 3 degenerate sample (no usable fit), 1 anything else.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <hypercirc/hypercirc.hpp>

namespace hc = hypercirc;

namespace {

struct ReadFlags {
    std::string unit = "radians";
    bool no_header = false;
};

hc::CsvOptions csv_options(const ReadFlags& flags) {
    hc::CsvOptions options;
    options.unit = flags.unit == "degrees" ? hc::AngleUnit::degrees : hc::AngleUnit::radians;
    options.expect_header = !flags.no_header;
    return options;
}

void add_read_flags(CLI::App* cmd, ReadFlags& flags) {
    cmd->add_option("--unit", flags.unit, "angle unit in the input file")
        ->check(CLI::IsMember({"radians", "degrees"}))
        ->capture_default_str();
    cmd->add_flag("--no-header", flags.no_header, "input file has no header row");
}

// Strict conversion for subcommands without imputation support
hc::CircularSample complete_sample(const hc::AngleTable& table, const std::string& label) {
    hc::CircularSample sample;
    sample.label = label;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (!table.rows[i].radians.has_value()) {
            throw hc::DataError(table.source + ": missing values present, use analyze --impute");
        }
        sample.angles.push_back(hc::Angle(*table.rows[i].radians));
    }
    return sample;
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

void print_fit(std::ostream& out, const std::string& label, const hc::FitResult& fit) {
    out << "group " << label << ": n=" << fit.summary.n
        << " mu_hat=" << hc::format_double(fit.params.mu.radians())
        << " kappa_hat=" << hc::format_double(fit.params.kappa)
        << " r_bar=" << hc::format_double(fit.summary.r_bar)
        << " degenerate=" << yes_no(fit.degenerate) << '\n';
}

int run_fit(const std::string& path, const ReadFlags& flags, bool as_json) {
    const hc::AngleTable table = hc::read_angle_file(path, csv_options(flags));
    // a group column splits the file, otherwise it is one sample
    std::vector<std::pair<std::string, hc::CircularSample>> groups;
    if (table.has_group_column) {
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            if (!table.rows[i].radians.has_value()) {
                throw hc::DataError(table.source + ": missing values present, use analyze --impute");
            }
            const std::string& g = table.rows[i].group;
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& p) { return p.first == g; });
            if (it == groups.end()) {
                groups.push_back({g, hc::CircularSample{{}, g}});
                it = groups.end() - 1;
            }
            it->second.angles.push_back(hc::Angle(*table.rows[i].radians));
        }
    } else {
        groups.push_back({"all", complete_sample(table, "all")});
    }

    nlohmann::json j = nlohmann::json::array();
    for (const auto& [label, sample] : groups) {
        const hc::FitResult fit = hc::vm_fit(sample);
        if (as_json) {
            nlohmann::json item = hc::to_json(fit);
            item["group"] = label;
            j.push_back(item);
        } else {
            print_fit(std::cout, label, fit);
        }
    }
    if (as_json) std::cout << j.dump(2) << '\n';
    return 0;
}

int run_sample(double mu, double kappa, std::size_t n, std::uint64_t seed,
               const std::string& out_path, const std::string& unit) {
    hc::RngStream rng(seed, {0x736d70u});
    const hc::CircularSample draw = hc::vm_sample(hc::VonMisesParams(hc::Angle(mu), kappa), n, rng);
    const hc::AngleUnit u = unit == "degrees" ? hc::AngleUnit::degrees : hc::AngleUnit::radians;
    if (out_path.empty()) {
        hc::write_angle_csv(std::cout, draw, u);
    } else {
        std::ofstream out(out_path);
        if (!out) throw hc::DataError("cannot write " + out_path);
        hc::write_angle_csv(out, draw, u);
    }
    return 0;
}

int run_embed(double mu, double kappa, bool as_json) {
    const hc::DiskPoint p = hc::embed(hc::VonMisesParams(hc::Angle(mu), kappa));
    if (as_json) {
        std::cout << hc::to_json(p).dump(2) << '\n';
    } else {
        std::cout << "re=" << hc::format_double(p.re()) << " im=" << hc::format_double(p.im())
                  << '\n';
    }
    return 0;
}

int run_project(double re, double im, double mu0, bool as_json) {
    const hc::Projection p = hc::project_to_radius(hc::DiskPoint(re, im), {hc::Angle(mu0)});
    if (as_json) {
        nlohmann::json j;
        j["t_star"] = p.t_star;
        j["foot"] = hc::to_json(p.foot);
        j["distance"] = p.distance;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "t_star=" << hc::format_double(p.t_star)
                  << " foot_re=" << hc::format_double(p.foot.re())
                  << " foot_im=" << hc::format_double(p.foot.im())
                  << " distance=" << hc::format_double(p.distance) << '\n';
    }
    return 0;
}

void print_test_report(std::ostream& out, const hc::TestReport& report) {
    out << "method=" << (report.method == hc::TestMethod::permutation ? "poincare_perm" : "poincare_boot")
        << " t_obs=" << hc::format_double(report.t_obs)
        << " p_value=" << hc::format_double(report.p_value)
        << " reject=" << yes_no(report.reject)
        << " alpha=" << hc::format_double(report.alpha)
        << " resamples=" << report.resamples
        << " seed=" << report.seed << '\n';
    if (report.degenerate_warning) {
        out << "warning: " << report.degenerate_resamples
            << " resampling replicates were degenerate\n";
    }
}

void print_baseline_report(std::ostream& out, const hc::BaselineReport& report) {
    const char* name = report.method == hc::BaselineMethod::z   ? "z"
                       : report.method == hc::BaselineMethod::w ? "w"
                                                                : "mww";
    out << "method=" << name << " statistic=" << hc::format_double(report.statistic)
        << " p_value=" << hc::format_double(report.p_value) << " reference=\""
        << report.reference_distribution << "\"";
    if (report.clamped) out << " clamped=yes";
    out << '\n';
}

int run_test(const std::string& file1, const std::string& file2, const ReadFlags& flags,
             const std::string& method_name, double mu0, std::size_t resamples,
             std::uint64_t seed, double alpha, bool as_json) {
    const hc::CsvOptions options = csv_options(flags);
    const hc::CircularSample s1 = complete_sample(hc::read_angle_file(file1, options), "group 1");
    const hc::CircularSample s2 = complete_sample(hc::read_angle_file(file2, options), "group 2");
    const hc::Method method = hc::method_from_name(method_name);
    const bool baseline = method == hc::Method::z || method == hc::Method::w || method == hc::Method::mww;
    if (baseline && mu0 != 0.0) {
        std::cerr << "note: baseline methods always use reference direction 0, ignoring --mu0\n";
    }

    hc::TestConfig tc;
    tc.direction = {hc::Angle(mu0)};
    tc.resamples = resamples;
    tc.seed = seed;
    tc.alpha = alpha;

    switch (method) {
        case hc::Method::poincare_perm: {
            const hc::TestReport r = hc::permutation_test(s1, s2, tc);
            if (as_json) std::cout << hc::to_json(r).dump(2) << '\n';
            else print_test_report(std::cout, r);
            return 0;
        }
        case hc::Method::poincare_boot: {
            const hc::TestReport r = hc::bootstrap_test(s1, s2, tc);
            if (as_json) std::cout << hc::to_json(r).dump(2) << '\n';
            else print_test_report(std::cout, r);
            return 0;
        }
        case hc::Method::z: {
            const hc::BaselineReport r = hc::z_test(s1, s2);
            if (as_json) std::cout << hc::to_json(r).dump(2) << '\n';
            else print_baseline_report(std::cout, r);
            return 0;
        }
        case hc::Method::w: {
            const hc::BaselineReport r = hc::w_test(s1, s2);
            if (as_json) std::cout << hc::to_json(r).dump(2) << '\n';
            else print_baseline_report(std::cout, r);
            return 0;
        }
        case hc::Method::mww: {
            const hc::BaselineReport r = hc::mww_test(s1, s2);
            if (as_json) std::cout << hc::to_json(r).dump(2) << '\n';
            else print_baseline_report(std::cout, r);
            return 0;
        }
    }
    return 1;
}

int run_analyze(const std::string& file1, const std::string& file2, const ReadFlags& flags,
                const hc::AnalyzeOptions& options_in, const std::vector<std::string>& method_names,
                bool as_json) {
    hc::AnalyzeOptions options = options_in;
    if (!method_names.empty()) {
        options.methods.clear();
        for (const std::string& name : method_names) {
            options.methods.push_back(hc::method_from_name(name));
        }
    }
    const hc::CsvOptions copts = csv_options(flags);
    hc::RawSeries raw1 = hc::raw_series_from_table(hc::read_angle_file(file1, copts), "group 1");
    hc::RawSeries raw2 = hc::raw_series_from_table(hc::read_angle_file(file2, copts), "group 2");

    hc::AnalysisReport report = hc::analyze(raw1, raw2, options);
    report.source1 = file1;
    report.source2 = file2;

    if (as_json) {
        std::cout << hc::to_json(report).dump(2) << '\n';
        return 0;
    }
    print_fit(std::cout, "1", report.observed.fit1);
    print_fit(std::cout, "2", report.observed.fit2);
    std::cout << "embedding 1: re=" << hc::format_double(report.observed.xi1.re())
              << " im=" << hc::format_double(report.observed.xi1.im()) << '\n';
    std::cout << "embedding 2: re=" << hc::format_double(report.observed.xi2.re())
              << " im=" << hc::format_double(report.observed.xi2.im()) << '\n';
    std::cout << "distances to preferred radius: d1=" << hc::format_double(report.observed.d1)
              << " d2=" << hc::format_double(report.observed.d2)
              << " t_obs=" << hc::format_double(report.observed.value) << '\n';
    if (!report.imputation1.empty() || !report.imputation2.empty()) {
        std::cout << "imputed " << report.imputation1.size() << " value(s) in group 1, "
                  << report.imputation2.size() << " in group 2 (" << report.pipeline_order
                  << ")\n";
    }
    for (const hc::TestReport& t : report.disk_tests) print_test_report(std::cout, t);
    for (const hc::BaselineReport& t : report.baseline_tests) print_baseline_report(std::cout, t);
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 std::string sidecar_path, unsigned threads) {
    const hc::ExperimentConfig config = hc::read_experiment_config(config_path);
    const hc::ExperimentResult result = hc::run_experiment(config, threads);

    if (out_path.empty() || out_path == "-") {
        hc::write_csv(result, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw hc::DataError("cannot write " + out_path);
        hc::write_csv(result, out);
        if (sidecar_path.empty()) sidecar_path = out_path + ".json";
    }
    if (!sidecar_path.empty()) {
        std::ofstream side(sidecar_path);
        if (!side) throw hc::DataError("cannot write " + sidecar_path);
        side << hc::experiment_sidecar(result).dump(2) << '\n';
    }
    if (!out_path.empty() && out_path != "-") {
        std::cerr << "wrote " << result.records.size() << " records to " << out_path << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two sample tests for circular data via hyperbolic embedding"};
    app.set_version_flag("--version", hc::kVersionString);
    app.require_subcommand(1);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit a von Mises distribution to a sample");
    std::string fit_file;
    ReadFlags fit_flags;
    bool fit_json = false;
    fit_cmd->add_option("file", fit_file, "CSV with an angle column, optional group column")
        ->required();
    add_read_flags(fit_cmd, fit_flags);
    fit_cmd->add_flag("--json", fit_json, "machine readable output");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "draw from a von Mises distribution");
    double sample_mu = 0.0;
    double sample_kappa = 1.0;
    std::size_t sample_n = 100;
    std::uint64_t sample_seed = 0;
    std::string sample_out;
    std::string sample_unit = "radians";
    sample_cmd->add_option("--mu", sample_mu, "mean direction in radians")->capture_default_str();
    sample_cmd->add_option("--kappa", sample_kappa, "concentration")->capture_default_str();
    sample_cmd->add_option("--n", sample_n, "number of draws")->capture_default_str();
    sample_cmd->add_option("--seed", sample_seed, "random seed")->capture_default_str();
    sample_cmd->add_option("--out", sample_out, "output file, stdout if omitted");
    sample_cmd->add_option("--unit", sample_unit, "angle unit in the output")
        ->check(CLI::IsMember({"radians", "degrees"}))
        ->capture_default_str();

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "map parameters into the unit disk");
    double embed_mu = 0.0;
    double embed_kappa = 0.0;
    bool embed_json = false;
    embed_cmd->add_option("--mu", embed_mu, "mean direction in radians")->required();
    embed_cmd->add_option("--kappa", embed_kappa, "concentration")->required();
    embed_cmd->add_flag("--json", embed_json, "machine readable output");

    // project
    auto* project_cmd = app.add_subcommand("project", "project a disk point onto a radius");
    double project_re = 0.0;
    double project_im = 0.0;
    double project_mu0 = 0.0;
    bool project_json = false;
    project_cmd->add_option("--re", project_re, "real part")->required();
    project_cmd->add_option("--im", project_im, "imaginary part")->required();
    project_cmd->add_option("--mu0", project_mu0, "radius direction in radians")
        ->capture_default_str();
    project_cmd->add_flag("--json", project_json, "machine readable output");

    // test
    auto* test_cmd = app.add_subcommand("test", "two sample test from two angle files");
    std::string test_file1;
    std::string test_file2;
    ReadFlags test_flags;
    std::string test_method = "poincare_perm";
    double test_mu0 = 0.0;
    std::size_t test_resamples = 2500;
    std::uint64_t test_seed = 0;
    double test_alpha = 0.05;
    bool test_json = false;
    test_cmd->add_option("file1", test_file1, "first group CSV")->required();
    test_cmd->add_option("file2", test_file2, "second group CSV")->required();
    add_read_flags(test_cmd, test_flags);
    test_cmd->add_option("--method", test_method, "poincare_perm, poincare_boot, z, w, or mww")
        ->capture_default_str();
    test_cmd->add_option("--mu0", test_mu0, "preferred direction in radians")->capture_default_str();
    test_cmd->add_option("--resamples", test_resamples, "resampling replicates")
        ->capture_default_str();
    test_cmd->add_option("--seed", test_seed, "random seed")->capture_default_str();
    test_cmd->add_option("--alpha", test_alpha, "test level")->capture_default_str();
    test_cmd->add_flag("--json", test_json, "machine readable output");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "full pipeline on two angle files");
    std::string analyze_file1;
    std::string analyze_file2;
    ReadFlags analyze_flags;
    hc::AnalyzeOptions analyze_options;
    std::vector<std::string> analyze_methods;
    double analyze_mu0 = 0.0;
    bool analyze_json = false;
    analyze_cmd->add_option("file1", analyze_file1, "first group CSV")->required();
    analyze_cmd->add_option("file2", analyze_file2, "second group CSV")->required();
    add_read_flags(analyze_cmd, analyze_flags);
    analyze_cmd->add_flag("--fourfold", analyze_options.fourfold,
                          "fold axial angles onto the circle (multiply by four)");
    analyze_cmd->add_flag("--impute", analyze_options.impute,
                          "fill missing values with the observed circular mean");
    analyze_cmd->add_flag("--impute-before-transform", analyze_options.impute_before_transform,
                          "run imputation before the fourfold transform");
    analyze_cmd->add_option("--mu0", analyze_mu0, "preferred direction in radians")
        ->capture_default_str();
    analyze_cmd->add_option("--resamples", analyze_options.resamples, "resampling replicates")
        ->capture_default_str();
    analyze_cmd->add_option("--seed", analyze_options.seed, "random seed")->capture_default_str();
    analyze_cmd->add_option("--alpha", analyze_options.alpha, "test level")->capture_default_str();
    analyze_cmd
        ->add_option("--methods", analyze_methods,
                     "methods to run (default poincare_perm poincare_boot)")
        ->delimiter(',');
    analyze_cmd->add_flag("--json", analyze_json, "machine readable output");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo size and power experiment");
    std::string simulate_config;
    std::string simulate_out;
    std::string simulate_sidecar;
    unsigned simulate_threads = 0;
    simulate_cmd->add_option("config", simulate_config, "experiment configuration JSON")
        ->required();
    simulate_cmd->add_option("--out", simulate_out, "result CSV path, stdout if omitted");
    simulate_cmd->add_option("--sidecar", simulate_sidecar,
                             "provenance JSON path, defaults to <out>.json");
    simulate_cmd->add_option("--threads", simulate_threads,
                             "worker threads, 0 for hardware default; results do not depend on it");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_cmd->parsed()) return run_fit(fit_file, fit_flags, fit_json);
        if (sample_cmd->parsed()) {
            return run_sample(sample_mu, sample_kappa, sample_n, sample_seed, sample_out,
                              sample_unit);
        }
        if (embed_cmd->parsed()) return run_embed(embed_mu, embed_kappa, embed_json);
        if (project_cmd->parsed()) {
            return run_project(project_re, project_im, project_mu0, project_json);
        }
        if (test_cmd->parsed()) {
            return run_test(test_file1, test_file2, test_flags, test_method, test_mu0,
                            test_resamples, test_seed, test_alpha, test_json);
        }
        if (analyze_cmd->parsed()) {
            analyze_options.direction = {hc::Angle(analyze_mu0)};
            return run_analyze(analyze_file1, analyze_file2, analyze_flags, analyze_options,
                               analyze_methods, analyze_json);
        }
        if (simulate_cmd->parsed()) {
            return run_simulate(simulate_config, simulate_out, simulate_sidecar, simulate_threads);
        }
    } catch (const hc::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const hc::DegenerateSampleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
