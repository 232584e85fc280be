#pragma once

// Monte Carlo size and power experiments over a grid of scenarios.
//
// The unit of work is one (cell, iteration) pair: draw both groups once,
// then hand the same data to every requested method. Each unit derives its
// random streams from (master seed, cell index, iteration index) alone and
// writes into its own preallocated slot, so the engine produces bit-identical
// results for any worker count and any scheduling order. Workers pull units
// off a shared atomic counter.
//
// Rejection indicators are aggregated as integers, and the output CSV
// renders doubles through shortest-round-trip formatting, which makes the
// whole artifact byte-stable across runs.

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "angle.hpp"
#include "baselines.hpp"
#include "inference.hpp"
#include "method.hpp"
#include "rng.hpp"
#include "von_mises.hpp"
#include "version.hpp"

namespace hypercirc {

enum class ExperimentMode { size, power };

// Grid description. In size mode both groups share the mean direction taken
// from mu2_grid (mu1 is ignored); in power mode group one keeps mu1 fixed
// while group two walks mu2_grid.
struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::size;
    std::vector<std::size_t> sample_sizes;
    std::vector<std::pair<double, double>> kappa_pairs;
    double mu1 = 0.0;
    std::vector<double> mu2_grid;
    std::size_t iterations = 500;
    std::size_t resamples = 999;
    double alpha = 0.05;
    std::vector<Method> methods;
    std::uint64_t master_seed = 0;
};

struct CellKey {
    std::size_t n = 0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
};

struct CellResult {
    CellKey cell;
    Method method = Method::poincare_perm;
    double rejection_rate = 0.0;
    double mc_stderr = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    bool skipped = false;
    std::string skip_reason;
    // iterations whose test raised a degeneracy error; counted as
    // non-rejections and surfaced here so they cannot pass silently
    std::size_t failed_iterations = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<CellResult> records;
    std::string config_digest;
    std::string software_version;
};

namespace detail {

inline constexpr std::uint64_t kDataTag = 0x64617461;
inline constexpr std::uint64_t kTestTag = 0x74657374;

inline void validate_experiment_config(const ExperimentConfig& config) {
    if (config.sample_sizes.empty()) throw std::invalid_argument("experiment: no sample sizes");
    if (config.kappa_pairs.empty()) throw std::invalid_argument("experiment: no concentration pairs");
    if (config.mu2_grid.empty()) throw std::invalid_argument("experiment: empty direction grid");
    if (config.methods.empty()) throw std::invalid_argument("experiment: no methods selected");
    if (config.iterations == 0) throw std::invalid_argument("experiment: iterations must be positive");
    if (config.resamples < 99) throw std::invalid_argument("experiment: at least 99 resamples required");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("experiment: alpha must lie in (0, 1)");
    for (const std::size_t n : config.sample_sizes) {
        if (n == 0) throw std::invalid_argument("experiment: sample sizes must be positive");
    }
    for (const auto& [k1, k2] : config.kappa_pairs) {
        if (!(k1 >= 0.0) || !(k2 >= 0.0)) {
            throw std::invalid_argument("experiment: concentrations must be nonnegative");
        }
    }
}

// Outcome codes per (cell, iteration, method) slot
inline constexpr std::uint8_t kSlotSkipped = 0;
inline constexpr std::uint8_t kSlotAccept = 1;
inline constexpr std::uint8_t kSlotReject = 2;
inline constexpr std::uint8_t kSlotFailed = 3;

// Mixes the scalar fields of the config into a short hex digest, stored in
// result artifacts so a results file can be matched to its configuration.
inline std::string config_digest(const ExperimentConfig& c) {
    std::uint64_t h = splitmix64(0x68797063u);
    const auto mix_u64 = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
    const auto mix_d = [&mix_u64](double v) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof bits);
        mix_u64(bits);
    };
    mix_u64(c.mode == ExperimentMode::size ? 1 : 2);
    for (const std::size_t n : c.sample_sizes) mix_u64(n);
    for (const auto& [k1, k2] : c.kappa_pairs) {
        mix_d(k1);
        mix_d(k2);
    }
    mix_d(c.mu1);
    for (const double m : c.mu2_grid) mix_d(m);
    mix_u64(c.iterations);
    mix_u64(c.resamples);
    mix_d(c.alpha);
    for (const Method m : c.methods) mix_u64(static_cast<std::uint64_t>(m) + 11);
    mix_u64(c.master_seed);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace detail

// Shortest decimal string that round trips to the same double; "nan" for
// missing values in skipped cells.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    const std::to_chars_result r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// Worker count resolution: a request of zero means hardware concurrency,
// and the HYPERCIRC_THREADS environment variable caps whatever was chosen.
// The cap affects wall time only, never results.
inline unsigned resolve_threads(unsigned requested) {
    unsigned threads = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HYPERCIRC_THREADS")) {
        const unsigned long cap = std::strtoul(env, nullptr, 10);
        if (cap >= 1) threads = std::min<unsigned long>(threads, cap);
    }
    return std::max(1u, threads);
}

inline std::vector<CellKey> experiment_cells(const ExperimentConfig& config) {
    std::vector<CellKey> cells;
    for (const std::size_t n : config.sample_sizes) {
        for (const auto& [k1, k2] : config.kappa_pairs) {
            for (const double mu : config.mu2_grid) {
                const double mu1 = config.mode == ExperimentMode::size ? mu : config.mu1;
                cells.push_back({n, k1, k2, mu1, mu});
            }
        }
    }
    return cells;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config, unsigned requested_threads = 0) {
    detail::validate_experiment_config(config);
    const std::vector<CellKey> cells = experiment_cells(config);
    const std::size_t num_cells = cells.size();
    const std::size_t num_methods = config.methods.size();
    const std::size_t iters = config.iterations;

    // a zero concentration collapses the embedding onto the origin, which
    // leaves the disk statistic without anything to compare
    const auto method_skip_reason = [&](const CellKey& cell, Method m) -> const char* {
        const bool disk_method = m == Method::poincare_perm || m == Method::poincare_boot;
        if (disk_method && (cell.kappa1 == 0.0 || cell.kappa2 == 0.0)) {
            return "zero concentration embeds at the origin, disk statistic vacuous";
        }
        return nullptr;
    };

    std::vector<std::uint8_t> slots(num_cells * iters * num_methods, detail::kSlotSkipped);
    std::atomic<std::size_t> next_unit{0};
    const std::size_t total_units = num_cells * iters;

    const auto worker = [&]() {
        for (;;) {
            const std::size_t unit = next_unit.fetch_add(1, std::memory_order_relaxed);
            if (unit >= total_units) return;
            const std::size_t c = unit / iters;
            const std::size_t i = unit % iters;
            const CellKey& cell = cells[c];

            RngStream gen1(config.master_seed, {detail::kDataTag, c, i, 1});
            RngStream gen2(config.master_seed, {detail::kDataTag, c, i, 2});
            CircularSample s1 = vm_sample(VonMisesParams(Angle(cell.mu1), cell.kappa1), cell.n, gen1);
            CircularSample s2 = vm_sample(VonMisesParams(Angle(cell.mu2), cell.kappa2), cell.n, gen2);
            s1.label = "group 1";
            s2.label = "group 2";

            for (std::size_t m = 0; m < num_methods; ++m) {
                const Method method = config.methods[m];
                std::uint8_t* slot = &slots[(c * iters + i) * num_methods + m];
                if (method_skip_reason(cell, method) != nullptr) continue;
                TestConfig tc;
                // The preferred radius tracks group one's mean direction.
                // Size cells (common mean) then sit exactly on the null at
                // every grid angle, and power cells measure how far group
                // two's mean wanders off the radius. Rotating the direction
                // together with the data is an isometry, so this loses no
                // generality.
                tc.direction = {Angle(cell.mu1)};
                tc.resamples = config.resamples;
                tc.alpha = config.alpha;
                tc.seed = derive_seed(config.master_seed,
                                      {detail::kTestTag, c, i, static_cast<std::uint64_t>(method)});
                try {
                    bool reject = false;
                    switch (method) {
                        case Method::poincare_perm:
                            reject = permutation_test(s1, s2, tc).reject;
                            break;
                        case Method::poincare_boot:
                            reject = bootstrap_test(s1, s2, tc).reject;
                            break;
                        case Method::z:
                            reject = z_test(s1, s2).p_value <= config.alpha;
                            break;
                        case Method::w:
                            reject = w_test(s1, s2).p_value <= config.alpha;
                            break;
                        case Method::mww:
                            reject = mww_test(s1, s2).p_value <= config.alpha;
                            break;
                    }
                    *slot = reject ? detail::kSlotReject : detail::kSlotAccept;
                } catch (const DegenerateSampleError&) {
                    *slot = detail::kSlotFailed;
                }
            }
        }
    };

    const unsigned threads = std::min<std::size_t>(resolve_threads(requested_threads), total_units);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    ExperimentResult result;
    result.config = config;
    result.config_digest = detail::config_digest(config);
    result.software_version = kVersionString;
    result.records.reserve(num_cells * num_methods);
    for (std::size_t c = 0; c < num_cells; ++c) {
        for (std::size_t m = 0; m < num_methods; ++m) {
            CellResult rec;
            rec.cell = cells[c];
            rec.method = config.methods[m];
            rec.iterations = iters;
            rec.seed = config.master_seed;
            if (const char* reason = method_skip_reason(cells[c], config.methods[m])) {
                rec.skipped = true;
                rec.skip_reason = reason;
                rec.rejection_rate = std::numeric_limits<double>::quiet_NaN();
                rec.mc_stderr = std::numeric_limits<double>::quiet_NaN();
            } else {
                std::size_t rejects = 0;
                std::size_t failed = 0;
                for (std::size_t i = 0; i < iters; ++i) {
                    const std::uint8_t s = slots[(c * iters + i) * num_methods + m];
                    if (s == detail::kSlotReject) ++rejects;
                    if (s == detail::kSlotFailed) ++failed;
                }
                const double rate = static_cast<double>(rejects) / static_cast<double>(iters);
                rec.rejection_rate = rate;
                rec.mc_stderr = std::sqrt(rate * (1.0 - rate) / static_cast<double>(iters));
                rec.failed_iterations = failed;
            }
            result.records.push_back(std::move(rec));
        }
    }
    return result;
}

// One row per grid cell and method, with the pinned column set
inline void write_csv(const ExperimentResult& result, std::ostream& out) {
    out << "n,kappa1,kappa2,mu1,mu2,method,rejection_rate,mc_stderr,iterations,seed\n";
    for (const CellResult& rec : result.records) {
        out << rec.cell.n << ',' << format_double(rec.cell.kappa1) << ','
            << format_double(rec.cell.kappa2) << ',' << format_double(rec.cell.mu1) << ','
            << format_double(rec.cell.mu2) << ',' << method_name(rec.method) << ','
            << format_double(rec.rejection_rate) << ',' << format_double(rec.mc_stderr) << ','
            << rec.iterations << ',' << rec.seed << '\n';
    }
}

struct PowerDifferenceRow {
    CellKey cell;
    Method method_a = Method::poincare_perm;
    Method method_b = Method::poincare_perm;
    double difference = 0.0;
    bool skipped = false;
};

namespace detail {

inline bool same_cell(const CellKey& a, const CellKey& b) {
    return a.n == b.n && a.kappa1 == b.kappa1 && a.kappa2 == b.kappa2 &&
           a.mu1 == b.mu1 && a.mu2 == b.mu2;
}

} // namespace detail

// Cellwise rejection-rate differences between two experiments on the same
// grid. Either the two runs used the same method list (matched methodwise)
// or each ran exactly one method (matched cellwise).
inline std::vector<PowerDifferenceRow> power_difference(const ExperimentResult& a,
                                                        const ExperimentResult& b) {
    const bool same_methods = a.config.methods == b.config.methods;
    const bool single = a.config.methods.size() == 1 && b.config.methods.size() == 1;
    if (!same_methods && !single) {
        throw std::invalid_argument("power_difference: method lists must match, or both runs must be single method");
    }
    if (a.records.size() != b.records.size()) {
        throw std::invalid_argument("power_difference: experiments ran different grids");
    }
    std::vector<PowerDifferenceRow> rows;
    rows.reserve(a.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const CellResult& ra = a.records[i];
        const CellResult& rb = b.records[i];
        if (!detail::same_cell(ra.cell, rb.cell)) {
            throw std::invalid_argument("power_difference: experiments ran different grids");
        }
        PowerDifferenceRow row;
        row.cell = ra.cell;
        row.method_a = ra.method;
        row.method_b = rb.method;
        if (ra.skipped || rb.skipped) {
            row.skipped = true;
            row.difference = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.difference = ra.rejection_rate - rb.rejection_rate;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace hypercirc
