#pragma once

// Two-sample testing in the embedded geometry. The statistic is the absolute
// difference of the two groups' hyperbolic distances to the preferred radius,
//   T = | d(xi_1, R) - d(xi_2, R) |,
// where xi_g is the disk embedding of group g's fitted parameters. Its null
// distribution is approximated either by pooled-relabeling (exchangeable
// case, equal concentrations) or by a parametric bootstrap (unequal
// concentrations, both groups resampled on the preferred direction with
// their own fitted concentration).
//
// Both resampling loops work on cached unit vectors rather than raw angles,
// so a replicate costs a shuffle or a batch of draws plus two closed-form
// refits, with no trigonometry in the loop. Replicate b always draws from
// substream(seed, {tag, b}), which pins the full resampling distribution to
// the seed alone, independent of evaluation order.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "angle.hpp"
#include "disk.hpp"
#include "rng.hpp"
#include "von_mises.hpp"

namespace hypercirc {

enum class TestMethod { permutation, bootstrap };

struct TestConfig {
    PreferredDirection direction{};
    std::size_t resamples = 2500;
    std::uint64_t seed = 0;
    double alpha = 0.05;
};

// Everything the observed statistic is made of, kept for reporting
struct TwoSampleStatistic {
    double value = 0.0;
    FitResult fit1;
    FitResult fit2;
    DiskPoint xi1;
    DiskPoint xi2;
    double d1 = 0.0;
    double d2 = 0.0;
};

struct TestReport {
    double t_obs = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double alpha = 0.05;
    TestMethod method = TestMethod::permutation;
    std::size_t resamples = 0;
    std::uint64_t seed = 0;
    Angle mu0;
    TwoSampleStatistic observed;
    // replicates whose refit degenerated; they count as at least as extreme
    std::size_t degenerate_resamples = 0;
    bool degenerate_warning = false;
};

// Add-one resampling p-value, (1 + #{T_b >= T_obs}) / (B + 1). Never zero,
// smallest attainable value is 1 / (B + 1).
inline double resample_p_value(std::size_t count_ge, std::size_t resamples) {
    return static_cast<double>(1 + count_ge) / static_cast<double>(resamples + 1);
}

namespace detail {

inline constexpr std::uint64_t kPermTag = 0x7065726d;
inline constexpr std::uint64_t kBootTagA = 0x62743161;
inline constexpr std::uint64_t kBootTagB = 0x62743262;

inline void validate_test_config(const TestConfig& config) {
    if (config.resamples < 99) {
        throw std::invalid_argument("TestConfig: at least 99 resamples required");
    }
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw std::invalid_argument("TestConfig: alpha must lie in (0, 1)");
    }
}

inline std::vector<UnitVector> to_units(const CircularSample& sample) {
    std::vector<UnitVector> units;
    units.reserve(sample.size());
    for (const Angle a : sample.angles) {
        units.push_back({std::cos(a.radians()), std::sin(a.radians())});
    }
    return units;
}

} // namespace detail

// Builds the statistic from two precomputed summaries. Throws
// DegenerateSampleError, tagged with the group label, if either fit
// degenerates, since the embedding of a capped fit is not trustworthy.
inline TwoSampleStatistic statistic_from_summaries(const CircularSummary& s1,
                                                   const CircularSummary& s2,
                                                   const PreferredDirection& direction,
                                                   const std::string& label1 = "group 1",
                                                   const std::string& label2 = "group 2") {
    TwoSampleStatistic out;
    out.fit1 = vm_fit_summary(s1);
    out.fit2 = vm_fit_summary(s2);
    if (out.fit1.degenerate) {
        throw DegenerateSampleError(label1, label1 + ": sample admits no usable von Mises fit");
    }
    if (out.fit2.degenerate) {
        throw DegenerateSampleError(label2, label2 + ": sample admits no usable von Mises fit");
    }
    out.xi1 = embed(out.fit1.params);
    out.xi2 = embed(out.fit2.params);
    out.d1 = project_to_radius(out.xi1, direction).distance;
    out.d2 = project_to_radius(out.xi2, direction).distance;
    out.value = std::fabs(out.d1 - out.d2);
    return out;
}

inline TwoSampleStatistic statistic_t(const CircularSample& s1,
                                      const CircularSample& s2,
                                      const PreferredDirection& direction) {
    return statistic_from_summaries(summarize(s1), summarize(s2), direction,
                                    s1.label.empty() ? "group 1" : s1.label,
                                    s2.label.empty() ? "group 2" : s2.label);
}

// Pooled-relabeling test. The pooled angles are reshuffled B times, the
// first n1 slots are relabeled as group one, and the statistic is recomputed
// from the relabeled summaries. Exact exchangeability argument applies when
// the two generating distributions share a concentration.
inline TestReport permutation_test(const CircularSample& s1,
                                   const CircularSample& s2,
                                   const TestConfig& config) {
    detail::validate_test_config(config);
    TestReport report;
    report.observed = statistic_t(s1, s2, config.direction);
    report.t_obs = report.observed.value;

    std::vector<UnitVector> pool = detail::to_units(s1);
    {
        const std::vector<UnitVector> tail = detail::to_units(s2);
        pool.insert(pool.end(), tail.begin(), tail.end());
    }
    const std::size_t n1 = s1.size();
    const std::size_t n2 = s2.size();

    std::size_t count_ge = 0;
    std::size_t degenerate = 0;
    std::vector<UnitVector> buf;
    for (std::size_t b = 1; b <= config.resamples; ++b) {
        RngStream rng(config.seed, {detail::kPermTag, b});
        buf = pool;
        shuffle(buf, rng);
        double t = std::numeric_limits<double>::infinity();
        try {
            const CircularSummary g1 = summarize_units({buf.data(), n1});
            const CircularSummary g2 = summarize_units({buf.data() + n1, n2});
            t = statistic_from_summaries(g1, g2, config.direction).value;
        } catch (const DegenerateSampleError&) {
            ++degenerate;
        }
        if (t >= report.t_obs) ++count_ge;
    }

    report.p_value = resample_p_value(count_ge, config.resamples);
    report.alpha = config.alpha;
    report.reject = report.p_value <= config.alpha;
    report.method = TestMethod::permutation;
    report.resamples = config.resamples;
    report.seed = config.seed;
    report.mu0 = config.direction.mu0;
    report.degenerate_resamples = degenerate;
    report.degenerate_warning = degenerate * 100 > config.resamples;
    return report;
}

// Parametric bootstrap for unequal concentrations. Each replicate redraws
// both groups from von Mises laws centered on the preferred direction with
// the groups' own fitted concentrations, which realizes the null of equal
// distances while keeping the concentration disparity intact.
inline TestReport bootstrap_test(const CircularSample& s1,
                                 const CircularSample& s2,
                                 const TestConfig& config) {
    detail::validate_test_config(config);
    TestReport report;
    report.observed = statistic_t(s1, s2, config.direction);
    report.t_obs = report.observed.value;

    const VonMisesParams null1(config.direction.mu0, report.observed.fit1.params.kappa);
    const VonMisesParams null2(config.direction.mu0, report.observed.fit2.params.kappa);
    const std::size_t n1 = s1.size();
    const std::size_t n2 = s2.size();

    std::size_t count_ge = 0;
    std::size_t degenerate = 0;
    for (std::size_t b = 1; b <= config.resamples; ++b) {
        RngStream rng1(config.seed, {detail::kBootTagA, b});
        RngStream rng2(config.seed, {detail::kBootTagB, b});
        const std::vector<UnitVector> u1 = vm_sample_units(null1, n1, rng1);
        const std::vector<UnitVector> u2 = vm_sample_units(null2, n2, rng2);
        double t = std::numeric_limits<double>::infinity();
        try {
            t = statistic_from_summaries(summarize_units(u1), summarize_units(u2),
                                         config.direction).value;
        } catch (const DegenerateSampleError&) {
            ++degenerate;
        }
        if (t >= report.t_obs) ++count_ge;
    }

    report.p_value = resample_p_value(count_ge, config.resamples);
    report.alpha = config.alpha;
    report.reject = report.p_value <= config.alpha;
    report.method = TestMethod::bootstrap;
    report.resamples = config.resamples;
    report.seed = config.seed;
    report.mu0 = config.direction.mu0;
    report.degenerate_resamples = degenerate;
    report.degenerate_warning = degenerate * 100 > config.resamples;
    return report;
}

} // namespace hypercirc
