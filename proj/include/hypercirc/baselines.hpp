#pragma once

// Classical trigonometric-moment competitors for the same two-sample
// question, all referenced to the fixed direction zero: a Z test on mean
// cosines, a Wald test on folded mean deviations, and a Mann-Whitney rank
// test on circular distances from the reference direction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>
#include <numbers>

#include "angle.hpp"
#include "bessel.hpp"
#include "von_mises.hpp"

namespace hypercirc {

enum class BaselineMethod { z, w, mww };

enum class CircularDistance { geodesic, cosine };

// Arc distance from the reference direction, in [0, pi]
inline double circ_dist_geodesic(Angle theta) {
    const double t = theta.radians();
    return std::min(t, two_pi - t);
}

// Cosine dissimilarity from the reference direction, in [0, 2]. A strictly
// increasing function of the arc distance, so rank procedures cannot tell
// the two apart on tie-free data.
inline double circ_dist_cosine(Angle theta) {
    return 1.0 - std::cos(theta.radians());
}

// P(|N(0,1)| >= |z|)
inline double normal_two_sided_p(double z) {
    return std::erfc(std::fabs(z) / std::numbers::sqrt2);
}

// P(chi^2_1 >= w)
inline double chi_square_1_upper_p(double w) {
    return std::erfc(std::sqrt(std::max(w, 0.0) / 2.0));
}

struct BaselineReport {
    double statistic = 0.0;
    double p_value = 1.0;
    BaselineMethod method = BaselineMethod::z;
    std::string reference_distribution;
    // the w test clamps its arccos argument into [-1, 1] when rounding
    // pushes it outside; the flag records that this happened
    bool clamped = false;
};

namespace detail {

struct CosineMoments {
    double mean = 0.0;
    double variance = 0.0; // sample variance, n - 1 divisor
    std::size_t n = 0;
};

inline CosineMoments cosine_moments(const CircularSample& sample, const char* who) {
    if (sample.size() < 2) {
        throw std::invalid_argument(std::string(who) + ": each group needs at least two observations");
    }
    CosineMoments m;
    m.n = sample.size();
    std::vector<double> cosines;
    cosines.reserve(m.n);
    for (const Angle a : sample.angles) {
        cosines.push_back(std::cos(a.radians()));
        m.mean += cosines.back();
    }
    m.mean /= static_cast<double>(m.n);
    for (const double c : cosines) {
        m.variance += (c - m.mean) * (c - m.mean);
    }
    m.variance /= static_cast<double>(m.n - 1);
    return m;
}

struct FoldedDeviation {
    double g = 0.0;        // arccos(C / A1(kappa_hat)), the folded deviation from zero
    double variance = 0.0; // delta-method variance of g
    bool clamped = false;
};

// Since the fitted concentration inverts the resultant length exactly, the
// ratio C / A1(kappa_hat) equals cos(mu_hat) up to rounding, and g is the
// folded mean direction itself. Its sampling variance is therefore the mean
// direction's: the averaged squared sine residual over n * R^2. Normalizing
// by the cosine variance alone would ignore the correlation between C and R
// and overstate the variance several-fold (verified by simulation: the test
// would never reject at nominal 5%).
inline FoldedDeviation folded_deviation(const CircularSample& sample) {
    if (sample.size() < 2) {
        throw std::invalid_argument("w_test: each group needs at least two observations");
    }
    const FitResult fit = vm_fit(sample);
    if (fit.degenerate) {
        throw DegenerateSampleError(sample.label.empty() ? "group" : sample.label,
                                    "w_test: degenerate von Mises fit");
    }
    const double a = a1(fit.params.kappa);
    double ratio = fit.summary.c_bar / a;
    FoldedDeviation out;
    if (ratio > 1.0 || ratio < -1.0) {
        ratio = std::clamp(ratio, -1.0, 1.0);
        out.clamped = true;
    }
    out.g = std::acos(ratio);
    const double n = static_cast<double>(fit.summary.n);
    const double mu_hat = fit.params.mu.radians();
    double sin_sq = 0.0;
    for (const Angle theta : sample.angles) {
        const double s = std::sin(theta.radians() - mu_hat);
        sin_sq += s * s;
    }
    sin_sq /= n;
    const double denom = n * fit.summary.r_bar * fit.summary.r_bar;
    if (sin_sq > 0.0 && denom > 0.0) {
        out.variance = sin_sq / denom;
    } else {
        out.variance = 0.0;
    }
    return out;
}

} // namespace detail

// Difference of mean cosines over its estimated standard error, referred to
// the standard normal.
inline BaselineReport z_test(const CircularSample& s1, const CircularSample& s2) {
    const detail::CosineMoments m1 = detail::cosine_moments(s1, "z_test");
    const detail::CosineMoments m2 = detail::cosine_moments(s2, "z_test");
    const double se2 = m1.variance / static_cast<double>(m1.n) +
                       m2.variance / static_cast<double>(m2.n);
    // Constant groups should give exactly zero variance, but the sample mean
    // of n identical cosines can be off by an ulp, leaving residuals near
    // 1e-17 and a variance near 1e-34. The floor absorbs that; any genuinely
    // dispersed sample sits many orders of magnitude above it.
    constexpr double variance_floor = 1e-24;
    if (se2 <= variance_floor) {
        throw DegenerateSampleError("both groups", "z_test: zero cosine variance in both groups");
    }
    const double z = (m1.mean - m2.mean) / std::sqrt(se2);
    return {z, normal_two_sided_p(z), BaselineMethod::z, "standard normal, two sided", false};
}

// Wald comparison of the folded mean deviations from the reference
// direction, with delta-method variances, referred to chi-square with one
// degree of freedom.
inline BaselineReport w_test(const CircularSample& s1, const CircularSample& s2) {
    const detail::FoldedDeviation f1 = detail::folded_deviation(s1);
    const detail::FoldedDeviation f2 = detail::folded_deviation(s2);
    const double var_sum = f1.variance + f2.variance;
    if (var_sum <= 0.0) {
        throw DegenerateSampleError("both groups", "w_test: zero variance in both groups");
    }
    const double diff = f1.g - f2.g;
    double w = 0.0;
    if (std::isfinite(var_sum)) {
        w = diff * diff / var_sum;
    }
    return {w, chi_square_1_upper_p(w), BaselineMethod::w, "chi-square, 1 df",
            f1.clamped || f2.clamped};
}

// Mann-Whitney rank test on pooled circular distances from the reference
// direction. Midranks for exactly equal distances, normal approximation
// with the usual tie correction. The reported statistic is U for the first
// group. A fully tied pool carries no ordering information and yields p = 1.
inline BaselineReport mww_test(const CircularSample& s1, const CircularSample& s2,
                               CircularDistance distance = CircularDistance::geodesic) {
    if (s1.empty() || s2.empty()) {
        throw std::invalid_argument("mww_test: both groups must be nonempty");
    }
    struct Entry {
        double d;
        int group;
    };
    std::vector<Entry> pooled;
    pooled.reserve(s1.size() + s2.size());
    const auto dist = distance == CircularDistance::geodesic ? circ_dist_geodesic : circ_dist_cosine;
    for (const Angle a : s1.angles) pooled.push_back({dist(a), 1});
    for (const Angle a : s2.angles) pooled.push_back({dist(a), 2});
    std::sort(pooled.begin(), pooled.end(), [](const Entry& a, const Entry& b) { return a.d < b.d; });

    const double n1 = static_cast<double>(s1.size());
    const double n2 = static_cast<double>(s2.size());
    const double nn = n1 + n2;

    double rank_sum_1 = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].d == pooled[i].d) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].group == 1) rank_sum_1 += midrank;
        }
        i = j;
    }

    const double u = rank_sum_1 - n1 * (n1 + 1.0) / 2.0;
    const double mean_u = n1 * n2 / 2.0;
    const double var_u = n1 * n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var_u <= 0.0) {
        // every pooled distance equal, no information in the ranks
        return {u, 1.0, BaselineMethod::mww, "normal approximation with tie correction", false};
    }
    const double z = (u - mean_u) / std::sqrt(var_u);
    return {u, normal_two_sided_p(z), BaselineMethod::mww, "normal approximation with tie correction", false};
}

} // namespace hypercirc
