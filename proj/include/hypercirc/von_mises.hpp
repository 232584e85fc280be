#pragma once

// The von Mises family on the circle: density, exact sampling, and maximum
// likelihood fitting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>
#include <numbers>

#include "angle.hpp"
#include "bessel.hpp"
#include "rng.hpp"

namespace hypercirc {

struct VonMisesParams {
    Angle mu;
    double kappa = 0.0;

    VonMisesParams() = default;

    VonMisesParams(Angle mean_direction, double concentration)
        : mu(mean_direction), kappa(concentration) {
        if (!std::isfinite(concentration) || concentration < 0.0) {
            throw std::domain_error("VonMisesParams: concentration must be finite and nonnegative");
        }
    }
};

// Thrown when a sample admits no usable von Mises fit (all mass at one
// point, or no preferred direction at all). Carries the label of the
// offending group so two-sample callers can report which side failed.
class DegenerateSampleError : public std::runtime_error {
public:
    DegenerateSampleError(std::string group, const std::string& what)
        : std::runtime_error(what), group_(std::move(group)) {}

    const std::string& group() const { return group_; }

private:
    std::string group_;
};

// Density at theta. Written against the exponentially scaled I0 so that
// arbitrarily large concentrations stay finite:
//   f = exp(kappa (cos(theta - mu) - 1)) / (2 pi e^{-kappa} I0(kappa))
inline double vm_density(Angle theta, const VonMisesParams& p) {
    const double shifted = std::cos(theta.radians() - p.mu.radians()) - 1.0;
    return std::exp(p.kappa * shifted) / (two_pi * bessel_i0_scaled(p.kappa));
}

// The cos/sin pair of one angle. The resampling loops in this library
// operate on these directly, which keeps transcendental calls out of the
// hot path; summing a permuted set of unit vectors is all a refit needs.
struct UnitVector {
    double c = 1.0;
    double s = 0.0;
};

inline CircularSummary summarize_units(std::span<const UnitVector> units) {
    if (units.empty()) {
        throw std::invalid_argument("summarize_units: sample is empty");
    }
    double c = 0.0;
    double s = 0.0;
    for (const UnitVector& u : units) {
        c += u.c;
        s += u.s;
    }
    const double n = static_cast<double>(units.size());
    c /= n;
    s /= n;
    const double r = std::min(std::hypot(c, s), 1.0);
    return {c, s, r, units.size()};
}

namespace detail {

// Envelope constants for the Best-Fisher wrapped-Cauchy rejection sampler.
// b is algebraically (a - sqrt(2a)) / (2 kappa) with a = 1 + sqrt(1 + 4k^2),
// rearranged to avoid the 0/0 cancellation at small kappa.
struct VmEnvelope {
    double b;
    double r;
};

inline VmEnvelope vm_envelope(double kappa) {
    const double root = std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double a = 1.0 + root;
    const double b = 2.0 * a * kappa / ((root + 1.0) * (a + std::sqrt(2.0 * a)));
    const double r = (1.0 + b * b) / (2.0 * b);
    return {b, r};
}

// One exact draw from vM(0, kappa), returned as (cos psi, sign) where psi
// is the magnitude of the deviation from the mean direction. Consumes a
// variable number of uniforms (rejection), expected count about 1.5.
inline std::pair<double, double> vm_draw_centered(double kappa, const VmEnvelope& env, RngStream& rng) {
    double f;
    for (;;) {
        const double z = std::cos(std::numbers::pi * rng.uniform());
        f = (1.0 + env.r * z) / (env.r + z);
        const double c = kappa * (env.r - f);
        const double u2 = rng.uniform();
        if (c * (2.0 - c) - u2 > 0.0) break;
        if (u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return {std::clamp(f, -1.0, 1.0), sign};
}

inline constexpr double kUniformKappa = 1e-12;

} // namespace detail

// n independent draws from vM(mu, kappa). Concentrations below 1e-12 are
// treated as exactly uniform. Identical (params, n, stream) inputs yield
// identical output on every platform this builds on.
inline CircularSample vm_sample(const VonMisesParams& p, std::size_t n, RngStream& rng) {
    CircularSample out;
    out.angles.reserve(n);
    if (p.kappa < detail::kUniformKappa) {
        for (std::size_t i = 0; i < n; ++i) {
            out.angles.push_back(Angle(rng.uniform(0.0, two_pi)));
        }
        return out;
    }
    const detail::VmEnvelope env = detail::vm_envelope(p.kappa);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [f, sign] = detail::vm_draw_centered(p.kappa, env, rng);
        out.angles.push_back(Angle(p.mu.radians() + sign * std::acos(f)));
    }
    return out;
}

// Same draws as vm_sample (identical stream consumption and distribution)
// delivered as unit vectors. The deviation psi from the mean satisfies
// cos psi = f, so the rotation by mu needs no inverse trig at all.
inline std::vector<UnitVector> vm_sample_units(const VonMisesParams& p, std::size_t n, RngStream& rng) {
    std::vector<UnitVector> out;
    out.reserve(n);
    if (p.kappa < detail::kUniformKappa) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = rng.uniform(0.0, two_pi);
            out.push_back({std::cos(t), std::sin(t)});
        }
        return out;
    }
    const detail::VmEnvelope env = detail::vm_envelope(p.kappa);
    const double cm = std::cos(p.mu.radians());
    const double sm = std::sin(p.mu.radians());
    for (std::size_t i = 0; i < n; ++i) {
        const auto [f, sign] = detail::vm_draw_centered(p.kappa, env, rng);
        const double sp = sign * std::sqrt(std::max(0.0, 1.0 - f * f));
        out.push_back({f * cm - sp * sm, f * sm + sp * cm});
    }
    return out;
}

struct FitResult {
    VonMisesParams params;
    CircularSummary summary;
    bool degenerate = false;
};

// Closed-form maximum likelihood fit from a precomputed summary:
//   mu_hat = atan2(S, C),  kappa_hat = a1_inverse(R).
// R within 1e-12 of 1 caps kappa at the inverse evaluated at 1 - 1e-12 and
// flags the fit; R within 1e-12 of 0 flags it too, since the fitted mean
// direction is then numerically meaningless.
inline FitResult vm_fit_summary(const CircularSummary& summary) {
    constexpr double eps = 1e-12;
    const Angle mu(std::atan2(summary.s_bar, summary.c_bar));
    double kappa;
    bool degenerate = false;
    if (summary.r_bar >= 1.0 - eps) {
        kappa = a1_inverse(1.0 - eps);
        degenerate = true;
    } else {
        kappa = a1_inverse(summary.r_bar);
        if (summary.r_bar <= eps) degenerate = true;
    }
    return {VonMisesParams(mu, kappa), summary, degenerate};
}

inline FitResult vm_fit(std::span<const Angle> angles) {
    return vm_fit_summary(summarize(angles));
}

inline FitResult vm_fit(const CircularSample& sample) {
    return vm_fit_summary(summarize(sample));
}

} // namespace hypercirc
