#pragma once

// Angles on the circle and first-pass summaries of angular samples.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>
#include <numbers>

namespace hypercirc {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// An angle stored by its canonical representative in [0, 2pi). Construction
// reduces modulo 2pi, so two Angle values compare equal exactly when they
// denote the same point of the circle (up to rounding in the reduction).
class Angle {
public:
    Angle() = default;

    explicit Angle(double radians) : theta_(reduce(radians)) {}

    double radians() const { return theta_; }

    static double reduce(double radians) {
        if (!std::isfinite(radians)) {
            throw std::domain_error("Angle: value must be finite");
        }
        double t = std::fmod(radians, two_pi);
        if (t < 0.0) t += two_pi;
        if (t >= two_pi) t = 0.0;
        return t;
    }

    friend bool operator==(Angle a, Angle b) { return a.theta_ == b.theta_; }
    friend bool operator!=(Angle a, Angle b) { return a.theta_ != b.theta_; }

private:
    double theta_ = 0.0;
};

// Arc distance between two angles, in [0, pi]
inline double circular_difference(Angle a, Angle b) {
    const double d = std::fabs(a.radians() - b.radians());
    return std::min(d, two_pi - d);
}

// A sample of angles with an optional human-readable label used in
// diagnostics and error messages.
struct CircularSample {
    std::vector<Angle> angles;
    std::string label;

    std::size_t size() const { return angles.size(); }
    bool empty() const { return angles.empty(); }
};

// Component means of a sample: C = mean cos, S = mean sin, and the mean
// resultant length R = sqrt(C^2 + S^2), which always lands in [0, 1].
struct CircularSummary {
    double c_bar = 0.0;
    double s_bar = 0.0;
    double r_bar = 0.0;
    std::size_t n = 0;
};

inline CircularSummary summarize(std::span<const Angle> angles) {
    if (angles.empty()) {
        throw std::invalid_argument("summarize: sample is empty");
    }
    double c = 0.0;
    double s = 0.0;
    for (const Angle a : angles) {
        c += std::cos(a.radians());
        s += std::sin(a.radians());
    }
    const double n = static_cast<double>(angles.size());
    c /= n;
    s /= n;
    const double r = std::min(std::hypot(c, s), 1.0);
    return {c, s, r, angles.size()};
}

inline CircularSummary summarize(const CircularSample& sample) {
    return summarize(std::span<const Angle>(sample.angles));
}

} // namespace hypercirc
