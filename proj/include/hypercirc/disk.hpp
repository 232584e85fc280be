#pragma once

// The Poincare disk side of the library: embedding fitted von Mises
// parameters into the open unit disk, the hyperbolic metric, and closed-form
// projection onto a radius.
//
// A parameter pair (mu, kappa) maps to the point (kappa / (1 + kappa)) e^{i mu},
// so concentration becomes radial depth and the mean direction becomes the
// argument. Distances between embedded samples are then measured with the
// hyperbolic metric, which stretches differences between highly concentrated
// samples far more than the euclidean one would.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "angle.hpp"
#include "von_mises.hpp"

namespace hypercirc {

// A point strictly inside the unit disk. The boundary is infinitely far
// away in the hyperbolic metric, so construction rejects points with
// squared norm above 1 - 1e-15 outright.
class DiskPoint {
public:
    DiskPoint() = default;

    DiskPoint(double re, double im) : re_(re), im_(im) {
        if (!std::isfinite(re) || !std::isfinite(im) || sq_norm() > 1.0 - 1e-15) {
            throw std::domain_error("DiskPoint: point must lie strictly inside the unit disk");
        }
    }

    double re() const { return re_; }
    double im() const { return im_; }
    double sq_norm() const { return re_ * re_ + im_ * im_; }

private:
    double re_ = 0.0;
    double im_ = 0.0;
};

// A reference direction on the circle; the radius it spans in the disk is
// the set {t e^{i mu0} : t in [0, 1)}.
struct PreferredDirection {
    Angle mu0;
};

inline DiskPoint embed(const VonMisesParams& p) {
    const double r = p.kappa / (1.0 + p.kappa);
    return DiskPoint(r * std::cos(p.mu.radians()), r * std::sin(p.mu.radians()));
}

// Geodesic distance in the Poincare metric,
//   d(w1, w2) = acosh(1 + 2 |w1 - w2|^2 / ((1 - |w1|^2)(1 - |w2|^2))).
// Evaluated as log1p of the excess, which stays accurate for nearby points
// where acosh(1 + q) itself loses half the significant digits.
inline double hyperbolic_distance(const DiskPoint& w1, const DiskPoint& w2) {
    const double dx = w1.re() - w2.re();
    const double dy = w1.im() - w2.im();
    const double d2 = dx * dx + dy * dy;
    if (d2 == 0.0) return 0.0;
    const double q = 2.0 * d2 / ((1.0 - w1.sq_norm()) * (1.0 - w2.sq_norm()));
    return std::log1p(q + std::sqrt(q * (q + 2.0)));
}

// A projection onto a radius: the parameter of the foot point along the
// radius, the foot point itself, and the hyperbolic distance to it.
struct Projection {
    double t_star = 0.0;
    DiskPoint foot;
    double distance = 0.0;
};

// Nearest point of the segment {(t, 0) : t in [0, 1)} in the hyperbolic
// metric. For Re(xi) <= 0 the foot is the origin; otherwise it is the root
//   t* = (S - sqrt(S^2 - 4 Re^2)) / (2 Re),  S = 1 + |xi|^2,
// computed in the conjugate form 2 Re / (S + sqrt(...)) so that small Re
// suffers no cancellation. The discriminant is nonnegative for interior
// points, it equals (S - 2 Re)(S + 2 Re) with S - 2 Re >= (1 - Re)^2.
inline Projection project_to_zero_radius(const DiskPoint& xi) {
    double t = 0.0;
    const double re = xi.re();
    if (re > 0.0) {
        const double s = 1.0 + xi.sq_norm();
        const double disc = std::max(s * s - 4.0 * re * re, 0.0);
        t = 2.0 * re / (s + std::sqrt(disc));
        t = std::min(t, 1.0 - 1e-15);
    }
    const DiskPoint foot(t, 0.0);
    return {t, foot, hyperbolic_distance(xi, foot)};
}

// Projection onto the radius in direction mu0, reduced to the zero-radius
// case by the rotation isometry z -> e^{-i mu0} z.
inline Projection project_to_radius(const DiskPoint& xi, const PreferredDirection& dir) {
    const double c = std::cos(dir.mu0.radians());
    const double s = std::sin(dir.mu0.radians());
    const DiskPoint rotated(xi.re() * c + xi.im() * s, xi.im() * c - xi.re() * s);
    const Projection p = project_to_zero_radius(rotated);
    const DiskPoint foot(p.t_star * c, p.t_star * s);
    return {p.t_star, foot, p.distance};
}

// Distance from the embedding of a fitted parameter pair to the preferred
// radius, the building block of the two-sample statistic.
inline double distance_to_preferred(const VonMisesParams& params, const PreferredDirection& dir) {
    return project_to_radius(embed(params), dir).distance;
}

} // namespace hypercirc
