#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <hypercirc/angle.hpp>
#include <hypercirc/von_mises.hpp>

#include "oracles.hpp"

using namespace hypercirc;
using std::numbers::pi;

namespace {

CircularSample sample_of(std::initializer_list<double> radians) {
    CircularSample s;
    for (const double t : radians) s.angles.push_back(Angle(t));
    return s;
}

} // namespace

TEST_CASE("angle reduction") {
    CHECK_THAT(Angle(-pi / 2).radians(), Catch::Matchers::WithinAbs(3.0 * pi / 2.0, 1e-12));
    CHECK(Angle(two_pi).radians() == 0.0);
    CHECK_THAT(Angle(7.0 * pi).radians(), Catch::Matchers::WithinAbs(pi, 1e-12));
    CHECK(Angle(0.0).radians() == 0.0);
    CHECK(Angle(1.25) == Angle(1.25 + two_pi));
    CHECK_THROWS_AS(Angle(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(Angle(INFINITY), std::domain_error);
}

TEST_CASE("circular difference") {
    CHECK_THAT(circular_difference(Angle(0.1), Angle(two_pi - 0.1)), Catch::Matchers::WithinAbs(0.2, 1e-12));
    CHECK(circular_difference(Angle(1.0), Angle(1.0)) == 0.0);
    CHECK_THAT(circular_difference(Angle(0.0), Angle(pi)), Catch::Matchers::WithinAbs(pi, 1e-12));
}

TEST_CASE("summaries of small samples") {
    const CircularSummary opposite = summarize(sample_of({0.0, pi}));
    CHECK_THAT(opposite.c_bar, Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK_THAT(opposite.r_bar, Catch::Matchers::WithinAbs(0.0, 1e-15));

    const CircularSummary aligned = summarize(sample_of({pi / 2, pi / 2}));
    CHECK_THAT(aligned.c_bar, Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK_THAT(aligned.s_bar, Catch::Matchers::WithinRel(1.0, 1e-15));
    CHECK_THAT(aligned.r_bar, Catch::Matchers::WithinRel(1.0, 1e-15));

    const CircularSummary quarter = summarize(sample_of({0.0, pi / 2}));
    CHECK_THAT(quarter.c_bar, Catch::Matchers::WithinAbs(0.5, 1e-15));
    CHECK_THAT(quarter.s_bar, Catch::Matchers::WithinAbs(0.5, 1e-15));
    CHECK_THAT(quarter.r_bar, Catch::Matchers::WithinAbs(std::sqrt(0.5), 1e-15));

    CHECK_THROWS_AS(summarize(CircularSample{}), std::invalid_argument);
}

TEST_CASE("density values") {
    const VonMisesParams flat(Angle(0.37), 0.0);
    for (const double t : {0.0, 1.0, 4.0}) {
        CHECK_THAT(vm_density(Angle(t), flat), Catch::Matchers::WithinRel(1.0 / two_pi, 1e-14));
    }
    const VonMisesParams p(Angle(0.0), 2.0);
    CHECK_THAT(vm_density(Angle(0.0), p), Catch::Matchers::WithinRel(0.5158854120190136, 1e-12));
    CHECK_THAT(vm_density(Angle(pi), p), Catch::Matchers::WithinRel(0.0094487709145061, 1e-12));
    // huge concentration stays finite thanks to the scaled normalizer
    const VonMisesParams sharp(Angle(1.0), 1e8);
    CHECK(std::isfinite(vm_density(Angle(1.0), sharp)));
    CHECK(vm_density(Angle(1.0 + pi), sharp) == 0.0);
}

TEST_CASE("density integrates to one") {
    for (const double kappa : {0.0, 0.5, 1.0, 3.0, 10.0}) {
        const VonMisesParams p(Angle(0.8), kappa);
        const double mass = oracle::trapezoid(
            [&](double t) { return vm_density(Angle(t), p); }, 0.0, two_pi, 20000);
        CHECK_THAT(mass, Catch::Matchers::WithinAbs(1.0, 1e-6));
    }
}

TEST_CASE("sampler determinism") {
    const VonMisesParams p(Angle(1.0), 2.5);
    RngStream r1(42, {7});
    RngStream r2(42, {7});
    const CircularSample a = vm_sample(p, 5, r1);
    const CircularSample b = vm_sample(p, 5, r2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.angles[i] == b.angles[i]);
    }
    RngStream r3(42, {8});
    const CircularSample c = vm_sample(p, 5, r3);
    bool all_equal = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        all_equal = all_equal && a.angles[i] == c.angles[i];
    }
    CHECK_FALSE(all_equal);
}

TEST_CASE("sampler marginals") {
    // zero concentration draws uniformly
    RngStream r0(11, {0});
    const CircularSample flat = vm_sample(VonMisesParams(Angle(2.0), 0.0), 100000, r0);
    const CircularSummary fs = summarize(flat);
    CHECK(fs.r_bar < 0.02);

    // mean cosine about the center estimates a1(kappa)
    for (const double kappa : {0.5, 2.0, 8.0}) {
        RngStream rs(11, {1, static_cast<std::uint64_t>(kappa * 16)});
        const VonMisesParams p(Angle(0.9), kappa);
        const CircularSample draw = vm_sample(p, 200000, rs);
        double mean_cos = 0.0;
        for (const Angle a : draw.angles) mean_cos += std::cos(a.radians() - 0.9);
        mean_cos /= static_cast<double>(draw.size());
        CHECK_THAT(mean_cos, Catch::Matchers::WithinAbs(a1(kappa), 0.01));
    }
}

TEST_CASE("unit vector sampling matches angle sampling") {
    const VonMisesParams p(Angle(2.2), 1.7);
    RngStream r1(9, {3});
    RngStream r2(9, {3});
    const CircularSample angles = vm_sample(p, 400, r1);
    const std::vector<UnitVector> units = vm_sample_units(p, 400, r2);
    REQUIRE(units.size() == angles.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        CHECK_THAT(units[i].c, Catch::Matchers::WithinAbs(std::cos(angles.angles[i].radians()), 1e-12));
        CHECK_THAT(units[i].s, Catch::Matchers::WithinAbs(std::sin(angles.angles[i].radians()), 1e-12));
    }
    const CircularSummary su = summarize_units(units);
    const CircularSummary sa = summarize(angles);
    CHECK_THAT(su.r_bar, Catch::Matchers::WithinAbs(sa.r_bar, 1e-12));
}

TEST_CASE("fit closed forms") {
    const FitResult f = vm_fit(sample_of({0.0, pi / 2}));
    CHECK_THAT(f.params.mu.radians(), Catch::Matchers::WithinAbs(pi / 4, 1e-12));
    CHECK_THAT(a1(f.params.kappa), Catch::Matchers::WithinAbs(std::sqrt(0.5), 1e-9));
    CHECK_FALSE(f.degenerate);

    CHECK_THROWS_AS(vm_fit(CircularSample{}), std::invalid_argument);
}

TEST_CASE("degenerate fits are flagged") {
    const FitResult constant = vm_fit(sample_of({0.7, 0.7, 0.7}));
    CHECK(constant.degenerate);
    CHECK_THAT(constant.params.mu.radians(), Catch::Matchers::WithinAbs(0.7, 1e-9));
    CHECK(constant.params.kappa > 1e8);
    CHECK(std::isfinite(constant.params.kappa));

    const FitResult balanced = vm_fit(sample_of({0.0, pi / 2, pi, 3 * pi / 2}));
    CHECK(balanced.degenerate);
    CHECK(balanced.params.kappa < 1e-5);
}

TEST_CASE("fit recovers generating parameters") {
    RngStream rng(123, {55});
    const VonMisesParams truth(Angle(0.3066), 1.560);
    const CircularSample draw = vm_sample(truth, 100000, rng);
    const FitResult f = vm_fit(draw);
    CHECK(circular_difference(f.params.mu, truth.mu) < 0.02);
    CHECK_THAT(f.params.kappa, Catch::Matchers::WithinAbs(truth.kappa, 0.08));
    CHECK_FALSE(f.degenerate);
}

TEST_CASE("fit is rotation equivariant") {
    RngStream rng(77, {1});
    const CircularSample base = vm_sample(VonMisesParams(Angle(1.1), 2.0), 500, rng);
    const FitResult f0 = vm_fit(base);
    for (const double delta : {0.3, 2.5, 5.9}) {
        CircularSample shifted;
        for (const Angle a : base.angles) shifted.angles.push_back(Angle(a.radians() + delta));
        const FitResult fd = vm_fit(shifted);
        const Angle expected(f0.params.mu.radians() + delta);
        CHECK(circular_difference(fd.params.mu, expected) < 1e-9);
        CHECK_THAT(fd.params.kappa, Catch::Matchers::WithinAbs(f0.params.kappa, 1e-6));
    }
}

TEST_CASE("fit error shrinks with sample size") {
    for (const double kappa : {1.0, 1.5, 3.0}) {
        std::vector<double> median_err;
        for (const std::size_t n : {50u, 500u, 5000u}) {
            std::vector<double> errs;
            for (std::uint64_t rep = 0; rep < 21; ++rep) {
                RngStream rng(500 + static_cast<std::uint64_t>(kappa * 10), {n, rep});
                const CircularSample draw = vm_sample(VonMisesParams(Angle(2.0), kappa), n, rng);
                errs.push_back(std::fabs(vm_fit(draw).params.kappa - kappa));
            }
            std::sort(errs.begin(), errs.end());
            median_err.push_back(errs[errs.size() / 2]);
        }
        CHECK(median_err[1] < median_err[0]);
        CHECK(median_err[2] < median_err[1]);
    }
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(VonMisesParams(Angle(0.0), -1.0), std::domain_error);
    CHECK_THROWS_AS(VonMisesParams(Angle(0.0), std::nan("")), std::domain_error);
}
