#include <doctest.h>

#include "common.hpp"
#include "kds/errors.hpp"

#include <cmath>
#include <numbers>

using namespace kds;

namespace {

// Plain bisection for the horizons at a = 0, where Δ_r/r = r - Λr³/3 - 2M₀.
double bisect(double lo, double hi, double M0, double Lambda) {
    auto f = [&](double r) { return r - Lambda * r * r * r / 3.0 - 2.0 * M0; };
    const bool lo_neg = f(lo) < 0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < 0) == lo_neg ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("metric") {

TEST_CASE("horizons at a = 0 agree with bisection") {
    const auto p = kt::params();
    const double rc = std::sqrt(1.0 / kt::kLambda);  // maximum of r - r³
    CHECK(p.r_minus == doctest::Approx(bisect(0.0, rc, 0.1, 3.0)).epsilon(1e-12));
    CHECK(p.r_plus == doctest::Approx(bisect(rc, 1.0, 0.1, 3.0)).epsilon(1e-12));
    CHECK(p.alpha == 0.0);
    CHECK(delta_r_eval(p, 0.5).value == doctest::Approx(0.0875).epsilon(1e-14));
}

TEST_CASE("surface gravities are the horizon slopes") {
    for (double a : {0.0, 0.01, 0.03}) {
        const auto p = kt::params(a);
        CHECK(std::abs(delta_r_eval(p, p.r_minus).value) < 1e-14);
        CHECK(std::abs(delta_r_eval(p, p.r_plus).value) < 1e-14);
        CHECK(delta_r_eval(p, p.r_plus).derivative == doctest::Approx(-p.A_plus));
        const double h = 1e-6;
        const double fd = (delta_r_eval(p, p.r_minus + h).value - delta_r_eval(p, p.r_minus - h).value) / (2 * h);
        CHECK(std::abs(fd - p.A_minus) < 1e-8);
        for (double r : {p.r_minus, 0.5 * (p.r_minus + p.r_plus), p.r_plus}) {
            const auto poly = delta_r_poly(p);
            double v = 0.0;
            for (int i = 4; i >= 0; --i) v = v * r + poly[i];
            CHECK(v == doctest::Approx(delta_r_eval(p, r).value).epsilon(1e-12));
        }
        for (const auto& z : p.roots) CHECK(std::abs(delta_r_complex(p, z)) < 1e-12);
    }
}

TEST_CASE("horizons move monotonically with spin") {
    // ∂Δ_r/∂(a²) = 1 - Λr²/3 > 0 at both horizons, so r_- shrinks and r_+ grows.
    double prev_minus = 0.0, prev_plus = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const auto p = kt::params(0.004 * i);
        if (i > 0) {
            CHECK(p.r_minus < prev_minus);
            CHECK(p.r_plus > prev_plus);
        }
        prev_minus = p.r_minus;
        prev_plus = p.r_plus;
    }
}

TEST_CASE("parameter errors") {
    CHECK_THROWS_AS(derive_params(-0.1, 3.0, 0.0), InvalidParams);
    CHECK_THROWS_AS(derive_params(0.1, 0.0, 0.0), InvalidParams);
    CHECK_THROWS_AS(derive_params(0.2, 3.0, 0.0), NoHorizonRegion);  // 9ΛM₀² > 1
}

TEST_CASE("non-elliptic set") {
    for (const auto& s : ergo_extent(kt::params(0.0), 5)) CHECK(s.intervals.empty());
    const auto p = kt::params(0.01);
    const auto slices = ergo_extent(p, 9);
    CHECK(slices.front().intervals.empty());
    const auto& eq = slices.back();
    CHECK(eq.theta == doctest::Approx(std::numbers::pi / 2));
    REQUIRE(eq.intervals.size() == 2);
    CHECK(eq.intervals[0].first == doctest::Approx(p.r_minus));
    CHECK(eq.intervals[1].second == doctest::Approx(p.r_plus));
    const double rot = p.a * p.a;
    CHECK(std::abs(delta_r_eval(p, eq.intervals[0].second).value - rot) < 1e-14);
    CHECK(std::abs(delta_r_eval(p, eq.intervals[1].first).value - rot) < 1e-14);
}

TEST_CASE("Kerr-star profile vanishes on K_r and keeps positive slack") {
    for (double a : {0.0, 0.01}) {
        const auto p = kt::params(a);
        const double d = (p.r_plus - p.r_minus) / 20.0;
        const auto prof = kerr_star_profile(p, d);
        CHECK(prof.C_slack() > 0.0);
        for (int j = 0; j <= 20; ++j) {
            const double r = p.r_minus + d + (p.r_plus - p.r_minus - 2 * d) * j / 20.0;
            CHECK(prof.F_t_prime(r) == 0.0);
            CHECK(prof.F_phi_prime(r) == 0.0);
        }
        for (double r : prof.r_samples()) CHECK(prof.slack(r) >= prof.C_slack());
        CHECK(prof.F_t_prime(p.r_minus + 0.1 * d) < 0.0);
        CHECK(prof.F_t_prime(p.r_plus - 0.1 * d) > 0.0);
    }
    CHECK_THROWS_AS(kerr_star_profile(kt::params(), 1.0), InvalidParams);
}

}
