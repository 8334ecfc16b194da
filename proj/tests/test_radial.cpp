#include <doctest.h>

#include "common.hpp"
#include "kds/errors.hpp"
#include "kds/radial.hpp"
#include "kds/special.hpp"

#include <cmath>

using namespace kds;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
    return x;
}

double bump(double x, double c, double w) {
    const double s = (x - c) / w;
    return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
}

}  // namespace

TEST_SUITE("radial") {

TEST_CASE("zero data gives constant outgoing solutions") {
    const auto map = kt::tortoise(0.01);
    for (End e : {End::Plus, End::Minus}) {
        const auto s = outgoing_series(map, e, 0.0, 0.0, 0);
        CHECK(std::abs(s.value - 1.0) < 1e-14);
        CHECK(std::abs(s.slope) < 1e-14);
    }
    const auto w = wronskian(map, 0.0, 0.0, 0);
    CHECK(std::abs(w.W) < 1e-12);
}

TEST_CASE("leading coefficient is 1/Gamma(1 - nu)") {
    const auto map = kt::tortoise(0.01);
    const cplx omega(0.9, -0.25);
    for (End e : {End::Plus, End::Minus}) {
        const auto s = outgoing_series(map, e, omega, 3.0, 1);
        CHECK(std::abs(s.v_coeffs[0] - rgamma(1.0 - s.nu)) < 1e-15);
        CHECK(std::abs(s.nu - 2.0 * cplx(0, 1) * s.omega_end / map.series(e).A) < 1e-14);
        CHECK(s.tail_ratio < 1e-12);
    }
}

TEST_CASE("integration with a vanishing potential is linear") {
    const auto map = kt::tortoise(0.0);
    const auto [u, du] = integrate_radial(map, 0.0, 0.0, 0, -2.0, 3.0, 1.0, 0.5);
    CHECK(std::abs(u - 3.5) < 1e-10);
    CHECK(std::abs(du - 0.5) < 1e-12);
}

TEST_CASE("Abel: the Wronskian of two ODE solutions is constant") {
    const auto map = kt::tortoise(0.01);
    const cplx omega(1.2, -0.3), lambda(5.0, 0.4);
    const auto [a1, b1] = integrate_radial(map, omega, lambda, 1, -4.0, 4.0, 1.0, 0.0);
    const auto [a2, b2] = integrate_radial(map, omega, lambda, 1, -4.0, 4.0, 0.0, 1.0);
    CHECK(std::abs(a1 * b2 - a2 * b1 - 1.0) < 1e-9);
}

TEST_CASE("series agrees with the ODE past the matching point") {
    const auto map = kt::tortoise(0.01);
    const cplx omega(2.1, -0.5), lambda(7.0, -0.3);
    for (End e : {End::Plus, End::Minus}) {
        const auto s = outgoing_series(map, e, omega, lambda, -1);
        const double x_far = s.x_match + sign(e) * 3.0;
        const auto [u, du] = eval_series(map, s, x_far);
        const auto [v, dv] = integrate_radial(map, omega, lambda, -1, x_far, s.x_match, u, du);
        const double scale = std::hypot(std::abs(s.value), std::abs(s.slope));
        CHECK(std::hypot(std::abs(v - s.value), std::abs(dv - s.slope)) / scale < 1e-8);
    }
}

TEST_CASE("Wronskian constancy and holomorphy") {
    const auto map = kt::tortoise(0.01);
    const cplx omega(0.7, -0.2), lambda(2.5, 0.1);
    const auto w = wronskian(map, omega, lambda, 1);
    CHECK(w.constancy_defect >= 0.0);
    CHECK(w.constancy_defect < 1e-9);
    CHECK(std::abs(w.normalized - w.W / (std::hypot(std::abs(w.u_plus), std::abs(w.du_plus)) *
                                         std::hypot(std::abs(w.u_minus), std::abs(w.du_minus)))) < 1e-14);
    // Derivative along the imaginary direction matches the complex derivative.
    const double h = 1e-4;
    const cplx I(0, 1);
    const cplx dl = wronskian_derivative(map, WronskianParam::Lambda, omega, lambda, 1);
    const cplx dl_im = (wronskian(map, omega, lambda + I * h, 1, false).W - wronskian(map, omega, lambda - I * h, 1, false).W) /
                       (2.0 * I * h);
    CHECK(std::abs(dl - dl_im) < 1e-6 * std::abs(dl));
    const cplx dw = wronskian_derivative(map, WronskianParam::Omega, omega, lambda, 1);
    const cplx dw_im = (wronskian(map, omega + I * h, lambda, 1, false).W - wronskian(map, omega - I * h, lambda, 1, false).W) /
                       (2.0 * I * h);
    CHECK(std::abs(dw - dw_im) < 1e-6 * std::abs(dw));
}

TEST_CASE("radial Green function") {
    const auto map = kt::tortoise(0.01);
    const cplx omega(1.1, -0.15), lambda(6.0, 0.0);
    const int k = 1;
    const int n = 2001;
    const auto x = grid(-4.0, 4.0, n);
    const double h = x[1] - x[0];
    std::vector<cplx> f(n);
    for (int i = 0; i < n; ++i) f[i] = bump(x[i], 0.3, 1.5);

    SUBCASE("solves -u'' + V u = f") {
        const auto u = radial_green(map, omega, lambda, k, f, x);
        double err = 0.0, ref = 0.0;
        for (int i = 2; i < n - 2; ++i) {
            const cplx d2 = (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2]) / (12.0 * h * h);
            const cplx V = potential_at(map.params(), map.r_of_x(x[i]), omega, lambda, k);
            err = std::max(err, std::abs(-d2 + V * u[i] - f[i]));
            ref = std::max(ref, std::abs(f[i]));
        }
        CHECK(err / ref < 1e-6);
    }
    SUBCASE("zero source") {
        for (const auto& v : radial_green(map, omega, lambda, k, std::vector<cplx>(n, 0.0), x)) CHECK(v == 0.0);
    }
    SUBCASE("kernel is symmetric") {
        std::vector<cplx> g(n);
        for (int i = 0; i < n; ++i) g[i] = cplx(1.0, 0.5) * bump(x[i], -1.0, 2.0);
        const auto Rf = radial_green(map, omega, lambda, k, f, x);
        const auto Rg = radial_green(map, omega, lambda, k, g, x);
        cplx a = 0.0, b = 0.0;
        for (int i = 0; i < n; ++i) {
            a += g[i] * Rf[i];
            b += f[i] * Rg[i];
        }
        CHECK(std::abs(a - b) < 1e-8 * std::abs(a));
    }
    SUBCASE("resonance is reported") {
        CHECK_THROWS_AS(radial_green(map, 0.0, 0.0, 0, f, x), NearResonance);
    }
}

TEST_CASE("real-axis nonresonance at a = 0") {
    const auto map = kt::tortoise(0.0);
    for (double omega : {-2.0, 0.3, 1.0, 4.0})
        for (int l = 0; l <= 2; ++l) {
            const auto rep = real_axis_nonresonance_check(map, omega, 0, l * (l + 1.0));
            CHECK(rep.checked);
            CHECK(rep.omega_product > 0.0);
            CHECK(rep.margin > 1e-6);
        }
}

}
