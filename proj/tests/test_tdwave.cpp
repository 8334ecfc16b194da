#include <doctest.h>

#include "common.hpp"
#include "kds/errors.hpp"
#include "kds/tdwave.hpp"

#include <cmath>

using namespace kds;

TEST_SUITE("tdwave") {

TEST_CASE("zero data stays zero") {
    const auto map = kt::tortoise(0.0);
    auto zero = [](double) { return 0.0; };
    const auto s = evolve(map, 1, zero, zero, 2.0, {0.0}, {});
    for (double v : s.u[0]) CHECK(v == 0.0);
    CHECK(plateau_prediction(map, 0, zero, zero, s.x_left, s.x_right) == 0.0);
}

TEST_CASE("option and parameter errors") {
    const auto map = kt::tortoise(0.0);
    const Gaussian g{0.0, 1.0, 1.0};
    WaveOptions opt;
    opt.dt = 0.05;
    CHECK_THROWS_AS(evolve(map, 0, g, g, 1.0, {0.0}, opt), CFLViolation);
    WaveOptions far;
    far.x_left = -5.0;
    far.x_right = 5.0;
    CHECK_THROWS_AS(evolve(map, 0, g, g, 1.0, {7.0}, far), InvalidParams);
    CHECK_THROWS_AS(evolve(kt::tortoise(0.01), 0, g, g, 1.0, {0.0}, {}), NonzeroSpinUnsupported);
    CHECK_THROWS_AS(plateau_prediction(kt::tortoise(0.01), 0, g, g, -1, 1), NonzeroSpinUnsupported);
}

TEST_CASE("Prony fit recovers a synthetic damped signal") {
    std::vector<double> t, u;
    for (int i = 0; i <= 400; ++i) {
        t.push_back(0.05 * i);
        u.push_back(std::exp(-0.1 * t.back()) * std::cos(3.0 * t.back()) + 0.5);
    }
    const auto fit = ringdown_fit(t, u, 2.0, 18.0);
    CHECK(std::abs(fit.omega - std::complex<double>(3.0, -0.1)) < 1e-6);
    CHECK(fit.plateau == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit.fit_residual < 1e-10);

    std::vector<double> noise(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) noise[i] = std::sin(37.0 * t[i] * t[i]);
    CHECK_THROWS_AS(ringdown_fit(t, noise, 2.0, 18.0, 1), PoorFit);
}

TEST_CASE("energy does not grow") {
    const auto map = kt::tortoise(0.0);
    const Gaussian u0{0.0, 1.0, 1.0};
    auto v0 = [](double) { return 0.0; };
    WaveOptions opt;
    opt.dx = 0.01;
    const auto s = evolve(map, 1, u0, v0, 10.0, {0.0}, opt);
    const double E0 = s.energy.front();
    const double steps_per_out = std::round((s.t[1] - s.t[0]) / s.dt);
    double worst = 0.0;
    for (std::size_t n = 1; n < s.energy.size(); ++n) worst = std::max(worst, (s.energy[n] - s.energy[n - 1]) / E0);
    CHECK(worst / steps_per_out < 1e-6);
    CHECK(s.energy.back() < 0.25 * E0);
}

TEST_CASE("l = 0 plateau") {
    const auto map = kt::tortoise(0.0);
    const auto& p = map.params();
    const double x0 = 0.0;
    auto zero = [](double) { return 0.0; };
    const Gaussian v0{x0, 1.0, 1.0};
    WaveOptions opt;
    opt.dx = 0.02;
    const auto s = evolve(map, 0, zero, v0, 30.0, {x0}, opt);
    const double pred = plateau_prediction(map, 0, zero, v0, s.x_left, s.x_right);
    CHECK(std::abs(s.u[0].back() - pred) < 0.01 * std::abs(pred));

    // Linear in v₀ and blind to u₀.
    const Gaussian v2{x0, 1.0, 2.0};
    CHECK(plateau_prediction(map, 0, zero, v2, s.x_left, s.x_right) == doctest::Approx(2.0 * pred).epsilon(1e-12));
    CHECK(plateau_prediction(map, 0, v0, v0, s.x_left, s.x_right) == doctest::Approx(pred).epsilon(1e-12));
    CHECK(plateau_prediction(map, 2, zero, v0, s.x_left, s.x_right) == 0.0);

    // Direct quadrature of ∫ r⁴ v₀ dx / (r_+² + r_-²).
    double acc = 0.0;
    const int n = 20000;
    const double h = (s.x_right - s.x_left) / n;
    for (int i = 0; i < n; ++i) {
        const double x = s.x_left + (i + 0.5) * h;
        const double r = map.r_of_x(x);
        acc += r * r * r * r * v0(x) * h;
    }
    CHECK(pred == doctest::Approx(acc / (p.r_plus * p.r_plus + p.r_minus * p.r_minus)).epsilon(1e-7));
}

TEST_CASE("Gaussian") {
    const Gaussian g{1.0, 2.0, 3.0};
    CHECK(g(1.0) == 3.0);
    CHECK(g(3.0) == doctest::Approx(3.0 * std::exp(-0.5)));
}

}
