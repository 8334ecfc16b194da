#include <doctest.h>

#include "kds/series.hpp"
#include "kds/special.hpp"

#include <cmath>
#include <complex>

namespace ps = kds::ps;

TEST_SUITE("series") {

TEST_CASE("reciprocal of 1 - w is geometric") {
    const ps::Series<double> a{1.0, -1.0, 0, 0, 0, 0};
    for (double c : ps::reciprocal(a)) CHECK(c == doctest::Approx(1.0));
}

TEST_CASE("exp0 matches the Taylor coefficients of exp") {
    ps::Series<double> a(12, 0.0);
    a[1] = 2.0;
    const auto e = ps::exp0(a);
    double f = 1.0;
    for (int k = 0; k < 12; ++k) {
        if (k > 0) f *= 2.0 / k;
        CHECK(e[k] == doctest::Approx(f).epsilon(1e-14));
    }
}

TEST_CASE("revert inverts log(1+w)") {
    const int n = 20;
    ps::Series<double> f(n, 0.0);
    for (int k = 1; k < n; ++k) f[k] = (k % 2 ? 1.0 : -1.0) / k;
    const auto g = ps::revert(f);  // e^w - 1
    double fact = 1.0;
    for (int k = 1; k < n; ++k) {
        fact *= k;
        CHECK(g[k] == doctest::Approx(1.0 / fact).epsilon(1e-12));
    }
    const auto id = ps::compose(f, g, n);
    CHECK(id[1] == doctest::Approx(1.0));
    for (int k = 2; k < n; ++k) CHECK(std::abs(id[k]) < 1e-12);
}

TEST_CASE("convergence radius of a geometric series") {
    for (double rho : {0.3, 1.0, 2.5}) {
        std::vector<double> c(60);
        for (int k = 0; k < 60; ++k) c[k] = std::pow(rho, -k) * (1.0 + 1.0 / (k + 1));
        CHECK(ps::convergence_radius(c) == doctest::Approx(rho).epsilon(0.05));
    }
}

TEST_CASE("convergence radius survives sign-changing coefficients") {
    std::vector<double> c(64);
    for (int k = 0; k < 64; ++k) c[k] = std::pow(0.8, k) * std::cos(0.37 * k);
    CHECK(ps::convergence_radius(c) == doctest::Approx(1.25).epsilon(0.1));
}

TEST_CASE("rgamma at integers and reflection") {
    CHECK(std::abs(kds::rgamma(5.0) - 1.0 / 24.0) < 1e-15);
    CHECK(std::abs(kds::rgamma(0.0)) < 1e-15);
    CHECK(std::abs(kds::rgamma(-3.0)) < 1e-13);
    CHECK(std::abs(kds::rgamma(0.5) - 1.0 / std::sqrt(M_PI)) < 1e-14);
    const std::complex<double> z(0.3, 1.7);
    // Γ(z)Γ(1-z) = π / sin(πz)
    const auto lhs = 1.0 / (kds::rgamma(z) * kds::rgamma(1.0 - z));
    CHECK(std::abs(lhs - M_PI / std::sin(M_PI * z)) / std::abs(lhs) < 1e-13);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const auto gl = kds::gauss_legendre(10);
    for (int p = 0; p < 20; ++p) {
        double s = 0.0;
        for (int i = 0; i < 10; ++i) s += gl.weights[i] * std::pow(gl.nodes[i], p);
        CHECK(s == doctest::Approx(p % 2 ? 0.0 : 2.0 / (p + 1)).epsilon(1e-13));
    }
}

TEST_CASE("normalized Legendre columns are orthonormal") {
    const auto gl = kds::gauss_legendre(40);
    for (int m : {0, 2}) {
        std::vector<kds::LegendreColumn> cols;
        for (double x : gl.nodes) cols.push_back(kds::normalized_legendre(m, 6, x));
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                double s = 0.0;
                for (int q = 0; q < 40; ++q) s += gl.weights[q] * cols[q].value[i] * cols[q].value[j];
                CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
            }
    }
}

}
