#include <doctest.h>

#include "common.hpp"
#include "kds/errors.hpp"
#include "kds/greens.hpp"
#include "kds/special.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace kds;

namespace {

ResolventRequest bump_request(const TortoiseMap& map, cplx omega, int k, int L_max, int nx,
                              const std::function<cplx(double)>& g) {
    const auto& p = map.params();
    const double d = p.r_plus - p.r_minus;
    const double r_lo = p.r_minus + 0.15 * d, r_hi = p.r_plus - 0.15 * d;
    const double x_lo = map.x_of_r(p.r_minus + 0.1 * d), x_hi = map.x_of_r(p.r_plus - 0.1 * d);
    ResolventRequest req;
    req.omega = omega;
    req.k = k;
    req.L_max = L_max;
    req.x_grid.resize(nx);
    for (int i = 0; i < nx; ++i) req.x_grid[i] = x_lo + (x_hi - x_lo) * i / (nx - 1);
    const auto mu = mu_nodes(req.n_mu);
    req.f = Eigen::MatrixXcd::Zero(nx, req.n_mu);
    for (int i = 0; i < nx; ++i) {
        const double r = map.r_of_x(req.x_grid[i]);
        const double s = (2.0 * r - r_lo - r_hi) / (r_hi - r_lo);
        if (std::abs(s) >= 1.0) continue;
        for (int j = 0; j < req.n_mu; ++j) req.f(i, j) = std::exp(-1.0 / (1.0 - s * s)) * g(mu[j]);
    }
    return req;
}

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, int n, double shift) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = 0.3 * cplx(nd(rng), nd(rng)) + (i == j ? shift : 0.0);
    return M;
}

}  // namespace

TEST_SUITE("greens") {

TEST_CASE("zero source gives zero") {
    const auto map = kt::tortoise(0.01);
    auto req = bump_request(map, cplx(1.0, -0.1), 1, 3, 401, [](double) { return 0.0; });
    const auto out = resolvent_apply(map, req);
    CHECK(out.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a = 0 separates exactly into spherical harmonics") {
    const auto map = kt::tortoise(0.0);
    const auto& p = map.params();
    const int k = 1, l = 2;
    const cplx omega(1.3, -0.2);
    auto Pl = [&](double mu) { return normalized_legendre(k, 3, mu).value[l - k]; };
    auto req = bump_request(map, omega, k, 3, 801, Pl);
    const auto out = resolvent_apply(map, req);

    std::vector<cplx> src(req.x_grid.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        src[i] = req.f(Eigen::Index(i), 0) / Pl(mu_nodes(req.n_mu)[0]) * delta_r_eval(p, map.r_of_x(req.x_grid[i])).value;
    const auto ul = radial_green(map, omega, double(l * (l + 1)), k, src, req.x_grid);
    const auto mu = mu_nodes(req.n_mu);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < ul.size(); ++i)
        for (int j = 0; j < req.n_mu; ++j) {
            err = std::max(err, std::abs(out.u(Eigen::Index(i), j) - ul[i] * Pl(mu[j])));
            ref = std::max(ref, std::abs(ul[i] * Pl(mu[j])));
        }
    CHECK(err / ref < 1e-8);
    CHECK(out.residual < 1e-5);
    CHECK_FALSE(out.truncation_warning);
}

TEST_CASE("source outside K_r is rejected") {
    const auto map = kt::tortoise(0.0);
    auto req = bump_request(map, 1.0, 0, 2, 101, [](double) { return 1.0; });
    req.delta_r = 0.2 * (map.params().r_plus - map.params().r_minus);
    CHECK_NOTHROW(resolvent_apply(map, bump_request(map, 1.0, 0, 2, 101, [](double) { return 0.0; })));
    req.f(0, 0) = 1.0;
    CHECK_THROWS_AS(resolvent_apply(map, req), InvalidParams);
}

TEST_CASE("zero residue") {
    const auto map = kt::tortoise(0.0);
    const auto rep = zero_residue(map);
    CHECK(rep.S_theta0 == doctest::Approx(-1.0 / (4.0 * std::numbers::pi)).epsilon(1e-10));
    CHECK(std::abs(rep.direct - rep.expected) < 1e-3 * std::abs(rep.expected));
    CHECK(std::abs(rep.slope - rep.expected_slope) < 1e-4 * std::abs(rep.expected_slope));
    ZeroResidueOptions other;
    other.phase = 3.0 * std::numbers::pi / 4.0;
    const auto rep2 = zero_residue(map, other);
    CHECK(std::abs(rep2.direct - rep.direct) < 1e-3 * std::abs(rep.direct));
}

TEST_CASE("contour oracle for the inverse of a Kronecker sum") {
    SUBCASE("scalars") {
        Eigen::MatrixXcd A(1, 1), B(1, 1);
        A(0, 0) = 2.0;
        B(0, 0) = 3.0;
        const auto X = finite_tensor_inverse_oracle(A, B, {3.0, 1.0, 256});
        CHECK(std::abs(X(0, 0) - 0.2) < 1e-13);
    }
    SUBCASE("identity") {
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(3, 3);
        const auto X = finite_tensor_inverse_oracle(I, 3.0 * I, {3.0, 1.0, 256});
        CHECK((X - 0.25 * Eigen::MatrixXcd::Identity(9, 9)).norm() < 1e-13);
    }
    SUBCASE("random pairs converge geometrically") {
        std::mt19937_64 rng(5);
        for (int n = 2; n <= 4; ++n) {
            const auto A = random_matrix(rng, n, 3.0), B = random_matrix(rng, n, 3.0);
            const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
            const Eigen::MatrixXcd exact = (kron(A, I) + kron(I, B)).inverse();
            auto err = [&](int nodes) { return (finite_tensor_inverse_oracle(A, B, {3.0, 2.5, nodes}) - exact).norm(); };
            CHECK(err(512) < 1e-10 * exact.norm());
            CHECK(err(8) / err(16) > 100.0);
        }
    }
    SUBCASE("contour crossing the spectrum") {
        Eigen::MatrixXcd A(1, 1), B(1, 1);
        A(0, 0) = 1.0;
        B(0, 0) = 2.0;
        CHECK_THROWS_AS(finite_tensor_inverse_oracle(A, B, {0.0, 2.0, 64}), ContourThroughSpectrum);
        CHECK_THROWS_AS(finite_tensor_inverse_oracle(A, B, {2.0, 3.5, 64}), ContourThroughSpectrum);
    }
}

TEST_CASE("kron") {
    Eigen::MatrixXcd A(2, 2), B(1, 2);
    A << 1.0, 2.0, 3.0, 4.0;
    B << 5.0, 6.0;
    const auto K = kron(A, B);
    CHECK(K.rows() == 2);
    CHECK(K.cols() == 4);
    CHECK(K(1, 3) == cplx(24.0));
}

}
