#include <doctest.h>

#include "common.hpp"
#include "kds/angular.hpp"
#include "kds/errors.hpp"

#include <cmath>

using namespace kds;

TEST_SUITE("angular") {

TEST_CASE("a = 0 reduces to the spherical Laplacian") {
    const auto p = kt::params(0.0);
    for (int k : {0, 2, -3}) {
        const AngularOperator op(p, k, 12);
        const auto M = op.matrix(cplx(1.3, -0.4));
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                const int l = std::abs(k) + i;
                CHECK(std::abs(M(i, j) - (i == j ? double(l * (l + 1)) : 0.0)) < 1e-10 * (1 + l * l));
            }
        const auto br = angular_branch(p, cplx(0.5, 0.2), k, std::abs(k) + 2);
        const int l = std::abs(k) + 2;
        CHECK(std::abs(br.lambda - double(l * (l + 1))) < 1e-10);
    }
}

TEST_CASE("matrix structure for a > 0") {
    const auto p = kt::params(0.01);
    const AngularOperator op(p, 1, 24);
    CHECK((op.K() - op.K().transpose()).norm() < 1e-12 * op.K().norm());
    CHECK((op.L() - op.L().transpose()).norm() < 1e-12 * (1 + op.L().norm()));
    CHECK((op.Q() - op.Q().transpose()).norm() < 1e-12 * (1 + op.Q().norm()));
    const auto M = op.matrix(1.7);
    CHECK((M - M.adjoint()).norm() < 1e-12 * M.norm());
    for (const auto& b : op.eigs(1.7)) CHECK(std::abs(b.lambda.imag()) < 1e-9 * (1 + std::abs(b.lambda)));

    // M(i) = K - Q + iL: the skew part is L, which bounds Im λ.
    const cplx I(0.0, 1.0);
    CHECK((op.matrix(I) - (op.K() - op.Q()).cast<cplx>() - I * op.L().cast<cplx>()).norm() < 1e-12 * op.K().norm());
    const double bound = op.L().cwiseAbs().rowwise().sum().maxCoeff();
    for (const auto& b : op.eigs(I)) CHECK(std::abs(b.lambda.imag()) <= bound + 1e-12);
}

TEST_CASE("zero frequency k = 0 has a constant ground state") {
    for (double a : {0.0, 0.01, 0.02}) {
        const auto br = angular_branch(kt::params(a), 0.0, 0, 0);
        CHECK(std::abs(br.lambda) < 1e-12);
        CHECK(br.converged);
    }
}

TEST_CASE("eigenpairs are accurate and converged") {
    const auto p = kt::params(0.02);
    const cplx w(2.5, -0.6);
    const auto br = angular_eigs(p, w, -2, default_angular_size(p, w, -2));
    for (int i = 0; i < 5; ++i) {
        CHECK(br[i].l == 2 + i);
        CHECK(br[i].converged);
        CHECK(br[i].residual < 1e-10 * (1 + std::abs(br[i].lambda)));
        CHECK(std::abs(br[i].coeffs.norm() - 1.0) < 1e-12);
    }
    const auto one = angular_branch(p, w, -2, 3);
    CHECK(std::abs(one.lambda - br[1].lambda) < 1e-10);
}

TEST_CASE("symmetries in k and omega") {
    const auto p = kt::params(0.02);
    const cplx w(1.9, -0.35);
    for (int l = 1; l <= 3; ++l) {
        const auto a = angular_branch(p, w, 1, l).lambda;
        CHECK(std::abs(angular_branch(p, -w, -1, l).lambda - a) < 1e-10 * std::abs(a));
        CHECK(std::abs(angular_branch(p, std::conj(w), 1, l).lambda - std::conj(a)) < 1e-10 * std::abs(a));
    }
}

TEST_CASE("branch tracking") {
    const auto p = kt::params(0.01);
    SUBCASE("constant path") {
        const std::vector<cplx> path(4, cplx(0.8, -0.1));
        const auto tr = track_branch(p, 1, 2, path);
        REQUIRE(tr.size() >= 4);
        for (const auto& t : tr) CHECK(std::abs(t.lambda - tr.front().lambda) < 1e-12);
    }
    SUBCASE("follows the pointwise branch") {
        std::vector<cplx> path;
        for (int i = 0; i <= 10; ++i) path.push_back(cplx(0.3 * i, -0.05 * i));
        const auto tr = track_branch(p, 0, 1, path);
        CHECK(std::abs(tr.back().omega - path.back()) < 1e-14);
        CHECK(std::abs(tr.back().lambda - angular_branch(p, path.back(), 0, 1).lambda) < 1e-8);
    }
    CHECK_THROWS_AS(angular_branch(p, 1.0, 2, 1), InvalidParams);
}

}
