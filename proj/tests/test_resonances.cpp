#include <doctest.h>

#include "common.hpp"
#include "kds/errors.hpp"
#include "kds/resonances.hpp"

#include <cmath>

using namespace kds;

TEST_SUITE("resonances") {

TEST_CASE("generic root finding on a manufactured function") {
    const cplx z1(0.4, -0.3), z2(-1.2, 0.5);
    auto f = [&](cplx z) { return (z - z1) * (z - z2) * std::exp(0.3 * z); };
    const auto rr = refine_root(f, cplx(0.5, -0.2), 1e-12, Box{0, 1, -1, 0});
    CHECK(std::abs(rr.root - z1) < 1e-11);
    const auto c = contour_count(f, Box{-2, 2, -1, 1}, 128);
    CHECK(c.winding == 2);
    // The moment is a second-order seed.
    const double e128 = std::abs(c.first_moment - (z1 + z2));
    const double e512 = std::abs(contour_count(f, Box{-2, 2, -1, 1}, 512).first_moment - (z1 + z2));
    CHECK(e128 < 1e-3);
    CHECK(e128 / e512 > 10.0);
    CHECK(contour_count(f, Box{0.1, 0.9, -0.6, 0.0}, 64).winding == 1);
    CHECK(contour_count(f, Box{1.0, 2.0, -1, 1}, 64).winding == 0);
    CHECK_THROWS_AS(contour_count(f, Box{0.4, 1.0, -1.0, 0.0}, 64, 0), BoundaryTooClose);
    CHECK_THROWS_AS(contour_count(f, Box{1, 0, 0, 1}, 64), InvalidParams);
    auto no_root = [](cplx z) { return z + 100.0; };
    CHECK_THROWS_AS(refine_root(no_root, 0.0, 1e-12, Box{-0.1, 0.1, -0.1, 0.1}), EscapedBox);
}

TEST_CASE("the zero resonance of the k = 0, l = 0 mode") {
    const ModeSolver solver(kt::params(0.01));
    CHECK(std::abs(solver.normalized_determinant(0.0, 0, 0)) < 1e-10);
    const auto r = refine(solver, cplx(0.02, -0.01), 0, 0);
    CHECK(std::abs(r.omega) < 1e-9);
    CHECK(count_zeros_box(solver, Box{-0.05, 0.05, -0.04, 0.06}, 0, 0, 64) == 1);
}

TEST_CASE("no zeros on or above the real axis away from zero") {
    const ModeSolver solver(kt::params(0.01));
    for (int k = -1; k <= 1; ++k)
        for (double w : {-3.0, -1.0, 0.5, 2.0, 4.5})
            CHECK(std::abs(solver.normalized_determinant(w, k, std::abs(k) + 1)) > 1e-6);
    CHECK(count_zeros_box(solver, Box{-3, 3, 0.05, 1.0}, 1, 1, 128) == 0);
}

TEST_CASE("Schwarzschild-de Sitter ringdown modes") {
    const auto p = kt::params(0.0);
    const ModeSolver solver(p);
    const auto seeds = sds_wkb_seeds(p, 2, 0);
    REQUIRE(seeds.size() == 2);
    for (const auto& s : seeds) {
        const auto r = refine(solver, s.omega, 0, s.l);
        CHECK(r.omega.imag() < 0.0);
        CHECK(std::abs(r.omega - s.omega) < 0.1 * std::abs(s.omega));
        // ω -> -ω̄ maps modes to modes when the background is static.
        const auto mirror = refine(solver, -std::conj(r.omega) + cplx(0.01, 0.01), 0, s.l);
        CHECK(std::abs(mirror.omega + std::conj(r.omega)) < 1e-8);
        // The same mode in every k-sector of the degenerate l.
        CHECK(std::abs(refine(solver, r.omega, 1, s.l).omega - r.omega) < 1e-8);
    }
    CHECK_THROWS_AS(sds_wkb_seeds(kt::params(0.01), 2, 0), InvalidParams);
}

TEST_CASE("scan finds the refined mode inside a box") {
    const auto p = kt::params(0.0);
    const ModeSolver solver(p);
    const auto seed = sds_wkb_seeds(p, 1, 0).front();
    const auto qnm = refine(solver, seed.omega, 0, 1);
    const Box box{qnm.omega.real() - 0.3, qnm.omega.real() + 0.3, qnm.omega.imag() - 0.2, qnm.omega.imag() + 0.2};
    ScanOptions opt;
    opt.n_contour = 64;
    const auto res = scan(solver, box, {0, 0}, {1, 1}, opt);
    CHECK(res.issues.empty());
    REQUIRE(res.resonances.size() == 1);
    CHECK(std::abs(res.resonances[0].omega - qnm.omega) < 1e-8);
    CHECK(res.total_count == 1);
    const auto empty = scan(solver, Box{0.5, 1.0, 0.2, 0.5}, {0, 0}, {1, 1}, opt);
    CHECK(empty.resonances.empty());
}

TEST_CASE("modes move continuously with spin") {
    const auto p0 = kt::params(0.0);
    const cplx seed = sds_wkb_seeds(p0, 1, 0).front().omega;
    std::vector<cplx> w;
    cplx prev = seed;
    for (double a : {0.0, 1e-4, 1e-3}) {
        prev = refine(ModeSolver(kt::params(a)), prev, 1, 1).omega;
        w.push_back(prev);
    }
    const double s1 = std::abs(w[1] - w[0]) / 1e-4;
    const double s2 = std::abs(w[2] - w[1]) / 9e-4;
    CHECK(s1 > 0.0);
    CHECK(s2 / s1 < 3.0);
    CHECK(s1 / s2 < 3.0);
}

TEST_CASE("trapping classification") {
    const auto map = kt::tortoise(0.0);
    // Barrier top of λ̃Δ_r - r⁴ reaches zero at r = 3M₀.
    const double lam_c = 1.0 / (1.0 / (27.0 * kt::kM0 * kt::kM0) - kt::kLambda / 3.0);
    CHECK(classify_trapping(map, 0.3 * lam_c, 0.0).kase == TrappingCase::BelowBarrier);
    const auto c2 = classify_trapping(map, 5.0 * lam_c, 0.0);
    CHECK(c2.kase == TrappingCase::NontrappingMonotone);
    CHECK(c2.x_markers.size() == 4);
    const auto c3 = classify_trapping(map, lam_c, 0.0);
    CHECK(c3.kase == TrappingCase::HyperbolicMaximum);
    CHECK(c3.r0 == doctest::Approx(3.0 * kt::kM0).epsilon(1e-6));
    CHECK(std::abs(c3.V0_top) < 1e-10);
    REQUIRE(c3.x_markers.size() == 2);
    CHECK(c3.x_markers[0] < c3.x0);
    CHECK(c3.x0 < c3.x_markers[1]);
    CHECK(to_string(TrappingCase::HyperbolicMaximum) != to_string(TrappingCase::BelowBarrier));
}

}
