#pragma once

#include "kds/angular.hpp"
#include "kds/radial.hpp"

#include <Eigen/Dense>

#include <vector>

namespace kds {

/// Source on a product grid: uniform tortoise nodes x_i times Gauss–Legendre
/// nodes μ_j = cos θ_j of order n_mu. f(i, j) is the sample at (x_i, μ_j).
struct ResolventRequest {
    cplx omega;
    int k = 0;
    int L_max = 4;  ///< number of angular branches summed, l = |k| .. |k|+L_max-1
    std::vector<double> x_grid;
    int n_mu = 32;
    Eigen::MatrixXcd f;
    double delta_r = -1.0;  ///< K_r margin; negative picks (r_+ - r_-)/20
};

struct BranchTerm {
    int l = 0;
    cplx lambda;
    double norm = 0.0;  ///< max |u_l(x)| |e_l|
};

struct ResolventResult {
    std::vector<double> x_grid, mu;
    Eigen::MatrixXcd u;
    std::vector<BranchTerm> terms;
    double residual = 0.0;  ///< ‖P_g u - f‖ / ‖f‖ at interior nodes
    bool truncation_warning = false;
    /// Coefficients of u(x_i, ·) in the angular eigenbasis and the branch vectors,
    /// enough to evaluate u at any μ.
    Eigen::MatrixXcd radial;   ///< n_x × L_max
    Eigen::MatrixXcd vectors;  ///< basis_size × L_max, columns in P̄_{|k|+i}^{|k|}
};

/// Gauss–Legendre nodes in μ used by ResolventRequest.
std::vector<double> mu_nodes(int n_mu);

/// Σ_l R_x(ω, λ_{k,l}(ω), k)(Δ_r f_l) ⊗ e_l with biorthogonal projections
/// f_l = c_lᵀ f̂ / c_lᵀ c_l. Throws NearResonance, DegenerateBranch, InvalidParams.
ResolventResult resolvent_apply(const TortoiseMap& map, const ResolventRequest& req);

/// ‖P_g(ω,k)u - f‖ / ‖f‖ with P_g applied by fourth-order finite differences
/// in x and θ. u is evaluated from the branch expansion in `res`.
double separated_residual(const TortoiseMap& map, const ResolventRequest& req, const ResolventResult& res);

struct ZeroResidueOptions {
    double epsilon = 0.02;
    double phase = 0.7853981633974483;  ///< ray into ω = 0
    int L_max = 3;
    int n_x = 801;
    int n_mu = 24;
};

struct ZeroResidueReport {
    cplx expected;         ///< i / (4π(1+α)(r_+²+r_-²+2a²))
    cplx direct;           ///< route (i): extrapolated ω(R_g(ω,0)f, f) / (f,1)²
    cplx branch;           ///< route (ii): extrapolated ω S_r0 S_θ0 / (λ_r - λ_θ)
    cplx slope, expected_slope;  ///< λ_r'(0)
    double S_theta0 = 0.0;       ///< pairing of the angular residue at ω = 0
    double S_r0 = 0.0;
    std::vector<cplx> omegas, direct_samples, branch_samples;
};

/// Residue of the separated resolvent at ω = 0 for k = 0, two ways.
/// Throws ExtrapolationUnstable when the two halves of the sample disagree.
ZeroResidueReport zero_residue(const TortoiseMap& map, const ZeroResidueOptions& opt = {});

/// λ_r(ω): the zero of W(ω, ·, k) near `seed`, by Newton in λ.
cplx radial_lambda_zero(const TortoiseMap& map, cplx omega, int k, cplx seed);

struct CircleContour {
    cplx center;
    double radius = 1.0;
    int nodes = 512;
};

/// (1/2πi)∮ (A+λ)^{-1} ⊗ (B-λ)^{-1} dλ on a clockwise circle around spec(B),
/// which equals (A⊗1 + 1⊗B)^{-1}. Throws ContourThroughSpectrum.
Eigen::MatrixXcd finite_tensor_inverse_oracle(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                              const CircleContour& contour);

/// Kronecker product A ⊗ B.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);

}  // namespace kds
