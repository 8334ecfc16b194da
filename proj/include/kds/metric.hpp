#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

namespace kds {

/// Kerr–de Sitter background constants. Lengths are in the units of M0.
struct BlackHoleParams {
    double M0 = 0.0;
    double Lambda = 0.0;
    double a = 0.0;
    double m_field = 0.0;

    double alpha = 0.0;    ///< Λa²/3
    double r_minus = 0.0;  ///< event horizon
    double r_plus = 0.0;   ///< cosmological horizon
    double A_minus = 0.0;  ///< ∂_rΔ_r(r_-) > 0
    double A_plus = 0.0;   ///< -∂_rΔ_r(r_+) > 0

    /// All four roots of the quartic Δ_r, including the two that do not
    /// bound the stationary region (may be complex for large a).
    std::array<std::complex<double>, 4> roots{};
};

struct DeltaR {
    double value;
    double derivative;
};

/// Computes horizons and surface-gravity constants.
/// Throws InvalidParams, NoHorizonRegion or DegenerateHorizon.
BlackHoleParams derive_params(double M0, double Lambda, double a, double m_field = 0.0);

/// Δ_r = (r²+a²)(1-Λr²/3) - 2M₀r and its r-derivative.
DeltaR delta_r_eval(const BlackHoleParams& p, double r);

/// Coefficients of Δ_r in ascending powers of r.
std::array<double, 5> delta_r_poly(const BlackHoleParams& p);

/// Δ_r at complex r.
std::complex<double> delta_r_complex(const BlackHoleParams& p, std::complex<double> r);

/// Non-elliptic set of the stationary operator at one polar angle: the r in
/// (r_-, r_+) where Δ_r ≤ a²Δ_θ sin²θ (the φφ symbol coefficient changes sign).
struct ErgoSlice {
    double theta;
    std::vector<std::pair<double, double>> intervals;
};

/// Samples θ uniformly on [0, π/2] (the set is symmetric under θ -> π-θ).
/// Each slice is detected on 2048 r-points and its endpoints polished by bisection.
std::vector<ErgoSlice> ergo_extent(const BlackHoleParams& p, int n_theta);

/// Kerr-star coordinate profile: derivatives F'_t, F'_φ of the functions
/// defining t* = t - F_t(r), φ* = φ - F_φ(r).
class KerrStarProfile {
public:
    KerrStarProfile(const BlackHoleParams& p, double delta_r);

    double delta_r_margin() const { return delta_r_; }
    double C_slack() const { return c_slack_; }

    double F_t_prime(double r) const;
    double F_phi_prime(double r) const;
    /// (1+α)²(r²+a²)²/Δ_r - Δ_r F'_t² - (1+α)²a²
    double slack(double r) const;

    /// Samples used to certify C_slack.
    const std::vector<double>& r_samples() const { return r_; }
    const std::vector<double>& F_t_samples() const { return ft_; }
    const std::vector<double>& F_phi_samples() const { return fphi_; }

private:
    // 1 at the horizon side of the transition, 0 inside K_r
    double blend(double r, int& side) const;

    BlackHoleParams p_;
    double delta_r_;
    double kappa_;
    double c_slack_ = 0.0;
    std::vector<double> r_, ft_, fphi_;
};

/// Throws SlackViolated when the third-bullet inequality fails on the grid.
KerrStarProfile kerr_star_profile(const BlackHoleParams& p, double delta_r);

}  // namespace kds
