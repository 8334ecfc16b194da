#pragma once

#include "kds/metric.hpp"

#include <complex>
#include <vector>

namespace kds {

enum class End { Minus = -1, Plus = +1 };

inline int sign(End e) { return e == End::Plus ? 1 : -1; }

/// Holomorphic data near one horizon. Series are in the rescaled variable
/// ŵ = w / w_scale where w = e^{-A_+ x} at the plus end and w = e^{A_- x} at
/// the minus end.
struct BoundarySeries {
    End end = End::Plus;
    double r_end = 0.0;
    double A = 0.0;
    double w_scale = 1.0;
    double log_w_scale = 0.0;

    std::vector<double> s;       ///< |r - r_end| as a series in ŵ
    std::vector<double> r;       ///< r(ŵ)
    std::vector<double> delta;   ///< Δ_r(ŵ)
    std::vector<double> r2a2;    ///< (r²+a²)(ŵ)
    std::vector<double> r2a2sq;  ///< (r²+a²)²(ŵ)
    std::vector<double> r2delta; ///< r²Δ_r(ŵ)

    double rho_hat = 0.0;  ///< convergence radius in ŵ
    double rho = 0.0;      ///< convergence radius in w
    double x_threshold = 0.0;  ///< x beyond which |ŵ| <= rho_hat/2

    /// ŵ at (possibly complex) x.
    std::complex<double> w_hat(std::complex<double> x) const;
    double w_hat(double x) const;
    /// x at which ŵ takes the given positive value.
    double x_of_w_hat(double wh) const;
};

class TortoiseMap {
public:
    TortoiseMap(const BlackHoleParams& p, double r0, int n_series);

    const BlackHoleParams& params() const { return p_; }
    double r0() const { return r0_; }
    double X0() const { return X0_; }
    int n_series() const { return n_series_; }
    const BoundarySeries& series(End e) const { return e == End::Plus ? plus_ : minus_; }

    /// x(r) by the subtracted quadrature; r must lie in (r_-, r_+).
    double x_of_r(double r) const;
    double r_of_x(double x) const;
    /// Series branch only: requires |Re x| > X0 on the side of that end.
    std::complex<double> r_of_x(std::complex<double> x) const;

    /// Quadrature table (r_i, x_i).
    const std::vector<double>& table_r() const { return tr_; }
    const std::vector<double>& table_x() const { return tx_; }

private:
    double h(double t) const;
    double log_part(double r) const;
    double table_h_integral(double r, std::size_t& idx) const;
    void build_series(BoundarySeries& bs, End e, double limit_const);

    BlackHoleParams p_;
    double r0_;
    int n_series_;
    double X0_ = 0.0;
    std::vector<double> tr_, tx_, th_;  // r, x, ∫_{r0}^{r} h
    BoundarySeries plus_, minus_;
};

/// Throws SeriesDivergence when a boundary-series radius cannot be estimated.
TortoiseMap build_tortoise(const BlackHoleParams& p, double r0, int n_series = 64);

/// Anchor used when none is given: the point of (r_-, r_+) where Δ_r is largest.
double default_anchor(const BlackHoleParams& p);

struct PotentialSeries {
    End end = End::Plus;
    std::complex<double> omega, lambda;
    int k = 0;
    double m_field = 0.0;
    std::complex<double> omega_end;  ///< ω_± = (1+α)((r_±²+a²)ω - ak)
    std::vector<std::complex<double>> V;  ///< coefficients in ŵ
};

/// ω_± of the given end.
std::complex<double> omega_end(const BlackHoleParams& p, End e, std::complex<double> omega, int k);

PotentialSeries potential_series(const TortoiseMap& map, End e, std::complex<double> omega,
                                 std::complex<double> lambda, int k, int n);

/// V_x at a point r of the stationary region.
std::complex<double> potential_at(const BlackHoleParams& p, double r, std::complex<double> omega,
                                  std::complex<double> lambda, int k);

}  // namespace kds
