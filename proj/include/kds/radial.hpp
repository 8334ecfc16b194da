#pragma once

#include "kds/coords.hpp"

#include <complex>
#include <vector>

namespace kds {

using cplx = std::complex<double>;

/// Outgoing solution u_± = e^{±iω_±x} v_±(ŵ) near one end.
struct RadialSolution {
    End end = End::Plus;
    cplx omega, lambda;
    int k = 0;
    cplx omega_end;
    cplx nu;                     ///< 2iω_±/A_±
    std::vector<cplx> v_coeffs;  ///< coefficients of v in ŵ
    double x_match = 0.0;
    cplx value, slope;           ///< u and ∂_x u at x_match
    double tail_ratio = 0.0;     ///< |v_N ŵ^N| / |v(ŵ)| at x_match
    bool exceptional = false;
};

/// Builds the series and evaluates it at the matching point, moving x_match
/// outward when the tail bound 1e-12 is not met. Throws TailNotConverged.
RadialSolution outgoing_series(const TortoiseMap& map, End e, cplx omega, cplx lambda, int k, int n = -1);

/// (u, ∂_x u) from the series at x beyond the matching threshold of that end.
std::pair<cplx, cplx> eval_series(const TortoiseMap& map, const RadialSolution& s, double x);

struct OdeStats {
    long steps = 0;
    long rejected = 0;
};

/// Integrates u'' = V_x u from x_a to x_b. V_x is evaluated from r carried
/// along with u through dr/dx = Δ_r. Throws ToleranceNotMet.
std::pair<cplx, cplx> integrate_radial(const TortoiseMap& map, cplx omega, cplx lambda, int k, double x_a,
                                       double x_b, cplx u0, cplx du0, OdeStats* stats = nullptr,
                                       double rel_tol = 1e-12);

/// Same as above with r(x_a) already known.
std::pair<cplx, cplx> integrate_radial_from(const TortoiseMap& map, cplx omega, cplx lambda, int k, double x_a,
                                            double r_a, double x_b, cplx u0, cplx du0, OdeStats* stats = nullptr,
                                            double rel_tol = 1e-12);

struct WronskianValue {
    cplx omega, lambda;
    int k = 0;
    cplx W;
    /// |u_+ u_-'| + |u_- u_+'| at x = 0; the size W would have without cancellation.
    double scale = 0.0;
    /// W / (|(u_+, u_+')| |(u_-, u_-')|) at x = 0.
    cplx normalized;
    double constancy_defect = 0.0;  ///< negative when not computed
    OdeStats stats;
    cplx u_plus, du_plus, u_minus, du_minus;  ///< at x = 0
};

WronskianValue wronskian(const TortoiseMap& map, cplx omega, cplx lambda, int k, bool with_defect = true);

enum class WronskianParam { Omega, Lambda };

/// Central difference with step 1e-4(1+|p|), Richardson-extrapolated once.
cplx wronskian_derivative(const TortoiseMap& map, WronskianParam which, cplx omega, cplx lambda, int k);

/// u = (1/W)[u_+(x)∫_{x'<x}u_- f + u_-(x)∫_{x'>x}u_+ f] on a uniform grid, which
/// solves -u'' + V_x u = f. Throws NearResonance when |W| is negligible.
std::vector<cplx> radial_green(const TortoiseMap& map, cplx omega, cplx lambda, int k,
                               const std::vector<cplx>& f_samples, const std::vector<double>& x_grid);

/// u_± sampled on an ascending grid.
std::vector<std::pair<cplx, cplx>> solution_on_grid(const TortoiseMap& map, End e, cplx omega, cplx lambda, int k,
                                                    const std::vector<double>& x_grid);

struct NonresonanceReport {
    double omega_product = 0.0;  ///< ω_+ω_-
    bool checked = false;        ///< false when ω_+ω_- <= 0
    double W_abs = 0.0;
    double margin = 0.0;         ///< |W| / scale
};

NonresonanceReport real_axis_nonresonance_check(const TortoiseMap& map, double omega, int k, double lambda);

}  // namespace kds
