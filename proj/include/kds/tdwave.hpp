#pragma once

#include "kds/coords.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace kds {

struct WaveOptions {
    double dx = 0.01;
    double x_left = NAN;   ///< NAN: minus-end series threshold minus 10/A_-
    double x_right = NAN;  ///< NAN: plus-end series threshold plus 10/A_+
    double dt_out = 0.05;
    double cfl = 0.8;
    double dt = NAN;  ///< NAN: largest step <= cfl·dx·min r² dividing dt_out
};

/// r⁴u_tt = u_xx - (λ + m²r²)Δ_r u on a uniform x-grid, leapfrog in time,
/// with u_t = ∓r_±⁻²u_x at x_right / x_left.
struct WaveSeries {
    std::vector<double> probes;
    std::vector<double> t;
    std::vector<std::vector<double>> u;  ///< u[p][n] at probes[p], t[n]
    std::vector<double> energy;          ///< discrete energy at each t[n]
    double dx = 0.0, dt = 0.0, x_left = 0.0, x_right = 0.0;
    int l = 0;
};

/// Throws NonzeroSpinUnsupported (a ≠ 0), CFLViolation, InvalidParams.
WaveSeries evolve(const TortoiseMap& map, int l, const std::function<double(double)>& u0,
                  const std::function<double(double)>& v0, double T, const std::vector<double>& probes,
                  const WaveOptions& opt = {});

struct Gaussian {
    double center = 0.0, width = 1.0, amplitude = 1.0;
    double operator()(double x) const;
};

struct RingdownFit {
    std::complex<double> omega;  ///< dominant decaying frequency, Re ω >= 0, Im ω < 0
    double plateau = 0.0;
    double fit_residual = 0.0;  ///< residual energy / signal energy in the window
    std::vector<std::complex<double>> poles;       ///< all fitted frequencies
    std::vector<std::complex<double>> amplitudes;  ///< at the window start
};

/// Constant plus an order-`order` Prony model on samples with t in [t_start, t_end].
/// Throws PoorFit when the residual exceeds 10% of the signal energy.
RingdownFit ringdown_fit(const std::vector<double>& t, const std::vector<double>& u, double t_start, double t_end,
                         int order = 4);

/// Late-time constant for the l = 0 mode: ∫ r⁴ v₀ dx / (r_+² + r_-²) (independent of u₀);
/// zero for l >= 1. Throws NonzeroSpinUnsupported for a ≠ 0.
double plateau_prediction(const TortoiseMap& map, int l, const std::function<double(double)>& u0,
                          const std::function<double(double)>& v0, double x_lo, double x_hi, int n = 4001);

}  // namespace kds
