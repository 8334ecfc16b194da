#pragma once

#include "kds/angular.hpp"
#include "kds/radial.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace kds {

struct Box {
    double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

    cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
    bool contains(cplx z) const {
        return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
    }
    Box inflated(double factor) const;
    bool valid() const { return re_max > re_min && im_max > im_min; }
};

struct Resonance {
    int k = 0, l = 0;
    cplx omega;
    cplx lambda;
    double residual = 0.0;  ///< |D(ω)| / max |D| on the radius-1e-3 circle
    int newton_iters = 0;
    int multiplicity_estimate = 1;
    std::string provenance;
    std::string diagnostic;  ///< non-empty for upper-half-plane hits
    std::vector<std::pair<int, int>> also;  ///< other (k, l) with the same ω
};

/// Shared context for mode determinants: the tortoise map and angular operators
/// are built once and reused. Thread-safe for concurrent const use.
class ModeSolver {
public:
    explicit ModeSolver(const BlackHoleParams& p, int n_series = 64);

    const BlackHoleParams& params() const { return p_; }
    const TortoiseMap& map() const { return map_; }

    /// λ_{k,l}(ω) by shifted inverse iteration seeded from the a = 0 label,
    /// with a full eigen-solve fallback.
    cplx lambda(cplx omega, int k, int l) const;
    /// D(ω) = W(ω, λ_{k,l}(ω), k).
    cplx determinant(cplx omega, int k, int l) const;
    /// D normalized by |(u_+,u_+')||(u_-,u_-')| at x = 0; same phase as D.
    cplx normalized_determinant(cplx omega, int k, int l) const;

private:
    std::shared_ptr<const AngularOperator> angular(int k, int n) const;

    BlackHoleParams p_;
    TortoiseMap map_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, int>, std::shared_ptr<const AngularOperator>> ops_;
};

cplx mode_determinant(const BlackHoleParams& p, cplx omega, int k, int l);

struct RootResult {
    cplx root;
    int iters = 0;
    double residual = 0.0;
};

/// Newton iteration with a central-difference derivative on a holomorphic
/// function. Throws NoConvergence after 30 iterations and EscapedBox when an
/// iterate leaves `box` inflated 2x.
RootResult refine_root(const std::function<cplx(cplx)>& f, cplx seed, double tol, const Box& box);

/// Default seed box: a square of half-width max(0.25, 0.1|seed|).
Box seed_box(cplx seed);

Resonance refine(const ModeSolver& solver, cplx seed, int k, int l, double tol = 1e-10);
Resonance refine(const BlackHoleParams& p, cplx seed, int k, int l, double tol = 1e-10);

struct ContourResult {
    int winding = 0;
    double winding_raw = 0.0;
    cplx first_moment;  ///< (1/2πi)∮ ω f'/f dω, the root sum (f must be holomorphic)
    double min_abs = 0.0;
    int evaluations = 0;
};

/// Argument principle on the box boundary for an arbitrary function. Throws
/// BoundaryTooClose when |f| falls below 1e-12 or the winding is not near an integer.
ContourResult contour_count(const std::function<cplx(cplx)>& f, const Box& box, int n_contour,
                            int max_halvings = 10);

int count_zeros_box(const ModeSolver& solver, const Box& box, int k, int l, int n_contour = 256);
int count_zeros_box(const BlackHoleParams& p, const Box& box, int k, int l, int n_contour = 256);

struct ScanOptions {
    int n_re = 1;
    int n_im = 1;
    int n_contour = 128;
    int max_depth = 12;
    int workers = 1;
    double tol = 1e-10;
};

struct ScanIssue {
    int k, l;
    Box cell;
    std::string message;
};

struct ScanResult {
    std::vector<Resonance> resonances;
    std::vector<ScanIssue> issues;
    int total_count = 0;  ///< sum of windings over the leaf cells
};

ScanResult scan(const ModeSolver& solver, const Box& box, std::pair<int, int> k_range, std::pair<int, int> l_range,
                const ScanOptions& opt = {});

struct WkbSeed {
    int l = 0, n = 0;
    cplx omega;
    std::string provenance;
};

/// Photon-sphere lattice estimates at a = 0 (l >= 1). Throws InvalidParams for a != 0.
std::vector<WkbSeed> sds_wkb_seeds(const BlackHoleParams& p, int l_max, int n_max);

enum class TrappingCase { BelowBarrier = 1, NontrappingMonotone = 2, HyperbolicMaximum = 3 };

std::string to_string(TrappingCase c);

struct TrappingReport {
    double lambda_tilde = 0.0, k_tilde = 0.0;
    TrappingCase kase = TrappingCase::BelowBarrier;
    double delta_V = 0.0;
    std::vector<double> x_markers;  ///< x_1..x_4 (case 2) or x_1, x_2 (case 3)
    double x0 = 0.0, V0_top = 0.0, r0 = 0.0;  ///< barrier top (case 3)
};

TrappingReport classify_trapping(const TortoiseMap& map, double lambda_tilde, double k_tilde);

}  // namespace kds
