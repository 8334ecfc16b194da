#pragma once

#include "kds/metric.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace kds {

using cplx = std::complex<double>;

struct AngularBranch {
    int k = 0;
    int l = 0;
    cplx omega;
    cplx lambda;
    Eigen::VectorXcd coeffs;  ///< unit 2-norm, in the basis P̄_{|k|+i}^{|k|}
    double residual = 0.0;    ///< ‖(M - λ)c‖ / ‖c‖
    int basis_size = 0;
    bool converged = false;   ///< set by the doubling test
};

/// Galerkin matrix of P_θ(ω) on a fixed k-sector, split as K + ωL + ω²Q with
/// K, L, Q real symmetric, so the quadrature is paid once per (k, N).
class AngularOperator {
public:
    AngularOperator(const BlackHoleParams& p, int k, int n);

    int k() const { return k_; }
    int size() const { return n_; }
    Eigen::MatrixXcd matrix(cplx omega) const;

    const Eigen::MatrixXd& K() const { return K_; }
    const Eigen::MatrixXd& L() const { return L_; }
    const Eigen::MatrixXd& Q() const { return Q_; }

    /// All eigenpairs sorted by real part; labels l = |k| + position.
    std::vector<AngularBranch> eigs(cplx omega) const;
    /// Eigenvalues only, in the same order as eigs().
    std::vector<cplx> eigenvalues(cplx omega) const;

    /// Samples of the basis on x = cos θ (rows: points, cols: basis index).
    Eigen::MatrixXd basis_values(const std::vector<double>& x) const;

private:
    int k_, n_;
    Eigen::MatrixXd K_, L_, Q_;
};

/// Default basis size 2(|k| + 20 + ⌈4|aω|⌉).
int default_angular_size(const BlackHoleParams& p, cplx omega, int k);

Eigen::MatrixXcd angular_matrix(const BlackHoleParams& p, cplx omega, int k, int n);

/// Eigenpairs at basis size n, with the first n/2 checked against size 2n.
std::vector<AngularBranch> angular_eigs(const BlackHoleParams& p, cplx omega, int k, int n);

/// A single branch; throws BasisTooSmall when doubling n moves it by more than 1e-8.
AngularBranch angular_branch(const BlackHoleParams& p, cplx omega, int k, int l, int n = -1);

struct TrackPoint {
    cplx omega;
    cplx lambda;
    bool collision = false;  ///< another eigenvalue within 1e-6
};

/// Continues λ_{k,l} along a polyline by nearest-eigenvalue matching, bisecting
/// steps whose match is ambiguous.
std::vector<TrackPoint> track_branch(const BlackHoleParams& p, int k, int l, const std::vector<cplx>& omega_path,
                                     int n = -1);

}  // namespace kds
