#include "kds/angular.hpp"

#include "kds/errors.hpp"
#include "kds/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace kds {

namespace {

constexpr double kDoublingTol = 1e-8;
constexpr double kCollisionTol = 1e-6;

}  // namespace

AngularOperator::AngularOperator(const BlackHoleParams& p, int k, int n) : k_(k), n_(n) {
    const int m = std::abs(k);
    if (n < 1) throw InvalidParams("angular basis size must be positive");
    const int nq = n + m + 40;
    const GaussLegendre gl = gauss_legendre(nq);

    const double opa2 = (1.0 + p.alpha) * (1.0 + p.alpha);
    const double a = p.a;
    const double kk = double(k);
    const double m2a2 = p.m_field * p.m_field * a * a;

    // Rows scaled so that products give the weighted integrals directly.
    Eigen::MatrixXd P(nq, n), S(nq, n);
    Eigen::VectorXd wk(nq), wl(nq), wq(nq), wd(nq);
    for (int q = 0; q < nq; ++q) {
        const double x = gl.nodes[q];
        const double w = gl.weights[q];
        const double s2 = 1.0 - x * x;
        const double dth = 1.0 + p.alpha * x * x;
        const LegendreColumn col = normalized_legendre(m, n, x);
        for (int i = 0; i < n; ++i) {
            P(q, i) = col.value[i];
            S(q, i) = col.sin2_deriv[i];
        }
        wd(q) = w * dth / s2;
        wk(q) = w * (opa2 * kk * kk / (dth * s2) + m2a2 * x * x);
        wl(q) = w * (-2.0 * a * kk * opa2 / dth);
        wq(q) = w * (a * a * opa2 * s2 / dth);
    }
    K_ = S.transpose() * wd.asDiagonal() * S + P.transpose() * wk.asDiagonal() * P;
    L_ = P.transpose() * wl.asDiagonal() * P;
    Q_ = P.transpose() * wq.asDiagonal() * P;
    // Symmetrize away the rounding of the two triangular halves.
    K_ = 0.5 * (K_ + K_.transpose()).eval();
    L_ = 0.5 * (L_ + L_.transpose()).eval();
    Q_ = 0.5 * (Q_ + Q_.transpose()).eval();
}

Eigen::MatrixXcd AngularOperator::matrix(cplx omega) const {
    Eigen::MatrixXcd M = K_.cast<cplx>();
    M += omega * L_.cast<cplx>();
    M += (omega * omega) * Q_.cast<cplx>();
    return M;
}

std::vector<AngularBranch> AngularOperator::eigs(cplx omega) const {
    const Eigen::MatrixXcd M = matrix(omega);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, true);
    std::vector<int> order(n_);
    for (int i = 0; i < n_; ++i) order[i] = i;
    const auto& ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (ev(i).real() != ev(j).real()) return ev(i).real() < ev(j).real();
        return ev(i).imag() < ev(j).imag();
    });
    std::vector<AngularBranch> out;
    out.reserve(n_);
    for (int pos = 0; pos < n_; ++pos) {
        const int i = order[pos];
        AngularBranch b;
        b.k = k_;
        b.l = std::abs(k_) + pos;
        b.omega = omega;
        b.lambda = ev(i);
        b.coeffs = es.eigenvectors().col(i).normalized();
        b.residual = (M * b.coeffs - b.lambda * b.coeffs).norm();
        b.basis_size = n_;
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<cplx> AngularOperator::eigenvalues(cplx omega) const {
    if (omega.imag() == 0.0) {
        // Real symmetric for real ω.
        const double w = omega.real();
        const Eigen::MatrixXd M = K_ + w * L_ + (w * w) * Q_;
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues();
        return std::vector<cplx>(ev.data(), ev.data() + ev.size());
    }
    const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(matrix(omega), false).eigenvalues();
    std::vector<cplx> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

Eigen::MatrixXd AngularOperator::basis_values(const std::vector<double>& x) const {
    Eigen::MatrixXd B(x.size(), n_);
    for (std::size_t q = 0; q < x.size(); ++q) {
        const LegendreColumn col = normalized_legendre(std::abs(k_), n_, x[q]);
        for (int i = 0; i < n_; ++i) B(q, i) = col.value[i];
    }
    return B;
}

int default_angular_size(const BlackHoleParams& p, cplx omega, int k) {
    return 2 * (std::abs(k) + 20 + int(std::ceil(4.0 * std::abs(p.a * omega))));
}

Eigen::MatrixXcd angular_matrix(const BlackHoleParams& p, cplx omega, int k, int n) {
    return AngularOperator(p, k, n).matrix(omega);
}

std::vector<AngularBranch> angular_eigs(const BlackHoleParams& p, cplx omega, int k, int n) {
    std::vector<AngularBranch> out = AngularOperator(p, k, n).eigs(omega);
    const std::vector<cplx> ref = AngularOperator(p, k, 2 * n).eigenvalues(omega);
    for (int i = 0; i < n / 2; ++i) out[i].converged = std::abs(out[i].lambda - ref[i]) <= kDoublingTol;
    return out;
}

AngularBranch angular_branch(const BlackHoleParams& p, cplx omega, int k, int l, int n) {
    if (l < std::abs(k)) throw InvalidParams("angular branch requires l >= |k|");
    if (n < 0) n = default_angular_size(p, omega, k);
    n = std::max(n, 2 * (l - std::abs(k) + 1));
    const std::vector<AngularBranch> all = angular_eigs(p, omega, k, n);
    const AngularBranch& b = all[l - std::abs(k)];
    if (!b.converged) {
        std::ostringstream os;
        os << "branch (k=" << k << ", l=" << l << ") at omega=" << omega << " moves under doubling N=" << n;
        throw BasisTooSmall(os.str());
    }
    return b;
}

namespace {

struct Match {
    cplx lambda;
    double best, second;
    double gap;  // distance from the match to its nearest other eigenvalue
};

Match nearest(const std::vector<AngularBranch>& eigs, cplx target) {
    Match m{0.0, INFINITY, INFINITY, INFINITY};
    std::size_t bi = 0;
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        const double d = std::abs(eigs[i].lambda - target);
        if (d < m.best) {
            m.second = m.best;
            m.best = d;
            bi = i;
        } else if (d < m.second) {
            m.second = d;
        }
    }
    m.lambda = eigs[bi].lambda;
    for (std::size_t i = 0; i < eigs.size(); ++i)
        if (i != bi) m.gap = std::min(m.gap, std::abs(eigs[i].lambda - m.lambda));
    return m;
}

}  // namespace

std::vector<TrackPoint> track_branch(const BlackHoleParams& p, int k, int l, const std::vector<cplx>& omega_path,
                                     int n) {
    std::vector<TrackPoint> out;
    if (omega_path.empty()) return out;
    if (n < 0) {
        double amax = 0.0;
        for (cplx w : omega_path) amax = std::max(amax, std::abs(w));
        n = default_angular_size(p, amax, k);
    }
    n = std::max(n, 2 * (l - std::abs(k) + 1));
    const AngularOperator op(p, k, n);

    const auto first = op.eigs(omega_path.front());
    TrackPoint cur{omega_path.front(), first[l - std::abs(k)].lambda, false};
    {
        const Match m = nearest(first, cur.lambda);
        cur.collision = m.gap < kCollisionTol;
    }
    out.push_back(cur);

    cplx prev_lambda = cur.lambda, prev_slope = 0.0;
    cplx prev_omega = cur.omega;
    for (std::size_t s = 1; s < omega_path.size(); ++s) {
        const cplx target_omega = omega_path[s];
        // Sub-steps: halve until the nearest match is unambiguous.
        std::vector<cplx> pending = {target_omega};
        int depth = 0;
        while (!pending.empty()) {
            const cplx w = pending.back();
            const cplx predicted = prev_lambda + prev_slope * (w - prev_omega);
            const auto eigs = op.eigs(w);
            const Match m = nearest(eigs, predicted);
            const bool ambiguous = m.second < 2.0 * m.best && m.best > kCollisionTol;
            if (ambiguous && depth < 12) {
                pending.push_back(0.5 * (prev_omega + w));
                ++depth;
                continue;
            }
            if (w != prev_omega) prev_slope = (m.lambda - prev_lambda) / (w - prev_omega);
            prev_lambda = m.lambda;
            prev_omega = w;
            pending.pop_back();
            if (pending.empty()) out.push_back({w, m.lambda, m.gap < kCollisionTol});
        }
    }
    return out;
}

}  // namespace kds
