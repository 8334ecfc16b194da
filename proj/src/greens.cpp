#include "kds/greens.hpp"

#include "kds/errors.hpp"
#include "kds/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace kds {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateGap = 1e-6;
constexpr double kTruncationRatio = 1e-8;

double grid_step(const std::vector<double>& x) {
    if (x.size() < 8) throw InvalidParams("x_grid needs at least 8 nodes");
    const double h = (x.back() - x.front()) / double(x.size() - 1);
    if (!(h > 0.0)) throw InvalidParams("x_grid must be ascending");
    return h;
}

// Intercept of the least-squares line through (z_j, y_j).
cplx linear_intercept(const std::vector<cplx>& z, const std::vector<cplx>& y, std::size_t first, std::size_t last) {
    const std::size_t n = last - first;
    Eigen::MatrixXcd X(n, 2);
    Eigen::VectorXcd Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = z[first + i];
        Y(i) = y[first + i];
    }
    const Eigen::VectorXcd c = X.colPivHouseholderQr().solve(Y);
    return c(0);
}

cplx extrapolate(const std::vector<cplx>& z, const std::vector<cplx>& y, const char* what) {
    const cplx all = linear_intercept(z, y, 0, z.size());
    const cplx coarse = linear_intercept(z, y, 0, z.size() - 1);
    const cplx fine = linear_intercept(z, y, 1, z.size());
    if (std::abs(coarse - fine) > 1e-2 * std::abs(all)) {
        std::ostringstream os;
        os << what << " extrapolation drifts: " << coarse << " vs " << fine;
        throw ExtrapolationUnstable(os.str());
    }
    return all;
}

}  // namespace

std::vector<double> mu_nodes(int n_mu) { return gauss_legendre(n_mu).nodes; }

ResolventResult resolvent_apply(const TortoiseMap& map, const ResolventRequest& req) {
    const BlackHoleParams& p = map.params();
    const int nx = int(req.x_grid.size());
    grid_step(req.x_grid);
    if (req.n_mu < 2 || req.L_max < 1) throw InvalidParams("resolvent_apply needs n_mu >= 2 and L_max >= 1");
    if (req.f.rows() != nx || req.f.cols() != req.n_mu) throw InvalidParams("source shape must be n_x × n_mu");

    const double dr = req.delta_r > 0.0 ? req.delta_r : (p.r_plus - p.r_minus) / 20.0;
    std::vector<double> r(nx), delta(nx);
    for (int i = 0; i < nx; ++i) {
        r[i] = map.r_of_x(req.x_grid[i]);
        delta[i] = delta_r_eval(p, r[i]).value;
        const bool inside = r[i] >= p.r_minus + dr && r[i] <= p.r_plus - dr;
        if (!inside && req.f.row(i).cwiseAbs().maxCoeff() != 0.0) {
            std::ostringstream os;
            os << "source is nonzero at r=" << r[i] << ", outside K_r";
            throw InvalidParams(os.str());
        }
    }

    const int m = std::abs(req.k);
    const int n_basis = std::max(default_angular_size(p, req.omega, req.k), 2 * req.L_max + 8);
    const AngularOperator op(p, req.k, n_basis);
    const auto branches = op.eigs(req.omega);
    for (int b = 0; b < req.L_max; ++b) {
        for (int c = 0; c < n_basis; ++c) {
            if (c != b && std::abs(branches[c].lambda - branches[b].lambda) < kDegenerateGap) {
                std::ostringstream os;
                os << "branches l=" << m + b << " and l=" << m + c << " nearly coincide at omega=" << req.omega;
                throw DegenerateBranch(os.str());
            }
        }
    }

    const GaussLegendre gl = gauss_legendre(req.n_mu);
    ResolventResult out;
    out.x_grid = req.x_grid;
    out.mu = gl.nodes;
    const Eigen::MatrixXd B = op.basis_values(gl.nodes);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(gl.weights.data(), req.n_mu);
    const Eigen::MatrixXcd F_hat = req.f * (w.asDiagonal() * B).cast<cplx>();

    out.vectors.resize(n_basis, req.L_max);
    out.radial.resize(nx, req.L_max);
    out.u = Eigen::MatrixXcd::Zero(nx, req.n_mu);
    for (int b = 0; b < req.L_max; ++b) {
        const Eigen::VectorXcd& c = branches[b].coeffs;
        out.vectors.col(b) = c;
        const cplx cc = (c.transpose() * c)(0);
        const Eigen::VectorXcd fl = F_hat * c / cc;
        std::vector<cplx> src(nx);
        for (int i = 0; i < nx; ++i) src[i] = delta[i] * fl(i);
        const std::vector<cplx> ul = radial_green(map, req.omega, branches[b].lambda, req.k, src, req.x_grid);
        const Eigen::VectorXcd e = B.cast<cplx>() * c;
        double umax = 0.0;
        for (int i = 0; i < nx; ++i) {
            out.radial(i, b) = ul[i];
            umax = std::max(umax, std::abs(ul[i]));
        }
        out.u += Eigen::Map<const Eigen::VectorXcd>(ul.data(), nx) * e.transpose();
        out.terms.push_back({m + b, branches[b].lambda, umax * e.cwiseAbs().maxCoeff()});
    }
    const double unorm = out.u.cwiseAbs().maxCoeff();
    out.truncation_warning = unorm > 0.0 && out.terms.back().norm > kTruncationRatio * unorm;
    out.residual = separated_residual(map, req, out);
    return out;
}

double separated_residual(const TortoiseMap& map, const ResolventRequest& req, const ResolventResult& res) {
    const BlackHoleParams& p = map.params();
    const int nx = int(req.x_grid.size());
    const double hx = grid_step(req.x_grid);
    const int m = std::abs(req.k);
    const int n_basis = int(res.vectors.rows());
    const double opa2 = (1.0 + p.alpha) * (1.0 + p.alpha);
    const cplx aw = p.a * req.omega;
    const double kk = req.k;

    // Angular factor of u and its θ-derivatives at each node.
    const int nm = int(res.mu.size());
    Eigen::MatrixXcd E0(nm, res.vectors.cols()), E1(nm, res.vectors.cols()), E2(nm, res.vectors.cols());
    std::vector<double> coef1(nm), coef2(nm);
    std::vector<cplx> pot(nm);
    auto ev = [&](double th) {
        const LegendreColumn col = normalized_legendre(m, n_basis, std::cos(th));
        Eigen::RowVectorXd row = Eigen::Map<const Eigen::RowVectorXd>(col.value.data(), n_basis);
        return Eigen::RowVectorXcd(row.cast<cplx>() * res.vectors);
    };
    for (int j = 0; j < nm; ++j) {
        const double th = std::acos(res.mu[j]);
        const double h = std::min({1e-3, th / 4.0, (kPi - th) / 4.0});
        const auto em2 = ev(th - 2 * h), em1 = ev(th - h), e0 = ev(th), ep1 = ev(th + h), ep2 = ev(th + 2 * h);
        E0.row(j) = e0;
        E1.row(j) = (em2 - 8.0 * em1 + 8.0 * ep1 - ep2) / (12.0 * h);
        E2.row(j) = (-em2 + 16.0 * em1 - 30.0 * e0 + 16.0 * ep1 - ep2) / (12.0 * h * h);
        const double s = std::sin(th), c = std::cos(th);
        const double dth = 1.0 + p.alpha * c * c;
        coef2[j] = dth;
        coef1[j] = -2.0 * p.alpha * c * s + dth * c / s;
        const cplx q = aw * s * s - kk;
        pot[j] = opa2 * q * q / (dth * s * s) + p.m_field * p.m_field * p.a * p.a * c * c;
    }

    double num = 0.0, den = 0.0;
    for (int i = 2; i + 2 < nx; ++i) {
        const double r = map.r_of_x(req.x_grid[i]);
        const double delta = delta_r_eval(p, r).value;
        const cplx V0 = potential_at(p, r, req.omega, 0.0, req.k);
        const auto R = [&](int ii) { return res.radial.row(ii); };
        const Eigen::RowVectorXcd uxx =
            (-R(i - 2) + 16.0 * R(i - 1) - 30.0 * R(i) + 16.0 * R(i + 1) - R(i + 2)) / (12.0 * hx * hx);
        for (int j = 0; j < nm; ++j) {
            const cplx u = (R(i) * E0.row(j).transpose())(0);
            const cplx xpart = (-(uxx * E0.row(j).transpose())(0) + V0 * u) / delta;
            const cplx ut = (R(i) * E1.row(j).transpose())(0);
            const cplx utt = (R(i) * E2.row(j).transpose())(0);
            const cplx tpart = -(coef2[j] * utt + coef1[j] * ut) + pot[j] * u;
            num += std::norm(xpart + tpart - req.f(i, j));
            den += std::norm(req.f(i, j));
        }
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

cplx radial_lambda_zero(const TortoiseMap& map, cplx omega, int k, cplx seed) {
    cplx lam = seed;
    for (int it = 0; it < 30; ++it) {
        const double h = 1e-6 * (1.0 + std::abs(lam));
        const cplx W = wronskian(map, omega, lam, k, false).W;
        const cplx dW = (wronskian(map, omega, lam + h, k, false).W - wronskian(map, omega, lam - h, k, false).W) /
                        (2.0 * h);
        const cplx step = W / dW;
        lam -= step;
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(lam))) return lam;
    }
    std::ostringstream os;
    os << "no Wronskian zero in lambda near " << seed << " at omega=" << omega;
    throw NoConvergence(os.str());
}

ZeroResidueReport zero_residue(const TortoiseMap& map, const ZeroResidueOptions& opt) {
    const BlackHoleParams& p = map.params();
    const double sig = p.r_plus * p.r_plus + p.r_minus * p.r_minus + 2.0 * p.a * p.a;
    const double width = p.r_plus - p.r_minus;
    ZeroResidueReport rep;
    rep.expected = cplx(0.0, 1.0) / (4.0 * kPi * (1.0 + p.alpha) * sig);
    rep.expected_slope = cplx(0.0, (1.0 + p.alpha) * sig / width);
    rep.S_r0 = 1.0 / wronskian_derivative(map, WronskianParam::Lambda, 0.0, 0.0, 0).real();

    // Angular residue at ω = 0 paired with the constant.
    {
        const int n = default_angular_size(p, 0.0, 0);
        const AngularOperator op(p, 0, n);
        const Eigen::VectorXcd c = op.eigs(0.0)[0].coeffs;
        const GaussLegendre gl = gauss_legendre(n + 8);
        const Eigen::MatrixXd B = op.basis_values(gl.nodes);
        const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(gl.weights.data(), n + 8);
        const Eigen::VectorXcd one_hat = (B.transpose() * w).cast<cplx>();
        const cplx proj = (c.transpose() * one_hat)(0);
        const cplx cc = (c.transpose() * c)(0);
        const double pairing = (2.0 * kPi * proj * proj / cc).real();
        rep.S_theta0 = -pairing / (16.0 * kPi * kPi);
    }

    // f = g = bump(r) ⊗ 1 supported well inside K_r.
    const double r_lo = p.r_minus + 0.2 * width, r_hi = p.r_plus - 0.2 * width;
    const double x_lo = map.x_of_r(p.r_minus + 0.15 * width), x_hi = map.x_of_r(p.r_plus - 0.15 * width);
    ResolventRequest req;
    req.k = 0;
    req.L_max = opt.L_max;
    req.n_mu = opt.n_mu;
    req.x_grid.resize(opt.n_x);
    const double hx = (x_hi - x_lo) / (opt.n_x - 1);
    std::vector<double> bump(opt.n_x), delta(opt.n_x);
    double mass = 0.0;
    for (int i = 0; i < opt.n_x; ++i) {
        req.x_grid[i] = x_lo + i * hx;
        const double r = map.r_of_x(req.x_grid[i]);
        delta[i] = delta_r_eval(p, r).value;
        const double s = (2.0 * r - r_lo - r_hi) / (r_hi - r_lo);
        bump[i] = std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
        mass += bump[i] * delta[i] * hx;
    }
    req.f = Eigen::MatrixXcd::Zero(opt.n_x, opt.n_mu);
    for (int i = 0; i < opt.n_x; ++i) req.f.row(i).setConstant(bump[i]);
    const GaussLegendre gl = gauss_legendre(opt.n_mu);
    const double f_one = 4.0 * kPi * mass;

    const int n_ang = default_angular_size(p, opt.epsilon, 0);
    const AngularOperator op(p, 0, n_ang);
    std::vector<cplx> slope_samples;
    for (int j = 0; j < 5; ++j) {
        const cplx omega = std::polar(opt.epsilon * std::ldexp(1.0, -j), opt.phase);
        rep.omegas.push_back(omega);
        req.omega = omega;
        const ResolventResult res = resolvent_apply(map, req);
        cplx pair = 0.0;
        for (int i = 0; i < opt.n_x; ++i)
            for (int q = 0; q < opt.n_mu; ++q) pair += res.u(i, q) * bump[i] * delta[i] * hx * 2.0 * kPi * gl.weights[q];
        rep.direct_samples.push_back(omega * pair / (f_one * f_one));

        const cplx lam_r = radial_lambda_zero(map, omega, 0, rep.expected_slope * omega);
        const cplx lam_t = op.eigs(omega)[0].lambda;
        rep.branch_samples.push_back(omega * rep.S_r0 * rep.S_theta0 / (lam_r - lam_t));
        slope_samples.push_back(lam_r / omega);
    }
    rep.direct = extrapolate(rep.omegas, rep.direct_samples, "direct residue");
    rep.branch = extrapolate(rep.omegas, rep.branch_samples, "branch residue");
    rep.slope = extrapolate(rep.omegas, slope_samples, "lambda_r slope");
    return rep;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

Eigen::MatrixXcd finite_tensor_inverse_oracle(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                              const CircleContour& contour) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() == 0 || B.rows() == 0)
        throw InvalidParams("A and B must be nonempty square matrices");
    if (contour.nodes < 3 || !(contour.radius > 0.0)) throw InvalidParams("contour needs radius > 0 and >= 3 nodes");
    const double guard = 1e-8 * (1.0 + contour.radius);
    const Eigen::VectorXcd evB = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(B, false).eigenvalues();
    const Eigen::VectorXcd evA = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(A, false).eigenvalues();
    for (Eigen::Index i = 0; i < evB.size(); ++i) {
        const double d = std::abs(evB(i) - contour.center) - contour.radius;
        if (d > -guard) {
            std::ostringstream os;
            os << "eigenvalue " << evB(i) << " of B is not strictly inside the contour";
            throw ContourThroughSpectrum(os.str());
        }
    }
    for (Eigen::Index i = 0; i < evA.size(); ++i) {
        const double d = std::abs(-evA(i) - contour.center) - contour.radius;
        if (d < guard) {
            std::ostringstream os;
            os << "eigenvalue " << -evA(i) << " of -A is not strictly outside the contour";
            throw ContourThroughSpectrum(os.str());
        }
    }
    const Eigen::Index na = A.rows(), nb = B.rows();
    const Eigen::MatrixXcd Ia = Eigen::MatrixXcd::Identity(na, na), Ib = Eigen::MatrixXcd::Identity(nb, nb);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(na * nb, na * nb);
    const double dt = 2.0 * kPi / contour.nodes;
    for (int j = 0; j < contour.nodes; ++j) {
        const cplx e = std::polar(1.0, -j * dt);  // clockwise
        const cplx lam = contour.center + contour.radius * e;
        const cplx dlam = cplx(0.0, -1.0) * contour.radius * e * dt;
        const Eigen::MatrixXcd RA = (A + lam * Ia).partialPivLu().inverse();
        const Eigen::MatrixXcd RB = (B - lam * Ib).partialPivLu().inverse();
        sum += kron(RA, RB) * dlam;
    }
    return sum / cplx(0.0, 2.0 * kPi);
}

}  // namespace kds
