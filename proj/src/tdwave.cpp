#include "kds/tdwave.hpp"

#include "kds/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kds {

double Gaussian::operator()(double x) const {
    const double z = (x - center) / width;
    return amplitude * std::exp(-0.5 * z * z);
}

namespace {

void require_nonrotating(const BlackHoleParams& p) {
    if (p.a != 0.0) throw NonzeroSpinUnsupported("time-domain evolution separates only for a = 0");
}

double lagrange4(const std::vector<double>& u, double x_left, double dx, double x) {
    const double s = (x - x_left) / dx;
    int i = int(std::floor(s)) - 1;
    i = std::clamp(i, 0, int(u.size()) - 4);
    const double t = s - i;
    // Nodes at t = 0, 1, 2, 3.
    const double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    const double l1 = t * (t - 2) * (t - 3) / 2.0;
    const double l2 = -t * (t - 1) * (t - 3) / 2.0;
    const double l3 = t * (t - 1) * (t - 2) / 6.0;
    return l0 * u[i] + l1 * u[i + 1] + l2 * u[i + 2] + l3 * u[i + 3];
}

}  // namespace

WaveSeries evolve(const TortoiseMap& map, int l, const std::function<double(double)>& u0,
                  const std::function<double(double)>& v0, double T, const std::vector<double>& probes,
                  const WaveOptions& opt) {
    const BlackHoleParams& p = map.params();
    require_nonrotating(p);
    if (l < 0 || !(T > 0.0) || !(opt.dx > 0.0) || !(opt.dt_out > 0.0))
        throw InvalidParams("evolve needs l >= 0, T > 0, dx > 0 and dt_out > 0");
    const auto& sp = map.series(End::Plus);
    const auto& sm = map.series(End::Minus);
    const double xl = std::isnan(opt.x_left) ? sm.x_threshold - 10.0 / p.A_minus : opt.x_left;
    const double xr = std::isnan(opt.x_right) ? sp.x_threshold + 10.0 / p.A_plus : opt.x_right;
    if (!(xr > xl)) throw InvalidParams("x_right must exceed x_left");
    const int n = int(std::lround((xr - xl) / opt.dx)) + 1;
    if (n < 8) throw InvalidParams("grid too coarse");
    const double dx = (xr - xl) / (n - 1);

    std::vector<double> x(n), r4(n), kappa(n);
    double rmin2 = INFINITY;
    const double lam = double(l) * (l + 1);
    for (int i = 0; i < n; ++i) {
        x[i] = xl + i * dx;
        const double r = map.r_of_x(x[i]);
        const double r2 = r * r;
        rmin2 = std::min(rmin2, r2);
        r4[i] = r2 * r2;
        kappa[i] = (lam + p.m_field * p.m_field * r2) * delta_r_eval(p, r).value;
    }
    const double dt_cfl = opt.cfl * dx * rmin2;
    double dt = opt.dt;
    int per_out;
    if (std::isnan(dt)) {
        per_out = int(std::ceil(opt.dt_out / dt_cfl - 1e-12));
        dt = opt.dt_out / per_out;
    } else {
        if (dt > dt_cfl) {
            std::ostringstream os;
            os << "dt=" << dt << " exceeds the CFL bound " << dt_cfl;
            throw CFLViolation(os.str());
        }
        per_out = int(std::lround(opt.dt_out / dt));
        if (per_out < 1 || std::abs(per_out * dt - opt.dt_out) > 1e-9 * opt.dt_out)
            throw InvalidParams("dt must divide dt_out");
    }
    for (double q : probes)
        if (q < xl || q > xr) throw InvalidParams("probe outside the grid");

    WaveSeries out;
    out.probes = probes;
    out.u.assign(probes.size(), {});
    out.dx = dx;
    out.dt = dt;
    out.x_left = xl;
    out.x_right = xr;
    out.l = l;

    std::vector<double> prev(n), cur(n), next(n), v(n);
    for (int i = 0; i < n; ++i) {
        prev[i] = u0(x[i]);
        v[i] = v0(x[i]);
    }
    const double idx2 = 1.0 / (dx * dx);
    auto accel = [&](const std::vector<double>& u, int i) {
        return ((u[i + 1] - 2.0 * u[i] + u[i - 1]) * idx2 - kappa[i] * u[i]) / r4[i];
    };
    cur[0] = prev[0] + dt * v[0];
    cur[n - 1] = prev[n - 1] + dt * v[n - 1];
    for (int i = 1; i + 1 < n; ++i) cur[i] = prev[i] + dt * v[i] + 0.5 * dt * dt * accel(prev, i);

    auto energy = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double e = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            const double ut = (b[i] - a[i]) / dt;
            const double ux = 0.5 * ((a[i + 1] - a[i]) + (b[i + 1] - b[i])) / dx;
            const double um = 0.5 * (a[i] + b[i]);
            e += 0.5 * dx * (r4[i] * ut * ut + ux * ux + kappa[i] * um * um);
        }
        return e;
    };
    auto record = [&](double t, const std::vector<double>& a, const std::vector<double>& b) {
        out.t.push_back(t);
        for (std::size_t q = 0; q < probes.size(); ++q) out.u[q].push_back(lagrange4(a, xl, dx, probes[q]));
        out.energy.push_back(energy(a, b));
    };
    record(0.0, prev, cur);

    // Courant numbers of the boundary cells, with r² at the cell midpoints.
    const double sR = 2.0 * dt / ((std::sqrt(r4[n - 1]) + std::sqrt(r4[n - 2])) * dx);
    const double sL = 2.0 * dt / ((std::sqrt(r4[0]) + std::sqrt(r4[1])) * dx);
    const long steps = long(std::lround(T / dt));
    for (long s = 1; s < steps; ++s) {
        const double dt2 = dt * dt;
        for (int i = 1; i + 1 < n; ++i) next[i] = 2.0 * cur[i] - prev[i] + dt2 * accel(cur, i);
        // Box-scheme discretization of the outgoing condition; it uses only the
        // levels n and n+1, so it does not feed the leapfrog computational mode.
        next[n - 1] = (cur[n - 1] * (1.0 - sR) + cur[n - 2] * (1.0 + sR) - next[n - 2] * (1.0 - sR)) / (1.0 + sR);
        next[0] = (cur[0] * (1.0 - sL) + cur[1] * (1.0 + sL) - next[1] * (1.0 - sL)) / (1.0 + sL);
        std::swap(prev, cur);
        std::swap(cur, next);
        if (s % per_out == 0) record(s * dt, prev, cur);
    }
    return out;
}

RingdownFit ringdown_fit(const std::vector<double>& t, const std::vector<double>& u, double t_start, double t_end,
                         int order) {
    if (t.size() != u.size()) throw InvalidParams("time and value series differ in length");
    std::vector<double> s;
    double t0 = NAN, step = NAN;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_start || t[i] > t_end) continue;
        if (s.empty()) t0 = t[i];
        else if (s.size() == 1) step = t[i] - t0;
        s.push_back(u[i]);
    }
    const int p = order;
    const int m = int(s.size());
    if (p < 1 || m < 3 * p + 2) throw InvalidParams("window holds too few samples for the Prony order");

    // Differences remove the constant; linear prediction on them.
    std::vector<double> d(m - 1);
    for (int i = 0; i + 1 < m; ++i) d[i] = s[i + 1] - s[i];
    const int rows = int(d.size()) - p;
    Eigen::MatrixXd H(rows, p);
    Eigen::VectorXd rhs(rows);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < p; ++j) H(i, j) = d[i + p - 1 - j];
        rhs(i) = d[i + p];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const Eigen::VectorXd c = svd.solve(rhs);

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) comp(0, j) = c(j);
    for (int j = 1; j < p; ++j) comp(j, j - 1) = 1.0;
    const Eigen::VectorXcd z = Eigen::EigenSolver<Eigen::MatrixXd>(comp, false).eigenvalues();

    // Amplitudes of 1, z_i^n by least squares on the raw window.
    Eigen::MatrixXcd V(m, p + 1);
    Eigen::VectorXcd y(m);
    for (int i = 0; i < m; ++i) {
        V(i, 0) = 1.0;
        for (int j = 0; j < p; ++j) V(i, j + 1) = std::pow(z(j), i);
        y(i) = s[i];
    }
    const Eigen::VectorXcd amp = V.colPivHouseholderQr().solve(y);
    const Eigen::VectorXcd model = V * amp;

    RingdownFit fit;
    fit.plateau = amp(0).real();
    double res = 0.0, energy = 0.0;
    for (int i = 0; i < m; ++i) {
        res += std::norm(model(i) - y(i));
        energy += s[i] * s[i];
    }
    fit.fit_residual = energy > 0.0 ? res / energy : 0.0;
    double best = -1.0;
    for (int j = 0; j < p; ++j) {
        const std::complex<double> w = std::complex<double>(0.0, 1.0) * std::log(z(j)) / step;
        fit.poles.push_back(w);
        fit.amplitudes.push_back(amp(j + 1));
        if (w.imag() < 0.0 && std::abs(amp(j + 1)) > best) {
            best = std::abs(amp(j + 1));
            fit.omega = w.real() >= 0.0 ? w : -std::conj(w);
        }
    }
    if (fit.fit_residual > 0.1) {
        std::ostringstream os;
        os << "Prony residual is " << fit.fit_residual << " of the signal energy";
        throw PoorFit(os.str());
    }
    return fit;
}

double plateau_prediction(const TortoiseMap& map, int l, const std::function<double(double)>& /*u0*/,
                          const std::function<double(double)>& v0, double x_lo, double x_hi, int n) {
    const BlackHoleParams& p = map.params();
    require_nonrotating(p);
    if (l > 0) return 0.0;
    if (n < 3 || !(x_hi > x_lo)) throw InvalidParams("plateau quadrature needs an interval and n >= 3");
    if (n % 2 == 0) ++n;
    const double h = (x_hi - x_lo) / (n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = x_lo + i * h;
        const double r = map.r_of_x(x);
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * r * r * r * r * v0(x);
    }
    sum *= h / 3.0;
    return sum / (p.r_plus * p.r_plus + p.r_minus * p.r_minus);
}

}  // namespace kds
