#include "kds/coords.hpp"

#include "kds/errors.hpp"
#include "kds/series.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace kds {

namespace {

using cplx = std::complex<double>;
using boost::math::quadrature::gauss;

constexpr int kTableSize = 1024;

// Coefficients of P(c + σs) in ascending powers of s.
std::vector<double> taylor_shift(std::span<const double> poly, double c, double sigma) {
    ps::Series<double> arg(poly.size(), 0.0);
    arg[0] = c;
    if (arg.size() > 1) arg[1] = sigma;
    return ps::poly_of<double>(poly, arg);
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

}  // namespace

cplx BoundarySeries::w_hat(cplx x) const {
    return std::exp(-double(sign(end)) * A * x - log_w_scale);
}

double BoundarySeries::w_hat(double x) const { return std::exp(-double(sign(end)) * A * x - log_w_scale); }

double BoundarySeries::x_of_w_hat(double wh) const {
    return -(std::log(wh) + log_w_scale) / (double(sign(end)) * A);
}

double default_anchor(const BlackHoleParams& p) {
    auto neg = [&](double r) { return -delta_r_eval(p, r).value; };
    const auto res = boost::math::tools::brent_find_minima(neg, p.r_minus, p.r_plus, 40);
    return res.first;
}

TortoiseMap::TortoiseMap(const BlackHoleParams& p, double r0, int n_series)
    : p_(p), r0_(r0), n_series_(n_series) {
    if (!(r0 > p.r_minus && r0 < p.r_plus)) throw InvalidParams("build_tortoise: r0 must lie in (r_-, r_+)");
    if (n_series < 8) throw InvalidParams("build_tortoise: N_series must be at least 8");

    // Chebyshev-clustered nodes so both ends are resolved.
    const double width = p.r_plus - p.r_minus;
    tr_.resize(kTableSize);
    for (int i = 0; i < kTableSize; ++i) {
        const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * (i + 1) / (kTableSize + 1)));
        tr_[i] = p.r_minus + width * t;
    }
    th_.assign(kTableSize, 0.0);
    auto hf = [this](double t) { return h(t); };
    for (int i = 1; i < kTableSize; ++i) th_[i] = th_[i - 1] + gauss<double, 30>::integrate(hf, tr_[i - 1], tr_[i]);
    std::size_t idx = 0;
    const double shift = table_h_integral(r0, idx);
    for (auto& v : th_) v -= shift;
    tx_.resize(kTableSize);
    for (int i = 0; i < kTableSize; ++i) tx_[i] = th_[i] + log_part(tr_[i]);

    // x + (1/A_+) ln(r_+ - r) and x - (1/A_-) ln(r - r_-) at the two horizons.
    const double h_plus = th_.back() + gauss<double, 30>::integrate(hf, tr_.back(), p.r_plus);
    const double h_minus = th_.front() - gauss<double, 30>::integrate(hf, p.r_minus, tr_.front());
    const double c_plus = h_plus + std::log(width / (r0 - p.r_minus)) / p.A_minus + std::log(p.r_plus - r0) / p.A_plus;
    const double c_minus =
        h_minus - std::log(r0 - p.r_minus) / p.A_minus - std::log(width / (p.r_plus - r0)) / p.A_plus;

    build_series(plus_, End::Plus, c_plus);
    build_series(minus_, End::Minus, c_minus);
    X0_ = std::max(plus_.x_threshold, -minus_.x_threshold);
}

double TortoiseMap::h(double t) const {
    // Δ_r = (t-r_-)(r_+-t)Q(t) with Q(t) = (Λ/3)(t² + (r_-+r_+)t - 3a²/(Λr_-r_+)) by Vieta.
    // Writing the subtraction through divided differences of Q avoids the
    // cancellation between 1/Δ_r and the poles near the horizons.
    const double c = p_.Lambda / 3.0;
    const double q1 = p_.r_minus + p_.r_plus;
    const double q0 = -p_.a * p_.a / (c * p_.r_minus * p_.r_plus);
    auto Q = [&](double y) { return c * (y * y + q1 * y + q0); };
    const double qt = Q(t);
    const double dd_plus = c * (q1 + t + p_.r_plus);
    const double dd_minus = c * (q1 + t + p_.r_minus);
    const double width = p_.r_plus - p_.r_minus;
    return (dd_plus / Q(p_.r_plus) - dd_minus / Q(p_.r_minus)) / (qt * width);
}

double TortoiseMap::log_part(double r) const {
    return std::log((r - p_.r_minus) / (r0_ - p_.r_minus)) / p_.A_minus -
           std::log((p_.r_plus - r) / (p_.r_plus - r0_)) / p_.A_plus;
}

double TortoiseMap::table_h_integral(double r, std::size_t& idx) const {
    auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
    idx = it == tr_.begin() ? 0 : std::size_t(it - tr_.begin()) - 1;
    auto hf = [this](double t) { return h(t); };
    return th_[idx] + gauss<double, 30>::integrate(hf, tr_[idx], r);
}

double TortoiseMap::x_of_r(double r) const {
    if (!(r > p_.r_minus && r < p_.r_plus)) throw OutsideDomain("x_of_r: r outside (r_-, r_+)");
    std::size_t idx = 0;
    return table_h_integral(r, idx) + log_part(r);
}

double TortoiseMap::r_of_x(double x) const {
    if (x >= plus_.x_threshold) return ps::evaluate(plus_.r, plus_.w_hat(x));
    if (x <= minus_.x_threshold) return ps::evaluate(minus_.r, minus_.w_hat(x));

    auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
    double lo, hi;
    if (it == tx_.begin()) {
        lo = p_.r_minus;
        hi = tr_.front();
    } else if (it == tx_.end()) {
        lo = tr_.back();
        hi = p_.r_plus;
    } else {
        const std::size_t i = std::size_t(it - tx_.begin());
        lo = tr_[i - 1];
        hi = tr_[i];
    }
    double r = 0.5 * (lo + hi);
    if (it != tx_.begin() && it != tx_.end()) {
        const std::size_t i = std::size_t(it - tx_.begin());
        r = lo + (hi - lo) * (x - tx_[i - 1]) / (tx_[i] - tx_[i - 1]);
    }
    for (int iter = 0; iter < 100; ++iter) {
        const double f = x_of_r(r) - x;
        if (f > 0.0) hi = r;
        else lo = r;
        double next = r - f * delta_r_eval(p_, r).value;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - r);
        r = next;
        if (step <= 1e-15 * std::max(1.0, std::abs(r)) || hi - lo <= 4e-16 * r) break;
    }
    return r;
}

cplx TortoiseMap::r_of_x(cplx x) const {
    if (x.real() >= plus_.x_threshold) return ps::evaluate(plus_.r, plus_.w_hat(x));
    if (x.real() <= minus_.x_threshold) return ps::evaluate(minus_.r, minus_.w_hat(x));
    std::ostringstream os;
    os << "complex x = " << x << " with Re x inside the series thresholds [" << minus_.x_threshold << ", "
       << plus_.x_threshold << "]";
    throw OutsideDomain(os.str());
}

void TortoiseMap::build_series(BoundarySeries& bs, End e, double limit_const) {
    const std::size_t n = std::size_t(n_series_);
    const double sigma = e == End::Plus ? -1.0 : 1.0;  // r = r_end + σ s
    bs.end = e;
    bs.r_end = e == End::Plus ? p_.r_plus : p_.r_minus;
    bs.A = e == End::Plus ? p_.A_plus : p_.A_minus;

    const auto dpoly = delta_r_poly(p_);
    std::vector<double> d = taylor_shift(dpoly, bs.r_end, sigma);
    d[0] = 0.0;
    // Δ = s q(s)
    ps::Series<double> q(n, 0.0);
    for (std::size_t j = 0; j + 1 < d.size() && j < n; ++j) q[j] = d[j + 1];
    q[0] = bs.A;

    // Disc of the s-expansion: nearest other root of Δ_r.
    double s_rad = std::numeric_limits<double>::infinity();
    for (auto z : p_.roots) {
        const double dist = std::abs(z - bs.r_end);
        if (dist > 1e-9 * p_.r_plus) s_rad = std::min(s_rad, dist);
    }
    const double s_scale = 0.5 * s_rad;

    // ŵ(t) = t exp(g(s_scale t)), g(s) = A Σ_{j≥1} e_j s^j / j with 1/q = Σ e_j s^j.
    const ps::Series<double> einv = ps::reciprocal(q);
    ps::Series<double> g(n, 0.0);
    double pw = 1.0;
    for (std::size_t j = 1; j < n; ++j) {
        pw *= s_scale;
        g[j] = bs.A * einv[j] * pw / double(j);
    }
    const ps::Series<double> eg = ps::exp0(g);
    ps::Series<double> wt(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) wt[j] = eg[j - 1];
    const ps::Series<double> t = ps::revert(wt);

    const double G0 = -double(sign(e)) * bs.A * limit_const;
    bs.log_w_scale = G0 + std::log(s_scale);
    bs.w_scale = std::exp(bs.log_w_scale);

    bs.s.resize(n);
    for (std::size_t j = 0; j < n; ++j) bs.s[j] = s_scale * t[j];
    bs.s[0] = 0.0;

    auto compose_poly = [&](const std::vector<double>& poly) {
        std::vector<double> shifted = taylor_shift(poly, bs.r_end, sigma);
        return ps::compose(shifted, bs.s, n);
    };
    const double a2 = p_.a * p_.a;
    const std::vector<double> rpoly = {0.0, 1.0};
    const std::vector<double> r2a2 = {a2, 0.0, 1.0};
    const std::vector<double> dvec(dpoly.begin(), dpoly.end());
    bs.r = compose_poly(rpoly);
    bs.r[0] = bs.r_end;
    bs.delta = compose_poly(dvec);
    bs.delta[0] = 0.0;
    bs.r2a2 = compose_poly(r2a2);
    bs.r2a2sq = compose_poly(poly_mul(r2a2, r2a2));
    bs.r2delta = compose_poly(poly_mul({0.0, 0.0, 1.0}, dvec));
    bs.r2delta[0] = 0.0;

    bs.rho_hat = ps::convergence_radius(t);
    if (!(bs.rho_hat > 0.0)) {
        std::ostringstream os;
        os << "coefficient decay of r(w) at the " << (e == End::Plus ? "plus" : "minus")
           << " end did not stabilize with N_series=" << n_series_;
        throw SeriesDivergence(os.str());
    }
    bs.rho = bs.rho_hat * bs.w_scale;
    bs.x_threshold = bs.x_of_w_hat(0.5 * bs.rho_hat);
}

TortoiseMap build_tortoise(const BlackHoleParams& p, double r0, int n_series) { return TortoiseMap(p, r0, n_series); }

cplx omega_end(const BlackHoleParams& p, End e, cplx omega, int k) {
    const double r = e == End::Plus ? p.r_plus : p.r_minus;
    return (1.0 + p.alpha) * ((r * r + p.a * p.a) * omega - p.a * double(k));
}

PotentialSeries potential_series(const TortoiseMap& map, End e, cplx omega, cplx lambda, int k, int n) {
    const BoundarySeries& bs = map.series(e);
    if (n < 1 || std::size_t(n) > bs.r.size())
        throw InvalidParams("potential_series: N exceeds the stored series length");
    const BlackHoleParams& p = map.params();
    PotentialSeries out;
    out.end = e;
    out.omega = omega;
    out.lambda = lambda;
    out.k = k;
    out.m_field = p.m_field;
    out.omega_end = omega_end(p, e, omega, k);
    out.V.resize(n);
    const double opa2 = (1.0 + p.alpha) * (1.0 + p.alpha);
    const double m2 = p.m_field * p.m_field;
    const cplx two_ak_omega = 2.0 * p.a * double(k) * omega;
    const cplx omega2 = omega * omega;
    for (int j = 0; j < n; ++j) {
        out.V[j] = lambda * bs.delta[j] + m2 * bs.r2delta[j] -
                   opa2 * (omega2 * bs.r2a2sq[j] - two_ak_omega * bs.r2a2[j]);
    }
    out.V[0] = -out.omega_end * out.omega_end;
    return out;
}

cplx potential_at(const BlackHoleParams& p, double r, cplx omega, cplx lambda, int k) {
    const double d = delta_r_eval(p, r).value;
    const double r2a2 = r * r + p.a * p.a;
    const cplx w = (1.0 + p.alpha) * (r2a2 * omega - p.a * double(k));
    return lambda * d + p.m_field * p.m_field * r * r * d - w * w;
}

}  // namespace kds
