#include "kds/radial.hpp"

#include "kds/errors.hpp"
#include "kds/series.hpp"
#include "kds/special.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace kds {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 5>;  // r, Re u, Im u, Re u', Im u'

constexpr double kTailTol = 1e-12;
constexpr int kMatchHalvings = 8;
constexpr double kExceptionalWindow = 1e-6;
constexpr double kExceptionalOffset = 1e-4;

struct Core {
    std::vector<cplx> v;
    cplx omega_end, nu;
};

Core series_core(const TortoiseMap& map, End e, cplx omega, cplx lambda, int k, int n) {
    const PotentialSeries V = potential_series(map, e, omega, lambda, k, n);
    const double A = map.series(e).A;
    Core c;
    c.omega_end = V.omega_end;
    c.nu = 2.0 * cplx(0.0, 1.0) * c.omega_end / A;
    c.v.assign(n, 0.0);
    c.v[0] = rgamma(1.0 - c.nu);
    const cplx two_i_w = 2.0 * cplx(0.0, 1.0) * c.omega_end;
    for (int j = 1; j < n; ++j) {
        cplx acc = 0.0;
        for (int l = 1; l <= j; ++l) acc += V.V[l] * c.v[j - l];
        c.v[j] = -acc / (double(j) * A * (two_i_w - double(j) * A));
    }
    return c;
}

struct SeriesEval {
    cplx v, wdv;
    double tail;
};

SeriesEval eval_core(const std::vector<cplx>& v, cplx wh) {
    SeriesEval out{0.0, 0.0, 0.0};
    cplx pw = 1.0;
    double abs_sum = 0.0;
    double tail = 0.0;
    const std::size_t n = v.size();
    for (std::size_t j = 0; j < n; ++j) {
        const cplx term = v[j] * pw;
        out.v += term;
        out.wdv += double(j) * term;
        abs_sum += std::abs(term);
        if (j + 4 >= n) tail = std::max(tail, std::abs(term));
        pw *= wh;
    }
    out.tail = abs_sum > 0.0 ? tail / abs_sum : 0.0;
    return out;
}

// (u, u') from v at ŵ, including the oscillatory prefactor.
std::pair<cplx, cplx> assemble(End e, double A, cplx omega_end, const SeriesEval& se, double x) {
    const double sg = double(sign(e));
    const cplx I(0.0, 1.0);
    const cplx pref = std::exp(sg * I * omega_end * x);
    const cplx u = pref * se.v;
    const cplx du = sg * pref * (I * omega_end * se.v - A * se.wdv);
    return {u, du};
}

bool is_exceptional(cplx nu) {
    const double n0 = std::round(nu.real());
    return n0 >= 1.0 && std::abs(nu - n0) < kExceptionalWindow;
}

class RadialSystem {
public:
    RadialSystem(const BlackHoleParams& p, cplx omega, cplx lambda, int k)
        : p_(p), omega_(omega), lambda_(lambda), k_(k) {}
    void operator()(const State& y, State& dy, double) const {
        const double r = y[0];
        const cplx V = potential_at(p_, r, omega_, lambda_, k_);
        const cplx u(y[1], y[2]);
        const cplx vu = V * u;
        dy[0] = delta_r_eval(p_, r).value;
        dy[1] = y[3];
        dy[2] = y[4];
        dy[3] = vu.real();
        dy[4] = vu.imag();
    }

private:
    const BlackHoleParams& p_;
    cplx omega_, lambda_;
    int k_;
};

}  // namespace

RadialSolution outgoing_series(const TortoiseMap& map, End e, cplx omega, cplx lambda, int k, int n) {
    if (n < 0) n = map.n_series();
    const BoundarySeries& bs = map.series(e);
    const BlackHoleParams& p = map.params();

    RadialSolution sol;
    sol.end = e;
    sol.omega = omega;
    sol.lambda = lambda;
    sol.k = k;
    sol.omega_end = omega_end(p, e, omega, k);
    sol.nu = 2.0 * cplx(0.0, 1.0) * sol.omega_end / bs.A;
    sol.exceptional = is_exceptional(sol.nu);

    std::vector<Core> cores;
    if (!sol.exceptional) {
        cores.push_back(series_core(map, e, omega, lambda, k, n));
    } else {
        // Shift ω so that ν moves by ±δ; the holomorphic average is accurate to O(δ²).
        const double r = bs.r_end;
        const cplx d_omega = kExceptionalOffset * bs.A / (2.0 * cplx(0.0, 1.0) * (1.0 + p.alpha) * (r * r + p.a * p.a));
        cores.push_back(series_core(map, e, omega + d_omega, lambda, k, n));
        cores.push_back(series_core(map, e, omega - d_omega, lambda, k, n));
    }

    double wh = 0.5 * bs.rho_hat;
    for (int attempt = 0; attempt <= kMatchHalvings; ++attempt, wh *= 0.5) {
        const double x = bs.x_of_w_hat(wh);
        cplx u = 0.0, du = 0.0;
        double tail = 0.0;
        for (const Core& c : cores) {
            const SeriesEval se = eval_core(c.v, wh);
            const auto [uu, dd] = assemble(e, bs.A, c.omega_end, se, x);
            u += uu;
            du += dd;
            tail = std::max(tail, se.tail);
        }
        if (tail < kTailTol) {
            const double inv = 1.0 / double(cores.size());
            sol.x_match = x;
            sol.value = u * inv;
            sol.slope = du * inv;
            sol.tail_ratio = tail;
            sol.v_coeffs.assign(n, 0.0);
            for (const Core& c : cores)
                for (int j = 0; j < n; ++j) sol.v_coeffs[j] += c.v[j] * inv;
            return sol;
        }
    }
    std::ostringstream os;
    os << "outgoing series at the " << (e == End::Plus ? "plus" : "minus") << " end for omega=" << omega
       << ", lambda=" << lambda << " did not reach the tail bound with N=" << n;
    throw TailNotConverged(os.str());
}

std::pair<cplx, cplx> eval_series(const TortoiseMap& map, const RadialSolution& s, double x) {
    const BoundarySeries& bs = map.series(s.end);
    const SeriesEval se = eval_core(s.v_coeffs, bs.w_hat(x));
    // The averaged coefficients of the exceptional case carry the averaged ω_end only
    // to O(δ); the offset is small enough that this stays below 1e-8.
    return assemble(s.end, bs.A, s.omega_end, se, x);
}

namespace {

struct Integrated {
    cplx u, du;
    double r;
};

Integrated integrate_impl(const TortoiseMap& map, cplx omega, cplx lambda, int k, double x_a, double r_a,
                          double x_b, cplx u0, cplx du0, OdeStats* stats, double rel_tol) {
    if (x_a == x_b) return {u0, du0, r_a};
    double norm = std::max(std::abs(u0), std::abs(du0));
    if (norm == 0.0) norm = 1.0;
    double log_scale = std::log(norm);
    State y = {r_a, u0.real() / norm, u0.imag() / norm, du0.real() / norm, du0.imag() / norm};

    RadialSystem sys(map.params(), omega, lambda, k);
    auto stepper = odeint::make_controlled(rel_tol, rel_tol, odeint::runge_kutta_fehlberg78<State>());
    const double span = std::abs(x_b - x_a);
    const double dir = x_b > x_a ? 1.0 : -1.0;
    double t = x_a;
    double dt = dir * std::min(0.05, span);
    long steps = 0, rejected = 0;
    while (dir * (x_b - t) > 0.0) {
        if (dir * (t + dt - x_b) > 0.0) dt = x_b - t;
        const auto res = stepper.try_step(sys, y, t, dt);
        if (res == odeint::success) {
            ++steps;
            const double m = std::max({std::abs(y[1]), std::abs(y[2]), std::abs(y[3]), std::abs(y[4])});
            if (m > 1e100 || (m < 1e-100 && m > 0.0)) {
                for (int i = 1; i < 5; ++i) y[i] /= m;
                log_scale += std::log(m);
            }
        } else {
            ++rejected;
        }
        const bool underflow = res != odeint::success && std::abs(dt) < 1e-14 * std::max(1.0, span);
        if (underflow || steps + rejected > 2000000) {
            std::ostringstream os;
            os << "radial integration stalled at x=" << t << " (omega=" << omega << ", lambda=" << lambda << ")";
            throw ToleranceNotMet(os.str());
        }
    }
    if (stats) {
        stats->steps += steps;
        stats->rejected += rejected;
    }
    const double sc = std::exp(log_scale);
    return {cplx(y[1], y[2]) * sc, cplx(y[3], y[4]) * sc, y[0]};
}

}  // namespace

std::pair<cplx, cplx> integrate_radial_from(const TortoiseMap& map, cplx omega, cplx lambda, int k, double x_a,
                                            double r_a, double x_b, cplx u0, cplx du0, OdeStats* stats,
                                            double rel_tol) {
    const Integrated res = integrate_impl(map, omega, lambda, k, x_a, r_a, x_b, u0, du0, stats, rel_tol);
    return {res.u, res.du};
}

std::pair<cplx, cplx> integrate_radial(const TortoiseMap& map, cplx omega, cplx lambda, int k, double x_a,
                                       double x_b, cplx u0, cplx du0, OdeStats* stats, double rel_tol) {
    return integrate_radial_from(map, omega, lambda, k, x_a, map.r_of_x(x_a), x_b, u0, du0, stats, rel_tol);
}

namespace {

double r_at_match(const TortoiseMap& map, const RadialSolution& s) {
    const BoundarySeries& bs = map.series(s.end);
    return ps::evaluate(bs.r, bs.w_hat(s.x_match));
}

struct Carried {
    double x, r;
    cplx u, du;
};

// Advances a solution to x_b, carrying r along.
Carried advance(const TortoiseMap& map, const Carried& c, cplx omega, cplx lambda, int k, double x_b,
                OdeStats* stats) {
    if (c.x == x_b) return c;
    const Integrated res = integrate_impl(map, omega, lambda, k, c.x, c.r, x_b, c.u, c.du, stats, 1e-12);
    return {x_b, res.r, res.u, res.du};
}

cplx wr(cplx up, cplx dup, cplx um, cplx dum) { return up * dum - um * dup; }

}  // namespace

WronskianValue wronskian(const TortoiseMap& map, cplx omega, cplx lambda, int k, bool with_defect) {
    WronskianValue out;
    out.omega = omega;
    out.lambda = lambda;
    out.k = k;
    const RadialSolution sp = outgoing_series(map, End::Plus, omega, lambda, k);
    const RadialSolution sm = outgoing_series(map, End::Minus, omega, lambda, k);

    Carried cp{sp.x_match, r_at_match(map, sp), sp.value, sp.slope};
    Carried cm{sm.x_match, r_at_match(map, sm), sm.value, sm.slope};

    std::vector<double> probes;
    if (with_defect) {
        for (int i = 1; i <= 5; ++i) probes.push_back(sm.x_match + (sp.x_match - sm.x_match) * i / 6.0);
    }
    probes.push_back(0.0);
    std::sort(probes.begin(), probes.end());

    std::vector<Carried> plus_at(probes.size()), minus_at(probes.size());
    for (std::size_t i = probes.size(); i-- > 0;) {
        cp = advance(map, cp, omega, lambda, k, probes[i], &out.stats);
        plus_at[i] = cp;
    }
    for (std::size_t i = 0; i < probes.size(); ++i) {
        cm = advance(map, cm, omega, lambda, k, probes[i], &out.stats);
        minus_at[i] = cm;
    }
    const std::size_t mid = std::size_t(std::find(probes.begin(), probes.end(), 0.0) - probes.begin());
    const Carried& P = plus_at[mid];
    const Carried& M = minus_at[mid];
    out.W = wr(P.u, P.du, M.u, M.du);
    out.scale = std::abs(P.u * M.du) + std::abs(M.u * P.du);
    const double np = std::hypot(std::abs(P.u), std::abs(P.du));
    const double nm = std::hypot(std::abs(M.u), std::abs(M.du));
    out.normalized = out.W / (np * nm);
    out.u_plus = P.u;
    out.du_plus = P.du;
    out.u_minus = M.u;
    out.du_minus = M.du;

    out.constancy_defect = -1.0;
    if (with_defect) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const cplx Wi = wr(plus_at[i].u, plus_at[i].du, minus_at[i].u, minus_at[i].du);
            num = std::max(num, std::abs(Wi - out.W));
            den = std::max(den, std::abs(plus_at[i].u * minus_at[i].du) + std::abs(minus_at[i].u * plus_at[i].du));
        }
        out.constancy_defect = den > 0.0 ? num / den : 0.0;
    }
    return out;
}

cplx wronskian_derivative(const TortoiseMap& map, WronskianParam which, cplx omega, cplx lambda, int k) {
    const cplx p0 = which == WronskianParam::Omega ? omega : lambda;
    const double h = 1e-4 * (1.0 + std::abs(p0));
    auto W = [&](cplx p) {
        return which == WronskianParam::Omega ? wronskian(map, p, lambda, k, false).W
                                              : wronskian(map, omega, p, k, false).W;
    };
    auto central = [&](double step) { return (W(p0 + step) - W(p0 - step)) / (2.0 * step); };
    const cplx d1 = central(h);
    const cplx d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

std::vector<std::pair<cplx, cplx>> solution_on_grid(const TortoiseMap& map, End e, cplx omega, cplx lambda, int k,
                                                    const std::vector<double>& x_grid) {
    const RadialSolution s = outgoing_series(map, e, omega, lambda, k);
    std::vector<std::pair<cplx, cplx>> out(x_grid.size());
    Carried c{s.x_match, r_at_match(map, s), s.value, s.slope};
    const int sg = sign(e);
    auto visit = [&](std::size_t i) {
        const double x = x_grid[i];
        if (sg * (x - s.x_match) >= 0.0) {
            out[i] = eval_series(map, s, x);
            return;
        }
        c = advance(map, c, omega, lambda, k, x, nullptr);
        out[i] = {c.u, c.du};
    };
    if (e == End::Plus) {
        for (std::size_t i = x_grid.size(); i-- > 0;) visit(i);
    } else {
        for (std::size_t i = 0; i < x_grid.size(); ++i) visit(i);
    }
    return out;
}

namespace {

// ∫_{x_0}^{x_i} g for a uniform grid, fourth order.
std::vector<cplx> cumulative_integral(const std::vector<cplx>& g, double h) {
    const std::size_t n = g.size();
    std::vector<cplx> out(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cplx seg;
        if (i == 0) seg = 9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3];
        else if (i + 2 == n) seg = 9.0 * g[n - 1] + 19.0 * g[n - 2] - 5.0 * g[n - 3] + g[n - 4];
        else seg = -g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2];
        out[i + 1] = out[i] + seg * (h / 24.0);
    }
    return out;
}

}  // namespace

std::vector<cplx> radial_green(const TortoiseMap& map, cplx omega, cplx lambda, int k,
                               const std::vector<cplx>& f_samples, const std::vector<double>& x_grid) {
    const std::size_t n = x_grid.size();
    if (n < 4 || f_samples.size() != n) throw InvalidParams("radial_green: need at least 4 grid points matching f");
    const double h = (x_grid.back() - x_grid.front()) / double(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(x_grid[i] - x_grid[i - 1] - h) > 1e-9 * std::abs(h) || h <= 0.0)
            throw InvalidParams("radial_green: x_grid must be uniform and ascending");
    if (std::all_of(f_samples.begin(), f_samples.end(), [](cplx z) { return z == 0.0; }))
        return std::vector<cplx>(n, 0.0);

    const auto up = solution_on_grid(map, End::Plus, omega, lambda, k, x_grid);
    const auto um = solution_on_grid(map, End::Minus, omega, lambda, k, x_grid);
    const std::size_t mid = n / 2;
    const cplx W = wr(up[mid].first, up[mid].second, um[mid].first, um[mid].second);
    const double np = std::hypot(std::abs(up[mid].first), std::abs(up[mid].second));
    const double nm = std::hypot(std::abs(um[mid].first), std::abs(um[mid].second));
    if (!(std::abs(W) > 1e-10 * np * nm)) {
        std::ostringstream os;
        os << "Wronskian is negligible at omega=" << omega << ", lambda=" << lambda << " (|W|/scale="
           << std::abs(W) / (np * nm) << ")";
        throw NearResonance(os.str());
    }
    std::vector<cplx> gm(n), gp(n);
    for (std::size_t i = 0; i < n; ++i) {
        gm[i] = um[i].first * f_samples[i];
        gp[i] = up[i].first * f_samples[i];
    }
    const auto Im = cumulative_integral(gm, h);
    const auto Ip_cum = cumulative_integral(gp, h);
    std::vector<cplx> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx Ip = Ip_cum.back() - Ip_cum[i];
        u[i] = (up[i].first * Im[i] + um[i].first * Ip) / W;
    }
    return u;
}

NonresonanceReport real_axis_nonresonance_check(const TortoiseMap& map, double omega, int k, double lambda) {
    const BlackHoleParams& p = map.params();
    NonresonanceReport rep;
    rep.omega_product = (omega_end(p, End::Plus, omega, k) * omega_end(p, End::Minus, omega, k)).real();
    if (rep.omega_product <= 0.0) return rep;
    const WronskianValue w = wronskian(map, omega, lambda, k, false);
    rep.checked = true;
    rep.W_abs = std::abs(w.W);
    rep.margin = std::abs(w.normalized);
    return rep;
}

}  // namespace kds
