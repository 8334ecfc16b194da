#include "kds/resonances.hpp"

#include "kds/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace kds {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxNewton = 30;
constexpr double kBoundaryFloor = 1e-12;
constexpr double kDedupDistance = 1e-6;

}  // namespace

Box Box::inflated(double factor) const {
    const cplx c = center();
    const double hw = 0.5 * factor * (re_max - re_min), hh = 0.5 * factor * (im_max - im_min);
    return {c.real() - hw, c.real() + hw, c.imag() - hh, c.imag() + hh};
}

ModeSolver::ModeSolver(const BlackHoleParams& p, int n_series)
    : p_(p), map_(build_tortoise(p, default_anchor(p), n_series)) {}

std::shared_ptr<const AngularOperator> ModeSolver::angular(int k, int n) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = ops_[{k, n}];
    if (!slot) slot = std::make_shared<const AngularOperator>(p_, k, n);
    return slot;
}

cplx ModeSolver::lambda(cplx omega, int k, int l) const {
    if (l < std::abs(k)) throw InvalidParams("mode requires l >= |k|");
    // Round the basis size up so nearby ω share one cached operator.
    int n = default_angular_size(p_, omega, k);
    n = std::max(n, 2 * (l - std::abs(k) + 4));
    n = (n + 7) / 8 * 8;
    const auto op = angular(k, n);
    const Eigen::MatrixXcd M = op->matrix(omega);
    const int idx = l - std::abs(k);

    // Rayleigh-quotient iteration for the complex-symmetric matrix (λ = vᵀMv / vᵀv).
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v(idx) = 1.0;
    cplx lam = M(idx, idx);
    bool ok = false;
    for (int it = 0; it < 20; ++it) {
        Eigen::MatrixXcd S = M;
        S.diagonal().array() -= lam;
        Eigen::VectorXcd y = S.partialPivLu().solve(v);
        if (!y.allFinite()) {
            ok = (M * v - lam * v).norm() <= 1e-12 * std::max(1.0, std::abs(lam));
            break;
        }
        v = y / y.norm();
        const cplx next = (v.transpose() * M * v)(0) / (v.transpose() * v)(0);
        const double step = std::abs(next - lam);
        lam = next;
        if (step <= 1e-14 * std::max(1.0, std::abs(lam))) {
            ok = true;
            break;
        }
    }
    // The iteration must land on the eigenvalue that carries this label.
    if (ok) {
        const double res = (M * v - lam * v).norm();
        int dominant = 0;
        v.cwiseAbs().maxCoeff(&dominant);
        ok = res <= 1e-10 * std::max(1.0, std::abs(lam)) && (dominant == idx || std::abs(p_.a * omega) > 0.5);
    }
    if (ok) return lam;
    return op->eigs(omega)[idx].lambda;
}

cplx ModeSolver::determinant(cplx omega, int k, int l) const {
    return wronskian(map_, omega, lambda(omega, k, l), k, false).W;
}

cplx ModeSolver::normalized_determinant(cplx omega, int k, int l) const {
    return wronskian(map_, omega, lambda(omega, k, l), k, false).normalized;
}

cplx mode_determinant(const BlackHoleParams& p, cplx omega, int k, int l) {
    return ModeSolver(p).determinant(omega, k, l);
}

Box seed_box(cplx seed) {
    const double hw = std::max(0.25, 0.1 * std::abs(seed));
    return {seed.real() - hw, seed.real() + hw, seed.imag() - hw, seed.imag() + hw};
}

RootResult refine_root(const std::function<cplx(cplx)>& f, cplx seed, double tol, const Box& box) {
    const Box outer = box.inflated(2.0);
    cplx z = seed;
    for (int it = 1; it <= kMaxNewton; ++it) {
        const double h = 1e-6 * (1.0 + std::abs(z));
        const cplx fz = f(z);
        if (fz == 0.0) return {z, it, 0.0};
        const cplx d = (f(z + h) - f(z - h)) / (2.0 * h);
        if (d == 0.0 || !std::isfinite(std::abs(d))) break;
        const cplx step = fz / d;
        z -= step;
        if (!outer.contains(z)) {
            std::ostringstream os;
            os << "Newton iterate " << z << " left the seed box around " << seed;
            throw EscapedBox(os.str());
        }
        if (std::abs(step) < tol) return {z, it, 0.0};
    }
    std::ostringstream os;
    os << "Newton from " << seed << " did not converge in " << kMaxNewton << " iterations";
    throw NoConvergence(os.str());
}

namespace {

double circle_residual(const std::function<cplx(cplx)>& f, cplx z) {
    const double fz = std::abs(f(z));
    double mx = 0.0;
    for (int j = 0; j < 8; ++j) mx = std::max(mx, std::abs(f(z + 1e-3 * std::polar(1.0, 2.0 * kPi * j / 8.0))));
    return mx > 0.0 ? fz / mx : 0.0;
}

}  // namespace

Resonance refine(const ModeSolver& solver, cplx seed, int k, int l, double tol) {
    auto D = [&](cplx w) { return solver.determinant(w, k, l); };
    const RootResult rr = refine_root(D, seed, tol, seed_box(seed));
    Resonance res;
    res.k = k;
    res.l = l;
    res.omega = rr.root;
    res.lambda = solver.lambda(rr.root, k, l);
    res.newton_iters = rr.iters;
    res.residual = circle_residual(D, rr.root);
    std::ostringstream os;
    os << "newton from " << seed.real() << (seed.imag() < 0 ? "-" : "+") << std::abs(seed.imag()) << "i";
    res.provenance = os.str();
    if (res.omega.imag() > 0.0 && std::abs(res.omega) > 1e-8)
        res.diagnostic = "upper-half-plane root (not accepted as a resonance)";
    if (!(res.residual < 1e-6)) {
        std::ostringstream msg;
        msg << "refined root " << res.omega << " fails the residual check (" << res.residual << ")";
        throw NoConvergence(msg.str());
    }
    return res;
}

Resonance refine(const BlackHoleParams& p, cplx seed, int k, int l, double tol) {
    return refine(ModeSolver(p), seed, k, l, tol);
}

ContourResult contour_count(const std::function<cplx(cplx)>& f, const Box& box, int n_contour, int max_halvings) {
    if (!box.valid()) throw InvalidParams("contour box must have positive width and height");
    const cplx corners[4] = {{box.re_min, box.im_min}, {box.re_max, box.im_min}, {box.re_max, box.im_max},
                             {box.re_min, box.im_max}};
    const double w = box.re_max - box.re_min, h = box.im_max - box.im_min;
    const double per = 2.0 * (w + h);

    ContourResult out;
    out.min_abs = INFINITY;
    double total = 0.0;
    cplx moment = 0.0;

    auto eval = [&](cplx z) {
        const cplx v = f(z);
        ++out.evaluations;
        const double av = std::abs(v);
        out.min_abs = std::min(out.min_abs, av);
        if (!(av > kBoundaryFloor) || !std::isfinite(av)) {
            std::ostringstream os;
            os << "|D| = " << av << " on the contour at " << z;
            throw BoundaryTooClose(os.str());
        }
        return v;
    };
    // Accumulates arg and the first moment along one segment, halving while the
    // phase step is too large to be unambiguous.
    std::function<void(cplx, cplx, cplx, cplx, int)> segment = [&](cplx z0, cplx f0, cplx z1, cplx f1, int depth) {
        const cplx ratio = f1 / f0;
        const double dphi = std::arg(ratio);
        if ((std::abs(dphi) > kPi / 4.0 || std::abs(std::log(std::abs(ratio))) > 1.0) && depth < max_halvings) {
            const cplx zm = 0.5 * (z0 + z1);
            const cplx fm = eval(zm);
            segment(z0, f0, zm, fm, depth + 1);
            segment(zm, fm, z1, f1, depth + 1);
            return;
        }
        total += dphi;
        moment += 0.5 * (z0 + z1) * cplx(std::log(std::abs(ratio)), dphi);
    };

    for (int s = 0; s < 4; ++s) {
        const cplx a = corners[s], b = corners[(s + 1) % 4];
        const double len = std::abs(b - a);
        const int m = std::max(4, int(std::ceil(n_contour * len / per)));
        cplx z0 = a, f0 = eval(a);
        for (int j = 1; j <= m; ++j) {
            const cplx z1 = a + (b - a) * (double(j) / m);
            const cplx f1 = eval(z1);
            segment(z0, f0, z1, f1, 0);
            z0 = z1;
            f0 = f1;
        }
    }
    out.winding_raw = total / (2.0 * kPi);
    out.winding = int(std::lround(out.winding_raw));
    out.first_moment = moment / (2.0 * kPi * cplx(0.0, 1.0));
    if (std::abs(out.winding_raw - out.winding) > 0.2) {
        std::ostringstream os;
        os << "winding number " << out.winding_raw << " is not close to an integer";
        throw BoundaryTooClose(os.str());
    }
    return out;
}

int count_zeros_box(const ModeSolver& solver, const Box& box, int k, int l, int n_contour) {
    auto D = [&](cplx w) { return solver.normalized_determinant(w, k, l); };
    return contour_count(D, box, n_contour).winding;
}

int count_zeros_box(const BlackHoleParams& p, const Box& box, int k, int l, int n_contour) {
    return count_zeros_box(ModeSolver(p), box, k, l, n_contour);
}

namespace {

struct CellJob {
    int k, l;
    Box cell;
};

struct CellOutcome {
    std::vector<Resonance> found;
    std::vector<ScanIssue> issues;
    int count = 0;
};

void process_cell(const ModeSolver& solver, int k, int l, const Box& cell, int depth, const ScanOptions& opt,
                  CellOutcome& out) {
    auto D = [&](cplx w) { return solver.normalized_determinant(w, k, l); };
    ContourResult cr;
    try {
        cr = contour_count(D, cell, opt.n_contour);
    } catch (const Error& e) {
        out.issues.push_back({k, l, cell, e.what()});
        return;
    }
    if (cr.winding <= 0) {
        if (cr.winding < 0) out.issues.push_back({k, l, cell, "negative winding number"});
        return;
    }
    if (cr.winding > 1 && depth < opt.max_depth) {
        const double rm = 0.5 * (cell.re_min + cell.re_max), im = 0.5 * (cell.im_min + cell.im_max);
        const Box quads[4] = {{cell.re_min, rm, cell.im_min, im},
                              {rm, cell.re_max, cell.im_min, im},
                              {cell.re_min, rm, im, cell.im_max},
                              {rm, cell.re_max, im, cell.im_max}};
        for (const Box& q : quads) process_cell(solver, k, l, q, depth + 1, opt, out);
        return;
    }
    out.count += cr.winding;
    if (cr.winding > 1) {
        std::ostringstream os;
        os << "unresolved cluster of " << cr.winding << " zeros at depth " << depth;
        out.issues.push_back({k, l, cell, os.str()});
        return;
    }
    try {
        // The normalized D is not holomorphic in modulus, so the root location
        // comes from the moment of the raw determinant.
        auto Draw = [&](cplx w) { return solver.determinant(w, k, l); };
        cplx seed = cell.center();
        try {
            const cplx m = contour_count(Draw, cell, opt.n_contour).first_moment;
            if (cell.contains(m)) seed = m;
        } catch (const Error&) {
        }
        const RootResult rr = refine_root(Draw, seed, opt.tol, cell);
        Resonance res;
        res.k = k;
        res.l = l;
        res.omega = rr.root;
        res.lambda = solver.lambda(rr.root, k, l);
        res.newton_iters = rr.iters;
        res.residual = circle_residual(Draw, rr.root);
        res.multiplicity_estimate = cr.winding;
        std::ostringstream os;
        os << "scan cell [" << cell.re_min << "," << cell.re_max << "]x[" << cell.im_min << "," << cell.im_max
           << "]i";
        res.provenance = os.str();
        if (res.omega.imag() > 0.0 && std::abs(res.omega) > 1e-8)
            res.diagnostic = "upper-half-plane root (not accepted as a resonance)";
        out.found.push_back(std::move(res));
    } catch (const Error& e) {
        out.issues.push_back({k, l, cell, e.what()});
    }
}

bool resonance_less(const Resonance& a, const Resonance& b) {
    if (a.k != b.k) return a.k < b.k;
    if (a.l != b.l) return a.l < b.l;
    if (a.omega.real() != b.omega.real()) return a.omega.real() < b.omega.real();
    return a.omega.imag() < b.omega.imag();
}

}  // namespace

ScanResult scan(const ModeSolver& solver, const Box& box, std::pair<int, int> k_range, std::pair<int, int> l_range,
                const ScanOptions& opt) {
    if (!box.valid()) throw InvalidParams("scan box must have positive width and height");
    std::vector<CellJob> jobs;
    const int nr = std::max(1, opt.n_re), ni = std::max(1, opt.n_im);
    const double dw = (box.re_max - box.re_min) / nr, dh = (box.im_max - box.im_min) / ni;
    for (int k = k_range.first; k <= k_range.second; ++k) {
        for (int l = std::max(l_range.first, std::abs(k)); l <= l_range.second; ++l) {
            for (int i = 0; i < nr; ++i)
                for (int j = 0; j < ni; ++j)
                    jobs.push_back({k, l,
                                    {box.re_min + i * dw, box.re_min + (i + 1) * dw, box.im_min + j * dh,
                                     box.im_min + (j + 1) * dh}});
        }
    }
    std::vector<CellOutcome> outcomes(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
            process_cell(solver, jobs[i].k, jobs[i].l, jobs[i].cell, 0, opt, outcomes[i]);
    };
    const int nw = std::max(1, std::min<int>(opt.workers, int(jobs.size())));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ScanResult result;
    std::vector<Resonance> all;
    for (auto& o : outcomes) {
        result.total_count += o.count;
        for (auto& r : o.found) all.push_back(std::move(r));
        for (auto& s : o.issues) result.issues.push_back(std::move(s));
    }
    std::sort(all.begin(), all.end(), resonance_less);
    for (auto& r : all) {
        auto dup = std::find_if(result.resonances.begin(), result.resonances.end(), [&](const Resonance& q) {
            return std::abs(q.omega - r.omega) < kDedupDistance;
        });
        if (dup == result.resonances.end()) {
            result.resonances.push_back(std::move(r));
        } else if (dup->k != r.k || dup->l != r.l) {
            if (std::find(dup->also.begin(), dup->also.end(), std::make_pair(r.k, r.l)) == dup->also.end())
                dup->also.emplace_back(r.k, r.l);
        }
    }
    return result;
}

std::vector<WkbSeed> sds_wkb_seeds(const BlackHoleParams& p, int l_max, int n_max) {
    if (p.a != 0.0) throw InvalidParams("WKB seeds are defined for a = 0 only");
    auto F = [&](double r) { return delta_r_eval(p, r).value / (r * r * r * r); };
    const auto top = boost::math::tools::brent_find_minima([&](double r) { return -F(r); }, p.r_minus, p.r_plus, 50);
    const double r0 = top.first;
    const double F0 = F(r0);
    const double h = 1e-4 * r0;
    const double F2 = (F(r0 + h) - 2.0 * F0 + F(r0 - h)) / (h * h);
    // Second derivative in dr* = r²dr/Δ_r at the critical point.
    const double g = delta_r_eval(p, r0).value / (r0 * r0);
    const double Fss = g * g * F2;
    std::vector<WkbSeed> out;
    for (int l = 1; l <= l_max; ++l) {
        const double lam = double(l) * (l + 1);
        for (int n = 0; n <= n_max; ++n) {
            WkbSeed s;
            s.l = l;
            s.n = n;
            s.omega = cplx(std::sqrt(lam * F0), -(n + 0.5) * std::sqrt(-Fss / (2.0 * F0)));
            std::ostringstream os;
            os << "wkb barrier-top l=" << l << " n=" << n << " r0=" << r0 << " (heuristic)";
            s.provenance = os.str();
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::string to_string(TrappingCase c) {
    switch (c) {
        case TrappingCase::BelowBarrier: return "below-barrier";
        case TrappingCase::NontrappingMonotone: return "nontrapping-monotone";
        case TrappingCase::HyperbolicMaximum: return "hyperbolic-maximum";
    }
    return "unknown";
}

namespace {

struct Interval {
    std::size_t lo, hi;  // inclusive grid indices
};

std::vector<Interval> runs(const std::vector<char>& mask) {
    std::vector<Interval> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        std::size_t j = i;
        while (j + 1 < mask.size() && mask[j + 1]) ++j;
        out.push_back({i, j});
        i = j;
    }
    return out;
}

}  // namespace

TrappingReport classify_trapping(const TortoiseMap& map, double lambda_tilde, double k_tilde) {
    const BlackHoleParams& p = map.params();
    const double c = (1.0 + p.alpha) * (1.0 + p.alpha);
    const double a2 = p.a * p.a;
    auto V = [&](double r) {
        const double q = r * r + a2 - p.a * k_tilde;
        return lambda_tilde * delta_r_eval(p, r).value - c * q * q;
    };
    // x-derivatives through d/dx = Δ_r d/dr.
    auto V1 = [&](double r) {
        const auto d = delta_r_eval(p, r);
        const double q = r * r + a2 - p.a * k_tilde;
        return d.value * (lambda_tilde * d.derivative - 4.0 * c * r * q);
    };
    auto V2 = [&](double r) {
        const auto d = delta_r_eval(p, r);
        const double q = r * r + a2 - p.a * k_tilde;
        const double d2 = -4.0 * p.Lambda * r * r + 2.0 * (1.0 - p.Lambda * a2 / 3.0);
        const double vr = lambda_tilde * d.derivative - 4.0 * c * r * q;
        const double vrr = lambda_tilde * d2 - 4.0 * c * q - 8.0 * c * r * r;
        return d.value * (d.derivative * vr + d.value * vrr);
    };

    constexpr int kGrid = 4000;
    std::vector<double> r(kGrid), v(kGrid);
    const double width = p.r_plus - p.r_minus;
    for (int i = 0; i < kGrid; ++i) {
        r[i] = p.r_minus + width * 0.5 * (1.0 - std::cos(kPi * (i + 1) / (kGrid + 1)));
        v[i] = V(r[i]);
    }
    TrappingReport rep;
    rep.lambda_tilde = lambda_tilde;
    rep.k_tilde = k_tilde;
    double vmax = -INFINITY, vabs = 0.0;
    std::size_t imax = 0;
    for (int i = 0; i < kGrid; ++i) {
        vabs = std::max(vabs, std::abs(v[i]));
        if (v[i] > vmax) {
            vmax = v[i];
            imax = std::size_t(i);
        }
    }
    // δ_V starts at 1e-3 max|Ṽ₀| and is halved until one case holds; the
    // x-curvature near the rim of a wide {Ṽ₀ ≥ -δ_V} set can change sign.
    double dV = 1e-3 * vabs;

    // Endpoint of {V ≷ level} between grid points, mapped to x.
    auto crossing = [&](std::size_t i, std::size_t j, double level) {
        double lo = r[i], hi = r[j];
        const bool lo_above = V(lo) > level;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((V(mid) > level) == lo_above ? lo : hi) = mid;
        }
        return map.x_of_r(0.5 * (lo + hi));
    };
    auto fill_top = [&]() {
        const auto res = boost::math::tools::brent_find_minima([&](double rr) { return -V(rr); },
                                                               r[imax > 0 ? imax - 1 : 0],
                                                               r[std::min<std::size_t>(imax + 1, kGrid - 1)], 50);
        rep.r0 = res.first;
        rep.x0 = map.x_of_r(rep.r0);
        rep.V0_top = V(rep.r0);
    };
    auto try_case3 = [&]() {
        std::vector<char> mask(kGrid);
        for (int i = 0; i < kGrid; ++i) mask[i] = v[i] >= -dV;
        const auto iv = runs(mask);
        if (iv.size() != 1 || iv[0].lo == 0 || iv[0].hi + 1 == std::size_t(kGrid)) return false;
        for (std::size_t i = iv[0].lo; i <= iv[0].hi; ++i)
            if (!(V2(r[i]) < 0.0)) return false;
        rep.kase = TrappingCase::HyperbolicMaximum;
        rep.x_markers = {crossing(iv[0].lo - 1, iv[0].lo, -dV), crossing(iv[0].hi, iv[0].hi + 1, -dV)};
        fill_top();
        return true;
    };
    auto try_case2 = [&]() {
        std::vector<char> mask(kGrid);
        for (int i = 0; i < kGrid; ++i) mask[i] = std::abs(v[i]) <= dV;
        const auto iv = runs(mask);
        if (iv.size() != 2) return false;
        if (iv[0].lo == 0 || iv[1].hi + 1 == std::size_t(kGrid)) return false;
        for (std::size_t i = iv[0].lo; i <= iv[0].hi; ++i)
            if (!(V1(r[i]) > 0.0)) return false;
        for (std::size_t i = iv[1].lo; i <= iv[1].hi; ++i)
            if (!(V1(r[i]) < 0.0)) return false;
        rep.kase = TrappingCase::NontrappingMonotone;
        rep.x_markers = {crossing(iv[0].lo - 1, iv[0].lo, -dV), crossing(iv[0].hi, iv[0].hi + 1, dV),
                         crossing(iv[1].lo - 1, iv[1].lo, dV), crossing(iv[1].hi, iv[1].hi + 1, -dV)};
        fill_top();
        return true;
    };

    for (int halving = 0; halving <= 24; ++halving, dV *= 0.5) {
        rep.delta_V = dV;
        if (vmax <= -dV) {
            rep.kase = TrappingCase::BelowBarrier;
            return rep;
        }
        if (vmax < dV) {
            if (try_case3()) return rep;
        } else if (try_case2() || try_case3()) {
            return rep;
        }
    }
    std::ostringstream os;
    os << "no case resolved at lambda_tilde=" << lambda_tilde << ", k_tilde=" << k_tilde << " (max V = " << vmax
       << ", delta_V = " << dV << ")";
    throw AmbiguousCase(os.str());
}

}  // namespace kds
