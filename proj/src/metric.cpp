#include "kds/metric.hpp"

#include "kds/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace kds {

namespace {

using cplx = std::complex<double>;

std::array<double, 5> quartic(double M0, double Lambda, double a) {
    // (r²+a²)(1-Λr²/3) - 2M₀r = -Λ/3 r⁴ + (1-Λa²/3) r² - 2M₀ r + a²
    return {a * a, -2.0 * M0, 1.0 - Lambda * a * a / 3.0, 0.0, -Lambda / 3.0};
}

cplx poly_eval(const std::array<double, 5>& c, cplx r) {
    cplx acc = 0.0;
    for (int k = 4; k >= 0; --k) acc = acc * r + c[k];
    return acc;
}

cplx poly_deriv(const std::array<double, 5>& c, cplx r) {
    cplx acc = 0.0;
    for (int k = 4; k >= 1; --k) acc = acc * r + double(k) * c[k];
    return acc;
}

// Quintic smootherstep: 0 at t<=0, 1 at t>=1.
double smootherstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

}  // namespace

std::array<double, 5> delta_r_poly(const BlackHoleParams& p) { return quartic(p.M0, p.Lambda, p.a); }

DeltaR delta_r_eval(const BlackHoleParams& p, double r) {
    const double r2a2 = r * r + p.a * p.a;
    const double f = 1.0 - p.Lambda * r * r / 3.0;
    const double value = r2a2 * f - 2.0 * p.M0 * r;
    const double deriv = 2.0 * r * f - r2a2 * (2.0 * p.Lambda * r / 3.0) - 2.0 * p.M0;
    return {value, deriv};
}

cplx delta_r_complex(const BlackHoleParams& p, cplx r) { return poly_eval(delta_r_poly(p), r); }

BlackHoleParams derive_params(double M0, double Lambda, double a, double m_field) {
    if (!(M0 > 0.0) || !(Lambda > 0.0) || !(m_field >= 0.0) || !std::isfinite(a)) {
        std::ostringstream os;
        os << "require M0 > 0, Lambda > 0, m_field >= 0 (got M0=" << M0 << ", Lambda=" << Lambda
           << ", m_field=" << m_field << ")";
        throw InvalidParams(os.str());
    }
    BlackHoleParams p;
    p.M0 = M0;
    p.Lambda = Lambda;
    p.a = a;
    p.m_field = m_field;
    p.alpha = Lambda * a * a / 3.0;

    const auto c = quartic(M0, Lambda, a);
    // Companion matrix of the monic quartic.
    Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
    for (int i = 1; i < 4; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < 4; ++i) comp(i, 3) = -c[i] / c[4];
    Eigen::EigenSolver<Eigen::Matrix4d> es(comp, false);
    std::array<cplx, 4> roots;
    for (int i = 0; i < 4; ++i) {
        cplx z = es.eigenvalues()(i);
        for (int it = 0; it < 50; ++it) {
            const cplx d = poly_deriv(c, z);
            if (d == 0.0) break;
            const cplx step = poly_eval(c, z) / d;
            z -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
        }
        roots[i] = z;
    }
    std::sort(roots.begin(), roots.end(),
              [](cplx x, cplx y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); });
    p.roots = roots;

    double scale = 0.0;
    for (auto z : roots) scale = std::max(scale, std::abs(z));
    scale = std::max(scale, 1e-300);

    std::vector<double> real_roots;
    for (auto z : roots) {
        if (std::abs(z.imag()) <= 1e-10 * scale) {
            real_roots.push_back(z.real());
        } else if (z.real() > 0.0 && std::abs(z.imag()) < 1e-6 * scale) {
            throw DegenerateHorizon("near-double positive root of Delta_r at r=" + std::to_string(z.real()));
        }
    }
    std::sort(real_roots.begin(), real_roots.end());

    int found = 0;
    for (std::size_t i = 0; i + 1 < real_roots.size(); ++i) {
        const double lo = real_roots[i], hi = real_roots[i + 1];
        if (lo <= 0.0) continue;
        const double mid = 0.5 * (lo + hi);
        if (delta_r_eval(p, mid).value > 0.0) {
            p.r_minus = lo;
            p.r_plus = hi;
            ++found;
        }
    }
    if (found == 0) {
        std::ostringstream os;
        os << "no interval with Delta_r > 0 between positive roots (9*Lambda*M0^2 = " << 9.0 * Lambda * M0 * M0
           << ")";
        throw NoHorizonRegion(os.str());
    }
    if (found > 1) throw NoHorizonRegion("stationary region is not unique");

    const double tol = 1e-6 * p.r_plus;
    for (double rr : real_roots) {
        if (rr == p.r_minus || rr == p.r_plus) continue;
        if (std::abs(rr - p.r_minus) < tol || std::abs(rr - p.r_plus) < tol)
            throw DegenerateHorizon("another root of Delta_r lies within 1e-6 r_+ of a horizon");
    }
    if (p.r_plus - p.r_minus < tol) throw DegenerateHorizon("r_- and r_+ coincide");

    p.A_minus = delta_r_eval(p, p.r_minus).derivative;
    p.A_plus = -delta_r_eval(p, p.r_plus).derivative;
    if (!(p.A_minus > 0.0) || !(p.A_plus > 0.0)) throw DegenerateHorizon("vanishing surface gravity");
    return p;
}

std::vector<ErgoSlice> ergo_extent(const BlackHoleParams& p, int n_theta) {
    constexpr int kGrid = 2048;
    std::vector<ErgoSlice> out;
    const double a2 = p.a * p.a;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = n_theta == 1 ? 0.5 * std::numbers::pi : 0.5 * std::numbers::pi * i / (n_theta - 1);
        ErgoSlice slice{theta, {}};
        const double ct = std::cos(theta), st = std::sin(theta);
        const double rot = a2 * (1.0 + p.alpha * ct * ct) * st * st;
        auto g = [&](double r) { return delta_r_eval(p, r).value - rot; };
        if (rot > 0.0) {
            const double h = (p.r_plus - p.r_minus) / kGrid;
            auto refine = [&](double lo, double hi) {
                // g(lo) and g(hi) have opposite signs
                const bool lo_neg = g(lo) <= 0.0;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    ((g(mid) <= 0.0) == lo_neg ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            };
            // Samples at r_- + (j+1/2)h; the horizons themselves are always inside
            // the non-elliptic set when rot > 0 since Δ_r vanishes there.
            double start = p.r_minus;
            bool inside = true;
            double prev_r = p.r_minus;
            for (int j = 0; j < kGrid; ++j) {
                const double r = p.r_minus + (j + 0.5) * h;
                const bool neg = g(r) <= 0.0;
                if (inside && !neg) {
                    slice.intervals.emplace_back(start, refine(prev_r, r));
                    inside = false;
                } else if (!inside && neg) {
                    start = refine(prev_r, r);
                    inside = true;
                }
                prev_r = r;
            }
            // g(r_+) = -rot < 0, so a piece narrower than one cell may remain at r_+.
            if (!inside) start = refine(prev_r, p.r_plus);
            slice.intervals.emplace_back(start, p.r_plus);
        }
        out.push_back(std::move(slice));
    }
    return out;
}

KerrStarProfile::KerrStarProfile(const BlackHoleParams& p, double delta_r) : p_(p), delta_r_(delta_r) {
    const double width = p.r_plus - p.r_minus;
    if (!(delta_r > 0.0) || !(delta_r < 0.5 * width))
        throw InvalidParams("kerr_star_profile: need 0 < delta_r < (r_+ - r_-)/2");

    // Constant shift in the horizon correction; the slack equals (1+α)²(κ - a²) where
    // the blend is 1.
    double c = std::numeric_limits<double>::infinity();
    constexpr int kProbe = 512;
    for (int side = 0; side < 2; ++side) {
        for (int j = 1; j <= kProbe; ++j) {
            const double t = delta_r * j / kProbe;
            const double r = side == 0 ? p.r_minus + t : p.r_plus - t;
            const double r2a2 = r * r + p.a * p.a;
            c = std::min(c, r2a2 * r2a2 / delta_r_eval(p, r).value);
        }
    }
    kappa_ = p.a * p.a + 0.5 * c;

    constexpr int kSamples = 4096;
    r_.reserve(kSamples);
    c_slack_ = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= kSamples; ++j) {
        const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * j / (kSamples + 1)));
        const double r = p.r_minus + width * t;
        r_.push_back(r);
        ft_.push_back(F_t_prime(r));
        fphi_.push_back(F_phi_prime(r));
        c_slack_ = std::min(c_slack_, slack(r));
    }
}

double KerrStarProfile::blend(double r, int& side) const {
    if (r < 0.5 * (p_.r_minus + p_.r_plus)) {
        side = -1;
        return smootherstep((p_.r_minus + delta_r_ - r) / (0.5 * delta_r_));
    }
    side = +1;
    return smootherstep((r - (p_.r_plus - delta_r_)) / (0.5 * delta_r_));
}

double KerrStarProfile::F_t_prime(double r) const {
    int side = 0;
    const double s = blend(r, side);
    if (s == 0.0) return 0.0;
    const double r2a2 = r * r + p_.a * p_.a;
    const double d = delta_r_eval(p_, r).value;
    const double arg = 1.0 - kappa_ * d / (r2a2 * r2a2);
    if (arg <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return side * s * (1.0 + p_.alpha) * r2a2 / d * std::sqrt(arg);
}

double KerrStarProfile::F_phi_prime(double r) const {
    int side = 0;
    const double s = blend(r, side);
    if (s == 0.0) return 0.0;
    return side * s * (1.0 + p_.alpha) * p_.a / delta_r_eval(p_, r).value;
}

double KerrStarProfile::slack(double r) const {
    const double r2a2 = r * r + p_.a * p_.a;
    const double d = delta_r_eval(p_, r).value;
    const double ft = F_t_prime(r);
    const double opa2 = (1.0 + p_.alpha) * (1.0 + p_.alpha);
    return opa2 * r2a2 * r2a2 / d - d * ft * ft - opa2 * p_.a * p_.a;
}

KerrStarProfile kerr_star_profile(const BlackHoleParams& p, double delta_r) {
    KerrStarProfile prof(p, delta_r);
    if (!(prof.C_slack() > 0.0)) {
        std::ostringstream os;
        os << "third Kerr-star condition fails (min slack " << prof.C_slack() << ") for delta_r=" << delta_r
           << ", a=" << p.a;
        throw SlackViolated(os.str());
    }
    return prof;
}

}  // namespace kds
