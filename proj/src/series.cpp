#include "kds/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace kds::ps {

Series<double> revert(const Series<double>& f) {
    const std::size_t n = f.size();
    Series<double> s(n, 0.0);
    if (n < 2) return s;
    s[1] = 1.0 / f[1];
    const Series<double> fp = derivative(f);

    std::size_t order = 2;
    while (true) {
        order = std::min(2 * order, n);
        for (int pass = 0; pass < (order == n ? 2 : 1); ++pass) {
            Series<double> sm(s.begin(), s.begin() + order);
            Series<double> fs = compose(f, sm, order);
            fs[1] -= 1.0;
            const Series<double> dfs = compose(fp, sm, order);
            const Series<double> corr = mul(fs, reciprocal(dfs));
            for (std::size_t k = 0; k < order; ++k) s[k] -= corr[k];
            s[0] = 0.0;
        }
        if (order == n) break;
    }
    return s;
}

namespace {

// Least-squares slope, against j, of the upper concave hull of log|c_j| over
// [lo, hi). The hull bridges the dips where oscillating coefficients change sign.
double decay_slope(std::span<const double> c, std::size_t lo, std::size_t hi) {
    std::vector<std::pair<double, double>> hull;
    for (std::size_t j = lo; j < hi; ++j) {
        if (c[j] == 0.0) continue;
        const std::pair<double, double> q{double(j), std::log(std::abs(c[j]))};
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            if ((b.first - a.first) * (q.second - a.second) - (b.second - a.second) * (q.first - a.first) >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(q);
    }
    if (hull.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    std::size_t seg = 0;
    for (double x = hull.front().first; x <= hull.back().first; x += 1.0) {
        while (seg + 2 < hull.size() && x > hull[seg + 1].first) ++seg;
        const auto& a = hull[seg];
        const auto& b = hull[seg + 1];
        const double y = a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 3) return std::numeric_limits<double>::quiet_NaN();
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

}  // namespace

double convergence_radius(std::span<const double> c, double rel_tol) {
    // Coefficients that have decayed to rounding level carry no information;
    // fit only up to the last one above 1e-15 of the running maximum.
    std::size_t n = c.size();
    double peak = 0.0;
    std::size_t last = 0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        peak = std::max(peak, std::abs(c[j]));
        if (std::abs(c[j]) > 1e-15 * peak) last = j;
    }
    n = std::min(n, last + 1);
    if (n < 16) return -1.0;
    const double full = decay_slope(c, n / 2, n);
    if (!std::isfinite(full)) return -1.0;
    const double r_full = std::exp(-full);
    auto agree = [&](std::size_t a, std::size_t m, std::size_t b) {
        const double s1 = decay_slope(c, a, m), s2 = decay_slope(c, m, b);
        return std::isfinite(s1) && std::isfinite(s2) && std::abs(std::exp(-s1) - std::exp(-s2)) <= rel_tol * r_full;
    };
    // Quarters of the upper half, or for slow oscillation the two longer halves.
    if (!agree(n / 2, 3 * n / 4, n) && !agree(n / 4, n / 2, n)) return -1.0;
    return r_full;
}

}  // namespace kds::ps
