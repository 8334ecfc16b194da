#include "kds/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kds {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// log Γ(z) for Re z >= 1/2.
cplx lgamma_right(cplx z) {
    z -= 1.0;
    cplx acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) acc += kLanczos[i] / (z + double(i));
    const cplx t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

}  // namespace

cplx rgamma(cplx z) {
    constexpr double pi = std::numbers::pi;
    if (z.real() < 0.5) {
        // 1/Γ(z) = sin(πz) Γ(1-z) / π
        const cplx s = std::sin(pi * z);
        if (s == 0.0) return 0.0;
        return s * std::exp(lgamma_right(1.0 - z)) / pi;
    }
    return std::exp(-lgamma_right(z));
}

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        gl.weights[i] = gl.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

LegendreColumn normalized_legendre(int m, int count, double x) {
    LegendreColumn col;
    col.value.resize(count);
    col.sin2_deriv.resize(count);
    if (count == 0) return col;

    const double s2 = 1.0 - x * x;
    // P̄_m^m = sqrt((2m+1)/2 · (2m-1)!!^2 / (2m)!) (1-x^2)^{m/2}, built as a running product.
    double pmm = std::sqrt(0.5);
    for (int j = 1; j <= m; ++j) pmm *= std::sqrt((2.0 * j + 1.0) / (2.0 * j)) * std::sqrt(s2);
    if (m % 2 == 1) pmm = -pmm;

    double prev = 0.0;
    double cur = pmm;
    for (int i = 0; i < count; ++i) {
        const int l = m + i;
        if (i == 1) {
            prev = cur;
            cur = x * std::sqrt(2.0 * m + 3.0) * pmm;
        } else if (i >= 2) {
            const double ll = l, mm = m;
            const double al = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
            const double bl = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) * (2.0 * ll + 1.0) /
                                        ((2.0 * ll - 3.0) * (ll * ll - mm * mm)));
            const double next = al * x * cur - bl * prev;
            prev = cur;
            cur = next;
        }
        col.value[i] = cur;
    }
    for (int i = 0; i < count; ++i) {
        const int l = m + i;
        const double ll = l, mm = m;
        double d = -ll * x * col.value[i];
        if (i > 0) d += std::sqrt((2.0 * ll + 1.0) * (ll * ll - mm * mm) / (2.0 * ll - 1.0)) * col.value[i - 1];
        col.sin2_deriv[i] = d;
    }
    return col;
}

}  // namespace kds
