#pragma once

// Truncated formal power series. A series is the coefficient vector
// c_0, c_1, ..., c_{N-1}; every operation truncates to the length of its
// first argument unless a length is given.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kds::ps {

template <class T>
using Series = std::vector<T>;

template <class T>
Series<T> mul(std::span<const T> a, std::span<const T> b, std::size_t n) {
    Series<T> out(n, T{});
    for (std::size_t i = 0; i < n && i < a.size(); ++i) {
        if (a[i] == T{}) continue;
        for (std::size_t j = 0; i + j < n && j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

template <class T>
Series<T> mul(const Series<T>& a, const Series<T>& b) {
    return mul<T>(std::span<const T>(a), std::span<const T>(b), a.size());
}

/// 1/a; requires a[0] != 0.
template <class T>
Series<T> reciprocal(const Series<T>& a) {
    const std::size_t n = a.size();
    Series<T> out(n, T{});
    out[0] = T(1) / a[0];
    for (std::size_t k = 1; k < n; ++k) {
        T acc{};
        for (std::size_t j = 1; j <= k; ++j) acc += a[j] * out[k - j];
        out[k] = -acc / a[0];
    }
    return out;
}

/// exp(a) for a with a[0] == 0 (the constant is ignored).
template <class T>
Series<T> exp0(const Series<T>& a) {
    const std::size_t n = a.size();
    Series<T> out(n, T{});
    out[0] = T(1);
    for (std::size_t k = 1; k < n; ++k) {
        T acc{};
        for (std::size_t j = 1; j <= k; ++j) acc += T(double(j)) * a[j] * out[k - j];
        out[k] = acc / T(double(k));
    }
    return out;
}

/// Derivative, same length (last coefficient zero).
template <class T>
Series<T> derivative(const Series<T>& a) {
    Series<T> out(a.size(), T{});
    for (std::size_t k = 1; k < a.size(); ++k) out[k - 1] = T(double(k)) * a[k];
    return out;
}

/// Composition f(g) for g[0] == 0, by Horner's scheme; result has length n.
template <class T>
Series<T> compose(const Series<T>& f, const Series<T>& g, std::size_t n) {
    Series<T> out(n, T{});
    for (std::size_t k = f.size(); k-- > 0;) {
        out = mul<T>(std::span<const T>(out), std::span<const T>(g), n);
        out[0] += f[k];
    }
    return out;
}

/// Polynomial p (coefficients in ascending order) applied to a series.
template <class T>
Series<T> poly_of(std::span<const double> p, const Series<T>& a) {
    Series<T> out(a.size(), T{});
    for (std::size_t k = p.size(); k-- > 0;) {
        out = mul(out, a);
        out[0] += T(p[k]);
    }
    return out;
}

/// Compositional inverse of f with f[0] == 0, f[1] != 0, computed by Newton
/// iteration s <- s - (f(s) - w) / f'(s) with the working order doubled each pass.
Series<double> revert(const Series<double>& f);

template <class T, class X>
auto evaluate(const Series<T>& a, X x) {
    using R = decltype(T{} * x);
    R acc{};
    for (std::size_t k = a.size(); k-- > 0;) acc = acc * x + a[k];
    return acc;
}

/// Radius of convergence from the geometric decay of the upper half of the
/// coefficients above the rounding floor. Returns a negative value when the
/// decay rates of neighbouring windows disagree by more than `rel_tol`.
double convergence_radius(std::span<const double> c, double rel_tol = 0.25);

}  // namespace kds::ps
