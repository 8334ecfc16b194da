#pragma once

#include <complex>
#include <vector>

namespace kds {

using cplx = std::complex<double>;

/// Reciprocal gamma function 1/Γ(z), entire in z. Lanczos approximation
/// (g = 7, 9 terms) with reflection for Re z < 1/2; relative accuracy ~1e-14.
cplx rgamma(cplx z);

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

/// Orthonormal associated Legendre functions of fixed order m >= 0 at x,
/// normalized so that ∫_{-1}^{1} P̄_l^m(x)^2 dx = 1, for l = m .. m+count-1.
/// `value[i]` holds P̄_{m+i}^m(x) and `sin2_deriv[i]` holds (1-x^2) dP̄/dx.
struct LegendreColumn {
    std::vector<double> value;
    std::vector<double> sin2_deriv;
};
LegendreColumn normalized_legendre(int m, int count, double x);

}  // namespace kds
