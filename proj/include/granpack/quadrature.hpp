#pragma once

#include <cmath>
#include <concepts>

#include "granpack/errors.hpp"

namespace granpack {

namespace detail {

// Gauss-Kronrod 15(7) abscissae and weights on [-1,1].
inline constexpr double gk15_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
void gk15_panel(F&& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * gk15_nodes[i]);
        fv[14 - i] = f(c + h * gk15_nodes[i]);
    }
    fv[7] = f(c);
    double resk = gk15_wk[7] * fv[7];
    double resg = gk15_wg[3] * fv[7];
    for (int i = 0; i < 7; ++i) resk += gk15_wk[i] * (fv[i] + fv[14 - i]);
    for (int i = 0; i < 3; ++i) resg += gk15_wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    kronrod = resk * h;
    err = std::fabs((resk - resg) * h);
}

template <typename F>
double integrate_rec(F&& f, double a, double b, double tol, int depth) {
    double val, err;
    gk15_panel(f, a, b, val, err);
    if (err <= tol || !(b - a > 0.0)) return val;
    if (depth <= 0)
        throw QuadratureFailure("adaptive quadrature: tolerance not met");
    const double c = 0.5 * (a + b);
    return integrate_rec(f, a, c, 0.5 * tol, depth - 1) +
           integrate_rec(f, c, b, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a,b] to absolute tolerance.
template <typename F>
    requires std::invocable<F&, double>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, abs_tol);
    return detail::integrate_rec(f, a, b, abs_tol, 48);
}

} // namespace granpack
