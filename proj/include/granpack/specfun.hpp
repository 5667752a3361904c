#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "granpack/errors.hpp"

namespace granpack {

inline constexpr double pi_const = 3.14159265358979323846;

// log Gamma(x), x > 0. Lanczos-type 14-term approximation, ~1e-15 relative.
inline double gamma_ln(double x) {
    static const double cof[14] = {
        57.1562356658629235,     -59.5979603554754912,
        14.1360979747417471,     -0.491913816097620199,
        0.339946499848118887e-4, 0.465236289270485756e-4,
        -0.983744753048795646e-4, 0.158088703224912494e-3,
        -0.210264441724104883e-3, 0.217439618115212643e-3,
        -0.164318106536763890e-3, 0.844182239838527433e-4,
        -0.261908384015814087e-4, 0.368991826595316234e-5};
    if (!(x > 0.0))
        throw DomainError("gamma_ln: argument must be positive, got " + std::to_string(x));
    double y = x;
    double tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    double ser = 0.999999999999997092;
    for (int j = 0; j < 14; j++) ser += cof[j] / ++y;
    return tmp + std::log(2.5066282746310005 * ser / x);
}

// Digamma psi(x), x > 0. Recurrence below 6, asymptotic expansion above.
inline double digamma(double x) {
    if (!(x > 0.0))
        throw DomainError("digamma: argument must be positive");
    double result = 0.0;
    while (x < 8.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv
              - inv2 * (1.0 / 12.0 -
                        inv2 * (1.0 / 120.0 -
                                inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    return result;
}

// Trigamma psi'(x), x > 0.
inline double trigamma(double x) {
    if (!(x > 0.0))
        throw DomainError("trigamma: argument must be positive");
    double result = 0.0;
    while (x < 8.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    result += inv * (1.0 +
                     inv * (0.5 +
                            inv * (1.0 / 6.0 -
                                   inv2 * (1.0 / 30.0 -
                                           inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0))))));
    return result;
}

namespace detail {

// Series expansion of P(a,x), valid and fast for x < a+1.
inline double gamma_p_series(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 10000; ++n) {
        ++ap;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * eps)
            return sum * std::exp(-x + a * std::log(x) - gamma_ln(a));
    }
    throw NonConvergence("incomplete gamma series did not converge");
}

// Continued fraction for Q(a,x), modified Lentz, valid for x >= a+1.
inline double gamma_q_cf(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps)
            return std::exp(-x + a * std::log(x) - gamma_ln(a)) * h;
    }
    throw NonConvergence("incomplete gamma continued fraction did not converge");
}

} // namespace detail

// Regularized lower incomplete gamma P(a,x) = gamma(a,x)/Gamma(a).
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("gamma_p: requires a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw DomainError("gamma_q: requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

namespace detail {

// Scaled K0, K1: returns e^x * K_nu(x). Power series below x = 2,
// Thompson-Barnett continued fraction above.
inline void bessel_k01_scaled(double x, double& k0s, double& k1s) {
    if (x <= 2.0) {
        // I0, I1 and the companion log series; all terms positive, no
        // cancellation, converges in < 25 terms for x <= 2.
        const double t = 0.25 * x * x;
        const double lg = std::log(0.5 * x);
        const double eulergamma = 0.5772156649015328606;

        double term = 1.0, i0 = 1.0, s0 = 0.0, hk = 0.0;
        for (int k = 1; k < 60; ++k) {
            term *= t / (static_cast<double>(k) * k);
            hk += 1.0 / k;
            i0 += term;
            s0 += term * hk;
            if (term < 1e-18 * i0) break;
        }
        const double k0 = -(lg + eulergamma) * i0 + s0;

        double term1 = 0.5 * x, i1 = term1, s1 = term1 * (1.0 - 2.0 * eulergamma);
        double psum = 1.0 - 2.0 * eulergamma; // psi(k+1)+psi(k+2) at k=0
        double tk = term1;
        for (int k = 1; k < 60; ++k) {
            tk *= t / (static_cast<double>(k) * (k + 1.0));
            psum += 1.0 / k + 1.0 / (k + 1.0);
            i1 += tk;
            s1 += tk * psum;
            if (tk < 1e-18 * i1) break;
        }
        const double k1 = 1.0 / x + lg * i1 - 0.5 * s1;

        const double ex = std::exp(x);
        k0s = k0 * ex;
        k1s = k1 * ex;
        return;
    }

    // CF2 (Steed's method as organized by Thompson & Barnett) at order 0.
    const double eps = std::numeric_limits<double>::epsilon();
    const double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    bool ok = false;
    for (int i = 1; i < 10000; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) <= eps) {
            ok = true;
            break;
        }
    }
    if (!ok) throw NonConvergence("bessel_k: continued fraction did not converge");
    h = a1 * h;
    k0s = std::sqrt(3.141592653589793238 / (2.0 * x)) / s;
    k1s = k0s * (x + 0.5 - h) / x;
}

} // namespace detail

// e^x * K_n(x) for integer order n >= 0; upward recurrence is stable for K.
inline double bessel_k_scaled(int order, double x) {
    if (!(x > 0.0))
        throw DomainError("bessel_k: requires x > 0");
    if (order < 0) order = -order; // K_{-n} = K_n
    double k0, k1;
    detail::bessel_k01_scaled(x, k0, k1);
    if (order == 0) return k0;
    if (order == 1) return k1;
    double km = k0, kc = k1;
    for (int n = 1; n < order; ++n) {
        const double kn = km + (2.0 * n / x) * kc;
        km = kc;
        kc = kn;
    }
    return kc;
}

// K_n(x); underflows to 0 for x beyond ~700, use the scaled or log form there.
inline double bessel_k(int order, double x) {
    return bessel_k_scaled(order, x) * std::exp(-x);
}

// log K_n(x), safe for large x.
inline double log_bessel_k(int order, double x) {
    return std::log(bessel_k_scaled(order, x)) - x;
}

} // namespace granpack
