#pragma once

// Reference values for modified Bessel functions of the second kind,
// computed from the integral representation
//
//     K_nu(x) = integral_0^inf exp(-x cosh t) cosh(nu t) dt
//
// by adaptive quadrature. This route shares no code with the power-series /
// continued-fraction evaluator under test. An asymptotic-expansion check for
// large arguments is provided as a second, series-free corroboration.

#include <cmath>

#include "granpack/quadrature.hpp"

namespace oracle {

// e^x * K_nu(x) via the integral representation; relative accuracy ~1e-13.
inline double bessel_k_scaled(int nu, double x) {
    const auto integrand = [nu, x](double t) {
        return std::exp(x * (1.0 - std::cosh(t))) * std::cosh(nu * t);
    };
    // Truncation point: x(cosh T - 1) - nu*T > 120 kills the tail.
    double T = 2.0;
    for (int it = 0; it < 64; ++it) {
        const double need = (120.0 + nu * T) / x + 1.0;
        const double Tn = std::acosh(need >= 1.0 ? need : 1.0) + 0.5;
        if (Tn <= T) break;
        T = Tn;
    }
    const double rough = granpack::integrate(integrand, 0.0, T, 1e-6);
    return granpack::integrate(integrand, 0.0, T, 1e-14 * std::max(1.0, rough));
}

inline double bessel_k(int nu, double x) {
    return bessel_k_scaled(nu, x) * std::exp(-x);
}

// Truncated asymptotic expansion, e^x sqrt(2x/pi) K_nu(x) ~ 1 + ... ;
// good to ~1e-10 for x >= 50 with four correction terms.
inline double bessel_k_asymptotic_scaled(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    const double e = 8.0 * x;
    double sum = 1.0;
    double term = 1.0;
    for (int k = 1; k <= 4; ++k) {
        term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * e);
        sum += term;
    }
    return std::sqrt(3.141592653589793238 / (2.0 * x)) * sum;
}

} // namespace oracle
