#pragma once

#include <algorithm>
#include <cmath>

#include "granpack/distributions.hpp"

// Intervals that certifiably cover all but <= ~1e-12 of each family's mass,
// so quadrature of the density over them should return 1 within test tolerance.
namespace support {

struct Interval {
    double lo, hi;
};

inline Interval coverage(const granpack::GammaParams& p) {
    return {0.0, p.scale * (p.shape + 40.0 * std::sqrt(p.shape) + 60.0)};
}

inline Interval coverage(const granpack::LognormalParams& p) {
    return {0.0, std::exp(p.mu + 8.5 * p.sigma)};
}

inline Interval coverage(const granpack::WeibullParams& p) {
    return {0.0, p.scale * std::pow(-std::log(1e-14), 1.0 / p.shape)};
}

inline Interval coverage(const granpack::HyperbolicParams& p) {
    // Exponential tails: extend until the tangent-line bound f/|slope| is tiny.
    auto cut = [&p](double dir) {
        double x = p.mu + p.delta * (p.asym + dir);
        double step = p.delta;
        for (;;) {
            const double z = (x - p.mu) / p.delta;
            const double slope = -granpack::detail::hyp_exponent_slope(p, z) / p.delta;
            const double lf = granpack::log_pdf(p, x);
            if (dir * slope < 0.0 && lf - std::log(std::fabs(slope)) < std::log(1e-13))
                return x;
            step *= 2.0;
            x += dir * step;
        }
    };
    return {cut(-1.0), cut(+1.0)};
}

inline Interval coverage(const granpack::SizeModel& m) {
    return std::visit([](const auto& p) { return coverage(p); }, m);
}

} // namespace support
