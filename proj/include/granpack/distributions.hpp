#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "granpack/errors.hpp"
#include "granpack/quadrature.hpp"
#include "granpack/rng.hpp"
#include "granpack/specfun.hpp"

namespace granpack {

namespace detail {
inline void require_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}
inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}
} // namespace detail

struct GammaParams {
    double shape; // alpha
    double scale; // lambda
    GammaParams(double a, double l) : shape(a), scale(l) {
        detail::require_finite_positive(a, "gamma shape");
        detail::require_finite_positive(l, "gamma scale");
    }
    double rate() const { return 1.0 / scale; }
};

struct LognormalParams {
    double mu;    // mean of log
    double sigma; // sd of log
    LognormalParams(double m, double s) : mu(m), sigma(s) {
        detail::require_finite(m, "lognormal mu");
        detail::require_finite_positive(s, "lognormal sigma");
    }
};

// Scale convention: density (a/l)(x/l)^{a-1} exp(-(x/l)^a).
struct WeibullParams {
    double shape; // alpha
    double scale; // lambda
    WeibullParams(double a, double l) : shape(a), scale(l) {
        detail::require_finite_positive(a, "weibull shape");
        detail::require_finite_positive(l, "weibull scale");
    }
};

// (pi, zeta, delta, mu) parametrization; derived (alpha, beta) accessors.
struct HyperbolicParams {
    double asym;  // pi
    double zeta;  // peakedness
    double delta; // scale
    double mu;    // location
    HyperbolicParams(double p, double z, double d, double m)
        : asym(p), zeta(z), delta(d), mu(m) {
        detail::require_finite(p, "hyperbolic asymmetry");
        detail::require_finite_positive(z, "hyperbolic zeta");
        detail::require_finite_positive(d, "hyperbolic delta");
        detail::require_finite(m, "hyperbolic mu");
    }
    double gamma_() const { return zeta / delta; }
    double beta() const { return asym * zeta / delta; }
    double alpha() const { return (zeta / delta) * std::sqrt(1.0 + asym * asym); }
};

// Alternative (alpha, beta, delta, mu) parametrization.
struct HyperbolicAlphaBeta {
    double alpha;
    double beta;
    double delta;
    double mu;
};

inline HyperbolicAlphaBeta to_alpha_beta(const HyperbolicParams& p) {
    return {p.alpha(), p.beta(), p.delta, p.mu};
}

inline HyperbolicParams from_alpha_beta(const HyperbolicAlphaBeta& p) {
    if (!(p.delta > 0.0)) throw DomainError("hyperbolic delta must be positive");
    if (!(std::fabs(p.beta) < p.alpha)) throw DomainError("hyperbolic requires |beta| < alpha");
    const double g = std::sqrt((p.alpha - p.beta) * (p.alpha + p.beta));
    return HyperbolicParams(p.beta / g, p.delta * g, p.delta, p.mu);
}

using SizeModel = std::variant<GammaParams, LognormalParams, WeibullParams, HyperbolicParams>;

inline const char* family_name(const SizeModel& m) {
    switch (m.index()) {
        case 0: return "gamma";
        case 1: return "lognormal";
        case 2: return "weibull";
        default: return "hyperbolic";
    }
}

namespace detail {

// Exponent of the hyperbolic density in standardized coordinates z=(x-mu)/delta:
// h(z) = zeta*(sqrt(1+pi^2)*sqrt(1+z^2) - pi*z), so log f = -h(z) - log normalizer.
inline double hyp_exponent(const HyperbolicParams& p, double z) {
    return p.zeta * (std::sqrt(1.0 + p.asym * p.asym) * std::hypot(1.0, z) - p.asym * z);
}

inline double hyp_exponent_slope(const HyperbolicParams& p, double z) {
    return p.zeta * (std::sqrt(1.0 + p.asym * p.asym) * z / std::hypot(1.0, z) - p.asym);
}

inline double hyp_log_norm(const HyperbolicParams& p) {
    return std::log(2.0 * p.delta * std::sqrt(1.0 + p.asym * p.asym)) + log_bessel_k(1, p.zeta);
}

} // namespace detail

inline double log_pdf(const GammaParams& p, double x) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return (p.shape - 1.0) * std::log(x) - x / p.scale - p.shape * std::log(p.scale) -
           gamma_ln(p.shape);
}

inline double log_pdf(const LognormalParams& p, double x) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    const double lx = std::log(x);
    const double t = (lx - p.mu) / p.sigma;
    return -0.5 * t * t - lx - std::log(p.sigma) - 0.5 * std::log(2.0 * pi_const);
}

inline double log_pdf(const WeibullParams& p, double x) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    const double z = x / p.scale;
    return std::log(p.shape / p.scale) + (p.shape - 1.0) * std::log(z) - std::pow(z, p.shape);
}

inline double log_pdf(const HyperbolicParams& p, double x) {
    const double z = (x - p.mu) / p.delta;
    return -detail::hyp_exponent(p, z) - detail::hyp_log_norm(p);
}

inline double log_pdf(const SizeModel& m, double x) {
    return std::visit([x](const auto& p) { return log_pdf(p, x); }, m);
}

template <class Params>
inline double pdf(const Params& p, double x) {
    const double lp = log_pdf(p, x);
    if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
    const double v = std::exp(lp);
    if (!std::isfinite(v)) throw NonFinite("pdf overflow");
    return v;
}

inline double pdf(const SizeModel& m, double x) {
    return std::visit([x](const auto& p) { return pdf(p, x); }, m);
}

inline double cdf(const GammaParams& p, double x) {
    if (!(x > 0.0)) return 0.0;
    return gamma_p(p.shape, x / p.scale);
}

inline double cdf(const LognormalParams& p, double x) {
    if (!(x > 0.0)) return 0.0;
    return 0.5 * std::erfc(-(std::log(x) - p.mu) / (p.sigma * std::sqrt(2.0)));
}

inline double cdf(const WeibullParams& p, double x) {
    if (!(x > 0.0)) return 0.0;
    return -std::expm1(-std::pow(x / p.scale, p.shape));
}

// Numerical CDF: integrate the density from a point L left of min(x, mode)
// where the tangent-line bound certifies the remaining tail mass < 1e-13.
inline double cdf(const HyperbolicParams& p, double x) {
    const double mode = p.mu + p.delta * p.asym;
    double lo = std::min(x, mode) - p.delta;
    double step = p.delta;
    for (;;) {
        const double z = (lo - p.mu) / p.delta;
        const double slope = -detail::hyp_exponent_slope(p, z) / p.delta; // d/dx log f, > 0 left of mode
        const double lf = log_pdf(p, lo);
        if (slope > 0.0 && lf - std::log(slope) < std::log(1e-13)) break;
        step *= 2.0;
        lo -= step;
        if (!std::isfinite(lo)) throw QuadratureFailure("hyperbolic cdf: tail cutoff search failed");
    }
    if (x <= lo) return 0.0;
    const double v = integrate([&p](double t) { return pdf(p, t); }, lo, x, 1e-10);
    return std::min(1.0, std::max(0.0, v));
}

inline double cdf(const SizeModel& m, double x) {
    return std::visit([x](const auto& p) { return cdf(p, x); }, m);
}

inline double mean(const GammaParams& p) { return p.shape * p.scale; }
inline double variance(const GammaParams& p) { return p.shape * p.scale * p.scale; }

inline double mean(const LognormalParams& p) {
    return std::exp(p.mu + 0.5 * p.sigma * p.sigma);
}
inline double variance(const LognormalParams& p) {
    const double s2 = p.sigma * p.sigma;
    return std::expm1(s2) * std::exp(2.0 * p.mu + s2);
}

inline double mean(const WeibullParams& p) {
    return p.scale * std::exp(gamma_ln(1.0 + 1.0 / p.shape));
}
inline double variance(const WeibullParams& p) {
    const double g1 = std::exp(gamma_ln(1.0 + 1.0 / p.shape));
    const double g2 = std::exp(gamma_ln(1.0 + 2.0 / p.shape));
    return p.scale * p.scale * (g2 - g1 * g1);
}

// Moments use Bessel ratios at zeta; scaled forms keep them stable for large zeta.
inline double mean(const HyperbolicParams& p) {
    const double r21 = bessel_k_scaled(2, p.zeta) / bessel_k_scaled(1, p.zeta);
    return p.mu + p.delta * p.asym * r21;
}
inline double variance(const HyperbolicParams& p) {
    const double k1 = bessel_k_scaled(1, p.zeta);
    const double r21 = bessel_k_scaled(2, p.zeta) / k1;
    const double r31 = bessel_k_scaled(3, p.zeta) / k1;
    return p.delta * p.delta * (r21 / p.zeta + p.asym * p.asym * (r31 - r21 * r21));
}

inline double mean(const SizeModel& m) {
    return std::visit([](const auto& p) { return mean(p); }, m);
}
inline double variance(const SizeModel& m) {
    return std::visit([](const auto& p) { return variance(p); }, m);
}

// Gamma and Weibull with shape < 1 have no interior mode; value 0 is reported
// with the boundary flag set instead of raising.
struct ModeResult {
    double value;
    bool boundary;
};

inline ModeResult mode(const GammaParams& p) {
    if (p.shape < 1.0) return {0.0, true};
    return {(p.shape - 1.0) * p.scale, false};
}
inline ModeResult mode(const LognormalParams& p) {
    return {std::exp(p.mu - p.sigma * p.sigma), false};
}
inline ModeResult mode(const WeibullParams& p) {
    if (p.shape < 1.0) return {0.0, true};
    return {p.scale * std::pow((p.shape - 1.0) / p.shape, 1.0 / p.shape), false};
}
inline ModeResult mode(const HyperbolicParams& p) {
    return {p.mu + p.delta * p.asym, false};
}
inline ModeResult mode(const SizeModel& m) {
    return std::visit([](const auto& p) { return mode(p); }, m);
}

namespace detail {

// Marsaglia-Tsang squeeze; shape < 1 boosted from shape + 1.
inline double draw_gamma(double shape, double scale, Rng& rng) {
    if (shape < 1.0) {
        const double u = rng.uniform01();
        return draw_gamma(shape + 1.0, scale, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

} // namespace detail

inline double sample_one(const GammaParams& p, Rng& rng) {
    return detail::draw_gamma(p.shape, p.scale, rng);
}

inline double sample_one(const LognormalParams& p, Rng& rng) {
    return std::exp(p.mu + p.sigma * rng.normal());
}

inline double sample_one(const WeibullParams& p, Rng& rng) {
    return p.scale * std::pow(-std::log(rng.uniform01()), 1.0 / p.shape);
}

namespace detail {

// Two-piece exponential envelope over the concave log-density: tangents at
// mode +/- one curvature width dominate it everywhere, meeting at z_c.
struct HypEnvelope {
    double z1, z2;   // tangent abscissae
    double s1, s2;   // tangent slopes, s1 > 0 > s2
    double l1, l2;   // exponent values -h at the tangent points
    double zc;       // crossing point
    double p_left;   // probability of proposing from the left piece

    explicit HypEnvelope(const HyperbolicParams& p) {
        const double w = std::sqrt((1.0 + p.asym * p.asym) / p.zeta);
        z1 = p.asym - w;
        z2 = p.asym + w;
        s1 = -hyp_exponent_slope(p, z1);
        s2 = -hyp_exponent_slope(p, z2);
        l1 = -hyp_exponent(p, z1);
        l2 = -hyp_exponent(p, z2);
        zc = (l2 - l1 + s1 * z1 - s2 * z2) / (s1 - s2);
        const double m1 = 1.0 / s1;
        const double m2 = 1.0 / (-s2);
        p_left = m1 / (m1 + m2);
    }

    double tangent(double z) const {
        return z < zc ? l1 + s1 * (z - z1) : l2 + s2 * (z - z2);
    }
};

} // namespace detail

inline double sample_one(const HyperbolicParams& p, Rng& rng) {
    const detail::HypEnvelope env(p);
    long long proposals = 0;
    for (;;) {
        ++proposals;
        double z;
        if (rng.uniform01() < env.p_left)
            z = env.zc - rng.exponential(env.s1);
        else
            z = env.zc + rng.exponential(-env.s2);
        const double log_accept = -detail::hyp_exponent(p, z) - env.tangent(z);
        if (std::log(rng.uniform01()) < log_accept) return p.mu + p.delta * z;
        if (proposals >= 20000)
            throw RejectionStall("hyperbolic sampler acceptance below 1e-4");
    }
}

inline double sample_one(const SizeModel& m, Rng& rng) {
    return std::visit([&rng](const auto& p) { return sample_one(p, rng); }, m);
}

template <class Model>
inline std::vector<double> sample(const Model& m, std::size_t n, Rng& rng) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(m, rng));
    return out;
}

} // namespace granpack
