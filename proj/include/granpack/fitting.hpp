#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "granpack/distributions.hpp"
#include "granpack/errors.hpp"
#include "granpack/nelder_mead.hpp"
#include "granpack/specfun.hpp"

namespace granpack {

// Indices match the SizeModel variant order.
enum class Family { gamma = 0, lognormal = 1, weibull = 2, hyperbolic = 3 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::gamma: return "gamma";
        case Family::lognormal: return "lognormal";
        case Family::weibull: return "weibull";
        default: return "hyperbolic";
    }
}

inline Family family_of(const SizeModel& m) { return static_cast<Family>(m.index()); }

inline Family family_from_name(const std::string& name) {
    if (name == "gamma") return Family::gamma;
    if (name == "lognormal") return Family::lognormal;
    if (name == "weibull") return Family::weibull;
    if (name == "hyperbolic") return Family::hyperbolic;
    throw DomainError("unknown family name '" + name + "'");
}

inline int parameter_count(Family f) { return f == Family::hyperbolic ? 4 : 2; }
inline int parameter_count(const SizeModel& m) { return parameter_count(family_of(m)); }

struct FitConfig {
    double tol = 1e-8;   // convergence threshold on parameter change
    int max_iter = 10000;
};

struct FitResult {
    SizeModel model{GammaParams(1.0, 1.0)}; // placeholder until assigned
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct GofResult {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 0.0;
    int bin_count = 0;
};

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

inline double neg_log_likelihood(const SizeModel& m, const std::vector<double>& xs) {
    if (xs.empty()) throw EmptySample("neg_log_likelihood: empty sample");
    if (const auto* hp = std::get_if<HyperbolicParams>(&m)) {
        // normalizer factored out so the Bessel evaluation happens once
        double acc = 0.0;
        for (double x : xs) acc += detail::hyp_exponent(*hp, (x - hp->mu) / hp->delta);
        return acc + static_cast<double>(xs.size()) * detail::hyp_log_norm(*hp);
    }
    double nll = 0.0;
    for (double x : xs) {
        const double lp = log_pdf(m, x);
        if (lp == -std::numeric_limits<double>::infinity())
            return std::numeric_limits<double>::infinity();
        nll -= lp;
    }
    return nll;
}

// Gradient of the negative log-likelihood in the parameter order of each
// struct: (shape, scale), (mu, sigma), (shape, scale), (asym, zeta, delta, mu).
inline std::vector<double> nll_gradient(const SizeModel& m, const std::vector<double>& xs) {
    if (xs.empty()) throw EmptySample("nll_gradient: empty sample");
    const double n = static_cast<double>(xs.size());
    if (const auto* g = std::get_if<GammaParams>(&m)) {
        double sum_log = 0.0, sum_x = 0.0;
        for (double x : xs) {
            sum_log += std::log(x);
            sum_x += x;
        }
        return {n * (std::log(g->scale) + digamma(g->shape)) - sum_log,
                n * g->shape / g->scale - sum_x / (g->scale * g->scale)};
    }
    if (const auto* l = std::get_if<LognormalParams>(&m)) {
        double d_mu = 0.0, d_sigma = 0.0;
        for (double x : xs) {
            const double t = (std::log(x) - l->mu) / l->sigma;
            d_mu -= t / l->sigma;
            d_sigma += (1.0 - t * t) / l->sigma;
        }
        return {d_mu, d_sigma};
    }
    if (const auto* w = std::get_if<WeibullParams>(&m)) {
        double d_a = 0.0, d_l = 0.0;
        for (double x : xs) {
            const double lz = std::log(x / w->scale);
            const double zk = std::pow(x / w->scale, w->shape);
            d_a += -1.0 / w->shape - lz + zk * lz;
            d_l += (w->shape / w->scale) * (1.0 - zk);
        }
        return {d_a, d_l};
    }
    const auto& h = std::get<HyperbolicParams>(m);
    const double root = std::sqrt(1.0 + h.asym * h.asym);
    const double k0 = bessel_k_scaled(0, h.zeta);
    const double k1 = bessel_k_scaled(1, h.zeta);
    const double k2 = bessel_k_scaled(2, h.zeta);
    const double dlogk1 = -(k0 + k2) / (2.0 * k1); // d/dzeta log K1
    double d_pi = n * h.asym / (1.0 + h.asym * h.asym);
    double d_zeta = n * dlogk1;
    double d_delta = n / h.delta;
    double d_mu = 0.0;
    for (double x : xs) {
        const double z = (x - h.mu) / h.delta;
        const double rz = std::hypot(1.0, z);
        const double slope = detail::hyp_exponent_slope(h, z); // d h / d z
        d_pi += h.zeta * (h.asym / root * rz - z);
        d_zeta += root * rz - h.asym * z;
        d_delta += slope * (-z / h.delta);
        d_mu += slope * (-1.0 / h.delta);
    }
    return {d_pi, d_zeta, d_delta, d_mu};
}

namespace detail {

struct SampleStats {
    double mean, var, skew, min;
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double m = 0.0, mn = xs[0];
    for (double x : xs) {
        m += x;
        mn = std::min(mn, x);
    }
    m /= n;
    double v = 0.0, s3 = 0.0;
    for (double x : xs) {
        const double d = x - m;
        v += d * d;
        s3 += d * d * d;
    }
    v /= n;
    s3 /= n;
    const double skew = v > 0.0 ? s3 / std::pow(v, 1.5) : 0.0;
    return {m, v, skew, mn};
}

inline void require_positive_sample(const std::vector<double>& xs, const char* family) {
    for (double x : xs)
        if (!(x > 0.0))
            throw DomainError(std::string(family) + " fit requires a strictly positive sample");
}

inline FitResult fit_lognormal(const std::vector<double>& xs, const FitConfig&) {
    require_positive_sample(xs, "lognormal");
    const double n = static_cast<double>(xs.size());
    double mu = 0.0;
    for (double x : xs) mu += std::log(x);
    mu /= n;
    double v = 0.0;
    for (double x : xs) {
        const double d = std::log(x) - mu;
        v += d * d;
    }
    v /= n;
    if (!(v > 0.0)) throw DegenerateSample("lognormal fit: zero variance of logs");
    FitResult r{LognormalParams(mu, std::sqrt(v)), 0.0, true, 0};
    r.log_likelihood = -neg_log_likelihood(r.model, xs);
    return r;
}

// Newton on u = log(shape) for log(a) - digamma(a) = s; scale profiles out.
inline FitResult fit_gamma(const std::vector<double>& xs, const FitConfig& cfg) {
    require_positive_sample(xs, "gamma");
    const double n = static_cast<double>(xs.size());
    double m = 0.0, ml = 0.0;
    for (double x : xs) {
        m += x;
        ml += std::log(x);
    }
    m /= n;
    ml /= n;
    const double s = std::log(m) - ml; // > 0 unless the sample is constant
    if (!(s > 0.0)) throw DegenerateSample("gamma fit: zero variance");
    double a = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    double u = std::log(a);
    int it = 0;
    bool ok = false;
    for (; it < cfg.max_iter; ++it) {
        a = std::exp(u);
        const double g = std::log(a) - digamma(a) - s;
        const double dgdu = 1.0 - a * trigamma(a); // < 0 for all a > 0
        const double du = -g / dgdu;
        u += std::clamp(du, -2.0, 2.0);
        if (std::fabs(du) < cfg.tol) {
            ok = true;
            ++it;
            break;
        }
    }
    a = std::exp(u);
    FitResult r{GammaParams(a, m / a), 0.0, ok, it};
    r.log_likelihood = -neg_log_likelihood(r.model, xs);
    return r;
}

// Newton on u = log(shape) for the profile equation; log-sum-exp keeps the
// x^k power sums finite for large shapes.
inline FitResult fit_weibull(const std::vector<double>& xs, const FitConfig& cfg) {
    require_positive_sample(xs, "weibull");
    const double n = static_cast<double>(xs.size());
    std::vector<double> ls(xs.size());
    double ml = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ls[i] = std::log(xs[i]);
        ml += ls[i];
    }
    ml /= n;
    double vl = 0.0;
    for (double l : ls) vl += (l - ml) * (l - ml);
    vl /= n;
    if (!(vl > 0.0)) throw DegenerateSample("weibull fit: zero variance");
    double k = 1.28255 / std::sqrt(vl); // Gumbel moment start
    double u = std::log(k);
    const double lmax = *std::max_element(ls.begin(), ls.end());
    int it = 0;
    bool ok = false;
    double A = 0.0, T = 0.0;
    for (; it < cfg.max_iter; ++it) {
        k = std::exp(u);
        A = k * lmax;
        T = 0.0;
        double s1 = 0.0, s2 = 0.0;
        for (double l : ls) {
            const double w = std::exp(k * l - A);
            T += w;
            s1 += w * l;
            s2 += w * l * l;
        }
        const double r1 = s1 / T;
        const double r2 = s2 / T;
        const double g = 1.0 / k + ml - r1;
        const double dgdu = k * (-1.0 / (k * k) - (r2 - r1 * r1));
        const double du = -g / dgdu;
        u += std::clamp(du, -1.5, 1.5);
        if (std::fabs(du) < cfg.tol) {
            ok = true;
            ++it;
            break;
        }
    }
    k = std::exp(u);
    A = k * lmax;
    T = 0.0;
    for (double l : ls) T += std::exp(k * l - A);
    const double lambda = std::exp((A + std::log(T) - std::log(n)) / k);
    FitResult r{WeibullParams(k, lambda), 0.0, ok, it};
    r.log_likelihood = -neg_log_likelihood(r.model, xs);
    return r;
}

} // namespace detail

// Heuristic start for the simplex: symmetric shape at unit peakedness with
// the scale matched to the sample variance, asymmetry seeded by the skew.
inline HyperbolicParams hyperbolic_moment_start(const std::vector<double>& xs) {
    const auto st = detail::sample_stats(xs);
    if (!(st.var > 0.0)) throw DegenerateSample("hyperbolic fit: zero variance");
    const double r21 = bessel_k_scaled(2, 1.0) / bessel_k_scaled(1, 1.0);
    const double asym = std::clamp(0.7 * st.skew, -2.0, 2.0);
    const double delta = std::sqrt(st.var / r21);
    const double mu = st.mean - delta * asym * r21;
    return HyperbolicParams(asym, 1.0, delta, mu);
}

namespace detail {

inline FitResult fit_hyperbolic(const std::vector<double>& xs, const FitConfig& cfg) {
    const auto start = hyperbolic_moment_start(xs);
    const double n = static_cast<double>(xs.size());
    auto objective = [&xs, n](const std::vector<double>& t) -> double {
        try {
            const HyperbolicParams p(t[0], std::exp(t[1]), std::exp(t[2]), t[3]);
            double acc = 0.0;
            for (double x : xs) acc += hyp_exponent(p, (x - p.mu) / p.delta);
            return acc + n * hyp_log_norm(p);
        } catch (const Error&) {
            return 1e300; // vertex outside the valid parameter region
        }
    };
    std::vector<double> x0 = {start.asym, std::log(start.zeta), std::log(start.delta), start.mu};
    const double sd = std::sqrt(sample_stats(xs).var);
    std::vector<double> steps = {0.5, 0.5, 0.5, 0.25 * sd};
    int iterations = 0;
    SimplexResult best;
    for (int round = 0; round < 3; ++round) {
        const auto r = nelder_mead(objective, x0, steps, cfg.tol,
                                   cfg.max_iter - iterations);
        iterations += r.iterations;
        best = r;
        x0 = r.x;
        for (double& s : steps) s *= 0.02; // polish rounds restart tighter
        steps[3] = 0.02 * sd;
        if (iterations >= cfg.max_iter) break;
    }
    FitResult res{HyperbolicParams(best.x[0], std::exp(best.x[1]), std::exp(best.x[2]),
                                   best.x[3]),
                  -best.fx, best.converged, iterations};
    return res;
}

inline FitResult fit_family(const std::vector<double>& xs, Family f, const FitConfig& cfg) {
    if (xs.size() < static_cast<std::size_t>(10 * parameter_count(f)))
        throw TooFewSamples("fit requires at least 10 samples per parameter");
    const auto st = sample_stats(xs);
    if (!(st.var > 0.0)) throw DegenerateSample("fit: constant sample");
    switch (f) {
        case Family::gamma: return fit_gamma(xs, cfg);
        case Family::lognormal: return fit_lognormal(xs, cfg);
        case Family::weibull: return fit_weibull(xs, cfg);
        default: return fit_hyperbolic(xs, cfg);
    }
}

} // namespace detail

// Throws NonConvergence when the iteration cap is exhausted. The lenient
// variant below keeps the best model found for reporting instead.
inline FitResult fit_mle(const std::vector<double>& xs, Family f, const FitConfig& cfg = {}) {
    auto r = detail::fit_family(xs, f, cfg);
    if (!r.converged) throw NonConvergence(std::string(family_name(f)) + " fit hit the iteration cap");
    return r;
}

inline FitResult try_fit_mle(const std::vector<double>& xs, Family f, const FitConfig& cfg = {}) {
    return detail::fit_family(xs, f, cfg);
}

// CDF inversion by bisection over an expanding bracket.
inline double quantile(const SizeModel& m, double q) {
    if (!(q > 0.0) || !(q < 1.0)) throw DomainError("quantile: q must lie in (0,1)");
    const double mu = mean(m);
    const double sd = std::sqrt(variance(m));
    double lo, hi;
    if (family_of(m) == Family::hyperbolic) {
        lo = mu - sd;
        hi = mu + sd;
        double step = sd;
        while (cdf(m, lo) > q) {
            step *= 2.0;
            lo -= step;
        }
        step = sd;
        while (cdf(m, hi) < q) {
            step *= 2.0;
            hi += step;
        }
    } else {
        lo = 0.0;
        hi = mu + sd;
        while (cdf(m, hi) < q) hi = hi * 2.0 + 1.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + std::fabs(lo) + std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(m, mid) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Equal-probability binning under the fitted model; expected count M/B >= 5
// by construction of the bin-count rule.
inline GofResult chi_square_gof(const std::vector<double>& xs, const SizeModel& m,
                                int bin_override = 0) {
    if (xs.size() < 50) throw TooFewSamples("chi-square test requires at least 50 samples");
    const double M = static_cast<double>(xs.size());
    int B = bin_override;
    if (B <= 0) {
        const double suggested = std::ceil(2.0 * std::pow(M, 0.4));
        B = static_cast<int>(std::min(std::ceil(M / 5.0), std::max(6.0, suggested)));
    }
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const double E = M / B;
    double stat = 0.0;
    std::size_t prev = 0;
    for (int j = 1; j <= B; ++j) {
        std::size_t upto = sorted.size();
        if (j < B) {
            const double edge = quantile(m, static_cast<double>(j) / B);
            upto = static_cast<std::size_t>(
                std::upper_bound(sorted.begin(), sorted.end(), edge) - sorted.begin());
        }
        const double O = static_cast<double>(upto - prev);
        stat += (O - E) * (O - E) / E;
        prev = upto;
    }
    GofResult g;
    g.statistic = stat;
    g.bin_count = B;
    g.degrees_of_freedom = std::max(1, B - 1 - parameter_count(m));
    g.p_value = gamma_q(0.5 * g.degrees_of_freedom, 0.5 * stat);
    return g;
}

// Exposed alongside the chi-square test; not used for model selection.
inline KsResult kolmogorov_smirnov(const std::vector<double>& xs, const SizeModel& m) {
    if (xs.empty()) throw EmptySample("kolmogorov_smirnov: empty sample");
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double F = cdf(m, sorted[i]);
        d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - F));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += 2.0 * sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return {d, std::min(1.0, std::max(0.0, p))};
}

struct Candidate {
    FitResult fit;
    GofResult gof;
};

enum class SelectionRule { highest_p, cost_tiebreak };

inline const char* rule_name(SelectionRule r) {
    return r == SelectionRule::highest_p ? "highest_p" : "cost_tiebreak";
}

struct ModelSelection {
    std::vector<Candidate> candidates;
    std::size_t chosen = 0;
    SelectionRule rule_applied = SelectionRule::highest_p;
};

// Cheapest-sampler ranking used to break p-value ties.
inline int selection_cost(Family f) {
    switch (f) {
        case Family::lognormal: return 0;
        case Family::weibull: return 1;
        case Family::gamma: return 2;
        default: return 3;
    }
}

inline ModelSelection select_best(std::vector<Candidate> candidates) {
    constexpr double tie_window = 1e-3;
    double pmax = -1.0;
    for (const auto& c : candidates)
        if (c.fit.converged) pmax = std::max(pmax, c.gof.p_value);
    if (pmax < 0.0) throw NoConvergedFit("no candidate fit converged");

    std::size_t chosen = candidates.size();
    int best_cost = std::numeric_limits<int>::max();
    std::size_t ties = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        if (!c.fit.converged || c.gof.p_value < pmax - tie_window) continue;
        ++ties;
        const int cost = selection_cost(family_of(c.fit.model));
        if (cost < best_cost) {
            best_cost = cost;
            chosen = i;
        }
    }
    ModelSelection sel;
    sel.candidates = std::move(candidates);
    sel.chosen = chosen;
    sel.rule_applied = ties > 1 ? SelectionRule::cost_tiebreak : SelectionRule::highest_p;
    return sel;
}

// Families with positive support are fitted on sample values shifted above
// zero; the shift is recorded so reports and downstream sampling can undo it.
struct ShiftedFit {
    FitResult fit;
    double ell_floor = 0.0;
};

inline ShiftedFit fit_on_log_sample(std::vector<double> ell, Family f, const FitConfig& cfg = {}) {
    if (f == Family::hyperbolic) return {try_fit_mle(ell, f, cfg), 0.0};
    const double floor = *std::min_element(ell.begin(), ell.end()) - 1e-6;
    for (double& v : ell) v -= floor;
    return {try_fit_mle(ell, f, cfg), floor};
}

} // namespace granpack
