#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "granpack/distributions.hpp"
#include "granpack/errors.hpp"
#include "granpack/geometry.hpp"
#include "granpack/granulometry.hpp"
#include "granpack/grid_index.hpp"
#include "granpack/rng.hpp"
#include "granpack/specfun.hpp"

namespace granpack {

struct Particle {
    double x = 0.0;
    double y = 0.0;
    double r = 0.0;
};

enum class FitSpace { log_space, linear };

inline const char* fit_space_name(FitSpace s) {
    return s == FitSpace::log_space ? "log" : "linear";
}

inline FitSpace fit_space_from_name(const std::string& s) {
    if (s == "log") return FitSpace::log_space;
    if (s == "linear") return FitSpace::linear;
    throw DomainError("unknown fit space: " + s);
}

// Bridges a fitted size law to physical radii in mm. In log space the law
// describes shifted log-diameters, so R = (ref/2) * base^(ell_floor + L);
// in linear space it describes the radius directly.
struct RadiusModel {
    SizeModel size_model{GammaParams(1.0, 1.0)};
    FitSpace fit_space = FitSpace::log_space;
    double log_base = 2.718281828459045;
    double ref_diameter_mm = 0.001;
    double ell_floor = 0.0;

    double mean_r = 0.0;
    double var_r = 0.0;
    long long moment_sample_size = 0;
    bool moments_cached = false;
};

inline double sample_radius(const RadiusModel& m, Rng& rng) {
    const double draw = sample_one(m.size_model, rng);
    if (m.fit_space == FitSpace::linear) return draw;
    return 0.5 * m.ref_diameter_mm * std::pow(m.log_base, m.ell_floor + draw);
}

namespace detail {

// Streaming mean/variance of `count` radii produced by draw().
template <class DrawFn>
std::pair<double, double> monte_carlo_moments(DrawFn&& draw, long long count) {
    double mean = 0.0, m2 = 0.0;
    for (long long i = 0; i < count; ++i) {
        const double r = draw();
        if (!std::isfinite(r)) throw NonFiniteMoment("radius draw is not finite");
        const double delta = r - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (r - mean);
    }
    const double var = m2 / static_cast<double>(count);
    if (!std::isfinite(mean) || !std::isfinite(var))
        throw NonFiniteMoment("radius moments are not finite");
    return {mean, var};
}

} // namespace detail

inline constexpr long long radius_moment_draws = 1000000;

// E(R) and Var(R) in mm. Linear-space laws have closed forms; log-space laws
// are integrated by Monte Carlo with a fixed sample size so results are
// reproducible for a given rng state. The result is cached on the model.
inline std::pair<double, double> radius_moments(RadiusModel& m, Rng& rng) {
    if (m.moments_cached) return {m.mean_r, m.var_r};
    if (m.fit_space == FitSpace::linear) {
        m.mean_r = mean(m.size_model);
        m.var_r = variance(m.size_model);
        m.moment_sample_size = 0;
    } else {
        auto [e, v] = detail::monte_carlo_moments([&] { return sample_radius(m, rng); },
                                                  radius_moment_draws);
        m.mean_r = e;
        m.var_r = v;
        m.moment_sample_size = radius_moment_draws;
    }
    if (!std::isfinite(m.mean_r) || !std::isfinite(m.var_r) || m.mean_r <= 0.0)
        throw NonFiniteMoment("radius moments are not usable");
    m.moments_cached = true;
    return {m.mean_r, m.var_r};
}

struct CountEstimate {
    long long n = 0;
    bool domain_too_small = false;
};

// Expected particle count to reach porosity eta: solid area budget divided by
// the mean disk area pi*E(R^2). Rounded half up, never below 1.
inline CountEstimate estimate_particle_count(double domain_area, double eta, double mean_r,
                                             double var_r) {
    if (!(domain_area > 0.0)) throw DomainError("domain area must be positive");
    if (!(eta >= 0.0) || !(eta < 1.0)) throw DomainError("target porosity must lie in [0, 1)");
    if (!(mean_r > 0.0) || !(var_r >= 0.0)) throw DomainError("radius moments are not usable");
    const double budget = (1.0 - eta) * domain_area;
    const double raw = budget / (pi_const * (var_r + mean_r * mean_r));
    CountEstimate est;
    est.n = std::max<long long>(1, static_cast<long long>(std::floor(raw + 0.5)));
    est.domain_too_small = raw < 0.5 && pi_const * mean_r * mean_r > budget;
    return est;
}

// One inhibition step: up to j_max uniform candidate centers; the disk is
// committed at the first center where it lies inside W and overlaps nothing.
inline bool ssi_try_place(const Domain& w, GridIndex& grid, std::vector<Particle>& placed,
                          double r, long long j_max, Rng& rng, std::vector<int>& scratch) {
    for (long long j = 0; j < j_max; ++j) {
        const Vec2 c = w.sample_point(rng);
        if (!w.contains_disk(c.x, c.y, r)) continue;
        grid.neighbors(c.x, c.y, r, scratch);
        bool overlaps = false;
        for (int idx : scratch) {
            const Particle& p = placed[static_cast<std::size_t>(idx)];
            const double dx = p.x - c.x, dy = p.y - c.y;
            const double rr = p.r + r;
            if (dx * dx + dy * dy < rr * rr) {
                overlaps = true;
                break;
            }
        }
        if (overlaps) continue;
        grid.insert(static_cast<int>(placed.size()), c.x, c.y, r);
        placed.push_back({c.x, c.y, r});
        return true;
    }
    return false;
}

inline bool ssi_try_place(const Domain& w, GridIndex& grid, std::vector<Particle>& placed,
                          double r, long long j_max, Rng& rng) {
    std::vector<int> scratch;
    return ssi_try_place(w, grid, placed, r, j_max, rng, scratch);
}

enum class Termination { target_reached, placement_failed, radii_exhausted };

inline const char* termination_name(Termination t) {
    switch (t) {
    case Termination::target_reached: return "target_reached";
    case Termination::placement_failed: return "placement_failed";
    default: return "radii_exhausted";
    }
}

struct Packing {
    std::vector<Particle> particles; // placement order
    double target_porosity = 1.0;
    double achieved_porosity = 1.0;
    Domain domain = Domain::rectangle(1.0, 1.0);
    std::uint64_t seed = 0;
    Termination termination = Termination::target_reached;
    bool domain_too_small = false;
    long long estimated_count = 0;
    long long radii_drawn = 0;
};

inline double achieved_porosity(const std::vector<Particle>& particles, double domain_area) {
    double solid = 0.0;
    for (const auto& p : particles) solid += p.r * p.r;
    return 1.0 - pi_const * solid / domain_area;
}

struct PackConfig {
    double target_porosity = 0.5;
    long long oversample_k = 10;
    long long j_max = 30000;
    std::uint64_t seed = 0;
};

// Simple sequential inhibition. All K*N radii are drawn up front and attempted
// in that order while the running porosity is above target. The first
// placement failure stops the run for good; a failure on the very first radius
// means not even one disk fits and is an error.
inline Packing sequential_pack(const Domain& w, RadiusModel& model, const PackConfig& cfg) {
    if (!(cfg.oversample_k >= 1)) throw DomainError("oversample factor must be at least 1");
    if (!(cfg.j_max >= 1)) throw DomainError("candidate budget must be at least 1");

    Rng moment_rng = substream(cfg.seed, "radius-moments");
    const auto [mean_r, var_r] = radius_moments(model, moment_rng);
    const double area = w.area();
    const auto est = estimate_particle_count(area, cfg.target_porosity, mean_r, var_r);

    Rng radius_rng = substream(cfg.seed, "pack-radii");
    const long long total = cfg.oversample_k * est.n;
    std::vector<double> radii;
    radii.reserve(static_cast<std::size_t>(total));
    double r_max = 0.0;
    for (long long i = 0; i < total; ++i) {
        const double r = sample_radius(model, radius_rng);
        if (!(r > 0.0) || !std::isfinite(r)) throw NonFinite("drew a non-positive radius");
        radii.push_back(r);
        r_max = std::max(r_max, r);
    }

    Packing out;
    out.target_porosity = cfg.target_porosity;
    out.domain = w;
    out.seed = cfg.seed;
    out.domain_too_small = est.domain_too_small;
    out.estimated_count = est.n;
    out.radii_drawn = total;
    out.particles.reserve(static_cast<std::size_t>(est.n));

    GridIndex grid(2.0 * r_max);
    Rng place_rng = substream(cfg.seed, "pack-place");
    std::vector<int> scratch;
    double eta_i = 1.0;
    out.termination = Termination::radii_exhausted;
    for (long long i = 0; i < total; ++i) {
        if (!(eta_i > cfg.target_porosity)) {
            out.termination = Termination::target_reached;
            break;
        }
        const double r = radii[static_cast<std::size_t>(i)];
        if (!ssi_try_place(w, grid, out.particles, r, cfg.j_max, place_rng, scratch)) {
            if (i == 0)
                throw FirstParticleFailed("first radius cannot be placed in the domain");
            out.termination = Termination::placement_failed;
            break;
        }
        eta_i -= pi_const * r * r / area;
    }
    if (out.termination == Termination::radii_exhausted && !(eta_i > cfg.target_porosity))
        out.termination = Termination::target_reached;

    out.achieved_porosity = achieved_porosity(out.particles, area);
    return out;
}

inline void write_packing_csv(const std::vector<Particle>& particles, std::ostream& os) {
    os << "x_mm,y_mm,r_mm\n";
    char buf[128];
    for (const auto& p : particles) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, p.r);
        os << buf;
    }
}

inline std::vector<Particle> read_packing_csv(std::istream& is) {
    std::string line;
    bool saw_header = false;
    std::vector<Particle> out;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "x_mm,y_mm,r_mm")
                throw SchemaMismatch("expected header x_mm,y_mm,r_mm");
            saw_header = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw MalformedRow("line " + std::to_string(line_no));
        Particle p;
        p.x = detail::parse_field(line.substr(0, c1), line_no);
        p.y = detail::parse_field(line.substr(c1 + 1, c2 - c1 - 1), line_no);
        p.r = detail::parse_field(line.substr(c2 + 1), line_no);
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !(p.r > 0.0) || !std::isfinite(p.r))
            throw MalformedRow("line " + std::to_string(line_no) + ": bad particle");
        out.push_back(p);
    }
    if (!saw_header) throw EmptyInput("packing csv has no header");
    return out;
}

} // namespace granpack
