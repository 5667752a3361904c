#pragma once

#include <cstdio>
#include <string>

#include "granpack/json_io.hpp"

namespace granpack {

inline std::string params_text(const SizeModel& m) {
    char buf[160];
    std::visit(
        [&](const auto& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, GammaParams> || std::is_same_v<T, WeibullParams>) {
                std::snprintf(buf, sizeof buf, "shape=%.6g scale=%.6g", q.shape, q.scale);
            } else if constexpr (std::is_same_v<T, LognormalParams>) {
                std::snprintf(buf, sizeof buf, "mu=%.6g sigma=%.6g", q.mu, q.sigma);
            } else {
                std::snprintf(buf, sizeof buf, "asym=%.6g zeta=%.6g delta=%.6g mu=%.6g", q.asym,
                              q.zeta, q.delta, q.mu);
            }
        },
        m);
    return buf;
}

// One row per candidate family, then a packing summary row.
inline std::string format_report(const FitReport& fit, const PackReport& pack) {
    if (fit.candidates.empty()) throw SchemaMismatch("fit report has no candidates");
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %-58s %9s %12s %-9s %s\n", "family", "parameters",
                  "p_value", "log_lik", "converged", "chosen");
    out += line;
    for (const auto& c : fit.candidates) {
        const std::string name = family_name(c.model);
        std::snprintf(line, sizeof line, "%-12s %-58s %9.4g %12.4f %-9s %s\n", name.c_str(),
                      params_text(c.model).c_str(), c.gof.p_value, c.log_likelihood,
                      c.converged ? "yes" : "no", name == fit.chosen ? "*" : "");
        out += line;
    }
    out += '\n';
    std::snprintf(line, sizeof line, "%-12s %-14s %-14s %-10s %s\n", "N", "eta_target",
                  "eta_achieved", "seed", "termination");
    out += line;
    std::snprintf(line, sizeof line, "%-12lld %-14.6g %-14.6g %-10llu %s\n", pack.particle_count,
                  pack.target_porosity, pack.achieved_porosity,
                  static_cast<unsigned long long>(pack.seed),
                  pack.termination_reason.c_str());
    out += line;
    return out;
}

} // namespace granpack
