#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "granpack/errors.hpp"
#include "granpack/fitting.hpp"
#include "granpack/geometry.hpp"
#include "granpack/packing.hpp"

namespace granpack {

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw SchemaMismatch(std::string("missing key: ") + key);
    return *it;
}

inline double need_num(const nlohmann::json& j, const char* key) {
    const auto& v = need(j, key);
    if (!v.is_number()) throw SchemaMismatch(std::string("key is not numeric: ") + key);
    return v.get<double>();
}

inline std::string need_str(const nlohmann::json& j, const char* key) {
    const auto& v = need(j, key);
    if (!v.is_string()) throw SchemaMismatch(std::string("key is not a string: ") + key);
    return v.get<std::string>();
}

} // namespace detail

inline nlohmann::json params_to_json(const SizeModel& m) {
    nlohmann::json p;
    std::visit(
        [&](const auto& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, GammaParams>) {
                p["shape"] = q.shape;
                p["scale"] = q.scale;
            } else if constexpr (std::is_same_v<T, LognormalParams>) {
                p["mu"] = q.mu;
                p["sigma"] = q.sigma;
            } else if constexpr (std::is_same_v<T, WeibullParams>) {
                p["shape"] = q.shape;
                p["scale"] = q.scale;
            } else {
                p["asym"] = q.asym;
                p["zeta"] = q.zeta;
                p["delta"] = q.delta;
                p["mu"] = q.mu;
            }
        },
        m);
    return p;
}

inline SizeModel params_from_json(Family f, const nlohmann::json& p) {
    using detail::need_num;
    switch (f) {
    case Family::gamma: return GammaParams(need_num(p, "shape"), need_num(p, "scale"));
    case Family::lognormal: return LognormalParams(need_num(p, "mu"), need_num(p, "sigma"));
    case Family::weibull: return WeibullParams(need_num(p, "shape"), need_num(p, "scale"));
    default:
        return HyperbolicParams(need_num(p, "asym"), need_num(p, "zeta"), need_num(p, "delta"),
                                need_num(p, "mu"));
    }
}

inline nlohmann::json model_to_json(const SizeModel& m, double log_base, double ref_diameter_mm) {
    nlohmann::json j;
    j["family"] = family_name(m);
    j["params"] = params_to_json(m);
    j["log_base"] = log_base;
    j["ref_diameter_mm"] = ref_diameter_mm;
    return j;
}

inline nlohmann::json domain_to_json(const Domain& d) {
    nlohmann::json j;
    if (d.is_rectangle()) {
        j["type"] = "rectangle";
        j["width_mm"] = d.width();
        j["height_mm"] = d.height();
    } else {
        j["type"] = "polygon";
        auto verts = nlohmann::json::array();
        for (const auto& v : d.vertices()) verts.push_back({v.x, v.y});
        j["vertices_mm"] = verts;
    }
    return j;
}

inline Domain domain_from_json(const nlohmann::json& j) {
    const std::string type = detail::need_str(j, "type");
    if (type == "rectangle")
        return Domain::rectangle(detail::need_num(j, "width_mm"),
                                 detail::need_num(j, "height_mm"));
    if (type == "polygon") {
        const auto& verts = detail::need(j, "vertices_mm");
        if (!verts.is_array()) throw SchemaMismatch("vertices_mm is not an array");
        std::vector<Vec2> vs;
        for (const auto& v : verts) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw SchemaMismatch("vertex is not an [x, y] pair");
            vs.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        return Domain::polygon(std::move(vs));
    }
    throw SchemaMismatch("unknown domain type: " + type);
}

struct FitCandidateRecord {
    SizeModel model{GammaParams(1.0, 1.0)};
    double ell_floor = 0.0;
    double log_likelihood = 0.0;
    bool converged = false;
    GofResult gof;
};

struct FitReport {
    std::string curve_path;
    long long k = 0;
    std::uint64_t seed = 0;
    FitSpace fit_space = FitSpace::log_space;
    double log_base = 2.718281828459045;
    double ref_diameter_mm = 0.001;
    std::vector<FitCandidateRecord> candidates;
    std::string chosen;
    std::string selection_rule;
};

inline nlohmann::json fit_report_to_json(const FitReport& r) {
    nlohmann::json j;
    j["curve"] = r.curve_path;
    j["k"] = r.k;
    j["seed"] = r.seed;
    j["fit_space"] = fit_space_name(r.fit_space);
    j["log_base"] = r.log_base;
    j["ref_diameter_mm"] = r.ref_diameter_mm;
    auto arr = nlohmann::json::array();
    for (const auto& c : r.candidates) {
        nlohmann::json e = model_to_json(c.model, r.log_base, r.ref_diameter_mm);
        e["ell_floor"] = c.ell_floor;
        e["log_likelihood"] = c.log_likelihood;
        e["converged"] = c.converged;
        e["gof"] = {{"statistic", c.gof.statistic},
                    {"df", c.gof.degrees_of_freedom},
                    {"p_value", c.gof.p_value}};
        arr.push_back(std::move(e));
    }
    j["candidates"] = std::move(arr);
    j["chosen"] = r.chosen;
    j["selection_rule"] = r.selection_rule;
    return j;
}

inline FitReport fit_report_from_json(const nlohmann::json& j) {
    using detail::need;
    using detail::need_num;
    using detail::need_str;
    FitReport r;
    r.curve_path = need_str(j, "curve");
    r.k = static_cast<long long>(need_num(j, "k"));
    r.seed = need(j, "seed").get<std::uint64_t>();
    r.fit_space = fit_space_from_name(need_str(j, "fit_space"));
    r.log_base = need_num(j, "log_base");
    r.ref_diameter_mm = need_num(j, "ref_diameter_mm");
    const auto& arr = need(j, "candidates");
    if (!arr.is_array()) throw SchemaMismatch("candidates is not an array");
    for (const auto& e : arr) {
        FitCandidateRecord c;
        const Family f = family_from_name(need_str(e, "family"));
        c.model = params_from_json(f, need(e, "params"));
        c.ell_floor = need_num(e, "ell_floor");
        c.log_likelihood = need_num(e, "log_likelihood");
        const auto& conv = need(e, "converged");
        if (!conv.is_boolean()) throw SchemaMismatch("converged is not a boolean");
        c.converged = conv.get<bool>();
        const auto& g = need(e, "gof");
        c.gof.statistic = need_num(g, "statistic");
        c.gof.degrees_of_freedom = static_cast<int>(need_num(g, "df"));
        c.gof.p_value = need_num(g, "p_value");
        r.candidates.push_back(std::move(c));
    }
    r.chosen = need_str(j, "chosen");
    r.selection_rule = need_str(j, "selection_rule");
    return r;
}

// The chosen candidate, ready to drive radius sampling.
inline RadiusModel radius_model_from_report(const FitReport& r) {
    for (const auto& c : r.candidates) {
        if (family_name(c.model) != r.chosen) continue;
        RadiusModel m;
        m.size_model = c.model;
        m.fit_space = r.fit_space;
        m.log_base = r.log_base;
        m.ref_diameter_mm = r.ref_diameter_mm;
        m.ell_floor = c.ell_floor;
        return m;
    }
    throw SchemaMismatch("chosen family is not among the candidates: " + r.chosen);
}

struct PackReport {
    double target_porosity = 0.0;
    double achieved_porosity = 0.0;
    long long particle_count = 0;
    std::uint64_t seed = 0;
    Domain domain = Domain::rectangle(1.0, 1.0);
    std::string model_ref;
    long long j_max = 0;
    long long oversample_k = 0;
    std::string termination_reason;
};

inline nlohmann::json pack_report_to_json(const Packing& p, const std::string& model_ref,
                                          long long j_max, long long oversample_k) {
    nlohmann::json j;
    j["target_porosity"] = p.target_porosity;
    j["achieved_porosity"] = p.achieved_porosity;
    j["particle_count"] = static_cast<long long>(p.particles.size());
    j["seed"] = p.seed;
    j["domain"] = domain_to_json(p.domain);
    j["model_ref"] = model_ref;
    j["j_max"] = j_max;
    j["K"] = oversample_k;
    j["termination_reason"] = termination_name(p.termination);
    return j;
}

inline PackReport pack_report_from_json(const nlohmann::json& j) {
    using detail::need;
    using detail::need_num;
    using detail::need_str;
    PackReport r;
    r.target_porosity = need_num(j, "target_porosity");
    r.achieved_porosity = need_num(j, "achieved_porosity");
    r.particle_count = static_cast<long long>(need_num(j, "particle_count"));
    r.seed = need(j, "seed").get<std::uint64_t>();
    r.domain = domain_from_json(need(j, "domain"));
    r.model_ref = need_str(j, "model_ref");
    r.j_max = static_cast<long long>(need_num(j, "j_max"));
    r.oversample_k = static_cast<long long>(need_num(j, "K"));
    r.termination_reason = need_str(j, "termination_reason");
    return r;
}

} // namespace granpack
