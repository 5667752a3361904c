#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "granpack/fitting.hpp"
#include "granpack/granulometry.hpp"
#include "granpack/json_io.hpp"
#include "granpack/packing.hpp"
#include "granpack/report.hpp"
#include "granpack/svg.hpp"

namespace granpack {

struct RunConfig {
    std::string curve_path;
    double porosity = 0.5;
    Domain domain = Domain::rectangle(100.0, 100.0);
    long long k = 1000;
    long long oversample_k = 10;
    long long j_max = 30000;
    std::uint64_t seed = 0;
    double log_base = 2.718281828459045;
    double ref_diameter_mm = 0.001;
    FitSpace fit_space = FitSpace::log_space;
    std::vector<Family> families{Family::gamma, Family::lognormal, Family::weibull,
                                 Family::hyperbolic};
    std::string out_dir = ".";
};

inline void validate_config(const RunConfig& cfg) {
    if (!(cfg.porosity > 0.0) || !(cfg.porosity < 1.0))
        throw DomainError("porosity must lie in (0, 1)");
    if (cfg.k < 1) throw DomainError("k must be at least 1");
    if (cfg.oversample_k < 1) throw DomainError("oversample factor must be at least 1");
    if (cfg.j_max < 1) throw DomainError("candidate budget must be at least 1");
    if (!(cfg.log_base > 1.0)) throw DomainError("log base must exceed 1");
    if (!(cfg.ref_diameter_mm > 0.0)) throw DomainError("reference diameter must be positive");
    if (cfg.families.empty()) throw DomainError("at least one family must be fitted");
    std::set<Family> seen(cfg.families.begin(), cfg.families.end());
    if (seen.size() != cfg.families.size()) throw DomainError("duplicate family in list");
    if (cfg.out_dir.empty()) throw DomainError("output directory must be set");
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << content;
    if (!os) throw IoError("write failed: " + path.string());
}

inline std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline nlohmann::json parse_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaMismatch("not valid JSON: " + path + " (" + e.what() + ")");
    }
}

} // namespace detail

// Vertex list for --polygon: one x,y pair per line in mm, optional
// "x_mm,y_mm" header, blank lines ignored.
inline Domain load_polygon_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open polygon file: " + path);
    std::vector<Vec2> vs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "x_mm,y_mm") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw MalformedRow("polygon line " + std::to_string(line_no));
        vs.push_back({detail::parse_field(line.substr(0, comma), line_no),
                      detail::parse_field(line.substr(comma + 1), line_no)});
    }
    if (vs.empty()) throw EmptyInput("polygon file has no vertices: " + path);
    return Domain::polygon(std::move(vs));
}

// Fit all configured families to a pseudo-sample of the curve, select the best
// by GOF p-value, and write fit_report.json plus fit.svg to the output dir.
inline FitReport cmd_fit(const RunConfig& cfg) {
    validate_config(cfg);
    std::ifstream in(cfg.curve_path);
    if (!in) throw IoError("cannot open curve file: " + cfg.curve_path);
    const auto curve = parse_granulometric_table(in);
    const auto hist = to_log_histogram(curve, cfg.log_base, cfg.ref_diameter_mm);
    Rng sample_rng = substream(cfg.seed, "pseudo-sample");
    const auto sample = sample_pseudo_diameters(hist, cfg.k, sample_rng);

    std::vector<double> data = sample.values;
    if (cfg.fit_space == FitSpace::linear)
        for (double& v : data) v = 0.5 * cfg.ref_diameter_mm * std::pow(cfg.log_base, v);

    std::vector<Candidate> candidates;
    std::vector<double> floors;
    for (const Family f : cfg.families) {
        FitResult fit;
        double floor = 0.0;
        if (cfg.fit_space == FitSpace::log_space) {
            auto sf = fit_on_log_sample(data, f);
            fit = sf.fit;
            floor = sf.ell_floor;
        } else {
            fit = try_fit_mle(data, f);
        }
        GofResult gof;
        if (fit.converged) {
            std::vector<double> shifted = data;
            if (floor != 0.0)
                for (double& v : shifted) v -= floor;
            try {
                gof = chi_square_gof(shifted, fit.model);
            } catch (const QuadratureFailure&) {
                // A candidate whose own numerics fail cannot be ranked;
                // selection proceeds over the remaining families.
                fit.converged = false;
            }
        }
        candidates.push_back({fit, gof});
        floors.push_back(floor);
    }
    auto sel = select_best(candidates);

    FitReport report;
    report.curve_path = cfg.curve_path;
    report.k = cfg.k;
    report.seed = cfg.seed;
    report.fit_space = cfg.fit_space;
    report.log_base = cfg.log_base;
    report.ref_diameter_mm = cfg.ref_diameter_mm;
    for (std::size_t i = 0; i < sel.candidates.size(); ++i) {
        FitCandidateRecord rec;
        rec.model = sel.candidates[i].fit.model;
        rec.ell_floor = floors[i];
        rec.log_likelihood = sel.candidates[i].fit.log_likelihood;
        rec.converged = sel.candidates[i].fit.converged;
        rec.gof = sel.candidates[i].gof;
        report.candidates.push_back(std::move(rec));
    }
    const auto& chosen = sel.candidates[sel.chosen];
    report.chosen = family_name(chosen.fit.model);
    report.selection_rule = rule_name(sel.rule_applied);

    const std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);
    detail::write_text_file(out / "fit_report.json", fit_report_to_json(report).dump(2) + "\n");

    char desc[256];
    std::snprintf(desc, sizeof desc,
                  "curve=%s k=%lld seed=%llu log_base=%.17g ref_diameter_mm=%.17g fit_space=%s",
                  cfg.curve_path.c_str(), cfg.k, static_cast<unsigned long long>(cfg.seed),
                  cfg.log_base, cfg.ref_diameter_mm, fit_space_name(cfg.fit_space));
    char title[224];
    std::snprintf(title, sizeof title, "%s (%s), p=%.4g", report.chosen.c_str(),
                  params_text(chosen.fit.model).c_str(), chosen.gof.p_value);
    std::ostringstream svg;
    write_fit_svg(hist, chosen.fit.model, floors[sel.chosen], title, desc, svg);
    detail::write_text_file(out / "fit.svg", svg.str());
    return report;
}

// Pack the configured domain with radii sampled from the chosen fit and write
// packing.csv, packing_report.json, and packing.svg.
inline Packing cmd_pack(const RunConfig& cfg, const FitReport& fit, const std::string& model_ref) {
    validate_config(cfg);
    RadiusModel model = radius_model_from_report(fit);
    PackConfig pc;
    pc.target_porosity = cfg.porosity;
    pc.oversample_k = cfg.oversample_k;
    pc.j_max = cfg.j_max;
    pc.seed = cfg.seed;
    const Packing packing = sequential_pack(cfg.domain, model, pc);

    const std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);
    std::ostringstream csv;
    write_packing_csv(packing.particles, csv);
    detail::write_text_file(out / "packing.csv", csv.str());
    detail::write_text_file(
        out / "packing_report.json",
        pack_report_to_json(packing, model_ref, cfg.j_max, cfg.oversample_k).dump(2) + "\n");

    char desc[256];
    std::snprintf(desc, sizeof desc,
                  "model=%s seed=%llu target_porosity=%.17g j_max=%lld K=%lld units=mm",
                  fit.chosen.c_str(), static_cast<unsigned long long>(cfg.seed), cfg.porosity,
                  cfg.j_max, cfg.oversample_k);
    std::ostringstream svg;
    write_packing_svg(packing, desc, svg);
    detail::write_text_file(out / "packing.svg", svg.str());
    return packing;
}

struct RunOutputs {
    FitReport fit;
    Packing packing;
};

inline RunOutputs cmd_run(const RunConfig& cfg) {
    RunOutputs r{cmd_fit(cfg), Packing{}};
    // The two reports land in the same directory; a bare name keeps the
    // reference valid wherever that directory is moved or recreated.
    r.packing = cmd_pack(cfg, r.fit, "fit_report.json");
    return r;
}

inline FitReport load_fit_report(const std::string& path) {
    return fit_report_from_json(detail::parse_json_file(path));
}

inline PackReport load_pack_report(const std::string& path) {
    return pack_report_from_json(detail::parse_json_file(path));
}

inline std::string cmd_report(const std::string& fit_path, const std::string& pack_path) {
    return format_report(load_fit_report(fit_path), load_pack_report(pack_path));
}

} // namespace granpack
