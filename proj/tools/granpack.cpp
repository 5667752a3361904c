#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "granpack/pipeline.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_placement = 3;
constexpr int exit_convergence = 4;

struct CliOptions {
    granpack::RunConfig cfg;
    std::string domain_spec;
    std::string polygon_path;
    std::string families_spec = "gamma,lognormal,weibull,hyperbolic";
    std::string fit_space_spec = "log";
    std::string fit_report_path;
    std::string pack_report_path;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

void finish_config(CliOptions& opt, bool needs_domain) {
    opt.cfg.fit_space = granpack::fit_space_from_name(opt.fit_space_spec);
    opt.cfg.families.clear();
    for (const auto& name : split(opt.families_spec, ','))
        opt.cfg.families.push_back(granpack::family_from_name(name));

    if (!opt.polygon_path.empty()) {
        opt.cfg.domain = granpack::load_polygon_csv(opt.polygon_path);
    } else if (!opt.domain_spec.empty()) {
        const auto x = opt.domain_spec.find('x');
        if (x == std::string::npos)
            throw granpack::DomainError("domain must look like WIDTHxHEIGHT, e.g. 100x80");
        opt.cfg.domain = granpack::Domain::rectangle(
            granpack::detail::parse_field(opt.domain_spec.substr(0, x), 1),
            granpack::detail::parse_field(opt.domain_spec.substr(x + 1), 1));
    } else if (needs_domain) {
        throw granpack::DomainError("either --domain or --polygon is required");
    }
}

void add_shared_flags(CLI::App* c, CliOptions& opt) {
    c->add_option("--seed", opt.cfg.seed, "root seed for every stage")->capture_default_str();
    c->add_option("--out", opt.cfg.out_dir, "output directory")->capture_default_str();
}

void add_fit_flags(CLI::App* c, CliOptions& opt) {
    c->add_option("--curve", opt.cfg.curve_path, "granulometric curve CSV")->required();
    c->add_option("--k", opt.cfg.k, "pseudo-sample size")->capture_default_str();
    c->add_option("--log-base", opt.cfg.log_base, "diameter log base")->capture_default_str();
    c->add_option("--ref-diameter-mm", opt.cfg.ref_diameter_mm, "reference diameter")
        ->capture_default_str();
    c->add_option("--fit-space", opt.fit_space_spec, "fit in 'log' or 'linear' space")
        ->capture_default_str();
    c->add_option("--families", opt.families_spec, "comma list of families to fit")
        ->capture_default_str();
}

void add_pack_flags(CLI::App* c, CliOptions& opt) {
    c->add_option("--porosity", opt.cfg.porosity, "target porosity in (0,1)")->required();
    auto* dom = c->add_option("--domain", opt.domain_spec, "rectangle WxH in mm");
    auto* poly = c->add_option("--polygon", opt.polygon_path, "polygon vertex CSV");
    dom->excludes(poly);
    poly->excludes(dom);
    c->add_option("--oversample-K", opt.cfg.oversample_k, "radius oversampling factor")
        ->capture_default_str();
    c->add_option("--jmax", opt.cfg.j_max, "candidate centers per particle")
        ->capture_default_str();
}

int dispatch(const std::string& sub, CliOptions& opt) {
    using namespace granpack;
    if (sub == "fit") {
        finish_config(opt, false);
        const auto report = cmd_fit(opt.cfg);
        std::printf("chosen %s (rule %s), report in %s\n", report.chosen.c_str(),
                    report.selection_rule.c_str(), opt.cfg.out_dir.c_str());
        return exit_ok;
    }
    if (sub == "pack") {
        finish_config(opt, true);
        const auto fit = load_fit_report(opt.fit_report_path);
        const auto packing = cmd_pack(opt.cfg, fit, opt.fit_report_path);
        std::printf("%zu particles, porosity %.6g (target %.6g), %s\n",
                    packing.particles.size(), packing.achieved_porosity,
                    packing.target_porosity, termination_name(packing.termination));
        return exit_ok;
    }
    if (sub == "run") {
        finish_config(opt, true);
        const auto r = cmd_run(opt.cfg);
        std::printf("chosen %s; %zu particles, porosity %.6g (target %.6g), %s\n",
                    r.fit.chosen.c_str(), r.packing.particles.size(),
                    r.packing.achieved_porosity, r.packing.target_porosity,
                    termination_name(r.packing.termination));
        return exit_ok;
    }
    // report
    std::fputs(cmd_report(opt.fit_report_path, opt.pack_report_path).c_str(), stdout);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"granular-media sample generator: fit a size law to a "
                 "granulometric curve and pack disks to a target porosity"};
    app.require_subcommand(1);
    CliOptions opt;

    auto* fit = app.add_subcommand("fit", "fit size laws to a curve");
    add_fit_flags(fit, opt);
    add_shared_flags(fit, opt);

    auto* pack = app.add_subcommand("pack", "pack disks using a fit report");
    pack->add_option("--fit-report", opt.fit_report_path, "fit report JSON")->required();
    add_pack_flags(pack, opt);
    add_shared_flags(pack, opt);

    auto* run = app.add_subcommand("run", "fit then pack");
    add_fit_flags(run, opt);
    add_pack_flags(run, opt);
    add_shared_flags(run, opt);

    auto* rep = app.add_subcommand("report", "render fit + packing reports as a table");
    rep->add_option("--fit-report", opt.fit_report_path, "fit report JSON")->required();
    rep->add_option("--pack-report", opt.pack_report_path, "packing report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), opt);
    } catch (const granpack::FirstParticleFailed& e) {
        std::fprintf(stderr, "FAIL: %s\n", e.what());
        return exit_placement;
    } catch (const granpack::NonConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_convergence;
    } catch (const granpack::NoConvergedFit& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_convergence;
    } catch (const granpack::RejectionStall& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_convergence;
    } catch (const granpack::QuadratureFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_convergence;
    } catch (const granpack::NonFiniteMoment& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_convergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_input;
    }
}
