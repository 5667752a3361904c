#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "granpack/fitting.hpp"
#include "granpack/rng.hpp"

using namespace granpack;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> params_of(const SizeModel& m) {
    if (const auto* g = std::get_if<GammaParams>(&m)) return {g->shape, g->scale};
    if (const auto* l = std::get_if<LognormalParams>(&m)) return {l->mu, l->sigma};
    if (const auto* w = std::get_if<WeibullParams>(&m)) return {w->shape, w->scale};
    const auto& h = std::get<HyperbolicParams>(m);
    return {h.asym, h.zeta, h.delta, h.mu};
}

SizeModel with_params(Family f, const std::vector<double>& p) {
    switch (f) {
        case Family::gamma: return GammaParams(p[0], p[1]);
        case Family::lognormal: return LognormalParams(p[0], p[1]);
        case Family::weibull: return WeibullParams(p[0], p[1]);
        default: return HyperbolicParams(p[0], p[1], p[2], p[3]);
    }
}

Candidate stub_candidate(Family f, double p_value, bool converged = true) {
    Candidate c;
    switch (f) {
        case Family::gamma: c.fit.model = GammaParams(2.0, 1.0); break;
        case Family::lognormal: c.fit.model = LognormalParams(0.0, 1.0); break;
        case Family::weibull: c.fit.model = WeibullParams(2.0, 1.0); break;
        default: c.fit.model = HyperbolicParams(0.0, 1.0, 1.0, 0.0); break;
    }
    c.fit.converged = converged;
    c.gof.p_value = p_value;
    return c;
}

} // namespace

TEST_CASE("negative log-likelihood") {
    CHECK_THAT(neg_log_likelihood(GammaParams(1.0, 1.0), {1.0, 1.0, 1.0}),
               WithinAbs(3.0, 1e-12));
    CHECK(neg_log_likelihood(GammaParams(2.0, 1.0), {1.0, -0.5}) ==
          std::numeric_limits<double>::infinity());
    CHECK(neg_log_likelihood(WeibullParams(2.0, 1.0), {0.0, 1.0}) ==
          std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(neg_log_likelihood(GammaParams(1.0, 1.0), {}), EmptySample);

    SECTION("factored hyperbolic path agrees with the generic sum") {
        const HyperbolicParams p(-0.7, 2.3, 0.8, 1.5);
        const std::vector<double> xs = {0.1, 1.4, -2.0, 3.3, 1.1};
        double direct = 0.0;
        for (double x : xs) direct -= log_pdf(p, x);
        CHECK_THAT(neg_log_likelihood(SizeModel(p), xs), WithinRel(direct, 1e-12));
    }
}

TEST_CASE("analytic gradient matches finite differences") {
    auto rng = substream(61, "grad-sweep");
    int checked = 0;
    for (int cfg = 0; cfg < 50; ++cfg) {
        const Family f = static_cast<Family>(cfg % 4);
        // sample from a nearby model, evaluate the gradient elsewhere
        SizeModel gen = GammaParams(1.0, 1.0);
        SizeModel at = gen;
        switch (f) {
            case Family::gamma:
                gen = GammaParams(rng.uniform(1.0, 8.0), rng.uniform(0.5, 3.0));
                at = GammaParams(rng.uniform(1.0, 8.0), rng.uniform(0.5, 3.0));
                break;
            case Family::lognormal:
                gen = LognormalParams(rng.uniform(-0.5, 1.0), rng.uniform(0.3, 1.0));
                at = LognormalParams(rng.uniform(-0.5, 1.0), rng.uniform(0.3, 1.0));
                break;
            case Family::weibull:
                gen = WeibullParams(rng.uniform(0.8, 5.0), rng.uniform(0.5, 3.0));
                at = WeibullParams(rng.uniform(0.8, 5.0), rng.uniform(0.5, 3.0));
                break;
            default:
                gen = HyperbolicParams(rng.uniform(-1.0, 1.0), rng.uniform(0.5, 5.0),
                                       rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0));
                at = HyperbolicParams(rng.uniform(-1.0, 1.0), rng.uniform(0.5, 5.0),
                                      rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0));
                break;
        }
        const auto xs = sample(gen, 200, rng);
        const auto grad = nll_gradient(at, xs);
        const auto theta = params_of(at);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double h = 1e-6 * std::max(1.0, std::fabs(theta[i]));
            auto tp = theta, tm = theta;
            tp[i] += h;
            tm[i] -= h;
            const double fd = (neg_log_likelihood(with_params(f, tp), xs) -
                               neg_log_likelihood(with_params(f, tm), xs)) /
                              (2.0 * h);
            CHECK_THAT(grad[i], WithinAbs(fd, 1e-5 * (std::fabs(fd) + 1.0)));
            ++checked;
        }
    }
    CHECK(checked >= 100);
}

TEST_CASE("maximum likelihood fitting") {
    SECTION("lognormal equals closed-form log moments") {
        auto rng = substream(71, "fit");
        const auto xs = sample(LognormalParams(0.7, 0.45), 5000, rng);
        const auto fit = fit_mle(xs, Family::lognormal);
        REQUIRE(fit.converged);
        double mu = 0.0;
        for (double x : xs) mu += std::log(x);
        mu /= static_cast<double>(xs.size());
        double v = 0.0;
        for (double x : xs) v += (std::log(x) - mu) * (std::log(x) - mu);
        v /= static_cast<double>(xs.size());
        const auto& p = std::get<LognormalParams>(fit.model);
        CHECK_THAT(p.mu, WithinRel(mu, 1e-14));
        CHECK_THAT(p.sigma, WithinRel(std::sqrt(v), 1e-14));
    }
    SECTION("heavy-shape gamma regime recovers within five percent") {
        auto rng = substream(73, "fit");
        const auto xs = sample(GammaParams(43.7, 0.0535), 100000, rng);
        const auto fit = fit_mle(xs, Family::gamma);
        REQUIRE(fit.converged);
        const auto& p = std::get<GammaParams>(fit.model);
        CHECK_THAT(p.shape, WithinRel(43.7, 0.05));
        CHECK_THAT(p.scale, WithinRel(0.0535, 0.05));
    }
    SECTION("constant sample is degenerate") {
        const std::vector<double> xs(60, 2.5);
        CHECK_THROWS_AS(fit_mle(xs, Family::gamma), DegenerateSample);
        CHECK_THROWS_AS(fit_mle(xs, Family::lognormal), DegenerateSample);
        CHECK_THROWS_AS(fit_mle(xs, Family::weibull), DegenerateSample);
        CHECK_THROWS_AS(fit_mle(xs, Family::hyperbolic), DegenerateSample);
    }
    SECTION("too few samples") {
        const std::vector<double> xs = {1.0, 2.0, 3.0};
        CHECK_THROWS_AS(fit_mle(xs, Family::gamma), TooFewSamples);
    }
    SECTION("iteration cap raises, lenient variant records instead") {
        auto rng = substream(79, "fit");
        const auto xs = sample(GammaParams(3.0, 1.0), 500, rng);
        FitConfig strangled;
        strangled.max_iter = 1;
        CHECK_THROWS_AS(fit_mle(xs, Family::gamma, strangled), NonConvergence);
        const auto lenient = try_fit_mle(xs, Family::gamma, strangled);
        CHECK_FALSE(lenient.converged);
        CHECK(lenient.iterations >= 1);
    }
    SECTION("fit recovery across families") {
        auto rng = substream(83, "recovery");
        const std::vector<std::pair<Family, std::vector<double>>> cases = {
            {Family::gamma, {2.5, 1.2}},
            {Family::gamma, {8.0, 0.4}},
            {Family::lognormal, {0.8, 0.5}},
            {Family::lognormal, {-0.4, 1.1}},
            {Family::weibull, {1.8, 2.2}},
            {Family::weibull, {5.0, 3.0}},
        };
        for (const auto& [fam, truth] : cases) {
            const auto xs = sample(with_params(fam, truth), 20000, rng);
            const auto fit = fit_mle(xs, fam);
            REQUIRE(fit.converged);
            const auto got = params_of(fit.model);
            for (std::size_t i = 0; i < truth.size(); ++i)
                CHECK_THAT(got[i], WithinRel(truth[i], 0.05));
        }
    }
    SECTION("hyperbolic recovery within fifteen percent") {
        auto rng = substream(89, "recovery");
        const std::vector<double> truth = {0.8, 1.5, 1.0, 1.0};
        const auto xs = sample(with_params(Family::hyperbolic, truth), 20000, rng);
        const auto fit = fit_mle(xs, Family::hyperbolic);
        REQUIRE(fit.converged);
        const auto got = params_of(fit.model);
        for (std::size_t i = 0; i < truth.size(); ++i)
            CHECK_THAT(got[i], WithinRel(truth[i], 0.15));
    }
    SECTION("gradient vanishes at the optimum for newton and closed-form fits") {
        auto rng = substream(97, "fit");
        for (Family f : {Family::gamma, Family::lognormal, Family::weibull}) {
            const auto xs =
                sample(with_params(f, f == Family::lognormal ? std::vector<double>{0.5, 0.6}
                                                             : std::vector<double>{3.0, 1.5}),
                       5000, rng);
            const auto fit = fit_mle(xs, f);
            const auto g = nll_gradient(fit.model, xs);
            for (double gi : g)
                CHECK(std::fabs(gi) / static_cast<double>(xs.size()) < 1e-6);
        }
    }
    SECTION("likelihood dominance over the moment-matched start") {
        auto rng = substream(101, "fit");
        const auto xs = sample(HyperbolicParams(0.9, 2.0, 1.0, 0.0), 5000, rng);
        const auto start = hyperbolic_moment_start(xs);
        const auto fit = try_fit_mle(xs, Family::hyperbolic);
        CHECK(fit.log_likelihood >= -neg_log_likelihood(SizeModel(start), xs) - 1e-9);
    }
}

TEST_CASE("quantile inversion") {
    auto rng = substream(103, "quantile");
    const std::vector<SizeModel> models = {GammaParams(3.0, 1.5), LognormalParams(0.3, 0.7),
                                           WeibullParams(2.2, 1.1),
                                           HyperbolicParams(-0.5, 1.2, 0.9, 2.0)};
    for (const auto& m : models) {
        for (double q : {0.05, 0.3, 0.5, 0.9, 0.99}) {
            const double x = quantile(m, q);
            CHECK_THAT(cdf(m, x), WithinAbs(q, 1e-7));
        }
    }
    CHECK_THROWS_AS(quantile(models[0], 0.0), DomainError);
    CHECK_THROWS_AS(quantile(models[0], 1.0), DomainError);
}

TEST_CASE("chi-square goodness of fit") {
    SECTION("exact bin counts give statistic zero and p one") {
        const SizeModel m = LognormalParams(0.0, 1.0);
        // 300 points -> 20 equal-probability bins, 15 per bin
        std::vector<double> xs;
        for (int j = 0; j < 20; ++j) {
            const double x = quantile(m, (j + 0.5) / 20.0);
            xs.insert(xs.end(), 15, x);
        }
        const auto g = chi_square_gof(xs, m);
        CHECK(g.bin_count == 20);
        CHECK(g.statistic == 0.0);
        CHECK(g.p_value == 1.0);
        CHECK(g.degrees_of_freedom == 17);
    }
    SECTION("bin-count rule") {
        auto rng = substream(107, "gof");
        const SizeModel m = LognormalParams(0.0, 1.0);
        const auto xs = sample(m, 10000, rng);
        const auto g = chi_square_gof(xs, m);
        CHECK(g.bin_count == 80); // min(2000, max(6, ceil(2*10000^0.4)))
        CHECK(g.degrees_of_freedom == 77);
        const auto xs50 = sample(m, 50, rng);
        CHECK(chi_square_gof(xs50, m).bin_count == 10);
    }
    SECTION("too few samples") {
        const std::vector<double> xs(49, 1.0);
        CHECK_THROWS_AS(chi_square_gof(xs, SizeModel(LognormalParams(0.0, 1.0))),
                        TooFewSamples);
    }
    SECTION("null distribution calibration") {
        int below = 0;
        const int replicates = 200;
        for (int r = 0; r < replicates; ++r) {
            auto rng = substream(static_cast<std::uint64_t>(r), "gof-null");
            const auto xs = sample(LognormalParams(0.5, 0.4), 10000, rng);
            const auto fit = fit_mle(xs, Family::lognormal);
            const auto g = chi_square_gof(xs, fit.model);
            if (g.p_value < 0.05) ++below;
        }
        const double frac = static_cast<double>(below) / replicates;
        CHECK(frac >= 0.02);
        CHECK(frac <= 0.09);
    }
    SECTION("power against a grossly wrong model") {
        auto rng = substream(109, "gof-power");
        const auto xs = sample(GammaParams(4.0, 1.0), 10000, rng);
        const auto g = chi_square_gof(xs, SizeModel(WeibullParams(0.7, 2.0)));
        CHECK(g.p_value < 0.01);
    }
}

TEST_CASE("kolmogorov-smirnov exposure") {
    auto rng = substream(113, "ks");
    const SizeModel m = LognormalParams(0.2, 0.6);
    const auto xs = sample(m, 2000, rng);
    const auto self = kolmogorov_smirnov(xs, m);
    CHECK(self.statistic < 0.05);
    CHECK(self.p_value > 0.01);
    const auto wrong = kolmogorov_smirnov(xs, SizeModel(WeibullParams(0.7, 2.0)));
    CHECK(wrong.p_value < 1e-6);
    CHECK_THROWS_AS(kolmogorov_smirnov({}, m), EmptySample);
}

TEST_CASE("model selection") {
    SECTION("uniform near-one p-values break toward the cheapest sampler") {
        std::vector<Candidate> cands = {
            stub_candidate(Family::gamma, 0.995), stub_candidate(Family::lognormal, 0.996),
            stub_candidate(Family::weibull, 0.9952), stub_candidate(Family::hyperbolic, 0.9958)};
        const auto sel = select_best(cands);
        CHECK(family_of(sel.candidates[sel.chosen].fit.model) == Family::lognormal);
        CHECK(sel.rule_applied == SelectionRule::cost_tiebreak);
    }
    SECTION("single candidate") {
        const auto sel = select_best({stub_candidate(Family::weibull, 0.4)});
        CHECK(sel.chosen == 0);
        CHECK(sel.rule_applied == SelectionRule::highest_p);
    }
    SECTION("strict argmax outside the tie window") {
        std::vector<Candidate> cands = {
            stub_candidate(Family::gamma, 0.3), stub_candidate(Family::hyperbolic, 0.9),
            stub_candidate(Family::lognormal, 0.9 - 2e-3), stub_candidate(Family::weibull, 0.1)};
        const auto sel = select_best(cands);
        CHECK(sel.chosen == 1);
        CHECK(sel.rule_applied == SelectionRule::highest_p);
    }
    SECTION("non-converged candidates are skipped") {
        std::vector<Candidate> cands = {stub_candidate(Family::hyperbolic, 0.99, false),
                                        stub_candidate(Family::gamma, 0.5)};
        const auto sel = select_best(cands);
        CHECK(sel.chosen == 1);
        CHECK_THROWS_AS(select_best({stub_candidate(Family::gamma, 0.9, false)}),
                        NoConvergedFit);
    }
    SECTION("permutation invariance") {
        std::vector<Candidate> base = {
            stub_candidate(Family::gamma, 0.995), stub_candidate(Family::lognormal, 0.996),
            stub_candidate(Family::weibull, 0.9952), stub_candidate(Family::hyperbolic, 0.9958)};
        const Family first = family_of(select_best(base).candidates[select_best(base).chosen].fit.model);
        std::vector<std::size_t> perm = {3, 1, 0, 2};
        std::vector<Candidate> shuffled;
        for (auto i : perm) shuffled.push_back(base[i]);
        const auto sel = select_best(shuffled);
        CHECK(family_of(sel.candidates[sel.chosen].fit.model) == first);
    }
}

TEST_CASE("fitting in shifted log space") {
    auto rng = substream(127, "shift");
    // log-diameter sample straddling zero
    std::vector<double> ell;
    for (int i = 0; i < 2000; ++i) ell.push_back(rng.normal() * 1.2 - 2.0);
    const double lo = *std::min_element(ell.begin(), ell.end());

    SECTION("positive-support families get the recorded floor") {
        for (Family f : {Family::gamma, Family::lognormal, Family::weibull}) {
            const auto sf = fit_on_log_sample(ell, f);
            CHECK_THAT(sf.ell_floor, WithinAbs(lo - 1e-6, 1e-12));
            CHECK(sf.fit.converged);
        }
    }
    SECTION("hyperbolic is fitted unshifted") {
        const auto sf = fit_on_log_sample(ell, Family::hyperbolic);
        CHECK(sf.ell_floor == 0.0);
        CHECK(sf.fit.converged);
        // near-Gaussian data leaves mu unidentified along the large-zeta
        // ridge; the mode and mean are the identified quantities
        CHECK_THAT(mode(sf.fit.model).value, WithinAbs(-2.0, 0.25));
        CHECK_THAT(mean(sf.fit.model), WithinAbs(-2.0, 0.25));
    }
}
