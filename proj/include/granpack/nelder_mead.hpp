#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace granpack {

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Downhill simplex with standard coefficients (reflect 1, expand 2,
// contract 1/2, shrink 1/2). Converges when the simplex spread in every
// coordinate falls below tol scaled by the coordinate's magnitude.
// Non-finite objective values are treated as +1e300, which lets the simplex
// retreat from invalid regions instead of aborting.
template <class F>
SimplexResult nelder_mead(F&& f, const std::vector<double>& x0, const std::vector<double>& steps,
                          double tol, int max_iter) {
    const std::size_t n = x0.size();
    auto safe = [&f](const std::vector<double>& p) {
        const double v = f(p);
        return std::isfinite(v) ? v : 1e300;
    };

    std::vector<std::vector<double>> xs(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += steps[i];
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fs[i] = safe(xs[i]);

    SimplexResult res;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(),
                  [&fs](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> sx(n + 1);
        std::vector<double> sf(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            sx[i] = std::move(xs[idx[i]]);
            sf[i] = fs[idx[i]];
        }
        xs = std::move(sx);
        fs = std::move(sf);

        bool tight = true;
        for (std::size_t d = 0; d < n && tight; ++d) {
            double span = 0.0;
            for (std::size_t i = 1; i <= n; ++i)
                span = std::max(span, std::fabs(xs[i][d] - xs[0][d]));
            if (span > tol * (1.0 + std::fabs(xs[0][d]))) tight = false;
        }
        if (tight) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += xs[i][d] / static_cast<double>(n);

        auto affine = [&centroid, &xs, n](double t) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (centroid[d] - xs[n][d]);
            return p;
        };

        const auto xr = affine(1.0);
        const double fr = safe(xr);
        if (fr < fs[0]) {
            const auto xe = affine(2.0);
            const double fe = safe(xe);
            if (fe < fr) {
                xs[n] = xe;
                fs[n] = fe;
            } else {
                xs[n] = xr;
                fs[n] = fr;
            }
            continue;
        }
        if (fr < fs[n - 1]) {
            xs[n] = xr;
            fs[n] = fr;
            continue;
        }
        const bool outside = fr < fs[n];
        const auto xc = affine(outside ? 0.5 : -0.5);
        const double fc = safe(xc);
        if ((outside && fc <= fr) || (!outside && fc < fs[n])) {
            xs[n] = xc;
            fs[n] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t d = 0; d < n; ++d) xs[i][d] = xs[0][d] + 0.5 * (xs[i][d] - xs[0][d]);
            fs[i] = safe(xs[i]);
        }
    }
    res.x = xs[0];
    res.fx = fs[0];
    return res;
}

} // namespace granpack
