#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "granpack/errors.hpp"
#include "granpack/rng.hpp"

namespace granpack {

// Sieving table: cumulative fraction of mass below each diameter.
// Canonical form is sorted by increasing diameter with fractions in [0,1].
struct GranulometricCurve {
    std::vector<double> diameters_mm; // strictly increasing, all > 0
    std::vector<double> cumulative;   // non-decreasing, last == 1

    std::size_t size() const { return diameters_mm.size(); }
};

// Histogram over log-diameters: D edges bracket D-1 bins whose masses are
// the cumulative increments of the curve.
struct LogHistogram {
    std::vector<double> edges;     // log-diameters, strictly increasing
    std::vector<double> masses;    // per-bin mass, >= 0
    std::vector<double> midpoints; // (edge[i] + edge[i+1]) / 2
    double log_base = 0.0;
    double ref_diameter_mm = 0.0;

    std::size_t bin_count() const { return masses.size(); }
    double total_mass() const {
        double s = 0.0;
        for (double p : masses) s += p;
        return s;
    }
};

// Pseudorandom log-diameters drawn from the histogram's uniform mixture.
struct DiameterSample {
    std::vector<double> values; // log-diameters
    std::size_t count() const { return values.size(); }
    int k = 0; // scale parameter that sized the sample
};

namespace detail {

inline double parse_field(const std::string& field, std::size_t line_no) {
    const char* b = field.data();
    const char* e = b + field.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    double out = 0.0;
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e)
        throw MalformedRow("line " + std::to_string(line_no) + ": non-numeric field '" + field + "'");
    return out;
}

// Round half to even, used for the per-bin sample counts.
inline long long round_half_even(double v) {
    const double r = std::nearbyint(v); // FE_TONEAREST = banker's rounding
    return static_cast<long long>(r);
}

} // namespace detail

// Parse the curve CSV (header diameter_mm,cumulative_percent; rows in any
// diameter order; percents in [0,100]). Returns the canonical curve.
inline GranulometricCurve parse_granulometric_table(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::pair<double, double>> rows;

    while (std::getline(in, line)) {
        ++line_no;
        // Strip trailing CR, skip blank lines.
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = line;
        stripped.erase(std::remove_if(stripped.begin(), stripped.end(),
                                      [](unsigned char c) { return c == ' ' || c == '\t'; }),
                       stripped.end());
        if (stripped.empty()) continue;
        if (!have_header) {
            if (stripped != "diameter_mm,cumulative_percent")
                throw MalformedRow("line " + std::to_string(line_no) +
                                   ": expected header 'diameter_mm,cumulative_percent'");
            have_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw MalformedRow("line " + std::to_string(line_no) + ": expected two comma-separated fields");
        const double d = detail::parse_field(line.substr(0, comma), line_no);
        const double pct = detail::parse_field(line.substr(comma + 1), line_no);
        if (!(d > 0.0) || !std::isfinite(d))
            throw MalformedRow("line " + std::to_string(line_no) + ": diameter must be positive");
        if (!(pct >= 0.0) || !(pct <= 100.0))
            throw MalformedRow("line " + std::to_string(line_no) + ": cumulative percent outside [0,100]");
        rows.emplace_back(d, pct / 100.0);
    }
    if (!have_header || rows.empty()) throw EmptyInput("granulometric table has no data rows");
    if (rows.size() < 2) throw InvalidCurve("granulometric table needs at least two rows");

    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    GranulometricCurve curve;
    curve.diameters_mm.reserve(rows.size());
    curve.cumulative.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first == rows[i - 1].first)
            throw DuplicateDiameter("duplicate diameter " + std::to_string(rows[i].first) + " mm");
        if (i > 0 && rows[i].second < rows[i - 1].second)
            throw NonMonotone("cumulative fraction decreases at diameter " +
                              std::to_string(rows[i].first) + " mm");
        curve.diameters_mm.push_back(rows[i].first);
        curve.cumulative.push_back(rows[i].second);
    }
    if (std::fabs(curve.cumulative.back() - 1.0) > 1e-9)
        throw InvalidCurve("largest diameter must carry cumulative 100%");
    return curve;
}

inline GranulometricCurve parse_granulometric_table(const std::string& text) {
    std::istringstream in(text);
    return parse_granulometric_table(in);
}

// Log-histogram: edges log(d_i / ref) in the given base, bin masses c_{i+1}-c_i.
inline LogHistogram to_log_histogram(const GranulometricCurve& curve, double log_base,
                                     double ref_diameter_mm) {
    if (!(log_base > 1.0)) throw DomainError("to_log_histogram: log base must exceed 1");
    if (!(ref_diameter_mm > 0.0)) throw DomainError("to_log_histogram: reference diameter must be positive");
    LogHistogram h;
    h.log_base = log_base;
    h.ref_diameter_mm = ref_diameter_mm;
    const double lb = std::log(log_base);
    h.edges.reserve(curve.size());
    for (double d : curve.diameters_mm) h.edges.push_back(std::log(d / ref_diameter_mm) / lb);
    h.masses.reserve(curve.size() - 1);
    h.midpoints.reserve(curve.size() - 1);
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        h.masses.push_back(curve.cumulative[i + 1] - curve.cumulative[i]);
        h.midpoints.push_back(0.5 * (h.edges[i + 1] + h.edges[i]));
    }
    return h;
}

// Draw round(k * p_i) uniform values inside each bin, in bin order.
// Zero-count bins contribute nothing; deterministic for a given generator.
inline DiameterSample sample_pseudo_diameters(const LogHistogram& hist, int k, Rng& rng) {
    if (k < 1) throw DomainError("sample_pseudo_diameters: k must be >= 1");
    if (!(hist.total_mass() > 0.0))
        throw DegenerateHistogram("all histogram masses are zero");
    DiameterSample s;
    s.k = k;
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
        const long long n = detail::round_half_even(static_cast<double>(k) * hist.masses[i]);
        for (long long j = 0; j < n; ++j)
            s.values.push_back(rng.uniform(hist.edges[i], hist.edges[i + 1]));
    }
    return s;
}

// Sup-distance between the sample's empirical CDF and the normalized curve,
// evaluated at the curve's knots mapped into log space.
inline double empirical_cdf_distance(const DiameterSample& sample, const GranulometricCurve& curve,
                                     double log_base, double ref_diameter_mm) {
    if (sample.values.empty()) throw EmptySample("empirical_cdf_distance: empty sample");
    std::vector<double> sorted = sample.values;
    std::sort(sorted.begin(), sorted.end());
    const double lb = std::log(log_base);
    const double c1 = curve.cumulative.front();
    const double span = curve.cumulative.back() - c1;
    const double m = static_cast<double>(sorted.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double knot = std::log(curve.diameters_mm[i] / ref_diameter_mm) / lb;
        const auto below =
            std::upper_bound(sorted.begin(), sorted.end(), knot) - sorted.begin();
        const double ecdf = static_cast<double>(below) / m;
        const double target = (curve.cumulative[i] - c1) / span;
        sup = std::max(sup, std::fabs(ecdf - target));
    }
    return sup;
}

// Debug export: edge_lo,edge_hi,midpoint,mass per bin.
inline void write_histogram_csv(const LogHistogram& h, std::ostream& out) {
    out << "edge_lo,edge_hi,midpoint,mass\n";
    char buf[160];
    for (std::size_t i = 0; i < h.bin_count(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", h.edges[i], h.edges[i + 1],
                      h.midpoints[i], h.masses[i]);
        out << buf;
    }
}

} // namespace granpack
