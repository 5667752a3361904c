#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "granpack/distributions.hpp"
#include "granpack/granulometry.hpp"
#include "granpack/packing.hpp"

namespace granpack {
namespace detail {

inline std::string svg_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline void svg_open(std::ostream& os, double w, double h, const std::string& desc) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(w) << "\" height=\""
       << svg_num(h) << "\" viewBox=\"0 0 " << svg_num(w) << " " << svg_num(h) << "\">\n";
    os << "<desc>" << desc << "</desc>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << svg_num(w) << "\" height=\"" << svg_num(h)
       << "\" fill=\"#ffffff\"/>\n";
}

inline void svg_text(std::ostream& os, double x, double y, const std::string& s, int size,
                     const char* anchor = "start", const char* fill = "#222222") {
    os << "<text x=\"" << svg_num(x) << "\" y=\"" << svg_num(y) << "\" font-family=\""
       << "Helvetica, Arial, sans-serif\" font-size=\"" << size << "\" text-anchor=\"" << anchor
       << "\" fill=\"" << fill << "\">" << s << "</text>\n";
}

} // namespace detail

// Log-histogram bars with the fitted density curve overlaid.
inline void write_fit_svg(const LogHistogram& hist, const SizeModel& model, double ell_floor,
                          const std::string& title, const std::string& desc, std::ostream& os) {
    using detail::svg_num;
    const double W = 880, H = 560;
    const double px0 = 76, px1 = 848, py0 = 64, py1 = 496;

    const double xlo = hist.edges.front(), xhi = hist.edges.back();
    const double pad = 0.04 * (xhi - xlo);
    const double x0 = xlo - pad, x1 = xhi + pad;

    std::vector<double> bar_density(hist.bin_count());
    double ymax = 0.0;
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
        const double w = hist.edges[i + 1] - hist.edges[i];
        bar_density[i] = w > 0.0 ? hist.masses[i] / w : 0.0;
        ymax = std::max(ymax, bar_density[i]);
    }
    const int curve_n = 257;
    std::vector<double> cx(curve_n), cy(curve_n);
    for (int i = 0; i < curve_n; ++i) {
        const double x = x0 + (x1 - x0) * i / (curve_n - 1);
        double f = pdf(model, x - ell_floor);
        if (!std::isfinite(f)) f = 0.0;
        cx[i] = x;
        cy[i] = f;
        ymax = std::max(ymax, f);
    }
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.12;

    const auto sx = [&](double x) { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); };
    const auto sy = [&](double y) { return py1 - y / ymax * (py1 - py0); };

    detail::svg_open(os, W, H, desc);
    detail::svg_text(os, W / 2, 34, title, 17, "middle");

    for (int t = 0; t <= 6; ++t) {
        const double x = x0 + (x1 - x0) * t / 6.0;
        os << "<line x1=\"" << svg_num(sx(x)) << "\" y1=\"" << svg_num(py1) << "\" x2=\""
           << svg_num(sx(x)) << "\" y2=\"" << svg_num(py1 + 6) << "\" stroke=\"#444444\"/>\n";
        detail::svg_text(os, sx(x), py1 + 24, svg_num(x), 13, "middle");
    }
    for (int t = 0; t <= 5; ++t) {
        const double y = ymax * t / 5.0;
        os << "<line x1=\"" << svg_num(px0 - 6) << "\" y1=\"" << svg_num(sy(y)) << "\" x2=\""
           << svg_num(px0) << "\" y2=\"" << svg_num(sy(y)) << "\" stroke=\"#444444\"/>\n";
        detail::svg_text(os, px0 - 10, sy(y) + 4, svg_num(y), 13, "end");
    }
    detail::svg_text(os, (px0 + px1) / 2, H - 14, "log diameter", 14, "middle");

    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
        const double xa = sx(hist.edges[i]), xb = sx(hist.edges[i + 1]);
        const double yt = sy(bar_density[i]);
        os << "<rect x=\"" << svg_num(xa) << "\" y=\"" << svg_num(yt) << "\" width=\""
           << svg_num(xb - xa) << "\" height=\"" << svg_num(py1 - yt)
           << "\" fill=\"#a6c8e0\" stroke=\"#5b8bb0\" stroke-width=\"1\"/>\n";
    }

    os << "<polyline fill=\"none\" stroke=\"#c2491d\" stroke-width=\"2.2\" points=\"";
    for (int i = 0; i < curve_n; ++i) {
        if (i) os << ' ';
        os << svg_num(sx(cx[i])) << ',' << svg_num(sy(cy[i]));
    }
    os << "\"/>\n";

    os << "<line x1=\"" << svg_num(px0) << "\" y1=\"" << svg_num(py1) << "\" x2=\""
       << svg_num(px1) << "\" y2=\"" << svg_num(py1) << "\" stroke=\"#222222\"/>\n";
    os << "<line x1=\"" << svg_num(px0) << "\" y1=\"" << svg_num(py0) << "\" x2=\""
       << svg_num(px0) << "\" y2=\"" << svg_num(py1) << "\" stroke=\"#222222\"/>\n";
    os << "</svg>\n";
}

// Full-domain view with every disk to scale, plus a 10x magnified inset of the
// central region.
inline void write_packing_svg(const Packing& p, const std::string& desc, std::ostream& os) {
    using detail::svg_num;
    const Vec2 lo = p.domain.bbox_min(), hi = p.domain.bbox_max();
    const double bw = hi.x - lo.x, bh = hi.y - lo.y;
    const double view = 520.0;
    const double scale = view / std::max(bw, bh);
    const double fw = bw * scale, fh = bh * scale;
    const double m = 44.0;

    // Inset source: central square, one tenth of the short side, shown at 10x.
    const double s = std::min(bw, bh) / 10.0;
    const double cx0 = lo.x + bw / 2.0 - s / 2.0, cy0 = lo.y + bh / 2.0 - s / 2.0;
    const double iscale = scale * 10.0;
    const double iw = s * iscale;
    const double ix = m + fw + m, iy = m;

    const double W = ix + iw + m;
    const double H = std::max(fh, iw) + 2.0 * m + 24.0;

    const auto fx = [&](double x) { return m + (x - lo.x) * scale; };
    const auto fy = [&](double y) { return m + (hi.y - y) * scale; };

    detail::svg_open(os, W, H, desc);

    if (p.domain.is_rectangle()) {
        os << "<rect x=\"" << svg_num(fx(lo.x)) << "\" y=\"" << svg_num(fy(hi.y))
           << "\" width=\"" << svg_num(fw) << "\" height=\"" << svg_num(fh)
           << "\" fill=\"#fdfdfb\" stroke=\"#222222\"/>\n";
    } else {
        os << "<path d=\"";
        const auto& vs = p.domain.vertices();
        for (std::size_t i = 0; i < vs.size(); ++i)
            os << (i ? 'L' : 'M') << svg_num(fx(vs[i].x)) << ' ' << svg_num(fy(vs[i].y));
        os << "Z\" fill=\"#fdfdfb\" stroke=\"#222222\"/>\n";
    }

    for (const auto& a : p.particles) {
        os << "<circle cx=\"" << svg_num(fx(a.x)) << "\" cy=\"" << svg_num(fy(a.y)) << "\" r=\""
           << svg_num(a.r * scale) << "\" fill=\"#4f7fa8\" fill-opacity=\"0.88\"/>\n";
    }

    // Source region marker.
    os << "<rect x=\"" << svg_num(fx(cx0)) << "\" y=\"" << svg_num(fy(cy0 + s)) << "\" width=\""
       << svg_num(s * scale) << "\" height=\"" << svg_num(s * scale)
       << "\" fill=\"none\" stroke=\"#c2491d\" stroke-dasharray=\"5,4\"/>\n";

    os << "<clipPath id=\"inset\"><rect x=\"" << svg_num(ix) << "\" y=\"" << svg_num(iy)
       << "\" width=\"" << svg_num(iw) << "\" height=\"" << svg_num(iw) << "\"/></clipPath>\n";
    os << "<g clip-path=\"url(#inset)\">\n";
    os << "<rect x=\"" << svg_num(ix) << "\" y=\"" << svg_num(iy) << "\" width=\"" << svg_num(iw)
       << "\" height=\"" << svg_num(iw) << "\" fill=\"#fdfdfb\"/>\n";
    const auto gx = [&](double x) { return ix + (x - cx0) * iscale; };
    const auto gy = [&](double y) { return iy + (cy0 + s - y) * iscale; };
    for (const auto& a : p.particles) {
        if (a.x + a.r < cx0 || a.x - a.r > cx0 + s || a.y + a.r < cy0 || a.y - a.r > cy0 + s)
            continue;
        os << "<circle cx=\"" << svg_num(gx(a.x)) << "\" cy=\"" << svg_num(gy(a.y)) << "\" r=\""
           << svg_num(a.r * iscale) << "\" fill=\"#4f7fa8\" fill-opacity=\"0.88\"/>\n";
    }
    os << "</g>\n";
    os << "<rect x=\"" << svg_num(ix) << "\" y=\"" << svg_num(iy) << "\" width=\"" << svg_num(iw)
       << "\" height=\"" << svg_num(iw) << "\" fill=\"none\" stroke=\"#c2491d\"/>\n";
    detail::svg_text(os, ix + iw / 2, iy + iw + 18, "10x detail", 13, "middle");

    char note[160];
    std::snprintf(note, sizeof note, "%zu particles, achieved porosity %.6g (target %.6g)",
                  p.particles.size(), p.achieved_porosity, p.target_porosity);
    detail::svg_text(os, m, H - 12, note, 13);
    os << "</svg>\n";
}

} // namespace granpack
