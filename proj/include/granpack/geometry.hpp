#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "granpack/errors.hpp"
#include "granpack/rng.hpp"

namespace granpack {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

namespace detail {

inline double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline int orient_sign(const Vec2& o, const Vec2& a, const Vec2& b) {
    const double c = cross(o, a, b);
    return c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
}

inline bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Inclusive segment intersection (touching endpoints count).
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const int o1 = orient_sign(a, b, c);
    const int o2 = orient_sign(a, b, d);
    const int o3 = orient_sign(c, d, a);
    const int o4 = orient_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

inline double dist2_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double px = a.x + t * dx - p.x;
    const double py = a.y + t * dy - p.y;
    return px * px + py * py;
}

} // namespace detail

// Closed region particles must stay inside: an axis-aligned rectangle anchored
// at the origin, or a simple polygon (canonicalized to counter-clockwise).
class Domain {
public:
    static Domain rectangle(double width, double height) {
        if (!(width > 0.0) || !(height > 0.0))
            throw DomainError("rectangle sides must be positive");
        Domain d;
        d.shape_ = Rect{width, height};
        return d;
    }

    static Domain polygon(std::vector<Vec2> vertices) {
        if (vertices.size() < 3) throw DomainError("polygon needs at least 3 vertices");
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = vertices[i];
            const Vec2& b = vertices[(i + 1) % n];
            if (a.x == b.x && a.y == b.y) throw DomainError("polygon has a zero-length edge");
        }
        double twice_area = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = vertices[i];
            const Vec2& b = vertices[(i + 1) % n];
            twice_area += a.x * b.y - b.x * a.y;
        }
        if (std::fabs(twice_area) < 1e-300) throw DomainError("polygon area is zero");
        if (twice_area < 0.0) std::reverse(vertices.begin(), vertices.end());

        // Simplicity: non-adjacent edges must not touch at all; adjacent edges
        // may share only their common vertex (no collinear back-tracking).
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = vertices[i];
            const Vec2& b = vertices[(i + 1) % n];
            for (std::size_t j = i + 1; j < n; ++j) {
                const Vec2& c = vertices[j];
                const Vec2& d = vertices[(j + 1) % n];
                const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
                if (adjacent) {
                    const Vec2& shared = (j == i + 1) ? b : a;
                    const Vec2& p = (j == i + 1) ? a : b;
                    const Vec2& q = (j == i + 1) ? d : c;
                    if (detail::orient_sign(shared, p, q) == 0 &&
                        (p.x - shared.x) * (q.x - shared.x) +
                                (p.y - shared.y) * (q.y - shared.y) >
                            0.0)
                        throw DomainError("polygon edges fold back on themselves");
                    continue;
                }
                if (detail::segments_intersect(a, b, c, d))
                    throw DomainError("polygon is self-intersecting");
            }
        }
        Domain dm;
        Poly p;
        p.vertices = std::move(vertices);
        p.area = 0.5 * std::fabs(twice_area);
        p.min = p.max = p.vertices[0];
        for (const auto& v : p.vertices) {
            p.min.x = std::min(p.min.x, v.x);
            p.min.y = std::min(p.min.y, v.y);
            p.max.x = std::max(p.max.x, v.x);
            p.max.y = std::max(p.max.y, v.y);
        }
        dm.shape_ = std::move(p);
        return dm;
    }

    double area() const {
        if (const auto* r = std::get_if<Rect>(&shape_)) return r->w * r->h;
        return std::get<Poly>(shape_).area;
    }

    bool is_rectangle() const { return std::holds_alternative<Rect>(shape_); }
    double width() const { return std::get<Rect>(shape_).w; }
    double height() const { return std::get<Rect>(shape_).h; }
    const std::vector<Vec2>& vertices() const { return std::get<Poly>(shape_).vertices; }

    bool contains_point(double x, double y) const {
        if (const auto* r = std::get_if<Rect>(&shape_))
            return x >= 0.0 && x <= r->w && y >= 0.0 && y <= r->h;
        const auto& p = std::get<Poly>(shape_);
        if (x < p.min.x || x > p.max.x || y < p.min.y || y > p.max.y) return false;
        bool in = false;
        const std::size_t n = p.vertices.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2& a = p.vertices[j];
            const Vec2& b = p.vertices[i];
            if ((b.y > y) != (a.y > y)) {
                const double xint = b.x + (y - b.y) / (a.y - b.y) * (a.x - b.x);
                if (x < xint) in = !in;
            }
        }
        return in;
    }

    // Disk containment: center inside and clearance r to every boundary edge.
    bool contains_disk(double x, double y, double r) const {
        if (const auto* rc = std::get_if<Rect>(&shape_))
            return x >= r && x <= rc->w - r && y >= r && y <= rc->h - r;
        const auto& p = std::get<Poly>(shape_);
        if (!contains_point(x, y)) return false;
        const Vec2 c{x, y};
        const std::size_t n = p.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (detail::dist2_point_segment(c, p.vertices[i], p.vertices[(i + 1) % n]) < r * r)
                return false;
        }
        return true;
    }

    // Uniform point in W; polygons use rejection from the bounding box.
    Vec2 sample_point(Rng& rng) const {
        if (const auto* r = std::get_if<Rect>(&shape_))
            return {rng.uniform(0.0, r->w), rng.uniform(0.0, r->h)};
        const auto& p = std::get<Poly>(shape_);
        for (;;) {
            const double x = rng.uniform(p.min.x, p.max.x);
            const double y = rng.uniform(p.min.y, p.max.y);
            if (contains_point(x, y)) return {x, y};
        }
    }

    Vec2 bbox_min() const {
        if (const auto* r = std::get_if<Rect>(&shape_)) {
            (void)r;
            return {0.0, 0.0};
        }
        return std::get<Poly>(shape_).min;
    }
    Vec2 bbox_max() const {
        if (const auto* r = std::get_if<Rect>(&shape_)) return {r->w, r->h};
        return std::get<Poly>(shape_).max;
    }

private:
    struct Rect {
        double w, h;
    };
    struct Poly {
        std::vector<Vec2> vertices;
        double area = 0.0;
        Vec2 min, max;
    };
    std::variant<Rect, Poly> shape_{Rect{1.0, 1.0}};
};

} // namespace granpack
