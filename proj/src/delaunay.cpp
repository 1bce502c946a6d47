#include "distcomp/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace distcomp {

namespace {

double orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                const Eigen::Vector2d& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

}  // namespace

double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                 const Eigen::Vector2d& c, const Eigen::Vector2d& p) {
    // 3x3 determinant of the lifted points, evaluated in long double to
    // keep near-cocircular cases stable at the scales used here.
    const long double ax = a.x() - p.x(), ay = a.y() - p.y();
    const long double bx = b.x() - p.x(), by = b.y() - p.y();
    const long double cx = c.x() - p.x(), cy = c.y() - p.y();
    const long double a2 = ax * ax + ay * ay;
    const long double b2 = bx * bx + by * by;
    const long double c2 = cx * cx + cy * cy;
    const long double det =
        ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    return static_cast<double>(det);
}

std::vector<std::array<std::uint32_t, 3>> delaunay_triangulate(
    const std::vector<Eigen::Vector2d>& points) {
    const std::size_t n = points.size();
    if (n < 3) {
        throw std::invalid_argument("delaunay: need at least 3 points");
    }

    // Working copy with three super-triangle vertices appended.
    std::vector<Eigen::Vector2d> pts = points;
    Eigen::Vector2d lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Eigen::Vector2d center = 0.5 * (lo + hi);
    const double span = std::max((hi - lo).maxCoeff(), 1e-12);
    const double r = 64.0 * span;
    const std::uint32_t s0 = static_cast<std::uint32_t>(n);
    pts.emplace_back(center.x() - 2.0 * r, center.y() - r);
    pts.emplace_back(center.x() + 2.0 * r, center.y() - r);
    pts.emplace_back(center.x(), center.y() + 2.0 * r);

    struct Tri {
        std::array<std::uint32_t, 3> v;
        bool alive = true;
    };
    std::vector<Tri> tris;
    tris.push_back({{s0, s0 + 1, s0 + 2}, true});

    std::vector<std::size_t> bad;
    for (std::uint32_t ip = 0; ip < n; ++ip) {
        const Eigen::Vector2d& p = pts[ip];
        bad.clear();
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            if (in_circle(pts[tris[t].v[0]], pts[tris[t].v[1]], pts[tris[t].v[2]], p) > 0.0) {
                bad.push_back(t);
            }
        }
        // Cavity boundary: edges of bad triangles not shared by two bad
        // triangles. Edge keyed on its sorted endpoints.
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::uint32_t, int>>
            edges;
        for (std::size_t t : bad) {
            const auto& v = tris[t].v;
            for (int e = 0; e < 3; ++e) {
                const std::uint32_t u0 = v[e];
                const std::uint32_t u1 = v[(e + 1) % 3];
                const auto key = std::minmax(u0, u1);
                auto it = edges.find(key);
                if (it == edges.end()) {
                    edges.emplace(key, std::make_pair(u0, 1));
                } else {
                    ++it->second.second;
                }
            }
            tris[t].alive = false;
        }
        for (const auto& [key, val] : edges) {
            if (val.second != 1) continue;
            // val.first is the first endpoint in the bad triangle's CCW
            // order, so (first, second, p) stays CCW.
            const std::uint32_t u0 = val.first;
            const std::uint32_t u1 = u0 == key.first ? key.second : key.first;
            if (std::abs(orient2d(pts[u0], pts[u1], p)) <= 0.0) {
                continue;  // degenerate sliver on the cavity rim
            }
            tris.push_back({{u0, u1, ip}, true});
        }
    }

    std::vector<std::array<std::uint32_t, 3>> out;
    for (const Tri& t : tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;  // touches super-triangle
        out.push_back(t.v);
    }
    if (out.empty()) {
        throw std::runtime_error("delaunay: no triangles (points may be collinear)");
    }
    return out;
}

}  // namespace distcomp
