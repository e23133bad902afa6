#pragma once

// Conforming triangulations of Omega_eps = Omega ∪ Sigma_eps. The layer is a
// structured n_b x m strip of quads split into triangles, with nodes on exact
// normal offsets; the interior is an unstructured Delaunay mesh constrained to
// the interface polyline. The interface and the outer boundary are element
// edges, so the conductivity jump and the Robin term live exactly where the
// continuous problem puts them.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "layerlab/geometry.hpp"

namespace layerlab::meshing {

enum class Region : int { interior = 0, layer = 1 };
enum class BoundaryTag : int { interface = 0, outer = 1 };

struct Triangle {
    std::array<int, 3> v;
    Region region;
};

struct BoundaryEdge {
    int a, b;
    BoundaryTag tag;
    double t_mid;  // boundary parameter at the edge midpoint
};

struct MeshParams {
    int n_b = 128;                 // boundary panels
    int m = 4;                     // fibers across the layer
    double interior_grading = 1.0; // interior target length / mean panel length
    double min_angle_deg = 20.0;   // interior quality floor (layer is exempt)
};

struct LayerMesh {
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
    std::vector<BoundaryEdge> edges;
    int n_b = 0;
    int m = 0;          // 0 for an interior-only mesh
    double eps = 0.0;

    // Layer vertex layout: ring 0 (interface) occupies ids 0..n_b-1; ring j>=1
    // occupies n_b*j..n_b*(j+1)-1; interior fill points follow ring m.
    int ring_vertex(int j, int i) const { return j * n_b + ((i % n_b + n_b) % n_b); }

    // Layer triangles come first, two per quad, quad (i, j) at 2*(j*n_b + i).
    int layer_tri_base(int i, int j) const { return 2 * (j * n_b + i); }
    int layer_tri_count() const { return 2 * n_b * m; }
};

struct MeshDiagnostics {
    double min_angle_interior_deg = 0.0;
    double min_angle_layer_deg = 0.0;
    double max_aspect = 0.0;
    double area_interior = 0.0;
    double area_layer = 0.0;
    double length_interface = 0.0;
    double length_outer = 0.0;
    long euler_characteristic = 0;
    int vertex_count = 0;
    int triangle_count = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// deterministic symmetric jitter in [-0.5, 0.5)
inline double hash_jitter(std::uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) / 9007199254740992.0 - 0.5;
}

inline double tri_area2(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

inline double min_angle_rad(Vec2 a, Vec2 b, Vec2 c) {
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double area2 = std::abs(tri_area2(a, b, c));
    // sin(angle at A) = area2 / (lb*lc), etc.
    double s = 2.0;
    if (lb * lc > 0) s = std::min(s, area2 / (lb * lc));
    if (lc * la > 0) s = std::min(s, area2 / (lc * la));
    if (la * lb > 0) s = std::min(s, area2 / (la * lb));
    return std::asin(std::min(1.0, s));
}

inline double aspect_ratio(Vec2 a, Vec2 b, Vec2 c) {
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double lmax = std::max({la, lb, lc});
    const double area2 = std::abs(tri_area2(a, b, c));
    if (area2 == 0.0) return std::numeric_limits<double>::infinity();
    return lmax * lmax / area2;  // ~0.58 for equilateral, blows up for slivers
}

// Ray-crossing point-in-polygon on the interface polyline.
inline bool inside_polygon(const std::vector<Vec2>& poly, Vec2 p) {
    bool in = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j], b = poly[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            const double xint = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < xint) in = !in;
        }
    }
    return in;
}

inline double dist_to_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    double s = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return (p - (a + ab * s)).norm();
}

inline double dist_to_polygon(const std::vector<Vec2>& poly, Vec2 p) {
    double d = std::numeric_limits<double>::max();
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        d = std::min(d, dist_to_segment(p, poly[j], poly[i]));
    return d;
}

// --- Bowyer-Watson with neighbor walking ------------------------------------

struct BWTriangulation {
    std::vector<Vec2> pts;            // predicate coordinates
    std::vector<std::array<int, 3>> tv;  // triangle vertices, CCW
    std::vector<std::array<int, 3>> tn;  // neighbor across edge opposite v[e]
    std::vector<char> alive;
    int last_alive = 0;

    static double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
        const double ax = a.x - p.x, ay = a.y - p.y;
        const double bx = b.x - p.x, by = b.y - p.y;
        const double cx = c.x - p.x, cy = c.y - p.y;
        const double a2 = ax * ax + ay * ay;
        const double b2 = bx * bx + by * by;
        const double c2 = cx * cx + cy * cy;
        return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    }

    bool in_circumcircle(int t, Vec2 p) const {
        return incircle(pts[tv[t][0]], pts[tv[t][1]], pts[tv[t][2]], p) > 0.0;
    }

    // Walk toward p from a hint triangle; returns a triangle containing p.
    int locate(Vec2 p, int hint) const {
        int t = hint;
        for (std::size_t guard = 0; guard < tv.size() + 16; ++guard) {
            if (t < 0 || !alive[t]) break;
            bool moved = false;
            for (int e = 0; e < 3; ++e) {
                const Vec2 a = pts[tv[t][(e + 1) % 3]];
                const Vec2 b = pts[tv[t][(e + 2) % 3]];
                if (cross(b - a, p - a) < 0.0) {
                    const int nb = tn[t][e];
                    if (nb >= 0) {
                        t = nb;
                        moved = true;
                        break;
                    }
                }
            }
            if (!moved) return t;
        }
        // fallback: brute scan (degenerate walk, should be rare)
        for (int i = static_cast<int>(tv.size()) - 1; i >= 0; --i) {
            if (!alive[i]) continue;
            bool in = true;
            for (int e = 0; e < 3 && in; ++e) {
                const Vec2 a = pts[tv[i][(e + 1) % 3]];
                const Vec2 b = pts[tv[i][(e + 2) % 3]];
                if (cross(b - a, p - a) < -1e-14) in = false;
            }
            if (in) return i;
        }
        fail(errc::mesh_quality, "point location failed during triangulation");
    }

    void insert(int pid) {
        const Vec2 p = pts[pid];
        const int start = locate(p, last_alive);

        // flood the cavity of circumcircle violations
        std::vector<int> cavity;
        std::vector<char> in_cavity(tv.size(), 0);
        std::queue<int> bfs;
        bfs.push(start);
        in_cavity[start] = 1;
        while (!bfs.empty()) {
            const int t = bfs.front();
            bfs.pop();
            cavity.push_back(t);
            for (int e = 0; e < 3; ++e) {
                const int nb = tn[t][e];
                if (nb < 0 || in_cavity[nb] || !alive[nb]) continue;
                if (in_circumcircle(nb, p)) {
                    in_cavity[nb] = 1;
                    bfs.push(nb);
                }
            }
        }

        // boundary fan of the cavity: directed edges (a, b) with outside neighbor
        struct Rim {
            int a, b, outside, out_edge;
        };
        std::vector<Rim> rim;
        for (int t : cavity) {
            for (int e = 0; e < 3; ++e) {
                const int nb = tn[t][e];
                if (nb >= 0 && in_cavity[nb]) continue;
                const int a = tv[t][(e + 1) % 3];
                const int b = tv[t][(e + 2) % 3];
                int out_edge = -1;
                if (nb >= 0)
                    for (int f = 0; f < 3; ++f)
                        if (tn[nb][f] == t) out_edge = f;
                rim.push_back({a, b, nb, out_edge});
            }
        }

        for (int t : cavity) alive[t] = 0;

        // one new triangle (a, b, p) per rim edge
        std::map<int, int> by_first;  // rim-edge start vertex -> new triangle id
        std::vector<int> fresh;
        for (const Rim& r : rim) {
            const int id = static_cast<int>(tv.size());
            tv.push_back({r.a, r.b, pid});
            tn.push_back({-1, -1, r.outside});  // edge opposite pid is (a, b)
            alive.push_back(1);
            if (r.outside >= 0) tn[r.outside][r.out_edge] = id;
            by_first[r.a] = id;
            fresh.push_back(id);
        }
        // stitch consecutive fan triangles: edge opposite a is (b, pid), whose
        // mate is the triangle starting at b
        for (int id : fresh) {
            const int a = tv[id][0], b = tv[id][1];
            tn[id][0] = by_first.at(b);           // across (b, p)
            tn[by_first.at(b)][1] = id;           // that triangle's (p, a') edge
            (void)a;
        }
        last_alive = fresh.empty() ? last_alive : fresh.back();
    }
};

struct InteriorMesh {
    std::vector<Vec2> points;  // ring vertices first (exact), then fill points
    std::vector<std::array<int, 3>> tris;
    int n_ring = 0;
};

// Delaunay mesh of the region bounded by the ring polyline. Ring vertices are
// kept bit-exact; only predicate copies are jittered to break the cocircular
// degeneracies of symmetric inputs.
inline InteriorMesh build_interior(const std::vector<Vec2>& ring, double target_len,
                                   double min_angle_deg) {
    const int n_ring = static_cast<int>(ring.size());
    require(n_ring >= 3, errc::mesh_quality, "interior mesh needs a closed ring");

    // hexagonal fill points, kept clear of the ring polyline
    double lo_x = ring[0].x, hi_x = ring[0].x, lo_y = ring[0].y, hi_y = ring[0].y;
    for (const Vec2& p : ring) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    std::vector<Vec2> pts(ring.begin(), ring.end());
    const double row_step = target_len * 0.8660254037844386;
    int row = 0;
    for (double y = lo_y + 0.5 * row_step; y < hi_y; y += row_step, ++row) {
        const double x0 = lo_x + ((row % 2) ? 0.75 : 0.25) * target_len;
        int col = 0;
        for (double x = x0; x < hi_x; x += target_len, ++col) {
            Vec2 p{x, y};
            // deterministic jitter breaks the lattice symmetry
            const std::uint64_t key =
                (static_cast<std::uint64_t>(row) << 32) ^ static_cast<std::uint64_t>(col);
            p.x += 1e-4 * target_len * hash_jitter(2 * key);
            p.y += 1e-4 * target_len * hash_jitter(2 * key + 1);
            if (!inside_polygon(ring, p)) continue;
            if (dist_to_polygon(ring, p) < 0.6 * target_len) continue;
            pts.push_back(p);
        }
    }
    const int n_real = static_cast<int>(pts.size());

    // super-triangle far outside everything
    const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    const double R = 8.0 * std::max(hi_x - lo_x, hi_y - lo_y) + 8.0 * target_len;

    BWTriangulation bw;
    bw.pts = pts;
    // predicate-only jitter for the exact ring vertices
    for (int i = 0; i < n_ring; ++i) {
        bw.pts[i].x += 1e-7 * target_len * hash_jitter(0x5eedull + 2 * i);
        bw.pts[i].y += 1e-7 * target_len * hash_jitter(0x5eedull + 2 * i + 1);
    }
    bw.pts.push_back({cx, cy + 2.0 * R});
    bw.pts.push_back({cx - 1.7320508075688772 * R, cy - R});
    bw.pts.push_back({cx + 1.7320508075688772 * R, cy - R});
    bw.tv.push_back({n_real, n_real + 1, n_real + 2});
    bw.tn.push_back({-1, -1, -1});
    bw.alive.push_back(1);
    for (int i = 0; i < n_real; ++i) bw.insert(i);

    // ring edges must be present; the margin around the polyline makes this
    // the overwhelmingly common case, so recovery is a checked error path
    std::set<std::pair<int, int>> present;
    for (std::size_t t = 0; t < bw.tv.size(); ++t) {
        if (!bw.alive[t]) continue;
        for (int e = 0; e < 3; ++e) {
            int a = bw.tv[t][(e + 1) % 3], b = bw.tv[t][(e + 2) % 3];
            present.insert({std::min(a, b), std::max(a, b)});
        }
    }
    for (int i = 0; i < n_ring; ++i) {
        const int j = (i + 1) % n_ring;
        if (!present.count({std::min(i, j), std::max(i, j)})) {
            std::ostringstream os;
            os << "interface edge " << i << "-" << j
               << " not recovered by the triangulation; refine the boundary or "
                  "coarsen the interior (target length "
               << target_len << ")";
            fail(errc::mesh_quality, os.str());
        }
    }

    // flood the exterior from the super-triangle side, blocked by ring edges
    auto is_ring_edge = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        if (b >= n_ring) return false;
        return (b - a == 1) || (a == 0 && b == n_ring - 1);
    };
    std::vector<char> exterior(bw.tv.size(), 0);
    std::queue<int> flood;
    for (std::size_t t = 0; t < bw.tv.size(); ++t) {
        if (!bw.alive[t]) continue;
        if (bw.tv[t][0] >= n_real || bw.tv[t][1] >= n_real || bw.tv[t][2] >= n_real) {
            exterior[t] = 1;
            flood.push(static_cast<int>(t));
        }
    }
    while (!flood.empty()) {
        const int t = flood.front();
        flood.pop();
        for (int e = 0; e < 3; ++e) {
            const int nb = bw.tn[t][e];
            if (nb < 0 || !bw.alive[nb] || exterior[nb]) continue;
            if (is_ring_edge(bw.tv[t][(e + 1) % 3], bw.tv[t][(e + 2) % 3])) continue;
            exterior[nb] = 1;
            flood.push(nb);
        }
    }

    InteriorMesh mesh;
    mesh.points = pts;
    mesh.n_ring = n_ring;
    for (std::size_t t = 0; t < bw.tv.size(); ++t)
        if (bw.alive[t] && !exterior[t]) mesh.tris.push_back(bw.tv[t]);
    require(!mesh.tris.empty(), errc::mesh_quality, "interior triangulation is empty");

    // guarded Laplacian smoothing of the fill points
    std::vector<std::vector<int>> v2t(mesh.points.size());
    for (std::size_t t = 0; t < mesh.tris.size(); ++t)
        for (int e = 0; e < 3; ++e) v2t[mesh.tris[t][e]].push_back(static_cast<int>(t));
    for (int sweep = 0; sweep < 3; ++sweep) {
        for (int v = n_ring; v < n_real; ++v) {
            Vec2 acc{0, 0};
            int cnt = 0;
            for (int t : v2t[v])
                for (int e = 0; e < 3; ++e)
                    if (mesh.tris[t][e] != v) {
                        acc += mesh.points[mesh.tris[t][e]];
                        ++cnt;
                    }
            if (cnt == 0) continue;
            const Vec2 trial = acc / static_cast<double>(cnt);
            const Vec2 old = mesh.points[v];
            mesh.points[v] = trial;
            bool ok = true;
            for (int t : v2t[v]) {
                if (tri_area2(mesh.points[mesh.tris[t][0]], mesh.points[mesh.tris[t][1]],
                              mesh.points[mesh.tris[t][2]]) <= 0.0) {
                    ok = false;
                    break;
                }
            }
            if (!ok) mesh.points[v] = old;
        }
    }

    // final validation on exact coordinates
    double worst = kPi;
    for (const auto& t : mesh.tris) {
        const Vec2 a = mesh.points[t[0]], b = mesh.points[t[1]], c = mesh.points[t[2]];
        require(tri_area2(a, b, c) > 0.0, errc::mesh_quality,
                "interior triangle inverted after smoothing");
        worst = std::min(worst, min_angle_rad(a, b, c));
    }
    if (worst < min_angle_deg * kPi / 180.0) {
        std::ostringstream os;
        os << "interior quality floor violated: min angle " << worst * 180.0 / kPi
           << " deg < " << min_angle_deg << " deg";
        fail(errc::mesh_quality, os.str());
    }
    return mesh;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline LayerMesh build_mesh(const geometry::LayerGeometry& geom, double eps,
                            const MeshParams& params = {}) {
    require(params.n_b >= 16, errc::config, "build_mesh: n_b must be >= 16");
    require(params.m >= 2, errc::config, "build_mesh: m must be >= 2");
    require(eps > 0.0 && eps <= 1.0, errc::config, "build_mesh: eps must lie in (0, 1]");
    const int n_b = params.n_b, m = params.m;
    const auto& curve = geom.curve();

    LayerMesh mesh;
    mesh.n_b = n_b;
    mesh.m = m;
    mesh.eps = eps;

    // layer rings on exact offsets
    std::vector<geometry::CurveFrame> frames(n_b);
    for (int i = 0; i < n_b; ++i) frames[i] = curve.frame(static_cast<double>(i) / n_b);
    for (int j = 0; j <= m; ++j) {
        for (int i = 0; i < n_b; ++i) {
            const double t = static_cast<double>(i) / n_b;
            const double off = eps * geom.h().eval(t) * static_cast<double>(j) / m;
            mesh.vertices.push_back(frames[i].point + frames[i].normal * off);
        }
    }

    // two triangles per quad; inner triangle first (carries the ring-j edge)
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n_b; ++i) {
            const int a = mesh.ring_vertex(j, i);
            const int b = mesh.ring_vertex(j, i + 1);
            const int c = mesh.ring_vertex(j + 1, i + 1);
            const int d = mesh.ring_vertex(j + 1, i);
            mesh.triangles.push_back({{a, c, b}, Region::layer});
            mesh.triangles.push_back({{a, d, c}, Region::layer});
        }
    }

    // interior triangulation glued to ring 0
    std::vector<Vec2> ring(mesh.vertices.begin(), mesh.vertices.begin() + n_b);
    const double target = params.interior_grading * curve.length() / n_b;
    const auto interior = detail::build_interior(ring, target, params.min_angle_deg);
    const int fill_offset = static_cast<int>(mesh.vertices.size()) - n_b;  // = m * n_b
    for (std::size_t i = n_b; i < interior.points.size(); ++i)
        mesh.vertices.push_back(interior.points[i]);
    for (const auto& t : interior.tris) {
        auto remap = [&](int v) { return v < n_b ? v : v + fill_offset; };
        mesh.triangles.push_back({{remap(t[0]), remap(t[1]), remap(t[2])}, Region::interior});
    }

    for (int i = 0; i < n_b; ++i) {
        const double t_mid = (i + 0.5) / n_b;
        mesh.edges.push_back(
            {mesh.ring_vertex(0, i), mesh.ring_vertex(0, i + 1), BoundaryTag::interface, t_mid});
        mesh.edges.push_back(
            {mesh.ring_vertex(m, i), mesh.ring_vertex(m, i + 1), BoundaryTag::outer, t_mid});
    }

    // conformity audit: interior edges shared twice; interface edges once per
    // region; outer edges once
    std::map<std::pair<int, int>, std::array<int, 2>> edge_use;  // [interior, layer] counts
    for (const auto& tr : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tr.v[e], b = tr.v[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_use[{a, b}][tr.region == Region::layer ? 1 : 0];
        }
    }
    for (const auto& be : mesh.edges) {
        int a = be.a, b = be.b;
        if (a > b) std::swap(a, b);
        const auto it = edge_use.find({a, b});
        require(it != edge_use.end(), errc::mesh_quality, "boundary edge missing from mesh");
        const auto& use = it->second;
        if (be.tag == BoundaryTag::interface)
            require(use[0] == 1 && use[1] == 1, errc::mesh_quality,
                    "interface edge must join one interior and one layer triangle");
        else
            require(use[0] + use[1] == 1, errc::mesh_quality,
                    "outer edge must belong to exactly one triangle");
    }
    for (const auto& [key, use] : edge_use) {
        const int total = use[0] + use[1];
        require(total == 1 || total == 2, errc::mesh_quality,
                "non-manifold edge in mesh");
    }
    for (const auto& tr : mesh.triangles)
        require(detail::tri_area2(mesh.vertices[tr.v[0]], mesh.vertices[tr.v[1]],
                                  mesh.vertices[tr.v[2]]) > 0.0,
                errc::mesh_quality, "inverted triangle");
    return mesh;
}

// Interior-only mesh (limit problem): same generator, no layer rings.
inline LayerMesh build_interior_mesh(const geometry::LayerGeometry& geom,
                                     const MeshParams& params = {}) {
    require(params.n_b >= 16, errc::config, "build_interior_mesh: n_b must be >= 16");
    const int n_b = params.n_b;
    const auto& curve = geom.curve();

    LayerMesh mesh;
    mesh.n_b = n_b;
    mesh.m = 0;
    mesh.eps = 0.0;

    std::vector<Vec2> ring(n_b);
    for (int i = 0; i < n_b; ++i) ring[i] = curve.eval(static_cast<double>(i) / n_b);
    const double target = params.interior_grading * curve.length() / n_b;
    const auto interior = detail::build_interior(ring, target, params.min_angle_deg);
    mesh.vertices = interior.points;
    for (const auto& t : interior.tris)
        mesh.triangles.push_back({{t[0], t[1], t[2]}, Region::interior});
    for (int i = 0; i < n_b; ++i)
        mesh.edges.push_back({i, (i + 1) % n_b, BoundaryTag::interface, (i + 0.5) / n_b});
    return mesh;
}

inline MeshDiagnostics mesh_diagnostics(const LayerMesh& mesh) {
    MeshDiagnostics d;
    d.vertex_count = static_cast<int>(mesh.vertices.size());
    d.triangle_count = static_cast<int>(mesh.triangles.size());
    d.min_angle_interior_deg = 180.0;
    d.min_angle_layer_deg = 180.0;

    std::set<std::pair<int, int>> edges;
    for (const auto& tr : mesh.triangles) {
        const Vec2 a = mesh.vertices[tr.v[0]], b = mesh.vertices[tr.v[1]],
                   c = mesh.vertices[tr.v[2]];
        const double area = 0.5 * detail::tri_area2(a, b, c);
        const double ang = detail::min_angle_rad(a, b, c) * 180.0 / kPi;
        d.max_aspect = std::max(d.max_aspect, detail::aspect_ratio(a, b, c));
        if (tr.region == Region::layer) {
            d.area_layer += area;
            d.min_angle_layer_deg = std::min(d.min_angle_layer_deg, ang);
        } else {
            d.area_interior += area;
            d.min_angle_interior_deg = std::min(d.min_angle_interior_deg, ang);
        }
        for (int e = 0; e < 3; ++e) {
            int u = tr.v[e], v = tr.v[(e + 1) % 3];
            if (u > v) std::swap(u, v);
            edges.insert({u, v});
        }
    }
    for (const auto& be : mesh.edges) {
        const double len = (mesh.vertices[be.a] - mesh.vertices[be.b]).norm();
        if (be.tag == BoundaryTag::interface)
            d.length_interface += len;
        else
            d.length_outer += len;
    }
    d.euler_characteristic = static_cast<long>(mesh.vertices.size()) -
                             static_cast<long>(edges.size()) +
                             static_cast<long>(mesh.triangles.size());
    return d;
}

// Plain-text export: "vertices N / triangles M / edges K" header, then one
// record per line with region / boundary tags as integer columns.
inline void write_mesh_text(const LayerMesh& mesh, std::ostream& os) {
    os << "vertices " << mesh.vertices.size() << " / triangles " << mesh.triangles.size()
       << " / edges " << mesh.edges.size() << "\n";
    char buf[96];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
        os << buf;
    }
    for (const auto& t : mesh.triangles)
        os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << static_cast<int>(t.region)
           << "\n";
    for (const auto& e : mesh.edges) {
        std::snprintf(buf, sizeof buf, "%d %d %d %.17g\n", e.a, e.b, static_cast<int>(e.tag),
                      e.t_mid);
        os << buf;
    }
}

}  // namespace layerlab::meshing
