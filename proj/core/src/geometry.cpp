#include "kcex/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kcex/errors.hpp"

namespace kcex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Point& o, const Point& a, const Point& b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(const Point& a, const Point& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

Point centroid(const ConvexPolygon& poly)
{
    Point c;
    for (const auto& v : poly.vertices) {
        c.x += v.x;
        c.y += v.y;
    }
    c.x /= static_cast<double>(poly.vertices.size());
    c.y /= static_cast<double>(poly.vertices.size());
    return c;
}

double polygon_edge_scale(const ConvexPolygon& poly)
{
    double s = 0.0;
    const auto n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        s = std::max(s, dist(poly.vertices[i], poly.vertices[(i + 1) % n]));
    }
    return s;
}

void validate_polygon(const ConvexPolygon& poly)
{
    const auto n = poly.vertices.size();
    if (n < 3) {
        throw InvalidGeometry("convex polygon needs at least 3 vertices");
    }
    const double scale = polygon_edge_scale(poly);
    if (scale <= 0.0) {
        throw InvalidGeometry("degenerate polygon: coincident vertices");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly.vertices[i];
        const Point& b = poly.vertices[(i + 1) % n];
        const Point& c = poly.vertices[(i + 2) % n];
        if (dist(a, b) <= 1e-14 * scale) {
            throw InvalidGeometry("degenerate polygon edge");
        }
        if (cross(a, b, c) <= 1e-12 * scale * scale) {
            throw InvalidGeometry(
                "polygon must be strictly convex with counterclockwise vertex order");
        }
    }
}

int cells_for(double extent, double h)
{
    return static_cast<int>(std::ceil(extent / h - 1e-12));
}

// Closed CCW ring polylines around `center`, innermost first; every point of
// ring j must have a strictly larger angle than its predecessor (angles
// measured from the ring's first point). The outermost ring is the boundary.
Mesh star_mesh(const Point& center, const std::vector<std::vector<Point>>& rings, double h)
{
    Mesh mesh;
    mesh.dim = 2;
    mesh.h = h;
    mesh.nodes.push_back(center);
    std::vector<std::vector<int>> ring_ids;
    for (const auto& ring : rings) {
        std::vector<int> ids;
        ids.reserve(ring.size());
        for (const auto& p : ring) {
            ids.push_back(static_cast<int>(mesh.nodes.size()));
            mesh.nodes.push_back(p);
        }
        ring_ids.push_back(std::move(ids));
    }

    auto relative_angles = [&](const std::vector<Point>& ring) {
        std::vector<double> ang(ring.size(), 0.0);
        const double base = std::atan2(ring[0].y - center.y, ring[0].x - center.x);
        for (std::size_t k = 1; k < ring.size(); ++k) {
            double a = std::atan2(ring[k].y - center.y, ring[k].x - center.x) - base;
            a = std::fmod(a + 2.0 * kTwoPi, kTwoPi);
            ang[k] = a;
        }
        return ang;
    };

    const auto& first = ring_ids.front();
    const int n0 = static_cast<int>(first.size());
    for (int k = 0; k < n0; ++k) {
        mesh.triangles.push_back({0, first[k], first[(k + 1) % n0]});
    }

    for (std::size_t j = 0; j + 1 < rings.size(); ++j) {
        const auto& inner = ring_ids[j];
        const auto& outer = ring_ids[j + 1];
        const auto ang_in = relative_angles(rings[j]);
        const auto ang_out = relative_angles(rings[j + 1]);
        const std::size_t ni = inner.size();
        const std::size_t no = outer.size();
        std::size_t i = 0, o = 0;
        while (i < ni || o < no) {
            const double next_i = i + 1 < ni ? ang_in[i + 1] : kTwoPi;
            const double next_o = o + 1 < no ? ang_out[o + 1] : kTwoPi;
            if (o < no && (i >= ni || next_o <= next_i)) {
                mesh.triangles.push_back(
                    {inner[i % ni], outer[o % no], outer[(o + 1) % no]});
                ++o;
            } else {
                mesh.triangles.push_back(
                    {outer[o % no], inner[(i + 1) % ni], inner[i % ni]});
                ++i;
            }
        }
    }

    mesh.boundary.assign(mesh.nodes.size(), 0);
    for (int id : ring_ids.back()) {
        mesh.boundary[static_cast<std::size_t>(id)] = 1;
    }
    return mesh;
}

double triangle_area2(const Mesh& mesh, const std::array<int, 3>& t)
{
    const Point& a = mesh.nodes[static_cast<std::size_t>(t[0])];
    const Point& b = mesh.nodes[static_cast<std::size_t>(t[1])];
    const Point& c = mesh.nodes[static_cast<std::size_t>(t[2])];
    return cross(a, b, c);
}

void validate_mesh(const Mesh& mesh)
{
    if (mesh.dim == 1) {
        for (const auto& s : mesh.segments) {
            if (mesh.nodes[static_cast<std::size_t>(s[1])].x <=
                mesh.nodes[static_cast<std::size_t>(s[0])].x) {
                throw MeshTooCoarse("degenerate 1D element");
            }
        }
    } else {
        for (const auto& t : mesh.triangles) {
            if (triangle_area2(mesh, t) <= 0.0) {
                throw MeshTooCoarse("degenerate or inverted triangle");
            }
        }
    }
    if (mesh.interior_count() < 1) {
        throw MeshTooCoarse("mesh has no interior node; decrease h");
    }
}

Mesh mesh_interval(const Interval& iv, double h)
{
    const int n = cells_for(iv.b - iv.a, h);
    if (n < 2) {
        throw MeshTooCoarse("interval mesh needs at least 2 cells for an interior node");
    }
    Mesh mesh;
    mesh.dim = 1;
    mesh.h = h;
    const double len = iv.b - iv.a;
    mesh.nodes.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        mesh.nodes[static_cast<std::size_t>(i)] = {iv.a + len * i / n, 0.0};
    }
    mesh.nodes.front() = {iv.a, 0.0};
    mesh.nodes.back() = {iv.b, 0.0};
    for (int i = 0; i < n; ++i) {
        mesh.segments.push_back({i, i + 1});
    }
    mesh.boundary.assign(mesh.nodes.size(), 0);
    mesh.boundary.front() = 1;
    mesh.boundary.back() = 1;
    return mesh;
}

Mesh mesh_rectangle(const Rectangle& r, double h)
{
    const int nx = cells_for(r.bx - r.ax, h);
    const int ny = cells_for(r.by - r.ay, h);
    if (nx < 2 || ny < 2) {
        throw MeshTooCoarse("rectangle mesh needs at least 2 cells per side");
    }
    Mesh mesh;
    mesh.dim = 2;
    mesh.h = h;
    const double wx = r.bx - r.ax;
    const double wy = r.by - r.ay;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            mesh.nodes.push_back({r.ax + wx * i / nx, r.ay + wy * j / ny});
        }
    }
    auto nid = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            mesh.triangles.push_back({nid(i, j), nid(i + 1, j), nid(i + 1, j + 1)});
            mesh.triangles.push_back({nid(i, j), nid(i + 1, j + 1), nid(i, j + 1)});
        }
    }
    mesh.boundary.assign(mesh.nodes.size(), 0);
    for (int i = 0; i <= nx; ++i) {
        mesh.boundary[static_cast<std::size_t>(nid(i, 0))] = 1;
        mesh.boundary[static_cast<std::size_t>(nid(i, ny))] = 1;
    }
    for (int j = 0; j <= ny; ++j) {
        mesh.boundary[static_cast<std::size_t>(nid(0, j))] = 1;
        mesh.boundary[static_cast<std::size_t>(nid(nx, j))] = 1;
    }
    return mesh;
}

Mesh mesh_disk(const Disk& d, double h)
{
    const int m = std::max(1, cells_for(d.radius, h));
    std::vector<std::vector<Point>> rings;
    for (int j = 1; j <= m; ++j) {
        const double r = d.radius * j / m;
        const int n = 6 * j;
        std::vector<Point> ring;
        ring.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const double th = kTwoPi * k / n;
            ring.push_back({d.center.x + r * std::cos(th), d.center.y + r * std::sin(th)});
        }
        rings.push_back(std::move(ring));
    }
    return star_mesh(d.center, rings, h);
}

// Bowyer-Watson Delaunay triangulation. Points must be pairwise distinct;
// the insertion order is the deterministic construction order.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point>& pts)
{
    const int n = static_cast<int>(pts.size());
    double x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
    for (const auto& p : pts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const double span = std::max(x1 - x0, y1 - y0);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);

    std::vector<Point> all = pts;
    all.push_back({cx - 20.0 * span, cy - 10.0 * span});
    all.push_back({cx + 20.0 * span, cy - 10.0 * span});
    all.push_back({cx, cy + 20.0 * span});

    auto orient = [&](int a, int b, int c) {
        return cross(all[static_cast<std::size_t>(a)], all[static_cast<std::size_t>(b)],
                     all[static_cast<std::size_t>(c)]);
    };
    auto in_circumcircle = [&](const std::array<int, 3>& t, int p) {
        std::array<int, 3> tt = t;
        if (orient(tt[0], tt[1], tt[2]) < 0.0) {
            std::swap(tt[1], tt[2]);
        }
        const Point& pa = all[static_cast<std::size_t>(tt[0])];
        const Point& pb = all[static_cast<std::size_t>(tt[1])];
        const Point& pc = all[static_cast<std::size_t>(tt[2])];
        const Point& pp = all[static_cast<std::size_t>(p)];
        const double ax = pa.x - pp.x, ay = pa.y - pp.y;
        const double bx = pb.x - pp.x, by = pb.y - pp.y;
        const double dx = pc.x - pp.x, dy = pc.y - pp.y;
        const double det = (ax * ax + ay * ay) * (bx * dy - by * dx) -
                           (bx * bx + by * by) * (ax * dy - ay * dx) +
                           (dx * dx + dy * dy) * (ax * by - ay * bx);
        const double scale = span * span * span * span;
        return det > 1e-12 * scale;  // near-cocircular counts as outside
    };

    std::vector<std::array<int, 3>> tris = {{n, n + 1, n + 2}};
    std::vector<std::array<int, 3>> keep;
    std::vector<std::pair<int, int>> cavity;
    for (int p = 0; p < n; ++p) {
        keep.clear();
        cavity.clear();
        auto toggle_edge = [&](int a, int b) {
            const auto rev = std::make_pair(b, a);
            const auto it = std::find(cavity.begin(), cavity.end(), rev);
            if (it != cavity.end()) {
                cavity.erase(it);  // interior edge, shared by two bad triangles
            } else {
                cavity.emplace_back(a, b);
            }
        };
        for (const auto& t : tris) {
            if (in_circumcircle(t, p)) {
                std::array<int, 3> tt = t;
                if (orient(tt[0], tt[1], tt[2]) < 0.0) {
                    std::swap(tt[1], tt[2]);
                }
                toggle_edge(tt[0], tt[1]);
                toggle_edge(tt[1], tt[2]);
                toggle_edge(tt[2], tt[0]);
            } else {
                keep.push_back(t);
            }
        }
        tris.swap(keep);
        for (const auto& [a, b] : cavity) {
            tris.push_back({a, b, p});
        }
    }

    std::vector<std::array<int, 3>> out;
    for (auto t : tris) {
        if (t[0] >= n || t[1] >= n || t[2] >= n) continue;
        if (orient(t[0], t[1], t[2]) < 0.0) {
            std::swap(t[1], t[2]);
        }
        out.push_back(t);
    }
    return out;
}

// Boundary points on the edges plus a hexagonal interior lattice, Delaunay
// triangulated; the lattice keeps half a spacing of clearance from the
// boundary so no sliver can form.
Mesh mesh_polygon(const ConvexPolygon& poly, double h)
{
    Mesh mesh;
    mesh.dim = 2;
    mesh.h = h;
    const auto nv = poly.vertices.size();
    for (std::size_t e = 0; e < nv; ++e) {
        const Point& a = poly.vertices[e];
        const Point& b = poly.vertices[(e + 1) % nv];
        const int k = std::max(1, cells_for(dist(a, b), h));
        for (int t = 0; t < k; ++t) {
            const double w = static_cast<double>(t) / k;
            mesh.nodes.push_back({a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)});
        }
    }
    const int n_boundary = static_cast<int>(mesh.nodes.size());

    double x0 = poly.vertices[0].x, x1 = x0, y0 = poly.vertices[0].y, y1 = y0;
    for (const auto& v : poly.vertices) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    auto boundary_clearance = [&](const Point& p) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < nv; ++e) {
            const Point& a = poly.vertices[e];
            const Point& b = poly.vertices[(e + 1) % nv];
            d = std::min(d, cross(a, b, p) / dist(a, b));  // signed, positive inside
        }
        return d;
    };
    const double row_step = h * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = y0 + 0.5 * row_step; y < y1; y += row_step, ++row) {
        for (double x = x0 + ((row % 2) ? 0.75 * h : 0.25 * h); x < x1; x += h) {
            const Point p{x, y};
            if (boundary_clearance(p) >= 0.45 * h) {
                mesh.nodes.push_back(p);
            }
        }
    }

    mesh.triangles = delaunay(mesh.nodes);
    mesh.boundary.assign(mesh.nodes.size(), 0);
    for (int i = 0; i < n_boundary; ++i) {
        mesh.boundary[static_cast<std::size_t>(i)] = 1;
    }
    return mesh;
}

} // namespace

DomainSpec make_domain(DomainSpec spec)
{
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                if (!(s.a < s.b)) throw InvalidGeometry("interval requires a < b");
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                if (!(s.ax < s.bx) || !(s.ay < s.by)) {
                    throw InvalidGeometry("rectangle requires ax < bx and ay < by");
                }
            } else if constexpr (std::is_same_v<T, Disk>) {
                if (!(s.radius > 0.0)) throw InvalidGeometry("disk requires radius > 0");
            } else {
                validate_polygon(s);
            }
        },
        spec.shape);
    return spec;
}

DomainSpec enlarge(const DomainSpec& spec, double tau)
{
    if (!(tau > 0.0)) {
        throw InvalidGeometry("enlargement requires tau > 0");
    }
    DomainSpec out = spec;
    std::visit(
        [&](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                s.a -= tau;
                s.b += tau;
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                s.ax -= tau;
                s.bx += tau;
                s.ay -= tau;
                s.by += tau;
            } else if constexpr (std::is_same_v<T, Disk>) {
                s.radius += tau;
            } else {
                // offset each edge outward along its unit normal and intersect
                // consecutive offset lines
                const auto n = s.vertices.size();
                std::vector<Point> shifted(n);
                std::vector<Point> dir(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const Point& a = s.vertices[i];
                    const Point& b = s.vertices[(i + 1) % n];
                    const double len = dist(a, b);
                    dir[i] = {(b.x - a.x) / len, (b.y - a.y) / len};
                    const Point normal{dir[i].y, -dir[i].x};  // outward for CCW
                    shifted[i] = {a.x + tau * normal.x, a.y + tau * normal.y};
                }
                std::vector<Point> moved(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t prev = (i + n - 1) % n;
                    // solve shifted[prev] + t dir[prev] = shifted[i] + u dir[i]
                    const double det = dir[prev].x * (-dir[i].y) - dir[prev].y * (-dir[i].x);
                    const double rx = shifted[i].x - shifted[prev].x;
                    const double ry = shifted[i].y - shifted[prev].y;
                    const double t = (rx * (-dir[i].y) - ry * (-dir[i].x)) / det;
                    moved[i] = {shifted[prev].x + t * dir[prev].x,
                                shifted[prev].y + t * dir[prev].y};
                }
                s.vertices = std::move(moved);
            }
        },
        out.shape);
    return make_domain(out);
}

double domain_measure(const DomainSpec& spec)
{
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return s.b - s.a;
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                return (s.bx - s.ax) * (s.by - s.ay);
            } else if constexpr (std::is_same_v<T, Disk>) {
                return std::numbers::pi * s.radius * s.radius;
            } else {
                double a2 = 0.0;
                const auto n = s.vertices.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const Point& p = s.vertices[i];
                    const Point& q = s.vertices[(i + 1) % n];
                    a2 += p.x * q.y - q.x * p.y;
                }
                return 0.5 * a2;
            }
        },
        spec.shape);
}

double inradius(const DomainSpec& spec)
{
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return 0.5 * (s.b - s.a);
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                return 0.5 * std::min(s.bx - s.ax, s.by - s.ay);
            } else if constexpr (std::is_same_v<T, Disk>) {
                return s.radius;
            } else {
                const Point c = centroid(s);
                double r = std::numeric_limits<double>::infinity();
                const auto n = s.vertices.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const Point& a = s.vertices[i];
                    const Point& b = s.vertices[(i + 1) % n];
                    r = std::min(r, cross(a, b, c) / dist(a, b));
                }
                return r;
            }
        },
        spec.shape);
}

double default_mesh_h(const DomainSpec& spec)
{
    if (spec.dimension() == 1) {
        return std::numbers::pi / 2000.0;
    }
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            double wx = 0.0, wy = 0.0;
            if constexpr (std::is_same_v<T, Rectangle>) {
                wx = s.bx - s.ax;
                wy = s.by - s.ay;
            } else if constexpr (std::is_same_v<T, Disk>) {
                wx = wy = 2.0 * s.radius;
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                double x0 = s.vertices[0].x, x1 = x0, y0 = s.vertices[0].y, y1 = y0;
                for (const auto& v : s.vertices) {
                    x0 = std::min(x0, v.x);
                    x1 = std::max(x1, v.x);
                    y0 = std::min(y0, v.y);
                    y1 = std::max(y1, v.y);
                }
                wx = x1 - x0;
                wy = y1 - y0;
            }
            return std::hypot(wx, wy) / 64.0;
        },
        spec.shape);
}

int Mesh::interior_count() const
{
    int n = 0;
    for (auto b : boundary) {
        if (!b) ++n;
    }
    return n;
}

Mesh build_mesh(const DomainSpec& spec, double h)
{
    if (!(h > 0.0)) {
        throw MeshTooCoarse("mesh size h must be positive");
    }
    make_domain(spec);
    Mesh mesh = std::visit(
        [&](const auto& s) -> Mesh {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return mesh_interval(s, h);
            } else if constexpr (std::is_same_v<T, Rectangle>) {
                return mesh_rectangle(s, h);
            } else if constexpr (std::is_same_v<T, Disk>) {
                return mesh_disk(s, h);
            } else {
                return mesh_polygon(s, h);
            }
        },
        spec.shape);
    validate_mesh(mesh);
    return mesh;
}

double max_element_extent(const Mesh& mesh)
{
    double d = 0.0;
    if (mesh.dim == 1) {
        for (const auto& s : mesh.segments) {
            d = std::max(d, mesh.nodes[static_cast<std::size_t>(s[1])].x -
                                mesh.nodes[static_cast<std::size_t>(s[0])].x);
        }
    } else {
        for (const auto& t : mesh.triangles) {
            for (int e = 0; e < 3; ++e) {
                d = std::max(d, dist(mesh.nodes[static_cast<std::size_t>(t[e])],
                                     mesh.nodes[static_cast<std::size_t>(t[(e + 1) % 3])]));
            }
        }
    }
    return d;
}

double mesh_measure(const Mesh& mesh)
{
    double m = 0.0;
    if (mesh.dim == 1) {
        for (const auto& s : mesh.segments) {
            m += mesh.nodes[static_cast<std::size_t>(s[1])].x -
                 mesh.nodes[static_cast<std::size_t>(s[0])].x;
        }
    } else {
        for (const auto& t : mesh.triangles) {
            m += 0.5 * triangle_area2(mesh, t);
        }
    }
    return m;
}

std::string export_mesh_text(const Mesh& mesh)
{
    std::ostringstream os;
    os.precision(17);
    os << "# kcex mesh dim=" << mesh.dim << " nodes=" << mesh.node_count()
       << " elements=" << mesh.element_count() << "\n";
    os << "# node: id x y boundary\n";
    for (int i = 0; i < mesh.node_count(); ++i) {
        os << i << " " << mesh.nodes[static_cast<std::size_t>(i)].x << " "
           << mesh.nodes[static_cast<std::size_t>(i)].y << " "
           << int(mesh.boundary[static_cast<std::size_t>(i)]) << "\n";
    }
    os << "# element: id nodes...\n";
    if (mesh.dim == 1) {
        for (std::size_t e = 0; e < mesh.segments.size(); ++e) {
            os << e << " " << mesh.segments[e][0] << " " << mesh.segments[e][1] << "\n";
        }
    } else {
        for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
            os << e << " " << mesh.triangles[e][0] << " " << mesh.triangles[e][1] << " "
               << mesh.triangles[e][2] << "\n";
        }
    }
    return os.str();
}

} // namespace kcex
