#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kcex/errors.hpp"
#include "kcex/geometry.hpp"

using namespace kcex;

namespace {

constexpr double kPi = std::numbers::pi;

DomainSpec interval(double a, double b)
{
    return make_domain(DomainSpec{Interval{a, b}});
}

DomainSpec unit_square_polygon()
{
    return make_domain(DomainSpec{ConvexPolygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}});
}

double max_vertex_distance(const DomainSpec& a, const DomainSpec& b)
{
    const auto& pa = std::get<ConvexPolygon>(a.shape).vertices;
    const auto& pb = std::get<ConvexPolygon>(b.shape).vertices;
    double d = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        d = std::max(d, std::hypot(pa[i].x - pb[i].x, pa[i].y - pb[i].y));
    }
    return d;
}

} // namespace

TEST_CASE("make_domain accepts the supported shapes")
{
    CHECK_NOTHROW(interval(-kPi / 2, kPi / 2));
    CHECK_NOTHROW(make_domain(DomainSpec{Disk{{0, 0}, 1.0}}));
    CHECK_NOTHROW(make_domain(DomainSpec{Rectangle{0, 1, 0, 1}}));
    CHECK_NOTHROW(unit_square_polygon());
}

TEST_CASE("make_domain rejects degenerate or nonconvex input")
{
    CHECK_THROWS_AS(interval(1, 1), InvalidGeometry);
    CHECK_THROWS_AS(interval(2, 1), InvalidGeometry);
    CHECK_THROWS_AS(make_domain(DomainSpec{Disk{{0, 0}, 0.0}}), InvalidGeometry);
    CHECK_THROWS_AS(make_domain(DomainSpec{Rectangle{0, 1, 1, 1}}), InvalidGeometry);
    // clockwise square
    CHECK_THROWS_AS(make_domain(DomainSpec{ConvexPolygon{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}}}),
                    InvalidGeometry);
    // reflex vertex
    CHECK_THROWS_AS(
        make_domain(DomainSpec{ConvexPolygon{{{0, 0}, {2, 0}, {1, 0.1}, {2, 2}, {0, 2}}}}),
        InvalidGeometry);
    CHECK_THROWS_AS(make_domain(DomainSpec{ConvexPolygon{{{0, 0}, {1, 0}}}}), InvalidGeometry);
}

TEST_CASE("enlarge pushes every supported shape outward by tau")
{
    const auto iv = enlarge(interval(-kPi / 2, kPi / 2), 0.5);
    CHECK(std::get<Interval>(iv.shape).a == doctest::Approx(-kPi / 2 - 0.5));
    CHECK(std::get<Interval>(iv.shape).b == doctest::Approx(kPi / 2 + 0.5));

    const auto dk = enlarge(make_domain(DomainSpec{Disk{{0, 0}, 1.0}}), 0.25);
    CHECK(std::get<Disk>(dk.shape).radius == doctest::Approx(1.25));

    const auto rc = enlarge(make_domain(DomainSpec{Rectangle{0, 1, 0, 1}}), 0.1);
    const auto& r = std::get<Rectangle>(rc.shape);
    CHECK(r.ax == doctest::Approx(-0.1));
    CHECK(r.bx == doctest::Approx(1.1));
    CHECK(r.ay == doctest::Approx(-0.1));
    CHECK(r.by == doctest::Approx(1.1));

    const auto pg = enlarge(unit_square_polygon(), 0.2);
    const auto& v = std::get<ConvexPolygon>(pg.shape).vertices;
    REQUIRE(v.size() == 4);
    CHECK(v[0].x == doctest::Approx(-0.2));
    CHECK(v[0].y == doctest::Approx(-0.2));
    CHECK(v[2].x == doctest::Approx(1.2));
    CHECK(v[2].y == doctest::Approx(1.2));

    CHECK_THROWS_AS(enlarge(iv, 0.0), InvalidGeometry);
    CHECK_THROWS_AS(enlarge(iv, -1.0), InvalidGeometry);
}

TEST_CASE("enlargement is nested in tau and Hausdorff-close to the original")
{
    const auto poly = unit_square_polygon();
    double prev_measure = domain_measure(poly);
    for (double tau : {0.05, 0.1, 0.2, 0.4}) {
        const auto big = enlarge(poly, tau);
        CHECK(domain_measure(big) > prev_measure);
        prev_measure = domain_measure(big);
        // right-angle corners move by exactly sqrt(2) tau
        CHECK(max_vertex_distance(poly, big) <= std::sqrt(2.0) * tau + 1e-12);
    }

    const auto disk = make_domain(DomainSpec{Disk{{0.5, -2.0}, 2.0}});
    double prev_r = 2.0;
    for (double tau : {0.1, 0.2, 0.3}) {
        const double r = std::get<Disk>(enlarge(disk, tau).shape).radius;
        CHECK(r > prev_r);
        CHECK(r - 2.0 == doctest::Approx(tau));
        prev_r = r;
    }
}

TEST_CASE("interval mesh is the documented uniform grid")
{
    const Mesh m = build_mesh(interval(-kPi / 2, kPi / 2), kPi / 2000.0);
    CHECK(m.node_count() == 2001);
    CHECK(m.interior_count() == 1999);
    CHECK(m.nodes.front().x == doctest::Approx(-kPi / 2));
    CHECK(m.nodes.back().x == doctest::Approx(kPi / 2));
    CHECK(m.boundary.front() == 1);
    CHECK(m.boundary.back() == 1);
    CHECK(mesh_measure(m) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(max_element_extent(m) <= kPi / 2000.0 + 1e-15);
}

TEST_CASE("mesh rejects h too coarse for an interior node")
{
    CHECK_THROWS_AS(build_mesh(interval(0, 1), 10.0), MeshTooCoarse);
    CHECK_THROWS_AS(build_mesh(make_domain(DomainSpec{Rectangle{0, 1, 0, 1}}), 1.5),
                    MeshTooCoarse);
    CHECK_THROWS_AS(build_mesh(interval(0, 1), -1.0), MeshTooCoarse);
}

TEST_CASE("rectangle mesh is the structured 65x65 triangulation at h = 1/64")
{
    const Mesh m = build_mesh(make_domain(DomainSpec{Rectangle{0, 1, 0, 1}}), 1.0 / 64);
    CHECK(m.node_count() == 65 * 65);
    CHECK(static_cast<int>(m.triangles.size()) == 2 * 64 * 64);
    CHECK(m.interior_count() == 63 * 63);
    CHECK(mesh_measure(m) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_element_extent(m) <= 2.0 / 64 + 1e-12);
}

TEST_CASE("disk mesh puts every boundary vertex on the circle")
{
    const DomainSpec disk = make_domain(DomainSpec{Disk{{0.25, -0.5}, 1.0}});
    const Mesh m = build_mesh(disk, 0.05);
    int boundary_nodes = 0;
    for (int i = 0; i < m.node_count(); ++i) {
        if (!m.boundary[static_cast<std::size_t>(i)]) continue;
        ++boundary_nodes;
        const double r = std::hypot(m.nodes[static_cast<std::size_t>(i)].x - 0.25,
                                    m.nodes[static_cast<std::size_t>(i)].y + 0.5);
        CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(boundary_nodes >= 6);
    CHECK(max_element_extent(m) <= 2 * 0.05);

    // meshed area converges to pi under refinement
    const double err_h = std::abs(mesh_measure(m) - std::numbers::pi) / std::numbers::pi;
    const Mesh fine = build_mesh(disk, 0.025);
    const double err_half = std::abs(mesh_measure(fine) - std::numbers::pi) / std::numbers::pi;
    CHECK(err_h <= 0.05);
    CHECK(err_half < err_h);
}

TEST_CASE("polygon mesh stays inside the polygon with boundary nodes on its edges")
{
    const DomainSpec tri =
        make_domain(DomainSpec{ConvexPolygon{{{0, 0}, {2, 0.2}, {0.8, 1.7}}}});
    const Mesh m = build_mesh(tri, 0.08);
    CHECK(m.interior_count() >= 1);
    CHECK(mesh_measure(m) == doctest::Approx(domain_measure(tri)).epsilon(1e-9));
    CHECK(max_element_extent(m) <= 2 * 0.08 + 1e-12);

    const auto& verts = std::get<ConvexPolygon>(tri.shape).vertices;
    for (int i = 0; i < m.node_count(); ++i) {
        if (!m.boundary[static_cast<std::size_t>(i)]) continue;
        const Point& p = m.nodes[static_cast<std::size_t>(i)];
        double dmin = 1e300;
        for (std::size_t e = 0; e < verts.size(); ++e) {
            const Point& a = verts[e];
            const Point& b = verts[(e + 1) % verts.size()];
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            const double dline =
                std::abs((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / len;
            dmin = std::min(dmin, dline);
        }
        CHECK(dmin <= 1e-10);
    }
}

TEST_CASE("default mesh size follows the domain dimension")
{
    CHECK(default_mesh_h(interval(0, 1)) == doctest::Approx(kPi / 2000));
    CHECK(default_mesh_h(make_domain(DomainSpec{Rectangle{0, 1, 0, 1}})) ==
          doctest::Approx(std::sqrt(2.0) / 64));
    CHECK(default_mesh_h(make_domain(DomainSpec{Disk{{0, 0}, 1.0}})) ==
          doctest::Approx(2.0 * std::sqrt(2.0) / 64));
}

TEST_CASE("inradius of the supported shapes")
{
    CHECK(inradius(interval(-kPi / 2, kPi / 2)) == doctest::Approx(kPi / 2));
    CHECK(inradius(make_domain(DomainSpec{Rectangle{0, 3, 0, 1}})) == doctest::Approx(0.5));
    CHECK(inradius(make_domain(DomainSpec{Disk{{1, 1}, 2.0}})) == doctest::Approx(2.0));
    CHECK(inradius(unit_square_polygon()) == doctest::Approx(0.5));
}

TEST_CASE("mesh text export lists nodes and elements")
{
    const Mesh m = build_mesh(interval(0, 1), 0.25);
    const std::string text = export_mesh_text(m);
    CHECK(text.find("nodes=5") != std::string::npos);
    CHECK(text.find("elements=4") != std::string::npos);
}
