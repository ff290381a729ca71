#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace kcex {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Interval {
    double a = 0.0;
    double b = 0.0;
};

struct Rectangle {
    double ax = 0.0, bx = 0.0;
    double ay = 0.0, by = 0.0;
};

struct Disk {
    Point center;
    double radius = 0.0;
};

/// Vertices in counterclockwise order, strictly convex.
struct ConvexPolygon {
    std::vector<Point> vertices;
};

struct DomainSpec {
    std::variant<Interval, Rectangle, Disk, ConvexPolygon> shape;

    int dimension() const { return std::holds_alternative<Interval>(shape) ? 1 : 2; }
};

/// Validates the spec invariants and returns the spec unchanged.
DomainSpec make_domain(DomainSpec spec);

/// Returns a domain of the same kind strictly containing the closure of the
/// input and converging to it as tau -> 0. Rectangles and polygons use edge
/// offsets, a superset of the metric enlargement.
DomainSpec enlarge(const DomainSpec& spec, double tau);

double domain_measure(const DomainSpec& spec);

/// Radius of the inscribed circle centered at the domain's natural center
/// (midpoint, rectangle center, disk center, vertex centroid).
double inradius(const DomainSpec& spec);

/// pi/2000 in 1D, bounding-box diagonal / 64 in 2D.
double default_mesh_h(const DomainSpec& spec);

struct Mesh {
    int dim = 1;
    std::vector<Point> nodes;
    std::vector<std::array<int, 2>> segments;   // 1D connectivity
    std::vector<std::array<int, 3>> triangles;  // 2D connectivity, CCW
    std::vector<std::uint8_t> boundary;         // per-node boundary mask
    double h = 0.0;                             // target element size

    int node_count() const { return static_cast<int>(nodes.size()); }
    int interior_count() const;
    int element_count() const
    {
        return dim == 1 ? static_cast<int>(segments.size()) : static_cast<int>(triangles.size());
    }
};

/// Conforming mesh with max element diameter <= 2h: a uniform grid in 1D,
/// a structured triangulation for rectangles, concentric-ring triangulations
/// for disks and convex polygons (boundary nodes lie on the domain boundary).
Mesh build_mesh(const DomainSpec& spec, double h);

/// Largest element extent (segment length / triangle diameter).
double max_element_extent(const Mesh& mesh);

/// Sum of element measures (length in 1D, area in 2D).
double mesh_measure(const Mesh& mesh);

/// Plain-text node/element listing for debugging.
std::string export_mesh_text(const Mesh& mesh);

} // namespace kcex
