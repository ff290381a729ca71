#include "kcex/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "kcex/errors.hpp"

namespace kcex {

namespace {

using Triplet = Eigen::Triplet<double>;

void assemble_1d(const Mesh& mesh, std::vector<Triplet>& kt, std::vector<Triplet>& mt)
{
    for (const auto& seg : mesh.segments) {
        const int i = seg[0], j = seg[1];
        const double he = mesh.nodes[static_cast<std::size_t>(j)].x -
                          mesh.nodes[static_cast<std::size_t>(i)].x;
        const double k = 1.0 / he;
        kt.emplace_back(i, i, k);
        kt.emplace_back(j, j, k);
        kt.emplace_back(i, j, -k);
        kt.emplace_back(j, i, -k);
        mt.emplace_back(i, i, 2.0 * he / 6.0);
        mt.emplace_back(j, j, 2.0 * he / 6.0);
        mt.emplace_back(i, j, he / 6.0);
        mt.emplace_back(j, i, he / 6.0);
    }
}

void assemble_2d(const Mesh& mesh, std::vector<Triplet>& kt, std::vector<Triplet>& mt)
{
    for (const auto& tri : mesh.triangles) {
        const Point& p0 = mesh.nodes[static_cast<std::size_t>(tri[0])];
        const Point& p1 = mesh.nodes[static_cast<std::size_t>(tri[1])];
        const Point& p2 = mesh.nodes[static_cast<std::size_t>(tri[2])];
        const double area2 = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
        const double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        const double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        for (int a = 0; a < 3; ++a) {
            for (int d = 0; d < 3; ++d) {
                kt.emplace_back(tri[a], tri[d], (b[a] * b[d] + c[a] * c[d]) / (2.0 * area2));
                mt.emplace_back(tri[a], tri[d], (area2 / 2.0) / 12.0 * (a == d ? 2.0 : 1.0));
            }
        }
    }
}

struct TriangleLocator {
    const Mesh& mesh;
    double x0, y0;
    double cell;
    int nx, ny;
    std::vector<std::vector<int>> bins;

    explicit TriangleLocator(const Mesh& m) : mesh(m)
    {
        double x1 = m.nodes[0].x, y1 = m.nodes[0].y;
        x0 = x1;
        y0 = y1;
        for (const auto& p : m.nodes) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        const int target = std::clamp(
            static_cast<int>(std::sqrt(static_cast<double>(m.triangles.size()))), 1, 512);
        cell = std::max({(x1 - x0) / target, (y1 - y0) / target, 1e-300});
        nx = static_cast<int>((x1 - x0) / cell) + 2;
        ny = static_cast<int>((y1 - y0) / cell) + 2;
        bins.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
        const double pad = 1e-9 * std::max(x1 - x0, y1 - y0);
        for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
            const auto& tri = m.triangles[static_cast<std::size_t>(t)];
            double bx0 = m.nodes[static_cast<std::size_t>(tri[0])].x;
            double bx1 = bx0, by0 = m.nodes[static_cast<std::size_t>(tri[0])].y, by1 = by0;
            for (int v = 1; v < 3; ++v) {
                const auto& p = m.nodes[static_cast<std::size_t>(tri[v])];
                bx0 = std::min(bx0, p.x);
                bx1 = std::max(bx1, p.x);
                by0 = std::min(by0, p.y);
                by1 = std::max(by1, p.y);
            }
            const int i0 = index_x(bx0 - pad), i1 = index_x(bx1 + pad);
            const int j0 = index_y(by0 - pad), j1 = index_y(by1 + pad);
            for (int j = j0; j <= j1; ++j) {
                for (int i = i0; i <= i1; ++i) {
                    bins[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                         static_cast<std::size_t>(i)]
                        .push_back(t);
                }
            }
        }
    }

    int index_x(double x) const
    {
        return std::clamp(static_cast<int>((x - x0) / cell), 0, nx - 1);
    }
    int index_y(double y) const
    {
        return std::clamp(static_cast<int>((y - y0) / cell), 0, ny - 1);
    }

    // interpolates at q; barycentric tolerance 1e-10 absorbs boundary round-off
    double interpolate(const Point& q, const Eigen::VectorXd& vals) const
    {
        constexpr double tol = 1e-10;
        const auto& candidates =
            bins[static_cast<std::size_t>(index_y(q.y)) * static_cast<std::size_t>(nx) +
                 static_cast<std::size_t>(index_x(q.x))];
        double best = -std::numeric_limits<double>::infinity();
        double best_value = 0.0;
        for (int t : candidates) {
            const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
            const Point& p0 = mesh.nodes[static_cast<std::size_t>(tri[0])];
            const Point& p1 = mesh.nodes[static_cast<std::size_t>(tri[1])];
            const Point& p2 = mesh.nodes[static_cast<std::size_t>(tri[2])];
            const double det =
                (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
            const double l1 =
                ((q.x - p0.x) * (p2.y - p0.y) - (q.y - p0.y) * (p2.x - p0.x)) / det;
            const double l2 =
                (-(q.x - p0.x) * (p1.y - p0.y) + (q.y - p0.y) * (p1.x - p0.x)) / det;
            const double l0 = 1.0 - l1 - l2;
            const double worst = std::min({l0, l1, l2});
            const double value =
                l0 * vals[tri[0]] + l1 * vals[tri[1]] + l2 * vals[tri[2]];
            if (worst >= tol) {
                return value;
            }
            if (worst > best) {
                best = worst;
                best_value = value;
            }
        }
        if (best >= -tol) {
            return best_value;
        }
        throw PointLocationFailure("target node outside the source mesh");
    }
};

} // namespace

OperatorPair assemble(const Mesh& mesh)
{
    const int n = mesh.node_count();
    std::vector<Triplet> kt, mt;
    kt.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
    mt.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
    if (mesh.dim == 1) {
        assemble_1d(mesh, kt, mt);
    } else {
        assemble_2d(mesh, kt, mt);
    }
    OperatorPair ops;
    ops.stiffness.resize(n, n);
    ops.mass.resize(n, n);
    ops.stiffness.setFromTriplets(kt.begin(), kt.end());
    ops.mass.setFromTriplets(mt.begin(), mt.end());
    ops.stiffness.makeCompressed();
    ops.mass.makeCompressed();
    ops.interior.reserve(static_cast<std::size_t>(mesh.interior_count()));
    for (int i = 0; i < n; ++i) {
        if (!mesh.boundary[static_cast<std::size_t>(i)]) {
            ops.interior.push_back(i);
        }
    }
    ops.lumped_mass = ops.mass * Eigen::VectorXd::Ones(n);
    return ops;
}

double h1_norm_sq(const Field& field, const OperatorPair& ops)
{
    if (field.values.size() != ops.stiffness.rows()) {
        throw DimensionMismatch("field length does not match the operator dimension");
    }
    return field.values.dot(ops.stiffness * field.values);
}

Field restrict_onto(const Field& source, const Mesh& source_mesh, const Mesh& target_mesh)
{
    if (source.size() != source_mesh.node_count()) {
        throw DimensionMismatch("field length does not match the source mesh");
    }
    if (source_mesh.dim != target_mesh.dim) {
        throw DimensionMismatch("restriction between meshes of different dimension");
    }
    Field out;
    out.values.resize(target_mesh.node_count());
    if (source_mesh.dim == 1) {
        std::vector<double> xs(source_mesh.nodes.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs[i] = source_mesh.nodes[i].x;
        }
        const double span = xs.back() - xs.front();
        const double tol = 1e-10 * span;
        for (int i = 0; i < target_mesh.node_count(); ++i) {
            double x = target_mesh.nodes[static_cast<std::size_t>(i)].x;
            if (x < xs.front() - tol || x > xs.back() + tol) {
                throw PointLocationFailure("target node outside the source interval");
            }
            x = std::clamp(x, xs.front(), xs.back());
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t j =
                std::min(xs.size() - 2, static_cast<std::size_t>(
                                            std::max<std::ptrdiff_t>(0, it - xs.begin() - 1)));
            const double w = (x - xs[j]) / (xs[j + 1] - xs[j]);
            out.values[i] = (1.0 - w) * source.values[static_cast<Eigen::Index>(j)] +
                            w * source.values[static_cast<Eigen::Index>(j + 1)];
        }
    } else {
        const TriangleLocator locator(source_mesh);
        for (int i = 0; i < target_mesh.node_count(); ++i) {
            out.values[i] =
                locator.interpolate(target_mesh.nodes[static_cast<std::size_t>(i)],
                                    source.values);
        }
    }
    return out;
}

} // namespace kcex
