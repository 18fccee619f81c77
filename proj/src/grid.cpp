#include "glduality/grid.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace glduality {

namespace {

using Triplet = Eigen::Triplet<double>;
using ComplexTriplet = Eigen::Triplet<Complex>;

int neighbour(const BoxGrid &g, int index, int axis, int step) {
    NodeIndex n = g.node(index);
    n[axis] += step;
    if (n[axis] < 0 || n[axis] >= g.nodes()[axis]) return -1;
    return g.index(n);
}

SparseReal axis_derivative(const BoxGrid &g, int axis) {
    const int n = g.size();
    SparseReal D(n, n);
    if (!g.active(axis)) return D;
    const int m = g.nodes()[axis];
    const double h = g.spacing();
    std::vector<Triplet> t;
    t.reserve(2 * n);
    for (int p = 0; p < n; ++p) {
        const int i = g.node(p)[axis];
        if (i == 0) {
            t.emplace_back(p, neighbour(g, p, axis, 1), 1.0 / h);
            t.emplace_back(p, p, -1.0 / h);
        } else if (i == m - 1) {
            t.emplace_back(p, p, 1.0 / h);
            t.emplace_back(p, neighbour(g, p, axis, -1), -1.0 / h);
        } else {
            t.emplace_back(p, neighbour(g, p, axis, 1), 0.5 / h);
            t.emplace_back(p, neighbour(g, p, axis, -1), -0.5 / h);
        }
    }
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

// Places `block` at block position (bi, bj) of a 3x3 block layout.
void append_block(std::vector<Triplet> &t, const SparseReal &block, int bi, int bj, double sign) {
    const auto n = block.rows();
    for (int c = 0; c < block.outerSize(); ++c)
        for (SparseReal::InnerIterator it(block, c); it; ++it)
            t.emplace_back(bi * n + it.row(), bj * n + it.col(), sign * it.value());
}

template <typename Op, typename Vec>
double symmetry_defect_impl(const Op &op, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const auto n = op.matrix.cols();
    double worst = 0.0;
    const double scale = op.matrix.norm();
    for (int t = 0; t < trials; ++t) {
        Vec u(n), v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if constexpr (std::is_same_v<typename Vec::Scalar, Complex>) {
                u[i] = Complex(normal(rng), normal(rng));
                v[i] = Complex(normal(rng), normal(rng));
            } else {
                u[i] = normal(rng);
                v[i] = normal(rng);
            }
        }
        const auto lhs = v.dot(op.matrix * u);
        const auto rhs = u.dot(op.matrix * v);
        const double defect = std::abs(lhs - std::conj(rhs)) / (scale * u.norm() * v.norm());
        worst = std::max(worst, defect);
    }
    return worst;
}

} // namespace

BoxGrid::BoxGrid(std::array<double, 3> lower, double spacing, std::array<int, 3> nodes)
    : lower_(lower), spacing_(spacing), nodes_(nodes) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("BoxGrid: spacing must be positive");
    for (int a = 0; a < 3; ++a) {
        if (nodes[a] < 1) throw std::invalid_argument("BoxGrid: node count must be positive");
        if (nodes[a] > 1 && nodes[a] < 3)
            throw std::invalid_argument("BoxGrid: an active axis needs at least 3 nodes (got " +
                                        std::to_string(nodes[a]) + ")");
    }
}

BoxGrid BoxGrid::cube(int dim, double lower, double upper, int cells) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("BoxGrid::cube: dim must be 1, 2 or 3");
    if (cells < 2) throw std::invalid_argument("BoxGrid::cube: need at least 2 cells per axis");
    if (!(upper > lower)) throw std::invalid_argument("BoxGrid::cube: empty interval");
    std::array<int, 3> nodes{1, 1, 1};
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
        nodes[a] = cells + 1;
        lo[a] = lower;
    }
    return BoxGrid(lo, (upper - lower) / cells, nodes);
}

BoxGrid BoxGrid::dirichlet_interior(int dim, double lower, double upper, int cells) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("BoxGrid::dirichlet_interior: dim must be 1, 2 or 3");
    if (cells < 4) throw std::invalid_argument("BoxGrid::dirichlet_interior: need at least 3 interior nodes");
    if (!(upper > lower)) throw std::invalid_argument("BoxGrid::dirichlet_interior: empty interval");
    const double h = (upper - lower) / cells;
    std::array<int, 3> nodes{1, 1, 1};
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
        nodes[a] = cells - 1;
        lo[a] = lower + h;
    }
    return BoxGrid(lo, h, nodes);
}

int BoxGrid::dim() const {
    int d = 0;
    for (int a = 0; a < 3; ++a) d += active(a) ? 1 : 0;
    return d;
}

double BoxGrid::cell_weight() const { return std::pow(spacing_, dim()); }

NodeIndex BoxGrid::node(int index) const {
    NodeIndex n;
    n.i = index % nodes_[0];
    index /= nodes_[0];
    n.j = index % nodes_[1];
    n.k = index / nodes_[1];
    return n;
}

std::array<double, 3> BoxGrid::position(int index) const {
    const NodeIndex n = node(index);
    return {coordinate(0, n.i), coordinate(1, n.j), coordinate(2, n.k)};
}

bool BoxGrid::on_boundary(int index) const {
    const NodeIndex n = node(index);
    for (int a = 0; a < 3; ++a)
        if (active(a) && (n[a] == 0 || n[a] == nodes_[a] - 1)) return true;
    return false;
}

bool BoxGrid::operator==(const BoxGrid &other) const {
    return lower_ == other.lower_ && spacing_ == other.spacing_ && nodes_ == other.nodes_;
}

NestedGrid::NestedGrid(BoxGrid outer, std::array<int, 3> inner_offset, std::array<int, 3> inner_nodes)
    : outer_(std::move(outer)), offset_(inner_offset) {
    std::array<double, 3> lo{};
    for (int a = 0; a < 3; ++a) {
        if (!outer_.active(a)) {
            if (inner_offset[a] != 0 || inner_nodes[a] != 1)
                throw std::invalid_argument("NestedGrid: inner box must not extend along an inactive axis");
        } else if (inner_offset[a] < 1 || inner_offset[a] + inner_nodes[a] > outer_.nodes()[a] - 1) {
            // closure of Omega strictly inside Omega_1
            throw std::invalid_argument("NestedGrid: inner box must lie strictly inside the outer box");
        }
        lo[a] = outer_.coordinate(a, inner_offset[a]);
    }
    inner_ = BoxGrid(lo, outer_.spacing(), inner_nodes);

    inner_to_outer_.resize(inner_.size());
    for (int p = 0; p < inner_.size(); ++p) {
        const NodeIndex n = inner_.node(p);
        inner_to_outer_[p] = outer_.index(n.i + offset_[0], n.j + offset_[1], n.k + offset_[2]);
    }
    regions_.assign(outer_.size(), Region::Shell);
    for (int p = 0; p < outer_.size(); ++p)
        if (outer_.on_boundary(p)) regions_[p] = Region::OuterBoundary;
    for (int p = 0; p < inner_.size(); ++p)
        regions_[inner_to_outer_[p]] = inner_.on_boundary(p) ? Region::InnerBoundary : Region::Interior;
}

NestedGrid NestedGrid::centered(int inner_cells, int outer_cells, double inner_extent) {
    if (inner_cells < 2) throw std::invalid_argument("NestedGrid::centered: need at least 2 inner cells");
    if (outer_cells < inner_cells + 2 || (outer_cells - inner_cells) % 2 != 0)
        throw std::invalid_argument(
            "NestedGrid::centered: outer cells must exceed inner cells by a positive even number");
    const double h = inner_extent / inner_cells;
    const double half = 0.5 * h * outer_cells;
    BoxGrid outer({-half, -half, -half}, h, {outer_cells + 1, outer_cells + 1, outer_cells + 1});
    const int off = (outer_cells - inner_cells) / 2;
    return NestedGrid(outer, {off, off, off}, {inner_cells + 1, inner_cells + 1, inner_cells + 1});
}

bool NestedGrid::in_inner(int outer_index) const {
    const Region r = regions_[outer_index];
    return r == Region::Interior || r == Region::InnerBoundary;
}

double symmetry_defect(const RealOperator &op, int trials, std::uint64_t seed) {
    return symmetry_defect_impl<RealOperator, VectorXd>(op, trials, seed);
}

double symmetry_defect(const ComplexOperator &op, int trials, std::uint64_t seed) {
    return symmetry_defect_impl<ComplexOperator, VectorXcd>(op, trials, seed);
}

BoundaryKind parse_boundary_kind(std::string_view name) {
    if (name == "dirichlet-zero") return BoundaryKind::DirichletZero;
    if (name == "plain-neumann") return BoundaryKind::PlainNeumann;
    if (name == "covariant-neumann") return BoundaryKind::CovariantNeumann;
    throw std::invalid_argument("unknown boundary condition '" + std::string(name) + "'");
}

RealOperator build_laplacian(const BoxGrid &grid, BoundaryKind kind) {
    const int n = grid.size();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    std::vector<Triplet> t;
    t.reserve(7 * n);
    switch (kind) {
    case BoundaryKind::DirichletZero:
        for (int p = 0; p < n; ++p) {
            for (int a = 0; a < 3; ++a) {
                if (!grid.active(a)) continue;
                t.emplace_back(p, p, 2.0 * inv_h2);
                for (int s : {-1, 1})
                    if (int q = neighbour(grid, p, a, s); q >= 0) t.emplace_back(p, q, -inv_h2);
            }
        }
        break;
    case BoundaryKind::PlainNeumann:
        for (int p = 0; p < n; ++p) {
            for (int a = 0; a < 3; ++a) {
                const int q = grid.active(a) ? neighbour(grid, p, a, 1) : -1;
                if (q < 0) continue;
                t.emplace_back(p, p, inv_h2);
                t.emplace_back(q, q, inv_h2);
                t.emplace_back(p, q, -inv_h2);
                t.emplace_back(q, p, -inv_h2);
            }
        }
        break;
    case BoundaryKind::CovariantNeumann:
        throw std::invalid_argument("build_laplacian: covariant Neumann needs a vector potential; "
                                    "use build_covariant_square");
    }
    RealOperator op;
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(t.begin(), t.end());
    op.symmetric = true;
    return op;
}

ComplexOperator build_covariant_square(const BoxGrid &grid, const Components &A, double rho,
                                       const CovariantParts &parts) {
    const int n = grid.size();
    for (const auto &c : A)
        if (c.size() != n) throw std::invalid_argument("build_covariant_square: A does not match the grid");
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const Complex I(0.0, 1.0);
    std::vector<ComplexTriplet> t;
    t.reserve(12 * n);
    for (int p = 0; p < n; ++p) {
        for (int a = 0; a < 3; ++a) {
            if (!parts.axes[a] || !grid.active(a)) continue;
            const int q = neighbour(grid, p, a, 1);
            if (q < 0) continue;
            const double mid = 0.5 * (A[a][p] + A[a][q]);
            if (parts.laplace) {
                t.emplace_back(p, p, inv_h2);
                t.emplace_back(q, q, inv_h2);
                t.emplace_back(p, q, -inv_h2);
                t.emplace_back(q, p, -inv_h2);
            }
            if (parts.first_order) {
                t.emplace_back(p, q, I * rho * mid / h);
                t.emplace_back(q, p, -I * rho * mid / h);
            }
            if (parts.quadratic) {
                const double c = 0.25 * rho * rho * mid * mid;
                t.emplace_back(p, p, c);
                t.emplace_back(q, q, c);
                t.emplace_back(p, q, c);
                t.emplace_back(q, p, c);
            }
        }
    }
    ComplexOperator op;
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(t.begin(), t.end());
    op.symmetric = true;
    return op;
}

SparseReal difference_1d(int nodes, double spacing) {
    return axis_derivative(BoxGrid({0.0, 0.0, 0.0}, spacing, {nodes, 1, 1}), 0);
}

RealOperator build_gradient(const BoxGrid &grid) {
    const int n = grid.size();
    std::vector<Triplet> t;
    for (int a = 0; a < 3; ++a) append_block(t, axis_derivative(grid, a), a, 0, 1.0);
    RealOperator op;
    op.matrix.resize(3 * n, n);
    op.matrix.setFromTriplets(t.begin(), t.end());
    return op;
}

RealOperator build_div(const BoxGrid &grid) {
    const int n = grid.size();
    std::vector<Triplet> t;
    for (int a = 0; a < 3; ++a) append_block(t, axis_derivative(grid, a), 0, a, 1.0);
    RealOperator op;
    op.matrix.resize(n, 3 * n);
    op.matrix.setFromTriplets(t.begin(), t.end());
    return op;
}

RealOperator build_curl(const BoxGrid &grid) {
    const int n = grid.size();
    const SparseReal Dx = axis_derivative(grid, 0);
    const SparseReal Dy = axis_derivative(grid, 1);
    const SparseReal Dz = axis_derivative(grid, 2);
    std::vector<Triplet> t;
    // (dy Az - dz Ay, dz Ax - dx Az, dx Ay - dy Ax)
    append_block(t, Dy, 0, 2, 1.0);
    append_block(t, Dz, 0, 1, -1.0);
    append_block(t, Dz, 1, 0, 1.0);
    append_block(t, Dx, 1, 2, -1.0);
    append_block(t, Dx, 2, 1, 1.0);
    append_block(t, Dy, 2, 0, -1.0);
    RealOperator op;
    op.matrix.resize(3 * n, 3 * n);
    op.matrix.setFromTriplets(t.begin(), t.end());
    return op;
}

VectorXd stack(const Components &c) {
    const auto n = c[0].size();
    VectorXd v(3 * n);
    for (int a = 0; a < 3; ++a) v.segment(a * n, n) = c[a];
    return v;
}

Components unstack(const VectorXd &v) {
    const auto n = v.size() / 3;
    return {v.segment(0, n), v.segment(n, n), v.segment(2 * n, n)};
}

} // namespace glduality
