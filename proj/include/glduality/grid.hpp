#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

namespace glduality {

using Complex = std::complex<double>;
using VectorXd = Eigen::VectorXd;
using VectorXcd = Eigen::VectorXcd;
using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

/// Three real component arrays sampled on the nodes of one grid.
using Components = std::array<VectorXd, 3>;

struct NodeIndex {
    int i = 0, j = 0, k = 0;

    int operator[](int axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
    int &operator[](int axis) { return axis == 0 ? i : (axis == 1 ? j : k); }
};

/**
 * Uniform node lattice on an axis-aligned box.
 *
 * Axes with a single node are inactive, which is how 1D and 2D grids
 * (scalar model, method-of-lines cross sections) are represented. Every
 * active axis carries the same spacing and at least three nodes.
 * Node storage order is x-fastest.
 */
class BoxGrid {
public:
    BoxGrid() = default;
    BoxGrid(std::array<double, 3> lower, double spacing, std::array<int, 3> nodes);

    /// Nodes of a cube [lower, upper]^dim split into `cells` cells per axis.
    static BoxGrid cube(int dim, double lower, double upper, int cells);

    /// Interior nodes of (lower, upper)^dim split into `cells` cells: the
    /// unknowns of a homogeneous Dirichlet problem.
    static BoxGrid dirichlet_interior(int dim, double lower, double upper, int cells);

    int dim() const;
    bool active(int axis) const { return nodes_[axis] > 1; }
    const std::array<int, 3> &nodes() const { return nodes_; }
    int size() const { return nodes_[0] * nodes_[1] * nodes_[2]; }
    double spacing() const { return spacing_; }
    /// Nodal quadrature weight d^dim.
    double cell_weight() const;
    const std::array<double, 3> &lower() const { return lower_; }
    double upper(int axis) const { return lower_[axis] + spacing_ * (nodes_[axis] - 1); }

    int index(int i, int j, int k) const { return i + nodes_[0] * (j + nodes_[1] * k); }
    int index(const NodeIndex &n) const { return index(n.i, n.j, n.k); }
    NodeIndex node(int index) const;
    double coordinate(int axis, int i) const { return lower_[axis] + spacing_ * i; }
    std::array<double, 3> position(int index) const;

    /// True when the node lies on a face of the box (active axes only).
    bool on_boundary(int index) const;

    bool operator==(const BoxGrid &other) const;

private:
    std::array<double, 3> lower_{0.0, 0.0, 0.0};
    double spacing_ = 1.0;
    std::array<int, 3> nodes_{1, 1, 1};
};

enum class Region : std::uint8_t { Interior, Shell, InnerBoundary, OuterBoundary };

/**
 * The sample box Omega nested strictly inside the outer box Omega_1.
 *
 * Both share one spacing; the inner box is a closed sub-box (its faces
 * are Omega nodes) offset by an integer number of cells.
 */
class NestedGrid {
public:
    NestedGrid() = default;
    NestedGrid(BoxGrid outer, std::array<int, 3> inner_offset, std::array<int, 3> inner_nodes);

    /// Centered cubes: Omega = [-extent/2, extent/2]^3 with `inner_cells`
    /// cells, Omega_1 with `outer_cells` cells of the same spacing.
    static NestedGrid centered(int inner_cells, int outer_cells, double inner_extent = 1.0);

    const BoxGrid &outer() const { return outer_; }
    const BoxGrid &inner() const { return inner_; }
    const std::array<int, 3> &offset() const { return offset_; }
    Region region(int outer_index) const { return regions_[outer_index]; }
    bool in_inner(int outer_index) const;
    /// Outer index of every inner node, in inner storage order.
    const std::vector<int> &inner_to_outer() const { return inner_to_outer_; }

private:
    BoxGrid outer_;
    BoxGrid inner_;
    std::array<int, 3> offset_{0, 0, 0};
    std::vector<int> inner_to_outer_;
    std::vector<Region> regions_;
};

/// Sparse linear map on grid-indexed values.
template <typename Scalar>
struct DiscreteOperator {
    Eigen::SparseMatrix<Scalar> matrix;
    bool symmetric = false;

    Eigen::Index rows() const { return matrix.rows(); }
    Eigen::Index cols() const { return matrix.cols(); }
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &x) const {
        return matrix * x;
    }
};

using RealOperator = DiscreteOperator<double>;
using ComplexOperator = DiscreteOperator<Complex>;

/// Largest |<Op u, v> - conj<Op v, u>| relative to |Op||u||v| over random pairs.
double symmetry_defect(const RealOperator &op, int trials, std::uint64_t seed);
double symmetry_defect(const ComplexOperator &op, int trials, std::uint64_t seed);

enum class BoundaryKind { DirichletZero, PlainNeumann, CovariantNeumann };

/// Parses "dirichlet-zero", "plain-neumann" or "covariant-neumann".
BoundaryKind parse_boundary_kind(std::string_view name);

/**
 * Assembles -Laplacian on the grid nodes.
 *
 * DirichletZero: every grid node is an unknown and neighbours outside the
 * box are zero (standard 2*dim+1 point stencil, symmetric positive definite).
 * PlainNeumann: the natural-boundary rows of sum_edges |u_q - u_p|^2 / d^2.
 * CovariantNeumann needs a vector potential; use build_covariant_square.
 */
RealOperator build_laplacian(const BoxGrid &grid, BoundaryKind kind);

/// Which pieces of the covariant square to assemble (see build_covariant_square).
struct CovariantParts {
    bool laplace = true;
    bool first_order = true;
    bool quadratic = true;
    std::array<bool, 3> axes{true, true, true};
};

/**
 * Discrete |grad - i rho A|^2 with covariant Neumann rows.
 *
 * Built from edge differences d_e u = (u_q - u_p)/d - i rho a_e (u_p + u_q)/2,
 * a_e the mean of A_axis over the edge ends, as sum_e d_e^H d_e. Hermitian,
 * positive semi-definite and equal to the PlainNeumann Laplacian when A = 0.
 * `parts` splits it into the A-free, A-linear and A-quadratic pieces.
 */
ComplexOperator build_covariant_square(const BoxGrid &grid, const Components &A, double rho,
                                       const CovariantParts &parts = {});

/// 1D first-derivative matrix: central inside, first-order one-sided at the ends.
SparseReal difference_1d(int nodes, double spacing);

/// Gradient of a scalar as a stacked (x; y; z) field, 3n x n.
RealOperator build_gradient(const BoxGrid &grid);
/// Divergence of a stacked vector field, n x 3n.
RealOperator build_div(const BoxGrid &grid);
/// Curl of a stacked vector field, 3n x 3n.
RealOperator build_curl(const BoxGrid &grid);

/// Stacks three component arrays into one vector and back.
VectorXd stack(const Components &c);
Components unstack(const VectorXd &v);

} // namespace glduality
