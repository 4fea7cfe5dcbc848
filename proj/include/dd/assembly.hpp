#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dd/data.hpp"
#include "dd/geometry.hpp"
#include "dd/grid.hpp"
#include "dd/profiles.hpp"
#include "dd/sparse.hpp"

namespace dd {

enum class Variant { CDD, SDD, RDD, DDDH, NDDH };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);
/// Whether the variant has a bulk (u) and/or a surface (v) unknown.
bool has_bulk(Variant v);
bool has_surface(Variant v);

/// One diffuse domain problem: variant, coefficients, geometry, profile and epsilon.
struct ProblemSpec {
    Variant variant{Variant::RDD};
    SignedGeometry geometry{SignedGeometry::circle({0.0, 0.0}, 1.0)};
    Profile profile{Profile::double_obstacle()};
    double epsilon{0.1};
    MatrixData A;
    BulkData a{BulkData::constant(1.0)};
    BulkData f;
    MatrixData B;
    BulkData b{BulkData::constant(1.0)};
    SurfaceData g;
    double K{1.0};
    double beta{1.0};
    double m{1.0};
    /// Tube half-width for extensions and liftings; 0 selects default_eta.
    double eta{0.0};
    /// Permit h > epsilon.
    bool allow_coarse{false};
    /// Skip the sampled coefficient lower bounds (used to exercise indefinite systems).
    bool skip_coefficient_checks{false};
};

struct QuadSpec {
    int order{3};
    /// Subcells per axis; 0 selects max(1, ceil(2h/eps)).
    int subdiv{0};

    int subdivisions(double h, double eps) const;
};

enum class Block : std::uint8_t { U, V };

/// Map between active unknowns and grid nodes. All u unknowns precede all v unknowns.
struct DofMap {
    std::vector<int> u_dof;  ///< per node, -1 when inactive or absent
    std::vector<int> v_dof;
    std::vector<std::size_t> node_of;
    std::vector<Block> block_of;
    std::size_t num_u{0};
    std::size_t num_v{0};

    std::size_t size() const { return num_u + num_v; }
};

/// Per-node 3x3 stencils of the full (unreduced) system.
struct Stencils {
    std::vector<std::array<double, 9>> uu, vv, uv;
    std::vector<double> fu, fv;
};

struct SparseSystem {
    Variant variant{Variant::RDD};
    BoxGrid grid{-1, 1, -1, 1, 1, 1};
    double epsilon{0};
    double eta{0};
    int subdivisions{1};
    CsrMatrix matrix;
    std::vector<double> rhs;
    DofMap dofs;
    /// Integral of xi_eps (resp. delta_eps) over the support of each nodal basis function.
    std::vector<double> xi_measure;
    std::vector<double> delta_measure;
    std::vector<std::size_t> eliminated_u;
    std::vector<std::size_t> eliminated_v;
    std::shared_ptr<const Stencils> stencils;
    bool compact_profile{false};
};

/**
 * Assembles the weighted Q1 system of the selected variant.
 *
 * Every cell is integrated with tensor Gauss rules on ns x ns subcells. Cells
 * are processed in four colours so concurrent cells never share a node, which
 * makes the result independent of the thread count. Nodes whose basis support
 * carries exactly zero weight are left out of the DofMap.
 */
SparseSystem assemble(const ProblemSpec& spec, const BoxGrid& grid, const QuadSpec& quad = {});

/// Drops nodes whose support measure is below floor * h^2. Profiles with unbounded
/// support are only pruned where the measure underflows to zero.
SparseSystem eliminate_degenerate_dofs(const SparseSystem& system, double floor = 1e-12);

/// Nodal fields from a solution vector: eliminated u nodes are 0, eliminated v nodes
/// take the value of the nearest active node (grid-graph distance).
struct ExpandedSolution {
    NodalField u;
    NodalField v;
};
ExpandedSolution expand_solution(const SparseSystem& system, const std::vector<double>& x);

/// Restricts a nodal vector (one block) to the active unknowns of that block.
std::vector<double> restrict_to_dofs(const SparseSystem& system, const std::vector<double>& nodal, Block block);

struct SpdReport {
    bool symmetric{false};
    double max_asymmetry{0};
    int trials{0};
    int failures{0};
    double min_rayleigh{0};
    std::vector<std::string> witnesses;

    bool passed() const { return symmetric && failures == 0; }
};

/// Exact symmetry check plus x'Mx > 0 for seeded random x.
SpdReport spd_probe(const SparseSystem& system, int trials, std::uint64_t seed);

}  // namespace dd
