#pragma once

// P1 finite element discretization of the Robin transmission problem
//
//   -Laplace u = 0 in Omega \ Gamma,   du/dnu = g on dOmega,
//   [u] = 0 and [du/dnu] = gamma u on Gamma,
//
// and the measurement map F(gamma) = B^T A(gamma)^{-1} B with
// A(gamma) = K0 + sum_j gamma_j M_j.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "robinsdp/coefficients.hpp"
#include "robinsdp/symmat.hpp"

namespace robinsdp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Half-open range [begin, end) of interface segment indices.
struct ArcRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Outer boundary and interface as counter-clockwise polygons, both star
/// shaped with respect to the origin. Segment s of the interface joins
/// vertex s and vertex s+1 (cyclically).
struct Geometry {
  std::vector<Point2> outer_boundary;
  std::vector<Point2> interface;
  std::vector<ArcRange> partition_arcs;
  // When set, vertices inserted by mesh refinement are placed on the circle of
  // this radius about the origin instead of on the polygon chord.
  std::optional<double> outer_radius;
  std::optional<double> interface_radius;

  std::size_t num_arcs() const noexcept { return partition_arcs.size(); }
  std::size_t num_interface_segments() const noexcept { return interface.size(); }
  /// Throws ValidationError when s is not covered by an arc.
  std::size_t arc_of_segment(std::size_t s) const;
  /// Checks the geometric invariants; throws ValidationError.
  void validate() const;
};

/// Unit disk with a concentric interface circle split into n equal arcs,
/// counter-clockwise from angle 0.
Geometry build_disk_geometry(std::size_t n, double radius_interface, std::size_t segments_per_arc);

struct Mesh {
  struct InterfaceEdge {
    std::size_t v0;
    std::size_t v1;
    std::size_t arc;
  };

  std::vector<Point2> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;  // counter-clockwise
  std::vector<InterfaceEdge> interface_edges;
  std::vector<std::array<std::size_t, 2>> boundary_edges;
  std::size_t num_arcs = 0;
};

/// Structured polar triangulation: a center vertex, rings of vertices inside
/// the interface, the refined interface ring, rings in the annulus and the
/// refined outer ring. Neighbouring rings are stitched by angle.
Mesh generate_mesh(const Geometry& geometry, double mesh_size);

/// Plain-text dump, one record per line:
///   v <index> <x> <y>
///   t <index> <v0> <v1> <v2>
///   i <v0> <v1> <arc>
///   b <v0> <v1>
void write_mesh(std::ostream& out, const Mesh& mesh);

double signed_area(const Point2& a, const Point2& b, const Point2& c) noexcept;

/// Boundary current g_k (1-based): 1/sqrt(2 pi), cos(l t)/sqrt(pi), sin(l t)/sqrt(pi), ...
double boundary_current(std::size_t k, double theta) noexcept;

enum class DerivativeOrder { value, gradient, hessian };

struct ForwardEvaluation {
  SymMatrix value;
  std::vector<SymMatrix> gradient;  // dF/dgamma_j
  std::vector<SymMatrix> hessian;   // d2F/dgamma_i dgamma_j at index i * n + j
  std::size_t num_arcs = 0;

  const SymMatrix& second(std::size_t i, std::size_t j) const { return hessian[i * num_arcs + j]; }
};

/// Assembled operators. Immutable after construction; safe to share across
/// threads.
///
/// Construction eliminates every degree of freedom that no interface mass
/// matrix touches. Those unknowns do not depend on gamma, so each evaluation
/// only factors the dense interface Schur complement
///   S(gamma) = S0 + sum_j gamma_j M_j|_I
/// and F(gamma) = F0 + C^T S(gamma)^{-1} C exactly reproduces B^T A^{-1} B.
class DiscreteForwardMap {
 public:
  using SparseMatrix = Eigen::SparseMatrix<double>;

  DiscreteForwardMap(SparseMatrix stiffness, std::vector<SparseMatrix> interface_mass,
                     Eigen::MatrixXd load_map);

  std::size_t num_dofs() const noexcept { return static_cast<std::size_t>(stiffness_.rows()); }
  std::size_t num_arcs() const noexcept { return interface_mass_.size(); }
  std::size_t num_currents() const noexcept { return static_cast<std::size_t>(load_map_.cols()); }
  std::size_t num_interface_dofs() const noexcept { return interface_dofs_.size(); }

  const SparseMatrix& stiffness() const noexcept { return stiffness_; }
  const SparseMatrix& interface_mass(std::size_t j) const { return interface_mass_.at(j); }
  const Eigen::MatrixXd& load_map() const noexcept { return load_map_; }

  ForwardEvaluation evaluate(const CoefficientVector& gamma, DerivativeOrder order) const;

  /// -C^T S^{-1} M(d) S^{-1} C, the derivative of F at gamma in direction d.
  SymMatrix derivative(const CoefficientVector& gamma, std::span<const double> direction) const;

  /// Reference route: sparse Cholesky of the full A(gamma).
  SymMatrix evaluate_direct(const CoefficientVector& gamma) const;

  /// max over right-hand sides of ||S z - c|| / (||S|| ||z|| + ||c||) for the
  /// interface solves at gamma (Frobenius norm for S).
  double interface_residual(const CoefficientVector& gamma) const;

  /// Copy with the load map multiplied by `factor` (F scales by factor^2).
  DiscreteForwardMap with_scaled_loads(double factor) const;
  /// Copy with interface mass j multiplied by `factor`.
  DiscreteForwardMap with_scaled_interface_mass(std::size_t j, double factor) const;

 private:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  void check_gamma(const CoefficientVector& gamma) const;
  SymMatrix interface_matrix(std::span<const double> weights) const;
  void apply_interface_mass(std::span<const double> weights, std::span<const double> x,
                            std::span<double> y) const;

  SparseMatrix stiffness_;
  std::vector<SparseMatrix> interface_mass_;
  Eigen::MatrixXd load_map_;

  std::vector<std::size_t> interface_dofs_;
  std::vector<std::vector<Entry>> local_mass_;  // per arc, interface-local indices
  SymMatrix schur_base_{1};                     // S0
  SymMatrix base_value_{1};                     // F0
  std::vector<double> coupling_;                // C, column-major |I| x m
};

/// Mesh the geometry and assemble with m boundary currents.
DiscreteForwardMap assemble(const Geometry& geometry, double mesh_size, std::size_t m);
DiscreteForwardMap assemble(const Mesh& mesh, std::size_t m);

SymMatrix eval_F(const DiscreteForwardMap& map, const CoefficientVector& gamma);
SymMatrix eval_F_prime(const DiscreteForwardMap& map, const CoefficientVector& gamma,
                       std::span<const double> direction);

}  // namespace robinsdp
