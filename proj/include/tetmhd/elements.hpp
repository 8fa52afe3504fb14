#ifndef TETMHD_ELEMENTS_HPP
#define TETMHD_ELEMENTS_HPP

#include <array>
#include <functional>
#include <vector>

#include "tetmhd/dense.hpp"
#include "tetmhd/geometry.hpp"
#include "tetmhd/mesh.hpp"

namespace tetmhd {

enum class Family { BDM, Nedelec2, DiscontinuousP, Lagrange };

/// Which mesh entity carries a degree of freedom.
struct DofDescriptor {
  enum class Entity { Vertex, Edge, Face, Interior };
  Entity entity;
  int entity_index;  // local vertex/edge/face index, 0 for interior
  int moment;        // canonical moment (or node) index on the entity
};

/// Affine geometry of one cell plus the global vertex ids used to fix the
/// canonical orientation of its entities.
struct CellFrame {
  std::array<Vec3, 4> X;
  std::array<int, 4> gid;
  Vec3 x0;
  Mat3 J, Jinv;
  double detJ = 0.0;
  double diameter = 0.0;
  Vec3 centroid;

  Vec3 to_physical(const Vec3& xhat) const { return x0 + J * xhat; }
  Vec3 to_reference(const Vec3& x) const { return Jinv * (x - x0); }
};

/// Builds the frame; throws on a degenerate (non-invertible) cell map.
CellFrame make_cell_frame(const Mesh& mesh, int cell);
CellFrame make_cell_frame(const std::array<Vec3, 4>& X, const std::array<int, 4>& gid);

// Piola transformations between the reference cell and a physical cell.
// The contravariant map preserves normal traces (H(div)); the covariant map
// preserves tangential traces (H(curl)).
Vec3 piola_contravariant_value(const CellFrame& g, const Vec3& ref_value);
Mat3 piola_contravariant_jacobian(const CellFrame& g, const Mat3& ref_jacobian);
double piola_contravariant_divergence(const CellFrame& g, double ref_divergence);
Vec3 piola_covariant_value(const CellFrame& g, const Vec3& ref_value);
Mat3 piola_covariant_jacobian(const CellFrame& g, const Mat3& ref_jacobian);
Vec3 piola_covariant_curl(const CellFrame& g, const Vec3& ref_curl);

/// One degree-of-freedom functional discretized as a weighted point sum:
/// l(v) = sum_q dot(v(x_q), vweights_q) for vector fields, or
/// l(u) = sum_q u(x_q) * sweights_q for scalar fields.
struct DofQuadrature {
  std::vector<Vec3> points;  // physical coordinates
  std::vector<Vec3> vweights;
  std::vector<double> sweights;
};

/// Nodal basis on the reference tetrahedron. Basis functions are stored as
/// monomial coefficient tables: coeff(m, comp*n_mono + j) is the coefficient
/// of monomial j in component comp of nodal function m.
struct ReferenceBasis {
  Family family = Family::BDM;
  int degree = 1;        // polynomial degree of the span
  int ncomp = 3;
  int dim = 0;
  std::vector<std::array<int, 3>> mono;  // monomial exponents of P_degree
  DenseMatrix coeff;
  std::vector<DofDescriptor> dofs;
  double moment_condition = 0.0;  // 1-norm condition of the moment matrix

  int n_mono() const { return static_cast<int>(mono.size()); }
};

/// Full (P_k)^3 with face moments of v.n against P_k(f); k=2 adds interior
/// moments against first-kind Nedelec fields of degree 1. k in {1,2}.
ReferenceBasis bdm_basis(int k);

/// Full (P_k)^3 with edge moments of v.t against P_k(e); k=2 adds face
/// moments against the lowest-order face Raviart-Thomas fields. k in {1,2}.
ReferenceBasis nedelec2_basis(int k);

/// Scalar discontinuous P_m with normalized interior monomial moments.
ReferenceBasis discontinuous_basis(int m);

/// Scalar continuous Lagrange P_m with point-value dofs, m in {1,2,3}.
ReferenceBasis lagrange_basis(int m);

/// Canonical dof functionals of `basis` on a physical cell, discretized with
/// rules exact to quad_degree. Entity orientation (face/edge vertex order,
/// face normals) is fixed by sorting global vertex ids, so two cells sharing
/// an entity produce identical functionals.
std::vector<DofQuadrature> cell_dof_quadratures(const ReferenceBasis& basis,
                                                const CellFrame& frame, int quad_degree);

enum class BoundaryPolicy { None, HdivZeroNormal };

/// Orientation-aware global numbering plus the per-cell nodal coefficient
/// tables expressing each cell's basis in reference-polynomial form.
struct DofMap {
  const Mesh* mesh = nullptr;
  const FaceSet* faces = nullptr;
  ReferenceBasis basis;
  int n_dofs = 0;
  int dofs_per_cell = 0;
  std::vector<int> cell_dofs;
  /// All +1: the canonical (sorted global vertex id) moment definitions make
  /// shared-entity traces single-valued without per-cell sign flips.
  std::vector<signed char> cell_signs;
  std::vector<DenseMatrix> cell_coeff;  // per-cell nodal coefficients
  std::vector<CellFrame> frames;
  std::vector<char> constrained;  // boundary normal dofs for the velocity
  std::vector<Vec3> dof_position;  // carrier-entity centroid per dof
  bool zero_mean_constraint = false;
  double max_moment_condition = 0.0;

  int cell_dof(int cell, int i) const { return cell_dofs[static_cast<size_t>(cell) * dofs_per_cell + i]; }
  int n_constrained() const;
};

DofMap build_dofmap(const Mesh& mesh, const FaceSet& faces, const EdgeSet& edges,
                    const ReferenceBasis& basis, BoundaryPolicy policy);

/// Coefficient vector tied to a DofMap.
struct FEFunction {
  const DofMap* dofmap = nullptr;
  std::vector<double> coeffs;

  FEFunction() = default;
  explicit FEFunction(const DofMap& dm) : dofmap(&dm), coeffs(dm.n_dofs, 0.0) {}
};

/// Values (and optionally physical Jacobians) of every basis function of one
/// cell at a reference point. Vector bases only.
void cell_basis_eval(const DofMap& dm, int cell, const Vec3& xhat,
                     std::vector<Vec3>& values, std::vector<Mat3>* grads);

/// Scalar-basis variant (DiscontinuousP / Lagrange).
void cell_basis_eval_scalar(const DofMap& dm, int cell, const Vec3& xhat,
                            std::vector<double>& values, std::vector<Vec3>* grads);

/// Evaluates a vector FEFunction at a reference point of a cell.
void eval_function(const FEFunction& f, int cell, const Vec3& xhat, Vec3* value, Mat3* grad);

/// Evaluates a scalar FEFunction (DiscontinuousP / Lagrange dofmaps).
void eval_scalar_function(const FEFunction& f, int cell, const Vec3& xhat, double* value,
                          Vec3* grad);

}  // namespace tetmhd

#endif
