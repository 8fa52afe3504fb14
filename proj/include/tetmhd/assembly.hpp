#ifndef TETMHD_ASSEMBLY_HPP
#define TETMHD_ASSEMBLY_HPP

#include <functional>

#include "tetmhd/elements.hpp"
#include "tetmhd/interpolation.hpp"
#include "tetmhd/mesh.hpp"
#include "tetmhd/sparse.hpp"

namespace tetmhd {

/// Scalar coefficients and advective fields of the linearized problem.
/// chi advects the velocity, theta couples velocity and magnetic field;
/// grad_theta supplies the analytic Jacobian used when expanding
/// curl(u x theta) = (div theta) u - (div u) theta + (grad u) theta - (grad theta) u.
struct ProblemParams {
  double sigma_S = 1.0, sigma_M = 1.0;
  double nu_S = 1.0, nu_M = 1.0;
  double mu_a = 10.0, mu_c = 0.5, mu_J1 = 0.05, mu_J2 = 0.01;
  int k = 1;
  VectorField chi;
  VectorField theta;
  std::function<Mat3(int, const Vec3&)> grad_theta;

  void validate() const;
};

/// Quadrature exactness degrees used by the assemblers.
struct QuadDegrees {
  int volume, face, rhs_volume, rhs_face;
  static QuadDegrees defaults(int k) { return {2 * k + 2, 2 * k + 2, 2 * k + 2, 2 * k + 2}; }
};

/// Velocity / pressure / magnetic dof maps over one mesh.
struct FESpaces {
  const Mesh* mesh = nullptr;
  const FaceSet* faces = nullptr;
  const EdgeSet* edges = nullptr;
  int k = 1;
  DofMap U, P, W;
};

FESpaces build_spaces(const Mesh& mesh, const FaceSet& faces, const EdgeSet& edges, int k);

// Individual bilinear-form blocks. Penalty parameters are part of the forms.
// Velocity-velocity: (eps_h(u), eps_h(v)) with symmetric interior-penalty
// face terms over all faces (boundary faces use the trace as jump).
CSRMatrix assemble_aS(const FESpaces& s, const ProblemParams& p, const QuadDegrees& qd,
                      ExecMode mode);
// Convection: volume + centered interior flux + upwind penalty; optionally
// the weak inflow boundary matrix term (pointwise (chi.n)^- weighting).
CSRMatrix assemble_c(const FESpaces& s, const ProblemParams& p, const QuadDegrees& qd,
                     ExecMode mode, bool include_inflow_boundary = true);
// Divergence coupling, rows = pressure dofs, cols = velocity dofs.
CSRMatrix assemble_b(const FESpaces& s, const QuadDegrees& qd, ExecMode mode);
// d(H, v) = (curl(H) x theta, v); rows = velocity dofs, cols = magnetic dofs.
CSRMatrix assemble_d(const FESpaces& s, const ProblemParams& p, const QuadDegrees& qd,
                     ExecMode mode);
// (curl B, curl H).
CSRMatrix assemble_aM(const FESpaces& s, const QuadDegrees& qd, ExecMode mode);
// Jump penalization: mu_J1 <[theta x u],[theta x v]> over all faces plus
// mu_J2 h_f^2 <[curl_h(u x theta)],[curl_h(v x theta)]> over interior faces.
CSRMatrix assemble_J(const FESpaces& s, const ProblemParams& p, const QuadDegrees& qd,
                     ExecMode mode);
// L2 mass matrices.
CSRMatrix assemble_mass(const DofMap& dm, int quad_degree, ExecMode mode);
// Integral of each pressure basis function (the zero-mean multiplier column).
std::vector<double> assemble_pressure_mean(const FESpaces& s, const QuadDegrees& qd);

/// Loads and boundary data of a manufactured problem. g is the exact velocity
/// trace; curlB the exact magnetic curl trace (natural condition data);
/// u_cross_theta supplies (u x theta) on the boundary for the magnetic
/// consistency term.
struct RhsData {
  std::function<Vec3(const Vec3&)> f;
  std::function<Vec3(const Vec3&)> G;
  std::function<Vec3(const Vec3&)> g;
  std::function<Vec3(const Vec3&)> curlB;
};

/// Full right-hand vector in the [u | p | mult | B] layout, including the
/// interior-penalty Dirichlet data terms, the jump-penalization boundary data,
/// the inflow data, and the magnetic natural-data corrections.
std::vector<double> assemble_rhs(const FESpaces& s, const ProblemParams& p, const RhsData& data,
                                 const QuadDegrees& qd, ExecMode mode);

struct BlockLayout {
  int n_u = 0, n_p = 0, n_B = 0;
  int u_off = 0, p_off = 0, mult = 0, B_off = 0, total = 0;
};

inline BlockLayout make_layout(int n_u, int n_p, int n_B) {
  BlockLayout l;
  l.n_u = n_u;
  l.n_p = n_p;
  l.n_B = n_B;
  l.u_off = 0;
  l.p_off = n_u;
  l.mult = n_u + n_p;
  l.B_off = n_u + n_p + 1;
  l.total = n_u + n_p + 1 + n_B;
  return l;
}

/// Assembled block operator with constrained velocity dofs eliminated.
struct SparseSystem {
  BlockLayout layout;
  CSRMatrix A;                     // full operator, constraints not applied
  std::vector<double> rhs;         // full right-hand side
  std::vector<char> constrained;   // per full index
  std::vector<double> constrained_value;
  CSRMatrix A_red;
  std::vector<double> rhs_red;
  std::vector<int> full_of_red;
  std::vector<double> pressure_mean;  // integral of each pressure basis function
  std::vector<double> pressure_one;   // coefficients of the constant-1 pressure field
  std::vector<Vec3> dof_coords;       // geometric position per full index
  double domain_volume = 0.0;

  /// Expands a reduced solution back to the full layout.
  std::vector<double> expand(const std::vector<double>& x_red) const;
};

/// Composes sigma_S M_u + nu_S aS + c + J, the +/- d couplings, b and its
/// transpose, the zero-mean multiplier bordering and sigma_M M_B + nu_M aM,
/// then eliminates the constrained velocity dofs against their values.
SparseSystem assemble_system(const FESpaces& s, const ProblemParams& p, const RhsData& data,
                             const std::vector<double>& constrained_values, const QuadDegrees& qd,
                             ExecMode mode);

}  // namespace tetmhd

#endif
