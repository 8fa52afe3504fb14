#ifndef TETMHD_INTERPOLATION_HPP
#define TETMHD_INTERPOLATION_HPP

#include <functional>

#include "tetmhd/elements.hpp"
#include "tetmhd/mesh.hpp"

namespace tetmhd {

/// Field callback evaluated at a physical point; the cell index disambiguates
/// fields that are only piecewise smooth (analytic fields ignore it).
using VectorField = std::function<Vec3(int cell, const Vec3& x)>;
using ScalarField = std::function<double(int cell, const Vec3& x)>;

inline VectorField pointwise(std::function<Vec3(const Vec3&)> f) {
  return [f = std::move(f)](int, const Vec3& x) { return f(x); };
}

/// Per-cell polynomial field of fixed degree, stored as monomial coefficients
/// in each cell's reference coordinates.
struct PiecewiseField {
  const Mesh* mesh = nullptr;
  int degree = 0;
  int ncomp = 1;
  std::vector<std::array<int, 3>> mono;
  std::vector<double> coeff;  // cell-major: cell * ncomp * n_mono

  int n_mono() const { return static_cast<int>(mono.size()); }
  double eval_scalar(int cell, const Vec3& xhat, int comp) const;
  Vec3 eval(int cell, const Vec3& xhat) const;
  /// Constant value of a degree-0 field on a cell.
  Vec3 cell_value(int cell) const;
};

/// Degree-of-freedom interpolant onto a BDM dofmap: face (and interior)
/// moments of the field evaluated by quadrature.
FEFunction interp_bdm(const VectorField& v, const DofMap& dm, int quad_degree = -1);

/// Degree-of-freedom interpolant onto a Nedelec (2nd kind) dofmap via edge
/// (and face) tangential moments. Quadrature points are interior to the
/// entities, so fields that blow up at isolated mesh edges are never sampled
/// on them.
FEFunction interp_nedelec(const VectorField& H, const DofMap& dm, int quad_degree = -1);

/// Elementwise L2 projection onto piecewise P_m (componentwise).
PiecewiseField l2_project(int m, int ncomp, const VectorField& field, const Mesh& mesh,
                          int quad_degree = -1);

/// Best piecewise-constant approximation: per-cell mean of each component.
PiecewiseField theta_piecewise_constant(const VectorField& theta, const Mesh& mesh,
                                        int quad_degree = 4);

/// Averaging (Oswald) projection of a degree k-1 piecewise field onto
/// continuous P_{k-1} (k=2, nodal averaging) or onto macroelement constants
/// (k=1, volume-weighted means; requires the MacroMesh).
PiecewiseField oswald(const PiecewiseField& p, const Mesh& mesh, const MacroMesh* macro);

}  // namespace tetmhd

#endif
