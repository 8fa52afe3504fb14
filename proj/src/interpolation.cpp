#include "tetmhd/interpolation.hpp"

#include <cmath>
#include <stdexcept>

#include "tetmhd/parallel.hpp"
#include "tetmhd/quadrature.hpp"

namespace tetmhd {

namespace {

std::vector<std::array<int, 3>> monomials(int k) {
  std::vector<std::array<int, 3>> m;
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k - a; ++b)
      for (int c = 0; c <= k - a - b; ++c) m.push_back({a, b, c});
  return m;
}

double mono_eval(const std::array<int, 3>& e, const Vec3& p) {
  double v = 1.0;
  for (int i = 0; i < e[0]; ++i) v *= p.x;
  for (int i = 0; i < e[1]; ++i) v *= p.y;
  for (int i = 0; i < e[2]; ++i) v *= p.z;
  return v;
}

}  // namespace

double PiecewiseField::eval_scalar(int cell, const Vec3& xhat, int comp) const {
  const int nm = n_mono();
  const double* c = coeff.data() + (static_cast<size_t>(cell) * ncomp + comp) * nm;
  double s = 0.0;
  for (int j = 0; j < nm; ++j) s += c[j] * mono_eval(mono[j], xhat);
  return s;
}

Vec3 PiecewiseField::eval(int cell, const Vec3& xhat) const {
  Vec3 v{0, 0, 0};
  for (int c = 0; c < ncomp && c < 3; ++c) v[c] = eval_scalar(cell, xhat, c);
  return v;
}

Vec3 PiecewiseField::cell_value(int cell) const {
  Vec3 v{0, 0, 0};
  const int nm = n_mono();
  for (int c = 0; c < ncomp && c < 3; ++c) v[c] = coeff[(static_cast<size_t>(cell) * ncomp + c) * nm];
  return v;
}

namespace {

FEFunction interp_moments(const VectorField& v, const DofMap& dm, int quad_degree) {
  if (quad_degree < 0) quad_degree = 2 * dm.basis.degree + 4;
  FEFunction out(dm);
  const int nc = dm.mesh->n_cells();
  const int n = dm.basis.dim;
  std::vector<double> local(static_cast<size_t>(nc) * n);
  parallel_for(default_exec_mode(), nc, [&](std::ptrdiff_t c) {
    const auto dq = cell_dof_quadratures(dm.basis, dm.frames[c], quad_degree);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t q = 0; q < dq[j].points.size(); ++q)
        s += dot(v(static_cast<int>(c), dq[j].points[q]), dq[j].vweights[q]);
      local[c * n + j] = s;
    }
  });
  // Shared dofs receive identical canonical moments from every incident cell.
  for (int c = 0; c < nc; ++c)
    for (int j = 0; j < n; ++j) out.coeffs[dm.cell_dof(c, j)] = local[static_cast<size_t>(c) * n + j];
  return out;
}

}  // namespace

FEFunction interp_bdm(const VectorField& v, const DofMap& dm, int quad_degree) {
  if (dm.basis.family != Family::BDM) throw std::invalid_argument("interp_bdm: dofmap is not BDM");
  return interp_moments(v, dm, quad_degree);
}

FEFunction interp_nedelec(const VectorField& H, const DofMap& dm, int quad_degree) {
  if (dm.basis.family != Family::Nedelec2)
    throw std::invalid_argument("interp_nedelec: dofmap is not Nedelec");
  return interp_moments(H, dm, quad_degree);
}

PiecewiseField l2_project(int m, int ncomp, const VectorField& field, const Mesh& mesh,
                          int quad_degree) {
  if (quad_degree < 0) quad_degree = 2 * m + 4;
  PiecewiseField out;
  out.mesh = &mesh;
  out.degree = m;
  out.ncomp = ncomp;
  out.mono = monomials(m);
  const int nm = out.n_mono();
  const int nc = mesh.n_cells();
  out.coeff.assign(static_cast<size_t>(nc) * ncomp * nm, 0.0);

  // Reference mass matrix is shared by all cells; the detJ factor cancels.
  const QuadRule mass_rule = tet_rule(2 * m);
  DenseMatrix M(nm, nm);
  for (int q = 0; q < mass_rule.size(); ++q)
    for (int i = 0; i < nm; ++i) {
      const double mi = mono_eval(out.mono[i], mass_rule.points[q]);
      for (int j = 0; j < nm; ++j)
        M(i, j) += mass_rule.weights[q] * mi * mono_eval(out.mono[j], mass_rule.points[q]);
    }
  const DenseLU lu(M);

  const QuadRule rule = tet_rule(quad_degree);
  parallel_for(default_exec_mode(), nc, [&](std::ptrdiff_t c) {
    const CellFrame fr = make_cell_frame(mesh, static_cast<int>(c));
    std::vector<std::vector<double>> rhs(ncomp, std::vector<double>(nm, 0.0));
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3 xhat = rule.points[q];
      const Vec3 val = field(static_cast<int>(c), fr.to_physical(xhat));
      for (int i = 0; i < nm; ++i) {
        const double wm = rule.weights[q] * mono_eval(out.mono[i], xhat);
        for (int comp = 0; comp < ncomp; ++comp) rhs[comp][i] += wm * val[comp];
      }
    }
    std::vector<double> sol;
    for (int comp = 0; comp < ncomp; ++comp) {
      lu.solve(rhs[comp], sol);
      for (int i = 0; i < nm; ++i) out.coeff[(c * ncomp + comp) * nm + i] = sol[i];
    }
  });
  return out;
}

PiecewiseField theta_piecewise_constant(const VectorField& theta, const Mesh& mesh,
                                        int quad_degree) {
  return l2_project(0, 3, theta, mesh, quad_degree);
}

PiecewiseField oswald(const PiecewiseField& p, const Mesh& mesh, const MacroMesh* macro) {
  PiecewiseField out;
  out.mesh = &mesh;
  out.degree = p.degree;
  out.ncomp = p.ncomp;
  out.mono = p.mono;
  const int nm = p.n_mono();
  const int nc = mesh.n_cells();
  out.coeff.assign(static_cast<size_t>(nc) * p.ncomp * nm, 0.0);

  if (p.degree == 0) {
    if (!macro) throw std::invalid_argument("oswald: macro mesh required for degree 0");
    for (int m = 0; m < macro->n_macro(); ++m) {
      std::vector<double> mean(p.ncomp, 0.0);
      double vol = 0.0;
      for (int c : macro->cells_of_macro[m]) {
        const double v = mesh.cell_volume(c);
        vol += v;
        for (int comp = 0; comp < p.ncomp; ++comp)
          mean[comp] += v * p.coeff[(static_cast<size_t>(c) * p.ncomp + comp) * nm];
      }
      for (int c : macro->cells_of_macro[m])
        for (int comp = 0; comp < p.ncomp; ++comp)
          out.coeff[(static_cast<size_t>(c) * p.ncomp + comp) * nm] = mean[comp] / vol;
    }
    return out;
  }

  if (p.degree != 1) throw std::invalid_argument("oswald: only degrees 0 and 1 are supported");

  // Nodal averaging onto continuous P1.
  static const Vec3 ref_vertex[4] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const int nv = mesh.n_vertices();
  std::vector<double> vertex_value(static_cast<size_t>(nv) * p.ncomp, 0.0);
  std::vector<int> incident(nv, 0);
  for (int c = 0; c < nc; ++c)
    for (int lv = 0; lv < 4; ++lv) {
      const int v = mesh.cells[c][lv];
      incident[v] += 1;
      for (int comp = 0; comp < p.ncomp; ++comp)
        vertex_value[static_cast<size_t>(v) * p.ncomp + comp] +=
            p.eval_scalar(c, ref_vertex[lv], comp);
    }
  for (int v = 0; v < nv; ++v)
    for (int comp = 0; comp < p.ncomp; ++comp)
      vertex_value[static_cast<size_t>(v) * p.ncomp + comp] /= incident[v];

  int ix = -1, iy = -1, iz = -1, ic = -1;
  for (int j = 0; j < nm; ++j) {
    if (p.mono[j] == std::array<int, 3>{0, 0, 0}) ic = j;
    if (p.mono[j] == std::array<int, 3>{1, 0, 0}) ix = j;
    if (p.mono[j] == std::array<int, 3>{0, 1, 0}) iy = j;
    if (p.mono[j] == std::array<int, 3>{0, 0, 1}) iz = j;
  }
  for (int c = 0; c < nc; ++c)
    for (int comp = 0; comp < p.ncomp; ++comp) {
      double vv[4];
      for (int lv = 0; lv < 4; ++lv)
        vv[lv] = vertex_value[static_cast<size_t>(mesh.cells[c][lv]) * p.ncomp + comp];
      double* cc = out.coeff.data() + (static_cast<size_t>(c) * p.ncomp + comp) * nm;
      cc[ic] = vv[0];
      cc[ix] = vv[1] - vv[0];
      cc[iy] = vv[2] - vv[0];
      cc[iz] = vv[3] - vv[0];
    }
  return out;
}

}  // namespace tetmhd
