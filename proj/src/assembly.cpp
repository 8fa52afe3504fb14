#include "tetmhd/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "tetmhd/quadrature.hpp"

namespace tetmhd {

void ProblemParams::validate() const {
  if (sigma_S < 0 || sigma_M < 0) throw std::invalid_argument("ProblemParams: sigma must be >= 0");
  if (nu_S <= 0 || nu_M <= 0) throw std::invalid_argument("ProblemParams: nu must be > 0");
  if (mu_a < 0 || mu_c < 0 || mu_J1 < 0 || mu_J2 < 0)
    throw std::invalid_argument("ProblemParams: penalties must be >= 0");
  if (k < 1 || k > 2) throw std::invalid_argument("ProblemParams: k must be 1 or 2");
}

FESpaces build_spaces(const Mesh& mesh, const FaceSet& faces, const EdgeSet& edges, int k) {
  FESpaces s;
  s.mesh = &mesh;
  s.faces = &faces;
  s.edges = &edges;
  s.k = k;
  s.U = build_dofmap(mesh, faces, edges, bdm_basis(k), BoundaryPolicy::HdivZeroNormal);
  s.P = build_dofmap(mesh, faces, edges, discontinuous_basis(k - 1), BoundaryPolicy::None);
  s.W = build_dofmap(mesh, faces, edges, nedelec2_basis(k), BoundaryPolicy::None);
  return s;
}

namespace {

// Geometry of one face shared by the assembly kernels. The normal is the
// canonical one on interior faces and the outward one on boundary faces;
// jump_sign matches the upwind/downwind convention of the jump operator.
struct FaceCtx {
  Vec3 A, B, C;
  Vec3 n;
  double area = 0.0, h_f = 0.0;
  int nsides = 1;
  int cells[2] = {-1, -1};
  double jump_sign[2] = {1.0, 1.0};
  double avg = 1.0;
};

FaceCtx make_face_ctx(const Mesh& mesh, const FaceInfo& fi) {
  FaceCtx fc;
  fc.A = mesh.vertices[fi.v[0]];
  fc.B = mesh.vertices[fi.v[1]];
  fc.C = mesh.vertices[fi.v[2]];
  fc.area = fi.area;
  fc.h_f = fi.diameter;
  fc.cells[0] = fi.cell[0];
  if (fi.is_boundary()) {
    fc.nsides = 1;
    fc.n = fi.normal * static_cast<double>(fi.sign[0]);  // outward
    fc.jump_sign[0] = 1.0;
    fc.avg = 1.0;
  } else {
    fc.nsides = 2;
    fc.n = fi.normal;
    fc.cells[1] = fi.cell[1];
    fc.jump_sign[0] = static_cast<double>(fi.sign[0]);
    fc.jump_sign[1] = static_cast<double>(fi.sign[1]);
    fc.avg = 0.5;
  }
  return fc;
}

Vec3 face_point(const FaceCtx& fc, const Vec3& st) {
  return fc.A + st.x * (fc.B - fc.A) + st.y * (fc.C - fc.A);
}

// curl(u x theta) expanded with the vector calculus identity; gt is the
// Jacobian of theta at the point, gu the Jacobian of u.
Vec3 curl_cross(const Vec3& u, const Mat3& gu, const Vec3& theta, const Mat3& gt) {
  return gt.trace() * u - gu.trace() * theta + gu * theta - gt * u;
}

struct SideEval {
  std::vector<Vec3> val;
  std::vector<Mat3> grad;
};

}  // namespace

CSRMatrix assemble_mass(const DofMap& dm, int quad_degree, ExecMode mode) {
  const Mesh& mesh = *dm.mesh;
  const QuadRule rule = tet_rule(quad_degree);
  const int nd = dm.dofs_per_cell;
  return assemble_blocks(mode, dm.n_dofs, dm.n_dofs, mesh.n_cells(), [&](int c, LocalBlock& lb) {
    lb.reset(nd, nd);
    for (int i = 0; i < nd; ++i) lb.rows[i] = lb.cols[i] = dm.cell_dof(c, i);
    const double detJ = dm.frames[c].detJ;
    std::vector<Vec3> val;
    for (int q = 0; q < rule.size(); ++q) {
      cell_basis_eval(dm, c, rule.points[q], val, nullptr);
      const double w = rule.weights[q] * detJ;
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) lb(i, j) += w * dot(val[i], val[j]);
    }
  });
}

CSRMatrix assemble_aS(const FESpaces& s, const ProblemParams& p, const QuadDegrees& qd,
                      ExecMode mode) {
  const Mesh& mesh = *s.mesh;
  const FaceSet& faces = *s.faces;
  const DofMap& U = s.U;
  const int nd = U.dofs_per_cell;
  const int nc = mesh.n_cells();
  const QuadRule vol = tet_rule(qd.volume);
  const QuadRule tri = tri_rule(qd.face);

  return assemble_blocks(mode, U.n_dofs, U.n_dofs, nc + faces.n_faces(), [&](int e, LocalBlock& lb) {
    if (e < nc) {
      const int c = e;
      lb.reset(nd, nd);
      for (int i = 0; i < nd; ++i) lb.rows[i] = lb.cols[i] = U.cell_dof(c, i);
      const double detJ = U.frames[c].detJ;
      std::vector<Vec3> val;
      std::vector<Mat3> grad;
      for (int q = 0; q < vol.size(); ++q) {
        cell_basis_eval(U, c, vol.points[q], val, &grad);
        const double w = vol.weights[q] * detJ;
        for (int i = 0; i < nd; ++i) {
          const Mat3 ei = grad[i].sym();
          for (int j = 0; j < nd; ++j) lb(i, j) += w * ei.ddot(grad[j].sym());
        }
      }
      return;
    }
    const FaceCtx fc = make_face_ctx(mesh, faces.faces[e - nc]);
    const int ns = fc.nsides;
    lb.reset(ns * nd, ns * nd);
    for (int sd = 0; sd < ns; ++sd)
      for (int i = 0; i < nd; ++i)
        lb.rows[sd * nd + i] = lb.cols[sd * nd + i] = U.cell_dof(fc.cells[sd], i);
    SideEval ev[2];
    for (int q = 0; q < tri.size(); ++q) {
      const Vec3 x = face_point(fc, tri.points[q]);
      const double w = 2.0 * fc.area * tri.weights[q];
      for (int sd = 0; sd < ns; ++sd)
        cell_basis_eval(U, fc.cells[sd], U.frames[fc.cells[sd]].to_reference(x), ev[sd].val,
                        &ev[sd].grad);
      for (int si = 0; si < ns; ++si)
        for (int i = 0; i < nd; ++i) {
          const Vec3 jump_i = ev[si].val[i] * fc.jump_sign[si];
          const Vec3 avg_en_i = (ev[si].grad[i].sym() * fc.n) * fc.avg;
          for (int sj = 0; sj < ns; ++sj)
            for (int j = 0; j < nd; ++j) {
              const Vec3 jump_j = ev[sj].val[j] * fc.jump_sign[sj];
              const Vec3 avg_en_j = (ev[sj].grad[j].sym() * fc.n) * fc.avg;
              lb(si * nd + i, sj * nd + j) +=
                  w * (-dot(avg_en_j, jump_i) - dot(jump_j, avg_en_i) +
                       (p.mu_a / fc.h_f) * dot(jump_j, jump_i));
            }
        }
    }
  });
}

CSRMatrix assemble_c(const FESpaces& s, const ProblemParams& p, const QuadDegrees& qd,
                     ExecMode mode, bool include_inflow_boundary) {
  const Mesh& mesh = *s.mesh;
  const FaceSet& faces = *s.faces;
  const DofMap& U = s.U;
  const int nd = U.dofs_per_cell;
  const int nc = mesh.n_cells();
  const int nint = static_cast<int>(faces.interior.size());
  const int nbnd = include_inflow_boundary ? static_cast<int>(faces.boundary.size()) : 0;
  const QuadRule vol = tet_rule(qd.volume);
  const QuadRule tri = tri_rule(qd.face);

  return assemble_blocks(mode, U.n_dofs, U.n_dofs, nc + nint + nbnd, [&](int e, LocalBlock& lb) {
    if (e < nc) {
      const int c = e;
      lb.reset(nd, nd);
      for (int i = 0; i < nd; ++i) lb.rows[i] = lb.cols[i] = U.cell_dof(c, i);
      const CellFrame& fr = U.frames[c];
      std::vector<Vec3> val;
      std::vector<Mat3> grad;
      for (int q = 0; q < vol.size(); ++q) {
        cell_basis_eval(U, c, vol.points[q], val, &grad);
        const Vec3 chi = p.chi(c, fr.to_physical(vol.points[q]));
        const double w = vol.weights[q] * fr.detJ;
        for (int j = 0; j < nd; ++j) {
          const Vec3 conv = grad[j] * chi;
          for (int i = 0; i < nd; ++i) lb(i, j) += w * dot(conv, val[i]);
        }
      }
      return;
    }
    if (e < nc + nint) {
      const FaceCtx fc = make_face_ctx(mesh, faces.faces[faces.interior[e - nc]]);
      lb.reset(2 * nd, 2 * nd);
      for (int sd = 0; sd < 2; ++sd)
        for (int i = 0; i < nd; ++i)
          lb.rows[sd * nd + i] = lb.cols[sd * nd + i] = U.cell_dof(fc.cells[sd], i);
      SideEval ev[2];
      for (int q = 0; q < tri.size(); ++q) {
        const Vec3 x = face_point(fc, tri.points[q]);
        const double w = 2.0 * fc.area * tri.weights[q];
        const double chin = dot(p.chi(fc.cells[0], x), fc.n);
        for (int sd = 0; sd < 2; ++sd)
          cell_basis_eval(U, fc.cells[sd], U.frames[fc.cells[sd]].to_reference(x), ev[sd].val,
                          nullptr);
        for (int si = 0; si < 2; ++si)
          for (int i = 0; i < nd; ++i) {
            const Vec3 jump_i = ev[si].val[i] * fc.jump_sign[si];
            const Vec3 avg_i = ev[si].val[i] * fc.avg;
            for (int sj = 0; sj < 2; ++sj)
              for (int j = 0; j < nd; ++j) {
                const Vec3 jump_j = ev[sj].val[j] * fc.jump_sign[sj];
                lb(si * nd + i, sj * nd + j) +=
                    w * (-chin * dot(jump_j, avg_i) + p.mu_c * std::abs(chin) * dot(jump_j, jump_i));
              }
          }
      }
      return;
    }
    // Inflow boundary faces: -((chi.n)^- u, v), nonzero only where chi.n < 0.
    const FaceCtx fc = make_face_ctx(mesh, faces.faces[faces.boundary[e - nc - nint]]);
    lb.reset(nd, nd);
    for (int i = 0; i < nd; ++i) lb.rows[i] = lb.cols[i] = U.cell_dof(fc.cells[0], i);
    SideEval ev;
    for (int q = 0; q < tri.size(); ++q) {
      const Vec3 x = face_point(fc, tri.points[q]);
      const double w = 2.0 * fc.area * tri.weights[q];
      const double chin_m = std::min(dot(p.chi(fc.cells[0], x), fc.n), 0.0);
      if (chin_m == 0.0) continue;
      cell_basis_eval(U, fc.cells[0], U.frames[fc.cells[0]].to_reference(x), ev.val, nullptr);
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) lb(i, j) += w * (-chin_m) * dot(ev.val[j], ev.val[i]);
    }
  });
}

CSRMatrix assemble_b(const FESpaces& s, const QuadDegrees& qd, ExecMode mode) {
  const Mesh& mesh = *s.mesh;
  const DofMap& U = s.U;
  const DofMap& P = s.P;
  const int ndu = U.dofs_per_cell, ndp = P.dofs_per_cell;
  const QuadRule vol = tet_rule(qd.volume);
  return assemble_blocks(mode, P.n_dofs, U.n_dofs, mesh.n_cells(), [&](int c, LocalBlock& lb) {
    lb.reset(ndp, ndu);
    for (int j = 0; j < ndp; ++j) lb.rows[j] = P.cell_dof(c, j);
    for (int i = 0; i < ndu; ++i) lb.cols[i] = U.cell_dof(c, i);
    const double detJ = U.frames[c].detJ;
    std::vector<Vec3> val;
    std::vector<Mat3> grad;
    std::vector<double> psi;
    for (int q = 0; q < vol.size(); ++q) {
      cell_basis_eval(U, c, vol.points[q], val, &grad);
      cell_basis_eval_scalar(P, c, vol.points[q], psi, nullptr);
      const double w = vol.weights[q] * detJ;
      for (int i = 0; i < ndu; ++i) {
        const double div_i = grad[i].trace();
        for (int j = 0; j < ndp; ++j) lb(j, i) += w * div_i * psi[j];
      }
    }
  });
}

CSRMatrix assemble_d(const FESpaces& s, const ProblemParams& p, const QuadDegrees& qd,
                     ExecMode mode) {
  const Mesh& mesh = *s.mesh;
  const DofMap& U = s.U;
  const DofMap& W = s.W;
  const int ndu = U.dofs_per_cell, ndw = W.dofs_per_cell;
  const QuadRule vol = tet_rule(qd.volume);
  return assemble_blocks(mode, U.n_dofs, W.n_dofs, mesh.n_cells(), [&](int c, LocalBlock& lb) {
    lb.reset(ndu, ndw);
    for (int i = 0; i < ndu; ++i) lb.rows[i] = U.cell_dof(c, i);
    for (int a = 0; a < ndw; ++a) lb.cols[a] = W.cell_dof(c, a);
    const CellFrame& fr = U.frames[c];
    std::vector<Vec3> uval;
    std::vector<Vec3> wval;
    std::vector<Mat3> wgrad;
    for (int q = 0; q < vol.size(); ++q) {
      cell_basis_eval(U, c, vol.points[q], uval, nullptr);
      cell_basis_eval(W, c, vol.points[q], wval, &wgrad);
      const Vec3 theta = p.theta(c, fr.to_physical(vol.points[q]));
      const double w = vol.weights[q] * fr.detJ;
      for (int a = 0; a < ndw; ++a) {
        const Vec3 cx = cross(wgrad[a].curl(), theta);
        for (int i = 0; i < ndu; ++i) lb(i, a) += w * dot(cx, uval[i]);
      }
    }
  });
}

CSRMatrix assemble_aM(const FESpaces& s, const QuadDegrees& qd, ExecMode mode) {
  const Mesh& mesh = *s.mesh;
  const DofMap& W = s.W;
  const int nd = W.dofs_per_cell;
  const QuadRule vol = tet_rule(qd.volume);
  return assemble_blocks(mode, W.n_dofs, W.n_dofs, mesh.n_cells(), [&](int c, LocalBlock& lb) {
    lb.reset(nd, nd);
    for (int i = 0; i < nd; ++i) lb.rows[i] = lb.cols[i] = W.cell_dof(c, i);
    const double detJ = W.frames[c].detJ;
    std::vector<Vec3> val;
    std::vector<Mat3> grad;
    for (int q = 0; q < vol.size(); ++q) {
      cell_basis_eval(W, c, vol.points[q], val, &grad);
      const double w = vol.weights[q] * detJ;
      std::vector<Vec3> curls(nd);
      for (int i = 0; i < nd; ++i) curls[i] = grad[i].curl();
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) lb(i, j) += w * dot(curls[i], curls[j]);
    }
  });
}

CSRMatrix assemble_J(const FESpaces& s, const ProblemParams& p, const QuadDegrees& qd,
                     ExecMode mode) {
  const Mesh& mesh = *s.mesh;
  const FaceSet& faces = *s.faces;
  const DofMap& U = s.U;
  const int nd = U.dofs_per_cell;
  const QuadRule tri = tri_rule(qd.face);
  return assemble_blocks(mode, U.n_dofs, U.n_dofs, faces.n_faces(), [&](int f, LocalBlock& lb) {
    const FaceCtx fc = make_face_ctx(mesh, faces.faces[f]);
    const int ns = fc.nsides;
    const bool interior = ns == 2;
    lb.reset(ns * nd, ns * nd);
    for (int sd = 0; sd < ns; ++sd)
      for (int i = 0; i < nd; ++i)
        lb.rows[sd * nd + i] = lb.cols[sd * nd + i] = U.cell_dof(fc.cells[sd], i);
    SideEval ev[2];
    std::vector<Vec3> jtheta(static_cast<size_t>(ns) * nd);  // theta x jump(phi)
    std::vector<Vec3> jcurl(static_cast<size_t>(ns) * nd);   // jump(curl_h(phi x theta))
    for (int q = 0; q < tri.size(); ++q) {
      const Vec3 x = face_point(fc, tri.points[q]);
      const double w = 2.0 * fc.area * tri.weights[q];
      const Vec3 theta = p.theta(fc.cells[0], x);
      const Mat3 gt = p.grad_theta(fc.cells[0], x);
      for (int sd = 0; sd < ns; ++sd) {
        cell_basis_eval(U, fc.cells[sd], U.frames[fc.cells[sd]].to_reference(x), ev[sd].val,
                        interior ? &ev[sd].grad : nullptr);
        for (int i = 0; i < nd; ++i) {
          jtheta[sd * nd + i] = cross(theta, ev[sd].val[i]) * fc.jump_sign[sd];
          if (interior)
            jcurl[sd * nd + i] =
                curl_cross(ev[sd].val[i], ev[sd].grad[i], theta, gt) * fc.jump_sign[sd];
        }
      }
      const double w2 = interior ? w * p.mu_J2 * fc.h_f * fc.h_f : 0.0;
      for (int a = 0; a < ns * nd; ++a)
        for (int b = 0; b < ns * nd; ++b) {
          double v = w * p.mu_J1 * dot(jtheta[a], jtheta[b]);
          if (interior) v += w2 * dot(jcurl[a], jcurl[b]);
          lb(a, b) += v;
        }
    }
  });
}

std::vector<double> assemble_pressure_mean(const FESpaces& s, const QuadDegrees& qd) {
  const DofMap& P = s.P;
  const QuadRule vol = tet_rule(qd.volume);
  std::vector<double> mean(P.n_dofs, 0.0);
  std::vector<double> psi;
  for (int c = 0; c < s.mesh->n_cells(); ++c) {
    const double detJ = P.frames[c].detJ;
    for (int q = 0; q < vol.size(); ++q) {
      cell_basis_eval_scalar(P, c, vol.points[q], psi, nullptr);
      for (int j = 0; j < P.dofs_per_cell; ++j)
        mean[P.cell_dof(c, j)] += vol.weights[q] * detJ * psi[j];
    }
  }
  return mean;
}

std::vector<double> assemble_rhs(const FESpaces& s, const ProblemParams& p, const RhsData& data,
                                 const QuadDegrees& qd, ExecMode mode) {
  const Mesh& mesh = *s.mesh;
  const FaceSet& faces = *s.faces;
  const DofMap& U = s.U;
  const DofMap& W = s.W;
  const BlockLayout layout = make_layout(U.n_dofs, s.P.n_dofs, W.n_dofs);
  const int nc = mesh.n_cells();
  const int nbnd = static_cast<int>(faces.boundary.size());
  const QuadRule vol = tet_rule(qd.rhs_volume);
  const QuadRule tri = tri_rule(qd.rhs_face);

  return assemble_vector(mode, layout.total, nc + nbnd, [&](int e, std::vector<int>& idx,
                                                            std::vector<double>& val) {
    if (e < nc) {
      const int c = e;
      const CellFrame& fr = U.frames[c];
      const int ndu = U.dofs_per_cell, ndw = W.dofs_per_cell;
      idx.resize(ndu + ndw);
      val.assign(ndu + ndw, 0.0);
      for (int i = 0; i < ndu; ++i) idx[i] = layout.u_off + U.cell_dof(c, i);
      for (int a = 0; a < ndw; ++a) idx[ndu + a] = layout.B_off + W.cell_dof(c, a);
      std::vector<Vec3> uval, wval;
      for (int q = 0; q < vol.size(); ++q) {
        const Vec3 x = fr.to_physical(vol.points[q]);
        const double w = vol.weights[q] * fr.detJ;
        const Vec3 fv = data.f(x);
        const Vec3 Gv = data.G(x);
        cell_basis_eval(U, c, vol.points[q], uval, nullptr);
        cell_basis_eval(W, c, vol.points[q], wval, nullptr);
        for (int i = 0; i < ndu; ++i) val[i] += w * dot(fv, uval[i]);
        for (int a = 0; a < ndw; ++a) val[ndu + a] += w * dot(Gv, wval[a]);
      }
      return;
    }
    const FaceCtx fc = make_face_ctx(mesh, faces.faces[faces.boundary[e - nc]]);
    const int c = fc.cells[0];
    const int ndu = U.dofs_per_cell, ndw = W.dofs_per_cell;
    idx.resize(ndu + ndw);
    val.assign(ndu + ndw, 0.0);
    for (int i = 0; i < ndu; ++i) idx[i] = layout.u_off + U.cell_dof(c, i);
    for (int a = 0; a < ndw; ++a) idx[ndu + a] = layout.B_off + W.cell_dof(c, a);
    std::vector<Vec3> uval, wval;
    std::vector<Mat3> ugrad;
    for (int q = 0; q < tri.size(); ++q) {
      const Vec3 x = face_point(fc, tri.points[q]);
      const double w = 2.0 * fc.area * tri.weights[q];
      const Vec3 g = data.g(x);
      const Vec3 theta = p.theta(c, x);
      const Vec3 tg = cross(theta, g);
      const double chin_m = std::min(dot(p.chi(c, x), fc.n), 0.0);
      const Vec3 xhat = U.frames[c].to_reference(x);
      cell_basis_eval(U, c, xhat, uval, &ugrad);
      cell_basis_eval(W, c, xhat, wval, nullptr);
      for (int i = 0; i < ndu; ++i) {
        const Vec3 en_i = ugrad[i].sym() * fc.n;
        val[i] += w * (p.nu_S * (-dot(g, en_i) + (p.mu_a / fc.h_f) * dot(g, uval[i])) +
                       p.mu_J1 * dot(tg, cross(theta, uval[i])) - chin_m * dot(g, uval[i]));
      }
      const Vec3 natural = cross(data.curlB(x), fc.n) * p.nu_M - cross(cross(g, theta), fc.n);
      for (int a = 0; a < ndw; ++a) val[ndu + a] += w * dot(natural, wval[a]);
    }
  });
}

std::vector<double> SparseSystem::expand(const std::vector<double>& x_red) const {
  std::vector<double> x(layout.total, 0.0);
  for (int i = 0; i < layout.total; ++i)
    if (constrained[i]) x[i] = constrained_value[i];
  for (size_t r = 0; r < full_of_red.size(); ++r) x[full_of_red[r]] = x_red[r];
  return x;
}

SparseSystem assemble_system(const FESpaces& s, const ProblemParams& p, const RhsData& data,
                             const std::vector<double>& constrained_values, const QuadDegrees& qd,
                             ExecMode mode) {
  p.validate();
  SparseSystem sys;
  sys.layout = make_layout(s.U.n_dofs, s.P.n_dofs, s.W.n_dofs);
  const BlockLayout& L = sys.layout;

  const CSRMatrix Mu = assemble_mass(s.U, qd.volume, mode);
  const CSRMatrix AS = assemble_aS(s, p, qd, mode);
  const CSRMatrix C = assemble_c(s, p, qd, mode, true);
  const CSRMatrix Jm = assemble_J(s, p, qd, mode);
  const CSRMatrix Bm = assemble_b(s, qd, mode);
  const CSRMatrix D = assemble_d(s, p, qd, mode);
  const CSRMatrix AM = assemble_aM(s, qd, mode);
  const CSRMatrix MB = assemble_mass(s.W, qd.volume, mode);
  const std::vector<double> pmean = assemble_pressure_mean(s, qd);

  std::vector<Triplet> t;
  t.reserve(Mu.nnz() + AS.nnz() + C.nnz() + Jm.nnz() + 2 * Bm.nnz() + 2 * D.nnz() + AM.nnz() +
            MB.nnz() + 2 * pmean.size());
  append_block(t, Mu, L.u_off, L.u_off, p.sigma_S);
  append_block(t, AS, L.u_off, L.u_off, p.nu_S);
  append_block(t, C, L.u_off, L.u_off, 1.0);
  append_block(t, Jm, L.u_off, L.u_off, 1.0);
  append_block(t, Bm, L.u_off, L.p_off, 1.0, /*transpose=*/true);   // b(v, p)
  append_block(t, Bm, L.p_off, L.u_off, 1.0);                       // b(u, q)
  append_block(t, D, L.u_off, L.B_off, -1.0);                       // -d(B, v)
  append_block(t, D, L.B_off, L.u_off, 1.0, /*transpose=*/true);    // +d(H, u)
  append_block(t, AM, L.B_off, L.B_off, p.nu_M);
  append_block(t, MB, L.B_off, L.B_off, p.sigma_M);
  for (int j = 0; j < L.n_p; ++j) {
    t.push_back({L.p_off + j, L.mult, pmean[j]});
    t.push_back({L.mult, L.p_off + j, pmean[j]});
  }
  sys.A = csr_from_triplets(L.total, L.total, t);
  sys.rhs = assemble_rhs(s, p, data, qd, mode);
  sys.pressure_mean = pmean;
  sys.domain_volume = s.mesh->total_volume();
  // Coefficients of the constant-1 field: the canonical interior moments of 1
  // are identical on every cell.
  sys.pressure_one.assign(L.n_p, 0.0);
  for (int c = 0; c < s.mesh->n_cells(); ++c)
    for (int j = 0; j < s.P.dofs_per_cell; ++j) {
      const auto& e = s.P.basis.mono[s.P.basis.dofs[j].moment];
      sys.pressure_one[s.P.cell_dof(c, j)] = 6.0 * tet_monomial_integral(e[0], e[1], e[2]);
    }
  sys.dof_coords.assign(L.total, Vec3{});
  for (int i = 0; i < L.n_u; ++i) sys.dof_coords[L.u_off + i] = s.U.dof_position[i];
  for (int i = 0; i < L.n_p; ++i) sys.dof_coords[L.p_off + i] = s.P.dof_position[i];
  for (int i = 0; i < L.n_B; ++i) sys.dof_coords[L.B_off + i] = s.W.dof_position[i];

  sys.constrained.assign(L.total, 0);
  sys.constrained_value.assign(L.total, 0.0);
  for (int i = 0; i < L.n_u; ++i)
    if (s.U.constrained[i]) {
      sys.constrained[L.u_off + i] = 1;
      sys.constrained_value[L.u_off + i] = constrained_values.empty() ? 0.0 : constrained_values[i];
    }

  std::vector<int> red_of_full(L.total, -1);
  for (int i = 0; i < L.total; ++i)
    if (!sys.constrained[i]) {
      red_of_full[i] = static_cast<int>(sys.full_of_red.size());
      sys.full_of_red.push_back(i);
    }
  const int nred = static_cast<int>(sys.full_of_red.size());
  sys.rhs_red.resize(nred);
  for (int r = 0; r < nred; ++r) sys.rhs_red[r] = sys.rhs[sys.full_of_red[r]];

  std::vector<Triplet> tr;
  tr.reserve(sys.A.nnz());
  for (int i = 0; i < L.total; ++i) {
    if (sys.constrained[i]) continue;
    const int ri = red_of_full[i];
    for (int q = sys.A.row_ptr[i]; q < sys.A.row_ptr[i + 1]; ++q) {
      const int j = sys.A.col[q];
      if (sys.constrained[j])
        sys.rhs_red[ri] -= sys.A.val[q] * sys.constrained_value[j];
      else
        tr.push_back({ri, red_of_full[j], sys.A.val[q]});
    }
  }
  sys.A_red = csr_from_triplets(nred, nred, tr);
  return sys;
}

}  // namespace tetmhd
