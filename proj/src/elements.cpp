#include "tetmhd/elements.hpp"

#include <algorithm>
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

void mono_values(const std::vector<std::array<int, 3>>& mono, const Vec3& p,
                 std::vector<double>& val) {
  val.resize(mono.size());
  double px[5] = {1, p.x, p.x * p.x, p.x * p.x * p.x, p.x * p.x * p.x * p.x};
  double py[5] = {1, p.y, p.y * p.y, p.y * p.y * p.y, p.y * p.y * p.y * p.y};
  double pz[5] = {1, p.z, p.z * p.z, p.z * p.z * p.z, p.z * p.z * p.z * p.z};
  for (size_t j = 0; j < mono.size(); ++j)
    val[j] = px[mono[j][0]] * py[mono[j][1]] * pz[mono[j][2]];
}

void mono_grads(const std::vector<std::array<int, 3>>& mono, const Vec3& p,
                std::vector<Vec3>& grad) {
  grad.resize(mono.size());
  auto pw = [](double v, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= v;
    return r;
  };
  for (size_t j = 0; j < mono.size(); ++j) {
    const int a = mono[j][0], b = mono[j][1], c = mono[j][2];
    grad[j].x = a == 0 ? 0.0 : a * pw(p.x, a - 1) * pw(p.y, b) * pw(p.z, c);
    grad[j].y = b == 0 ? 0.0 : b * pw(p.x, a) * pw(p.y, b - 1) * pw(p.z, c);
    grad[j].z = c == 0 ? 0.0 : c * pw(p.x, a) * pw(p.y, b) * pw(p.z, c - 1);
  }
}

int face_moment_count(Family f, int k) {
  if (f == Family::BDM) return (k + 1) * (k + 2) / 2;
  if (f == Family::Nedelec2) return k >= 2 ? 3 : 0;
  if (f == Family::Lagrange) return k >= 3 ? 1 : 0;
  return 0;
}

int edge_moment_count(Family f, int k) {
  if (f == Family::Nedelec2) return k + 1;
  if (f == Family::Lagrange) return k - 1;
  return 0;
}

int interior_moment_count(Family f, int k) {
  if (f == Family::BDM) return k >= 2 ? 6 : 0;
  if (f == Family::DiscontinuousP) return (k + 1) * (k + 2) * (k + 3) / 6;
  return 0;
}

std::vector<DofDescriptor> make_dof_layout(Family f, int k) {
  using E = DofDescriptor::Entity;
  std::vector<DofDescriptor> d;
  if (f == Family::Lagrange)
    for (int v = 0; v < 4; ++v) d.push_back({E::Vertex, v, 0});
  for (int e = 0; e < 6; ++e)
    for (int m = 0; m < edge_moment_count(f, k); ++m) d.push_back({E::Edge, e, m});
  for (int lf = 0; lf < 4; ++lf)
    for (int m = 0; m < face_moment_count(f, k); ++m) d.push_back({E::Face, lf, m});
  for (int m = 0; m < interior_moment_count(f, k); ++m) d.push_back({E::Interior, 0, m});
  return d;
}

// Barycentric moment polynomials on faces/edges, canonical vertex order.
double face_moment_poly(int k, int m, double la, double lb, double lc) {
  if (k == 1) return m == 0 ? la : (m == 1 ? lb : lc);
  switch (m) {
    case 0: return la * la;
    case 1: return lb * lb;
    case 2: return lc * lc;
    case 3: return la * lb;
    case 4: return la * lc;
    default: return lb * lc;
  }
}

double edge_moment_poly(int k, int m, double s) {
  if (k == 1) return m == 0 ? 1.0 - s : s;
  switch (m) {
    case 0: return (1.0 - s) * (1.0 - s);
    case 1: return s * s;
    default: return s * (1.0 - s);
  }
}

struct CanonicalFace {
  Vec3 A, B, C;
  Vec3 normal;
  double area, diameter;
  Vec3 centroid;
};

CanonicalFace canonical_face(const CellFrame& fr, int lf) {
  std::array<std::pair<int, int>, 3> order;  // (gid, local vertex)
  for (int i = 0; i < 3; ++i) {
    const int lv = local_faces[lf][i];
    order[i] = {fr.gid[lv], lv};
  }
  std::sort(order.begin(), order.end());
  CanonicalFace cf;
  cf.A = fr.X[order[0].second];
  cf.B = fr.X[order[1].second];
  cf.C = fr.X[order[2].second];
  const Vec3 nn = cross(cf.B - cf.A, cf.C - cf.A);
  cf.area = 0.5 * norm(nn);
  cf.normal = nn / (2.0 * cf.area);
  cf.diameter = std::max({norm(cf.B - cf.A), norm(cf.C - cf.A), norm(cf.C - cf.B)});
  cf.centroid = (cf.A + cf.B + cf.C) / 3.0;
  return cf;
}

struct CanonicalEdge {
  Vec3 a, b;
};

CanonicalEdge canonical_edge(const CellFrame& fr, int le) {
  int va = local_edges[le][0], vb = local_edges[le][1];
  if (fr.gid[va] > fr.gid[vb]) std::swap(va, vb);
  return {fr.X[va], fr.X[vb]};
}

std::vector<DofQuadrature> dof_quadratures_impl(Family fam, int degree,
                                                const std::vector<DofDescriptor>& layout,
                                                const CellFrame& fr, int quad_degree) {
  using E = DofDescriptor::Entity;
  std::vector<DofQuadrature> out(layout.size());
  const QuadRule tri = tri_rule(quad_degree);
  const QuadRule seg = edge_rule(quad_degree);
  const QuadRule tet = tet_rule(quad_degree);

  for (size_t j = 0; j < layout.size(); ++j) {
    const DofDescriptor& d = layout[j];
    DofQuadrature& dq = out[j];
    if (d.entity == E::Vertex) {
      dq.points = {fr.X[d.entity_index]};
      dq.sweights = {1.0};
    } else if (d.entity == E::Edge) {
      const CanonicalEdge e = canonical_edge(fr, d.entity_index);
      if (fam == Family::Lagrange) {
        const double s = static_cast<double>(d.moment + 1) / degree;
        dq.points = {e.a + s * (e.b - e.a)};
        dq.sweights = {1.0};
      } else {  // Nedelec2 tangential moment, normalized by edge length
        const Vec3 t = normalized(e.b - e.a);
        for (int q = 0; q < seg.size(); ++q) {
          const double s = seg.points[q].x;
          dq.points.push_back(e.a + s * (e.b - e.a));
          dq.vweights.push_back(t * (seg.weights[q] * edge_moment_poly(degree, d.moment, s)));
        }
      }
    } else if (d.entity == E::Face) {
      const CanonicalFace f = canonical_face(fr, d.entity_index);
      if (fam == Family::Lagrange) {
        dq.points = {f.centroid};
        dq.sweights = {1.0};
      } else {
        for (int q = 0; q < tri.size(); ++q) {
          const double s = tri.points[q].x, t = tri.points[q].y;
          const Vec3 x = f.A + s * (f.B - f.A) + t * (f.C - f.A);
          dq.points.push_back(x);
          const double w = 2.0 * tri.weights[q];  // (1/|f|) absorbed
          if (fam == Family::BDM) {
            dq.vweights.push_back(f.normal * (w * face_moment_poly(degree, d.moment, 1.0 - s - t, s, t)));
          } else {  // Nedelec2 face moments against {t1, t2, x - x_f}
            Vec3 q3;
            if (d.moment == 0)
              q3 = (f.B - f.A) / f.diameter;
            else if (d.moment == 1)
              q3 = (f.C - f.A) / f.diameter;
            else
              q3 = (x - f.centroid) / f.diameter;
            dq.vweights.push_back(q3 * w);
          }
        }
      }
    } else {  // Interior
      for (int q = 0; q < tet.size(); ++q) {
        const Vec3 xhat = tet.points[q];
        const Vec3 x = fr.to_physical(xhat);
        const double w = 6.0 * tet.weights[q];  // (1/|E|) absorbed
        dq.points.push_back(x);
        if (fam == Family::BDM) {
          const Vec3 dvec = (x - fr.centroid) / fr.diameter;
          Vec3 qv;
          if (d.moment < 3) {
            qv = Vec3{0, 0, 0};
            qv[d.moment] = 1.0;
          } else {
            Vec3 e{0, 0, 0};
            e[d.moment - 3] = 1.0;
            qv = cross(e, dvec);
          }
          dq.vweights.push_back(qv * w);
        } else {  // DiscontinuousP: moments against reference-coordinate monomials
          const auto mono = monomials(degree);
          std::vector<double> mv;
          mono_values(mono, xhat, mv);
          dq.sweights.push_back(w * mv[d.moment]);
        }
      }
    }
  }
  return out;
}

// Evaluates components of nodal function `m` of a coefficient table at a point.
void poly_eval(const DenseMatrix& coeff, int m, int ncomp, const std::vector<double>& monoval,
               Vec3& value) {
  const int nm = static_cast<int>(monoval.size());
  const double* row = coeff.row_ptr(m);
  for (int c = 0; c < ncomp; ++c) {
    double s = 0.0;
    for (int j = 0; j < nm; ++j) s += row[c * nm + j] * monoval[j];
    value[c] = s;
  }
}

void poly_eval_grad(const DenseMatrix& coeff, int m, int ncomp,
                    const std::vector<Vec3>& monograd, Mat3& jac) {
  const int nm = static_cast<int>(monograd.size());
  const double* row = coeff.row_ptr(m);
  for (int c = 0; c < ncomp; ++c)
    for (int d = 0; d < 3; ++d) {
      double s = 0.0;
      for (int j = 0; j < nm; ++j) s += row[c * nm + j] * monograd[j][d];
      jac(c, d) = s;
    }
}

CellFrame reference_frame() {
  return make_cell_frame({Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}},
                         {0, 1, 2, 3});
}

ReferenceBasis build_basis(Family fam, int k) {
  ReferenceBasis rb;
  rb.family = fam;
  rb.degree = k;
  rb.ncomp = (fam == Family::BDM || fam == Family::Nedelec2) ? 3 : 1;
  rb.mono = monomials(k);
  rb.dofs = make_dof_layout(fam, k);
  rb.dim = static_cast<int>(rb.dofs.size());
  if (rb.dim != rb.ncomp * rb.n_mono())
    throw std::logic_error("build_basis: dof count does not match space dimension");

  const CellFrame ref = reference_frame();
  const auto dq = dof_quadratures_impl(fam, k, rb.dofs, ref, 2 * k + 2);

  // Moment matrix of the raw monomial spanning set.
  DenseMatrix M(rb.dim, rb.dim);
  std::vector<double> mv;
  for (int j = 0; j < rb.dim; ++j) {
    for (size_t q = 0; q < dq[j].points.size(); ++q) {
      mono_values(rb.mono, dq[j].points[q], mv);
      for (int c = 0; c < rb.ncomp; ++c) {
        const double wc = rb.ncomp == 3 ? dq[j].vweights[q][c] : dq[j].sweights[q];
        if (wc == 0.0) continue;
        for (int t = 0; t < rb.n_mono(); ++t) M(j, c * rb.n_mono() + t) += wc * mv[t];
      }
    }
  }
  double cond = 0.0;
  const DenseMatrix X = dense_inverse(M, &cond);
  rb.moment_condition = cond;
  if (!(cond < 1e6)) throw std::runtime_error("build_basis: ill-conditioned moment matrix");
  rb.coeff = DenseMatrix(rb.dim, rb.dim);
  for (int m = 0; m < rb.dim; ++m)
    for (int i = 0; i < rb.dim; ++i) rb.coeff(m, i) = X(i, m);
  return rb;
}

}  // namespace

CellFrame make_cell_frame(const std::array<Vec3, 4>& X, const std::array<int, 4>& gid) {
  CellFrame fr;
  fr.X = X;
  fr.gid = gid;
  fr.x0 = X[0];
  for (int j = 0; j < 3; ++j) {
    const Vec3 col = X[j + 1] - X[0];
    fr.J(0, j) = col.x;
    fr.J(1, j) = col.y;
    fr.J(2, j) = col.z;
  }
  fr.detJ = fr.J.det();
  fr.diameter = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) fr.diameter = std::max(fr.diameter, norm(X[i] - X[j]));
  const double scale = fr.diameter;
  if (std::abs(fr.detJ) < 1e-14 * scale * scale * scale)
    throw std::runtime_error("make_cell_frame: degenerate cell");
  fr.Jinv = fr.J.inverse();
  fr.centroid = (X[0] + X[1] + X[2] + X[3]) * 0.25;
  return fr;
}

CellFrame make_cell_frame(const Mesh& mesh, int cell) {
  const auto& t = mesh.cells[cell];
  return make_cell_frame({mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]],
                          mesh.vertices[t[3]]},
                         {t[0], t[1], t[2], t[3]});
}

Vec3 piola_contravariant_value(const CellFrame& g, const Vec3& ref_value) {
  return (g.J * ref_value) / g.detJ;
}

Mat3 piola_contravariant_jacobian(const CellFrame& g, const Mat3& ref_jacobian) {
  return (g.J * ref_jacobian * g.Jinv) * (1.0 / g.detJ);
}

double piola_contravariant_divergence(const CellFrame& g, double ref_divergence) {
  return ref_divergence / g.detJ;
}

Vec3 piola_covariant_value(const CellFrame& g, const Vec3& ref_value) {
  return g.Jinv.transposed() * ref_value;
}

Mat3 piola_covariant_jacobian(const CellFrame& g, const Mat3& ref_jacobian) {
  return g.Jinv.transposed() * ref_jacobian * g.Jinv;
}

Vec3 piola_covariant_curl(const CellFrame& g, const Vec3& ref_curl) {
  return (g.J * ref_curl) / g.detJ;
}

ReferenceBasis bdm_basis(int k) {
  if (k < 1 || k > 2) throw std::invalid_argument("bdm_basis: k must be 1 or 2");
  return build_basis(Family::BDM, k);
}

ReferenceBasis nedelec2_basis(int k) {
  if (k < 1 || k > 2) throw std::invalid_argument("nedelec2_basis: k must be 1 or 2");
  return build_basis(Family::Nedelec2, k);
}

ReferenceBasis discontinuous_basis(int m) {
  if (m < 0 || m > 2) throw std::invalid_argument("discontinuous_basis: m must be 0, 1 or 2");
  return build_basis(Family::DiscontinuousP, m);
}

ReferenceBasis lagrange_basis(int m) {
  if (m < 1 || m > 3) throw std::invalid_argument("lagrange_basis: m must be 1, 2 or 3");
  return build_basis(Family::Lagrange, m);
}

std::vector<DofQuadrature> cell_dof_quadratures(const ReferenceBasis& basis,
                                                const CellFrame& frame, int quad_degree) {
  return dof_quadratures_impl(basis.family, basis.degree, basis.dofs, frame, quad_degree);
}

int DofMap::n_constrained() const {
  int n = 0;
  for (char c : constrained) n += c != 0;
  return n;
}

DofMap build_dofmap(const Mesh& mesh, const FaceSet& faces, const EdgeSet& edges,
                    const ReferenceBasis& basis, BoundaryPolicy policy) {
  using E = DofDescriptor::Entity;
  DofMap dm;
  dm.mesh = &mesh;
  dm.faces = &faces;
  dm.basis = basis;
  dm.dofs_per_cell = basis.dim;
  dm.zero_mean_constraint = basis.family == Family::DiscontinuousP;

  const int nc = mesh.n_cells();
  const int k = basis.degree;
  const int npf = face_moment_count(basis.family, k);
  const int npe = edge_moment_count(basis.family, k);
  const int nint = interior_moment_count(basis.family, k);
  const int nvert_dofs = basis.family == Family::Lagrange ? mesh.n_vertices() : 0;
  const int nedge_dofs = npe * edges.n_edges();
  const int nface_dofs = npf * faces.n_faces();
  dm.n_dofs = nvert_dofs + nedge_dofs + nface_dofs + nint * nc;

  dm.cell_dofs.resize(static_cast<size_t>(nc) * basis.dim);
  dm.cell_signs.assign(static_cast<size_t>(nc) * basis.dim, 1);
  dm.constrained.assign(dm.n_dofs, 0);
  dm.frames.resize(nc);
  dm.cell_coeff.resize(nc);

  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < basis.dim; ++i) {
      const DofDescriptor& d = basis.dofs[i];
      int g = -1;
      switch (d.entity) {
        case E::Vertex:
          g = mesh.cells[c][d.entity_index];
          break;
        case E::Edge:
          g = nvert_dofs + edges.cell_edges[c][d.entity_index] * npe + d.moment;
          break;
        case E::Face:
          g = nvert_dofs + nedge_dofs + faces.cell_faces[c][d.entity_index] * npf + d.moment;
          break;
        case E::Interior:
          g = nvert_dofs + nedge_dofs + nface_dofs + c * nint + d.moment;
          break;
      }
      dm.cell_dofs[static_cast<size_t>(c) * basis.dim + i] = g;
    }
  }

  if (policy == BoundaryPolicy::HdivZeroNormal) {
    for (int f : faces.boundary)
      for (int m = 0; m < npf; ++m)
        dm.constrained[nvert_dofs + nedge_dofs + f * npf + m] = 1;
  }

  dm.dof_position.assign(dm.n_dofs, Vec3{});
  if (basis.family == Family::Lagrange)
    for (int v = 0; v < mesh.n_vertices(); ++v) dm.dof_position[v] = mesh.vertices[v];
  for (int e = 0; e < edges.n_edges(); ++e) {
    const Vec3 mid = (mesh.vertices[edges.edges[e][0]] + mesh.vertices[edges.edges[e][1]]) * 0.5;
    for (int m = 0; m < npe; ++m) dm.dof_position[nvert_dofs + e * npe + m] = mid;
  }
  for (int f = 0; f < faces.n_faces(); ++f) {
    const auto& fv = faces.faces[f].v;
    const Vec3 ctr =
        (mesh.vertices[fv[0]] + mesh.vertices[fv[1]] + mesh.vertices[fv[2]]) / 3.0;
    for (int m = 0; m < npf; ++m) dm.dof_position[nvert_dofs + nedge_dofs + f * npf + m] = ctr;
  }
  for (int c = 0; c < nc; ++c) {
    const Vec3 ctr = mesh.cell_centroid(c);
    for (int m = 0; m < nint; ++m)
      dm.dof_position[nvert_dofs + nedge_dofs + nface_dofs + c * nint + m] = ctr;
  }

  // Per-cell nodal solve against the canonical functionals; the spanning set
  // is the Piola-mapped reference nodal basis.
  std::vector<double> conds(nc, 0.0);
  parallel_for(default_exec_mode(), nc, [&](std::ptrdiff_t c) {
    const CellFrame fr = make_cell_frame(mesh, static_cast<int>(c));
    const auto dq = dof_quadratures_impl(basis.family, k, basis.dofs, fr, 2 * k + 2);
    const int n = basis.dim;
    DenseMatrix M(n, n);
    std::vector<double> mv;
    Vec3 val;
    for (int j = 0; j < n; ++j)
      for (size_t q = 0; q < dq[j].points.size(); ++q) {
        const Vec3 xhat = fr.to_reference(dq[j].points[q]);
        mono_values(basis.mono, xhat, mv);
        for (int i = 0; i < n; ++i) {
          poly_eval(basis.coeff, i, basis.ncomp, mv, val);
          double contrib;
          if (basis.family == Family::BDM)
            contrib = dot(piola_contravariant_value(fr, val), dq[j].vweights[q]);
          else if (basis.family == Family::Nedelec2)
            contrib = dot(piola_covariant_value(fr, val), dq[j].vweights[q]);
          else
            contrib = val.x * dq[j].sweights[q];
          M(j, i) += contrib;
        }
      }
    double cond = 0.0;
    const DenseMatrix X = dense_inverse(M, &cond);
    conds[c] = cond;
    DenseMatrix cc(n, basis.ncomp * basis.n_mono());
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i) {
        const double xim = X(i, m);
        if (xim == 0.0) continue;
        for (int t = 0; t < basis.ncomp * basis.n_mono(); ++t)
          cc(m, t) += xim * basis.coeff(i, t);
      }
    dm.frames[c] = fr;
    dm.cell_coeff[c] = std::move(cc);
  });
  for (double c : conds) dm.max_moment_condition = std::max(dm.max_moment_condition, c);
  if (!(dm.max_moment_condition < 1e6))
    throw std::runtime_error("build_dofmap: ill-conditioned cell moment matrix");
  return dm;
}

void cell_basis_eval(const DofMap& dm, int cell, const Vec3& xhat, std::vector<Vec3>& values,
                     std::vector<Mat3>* grads) {
  const ReferenceBasis& rb = dm.basis;
  const CellFrame& fr = dm.frames[cell];
  const DenseMatrix& cc = dm.cell_coeff[cell];
  static thread_local std::vector<double> mv;
  static thread_local std::vector<Vec3> mg;
  mono_values(rb.mono, xhat, mv);
  if (grads) mono_grads(rb.mono, xhat, mg);
  values.resize(rb.dim);
  if (grads) grads->resize(rb.dim);
  Vec3 v;
  Mat3 jac;
  for (int m = 0; m < rb.dim; ++m) {
    poly_eval(cc, m, 3, mv, v);
    if (rb.family == Family::BDM)
      values[m] = piola_contravariant_value(fr, v);
    else
      values[m] = piola_covariant_value(fr, v);
    if (grads) {
      poly_eval_grad(cc, m, 3, mg, jac);
      (*grads)[m] = rb.family == Family::BDM ? piola_contravariant_jacobian(fr, jac)
                                             : piola_covariant_jacobian(fr, jac);
    }
  }
}

void cell_basis_eval_scalar(const DofMap& dm, int cell, const Vec3& xhat,
                            std::vector<double>& values, std::vector<Vec3>* grads) {
  const ReferenceBasis& rb = dm.basis;
  const CellFrame& fr = dm.frames[cell];
  const DenseMatrix& cc = dm.cell_coeff[cell];
  static thread_local std::vector<double> mv;
  static thread_local std::vector<Vec3> mg;
  mono_values(rb.mono, xhat, mv);
  if (grads) mono_grads(rb.mono, xhat, mg);
  values.resize(rb.dim);
  if (grads) grads->resize(rb.dim);
  const Mat3 JinvT = fr.Jinv.transposed();
  for (int m = 0; m < rb.dim; ++m) {
    const double* row = cc.row_ptr(m);
    double s = 0.0;
    for (int j = 0; j < rb.n_mono(); ++j) s += row[j] * mv[j];
    values[m] = s;
    if (grads) {
      Vec3 g{0, 0, 0};
      for (int j = 0; j < rb.n_mono(); ++j) g += row[j] * mg[j];
      (*grads)[m] = JinvT * g;
    }
  }
}

void eval_function(const FEFunction& f, int cell, const Vec3& xhat, Vec3* value, Mat3* grad) {
  const DofMap& dm = *f.dofmap;
  static thread_local std::vector<Vec3> vals;
  static thread_local std::vector<Mat3> grads;
  cell_basis_eval(dm, cell, xhat, vals, grad ? &grads : nullptr);
  Vec3 v{0, 0, 0};
  Mat3 gsum;
  for (int i = 0; i < dm.dofs_per_cell; ++i) {
    const double ci = f.coeffs[dm.cell_dof(cell, i)];
    if (ci == 0.0) continue;
    v += ci * vals[i];
    if (grad)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) gsum(r, s) += ci * grads[i](r, s);
  }
  if (value) *value = v;
  if (grad) *grad = gsum;
}

void eval_scalar_function(const FEFunction& f, int cell, const Vec3& xhat, double* value,
                          Vec3* grad) {
  const DofMap& dm = *f.dofmap;
  static thread_local std::vector<double> vals;
  static thread_local std::vector<Vec3> grads;
  cell_basis_eval_scalar(dm, cell, xhat, vals, grad ? &grads : nullptr);
  double v = 0.0;
  Vec3 g{0, 0, 0};
  for (int i = 0; i < dm.dofs_per_cell; ++i) {
    const double ci = f.coeffs[dm.cell_dof(cell, i)];
    v += ci * vals[i];
    if (grad) g += ci * grads[i];
  }
  if (value) *value = v;
  if (grad) *grad = g;
}

}  // namespace tetmhd
