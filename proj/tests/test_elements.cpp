#include <cmath>
#include <random>

#include "doctest.h"
#include "tetmhd/assembly.hpp"
#include "tetmhd/elements.hpp"
#include "tetmhd/interpolation.hpp"
#include "tetmhd/quadrature.hpp"

using namespace tetmhd;

namespace {

// Applies every canonical dof functional of dm's basis on `cell` to every
// nodal basis function and returns the largest deviation from the identity.
double dual_basis_defect(const DofMap& dm, int cell) {
  const auto dq = cell_dof_quadratures(dm.basis, dm.frames[cell], 2 * dm.basis.degree + 2);
  std::vector<Vec3> vals;
  std::vector<double> svals;
  double worst = 0.0;
  for (int j = 0; j < dm.basis.dim; ++j) {
    std::vector<double> ell(dm.basis.dim, 0.0);
    for (size_t q = 0; q < dq[j].points.size(); ++q) {
      const Vec3 xhat = dm.frames[cell].to_reference(dq[j].points[q]);
      if (dm.basis.ncomp == 3) {
        cell_basis_eval(dm, cell, xhat, vals, nullptr);
        for (int m = 0; m < dm.basis.dim; ++m) ell[m] += dot(vals[m], dq[j].vweights[q]);
      } else {
        cell_basis_eval_scalar(dm, cell, xhat, svals, nullptr);
        for (int m = 0; m < dm.basis.dim; ++m) ell[m] += svals[m] * dq[j].sweights[q];
      }
    }
    for (int m = 0; m < dm.basis.dim; ++m)
      worst = std::max(worst, std::abs(ell[m] - (m == j ? 1.0 : 0.0)));
  }
  return worst;
}

Mesh skewed_two_cell_mesh() {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1.1, 0.05, -0.1}, {0.2, 0.9, 0.1}, {0.15, 0.3, 1.2}, {1.0, 1.1, 0.9}};
  m.cells.push_back({0, 1, 2, 3});
  m.cells.push_back({1, 2, 3, 4});
  for (int c = 0; c < 2; ++c)
    if (m.cell_volume(c) < 0) std::swap(m.cells[c][1], m.cells[c][2]);
  return m;
}

struct Spaces {
  Mesh mesh;
  FaceSet faces;
  EdgeSet edges;
};

Spaces make(const Mesh& m) {
  Spaces s;
  s.mesh = m;
  s.faces = build_face_connectivity(s.mesh);
  s.edges = build_edge_connectivity(s.mesh);
  return s;
}

}  // namespace

TEST_SUITE("elements") {

TEST_CASE("basis dimensions and dof layouts") {
  const ReferenceBasis b1 = bdm_basis(1);
  CHECK(b1.dim == 12);
  for (const auto& d : b1.dofs) CHECK(d.entity == DofDescriptor::Entity::Face);

  const ReferenceBasis b2 = bdm_basis(2);
  CHECK(b2.dim == 30);
  int faces = 0, interior = 0;
  for (const auto& d : b2.dofs) {
    faces += d.entity == DofDescriptor::Entity::Face;
    interior += d.entity == DofDescriptor::Entity::Interior;
  }
  CHECK(faces == 24);
  CHECK(interior == 6);

  const ReferenceBasis n1 = nedelec2_basis(1);
  CHECK(n1.dim == 12);
  for (const auto& d : n1.dofs) CHECK(d.entity == DofDescriptor::Entity::Edge);

  const ReferenceBasis n2 = nedelec2_basis(2);
  CHECK(n2.dim == 30);
  int edges = 0;
  faces = interior = 0;
  for (const auto& d : n2.dofs) {
    edges += d.entity == DofDescriptor::Entity::Edge;
    faces += d.entity == DofDescriptor::Entity::Face;
    interior += d.entity == DofDescriptor::Entity::Interior;
  }
  CHECK(edges == 18);
  CHECK(faces == 12);
  CHECK(interior == 0);

  CHECK(discontinuous_basis(0).dim == 1);
  CHECK(discontinuous_basis(1).dim == 4);
  CHECK(lagrange_basis(2).dim == 10);
  CHECK(lagrange_basis(3).dim == 20);
  CHECK_THROWS(bdm_basis(3));
  CHECK_THROWS(nedelec2_basis(0));

  for (const ReferenceBasis& rb : {b1, b2, n1, n2}) CHECK(rb.moment_condition < 1e6);
}

TEST_CASE("dual-basis property holds on reference-shaped and skewed cells") {
  const Spaces ref = make(generate_cube_mesh(1));
  const Spaces skew = make(skewed_two_cell_mesh());
  for (int k : {1, 2}) {
    for (const Spaces* s : {&ref, &skew}) {
      const DofMap u = build_dofmap(s->mesh, s->faces, s->edges, bdm_basis(k),
                                    BoundaryPolicy::HdivZeroNormal);
      const DofMap w = build_dofmap(s->mesh, s->faces, s->edges, nedelec2_basis(k),
                                    BoundaryPolicy::None);
      const DofMap p = build_dofmap(s->mesh, s->faces, s->edges, discontinuous_basis(k - 1),
                                    BoundaryPolicy::None);
      CHECK(dual_basis_defect(u, 0) < 1e-10);
      CHECK(dual_basis_defect(w, 0) < 1e-10);
      CHECK(dual_basis_defect(p, 0) < 1e-10);
      CHECK(u.max_moment_condition < 1e6);
    }
  }
}

TEST_CASE("piola maps: identity map leaves values unchanged") {
  const CellFrame id = make_cell_frame(
      {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}, {0, 1, 2, 3});
  const Vec3 v{0.3, -0.7, 0.2};
  CHECK(norm(piola_contravariant_value(id, v) - v) < 1e-15);
  CHECK(norm(piola_covariant_value(id, v) - v) < 1e-15);
  CHECK(piola_contravariant_divergence(id, 0.37) == doctest::Approx(0.37));
  CHECK(norm(piola_covariant_curl(id, v) - v) < 1e-15);
}

TEST_CASE("piola divergence and curl agree with finite differences") {
  // Skewed cell; push a fixed reference polynomial field through the maps and
  // difference the mapped values directly.
  const CellFrame g = make_cell_frame(
      {Vec3{0.1, 0, 0}, Vec3{1.2, 0.1, -0.2}, Vec3{0.3, 1.4, 0.2}, Vec3{-0.1, 0.4, 1.1}},
      {0, 1, 2, 3});
  auto ref_field = [](const Vec3& p) {
    return Vec3{p.x * p.x + p.y, p.y * p.z, p.x - p.z * p.z};
  };
  auto ref_div = [](const Vec3& p) { return 2.0 * p.x + p.z - 2.0 * p.z; };
  auto ref_curl = [](const Vec3& p) { return Vec3{-p.y, -1.0, -1.0}; };

  const Vec3 x0{0.35, 0.3, 0.25};
  const double delta = 1e-6;

  SUBCASE("contravariant divergence") {
    auto phys = [&](const Vec3& x) {
      return piola_contravariant_value(g, ref_field(g.to_reference(x)));
    };
    double div_fd = 0.0;
    const Vec3 x = g.to_physical(x0);
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += delta;
      xm[j] -= delta;
      div_fd += (phys(xp)[j] - phys(xm)[j]) / (2.0 * delta);
    }
    CHECK(std::abs(piola_contravariant_divergence(g, ref_div(x0)) - div_fd) < 1e-6);
  }

  SUBCASE("covariant curl") {
    auto phys = [&](const Vec3& x) {
      return piola_covariant_value(g, ref_field(g.to_reference(x)));
    };
    const Vec3 x = g.to_physical(x0);
    Mat3 jac;
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += delta;
      xm[j] -= delta;
      const Vec3 d = (phys(xp) - phys(xm)) / (2.0 * delta);
      for (int i = 0; i < 3; ++i) jac(i, j) = d[i];
    }
    CHECK(norm(piola_covariant_curl(g, ref_curl(x0)) - jac.curl()) < 1e-6);
  }

  SUBCASE("degenerate cell is rejected") {
    CHECK_THROWS(make_cell_frame(
        {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{2, 0, 0}, Vec3{3, 0, 0}}, {0, 1, 2, 3}));
  }
}

TEST_CASE("uniform scaling scales the mapped divergence as expected") {
  // Scaling the cell by s multiplies J by s and detJ by s^3, so the mapped
  // divergence picks up 1/s^3 while reference gradients are unchanged.
  const CellFrame unit = make_cell_frame(
      {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}, {0, 1, 2, 3});
  const double s = 2.5;
  const CellFrame scaled = make_cell_frame(
      {Vec3{0, 0, 0}, Vec3{s, 0, 0}, Vec3{0, s, 0}, Vec3{0, 0, s}}, {0, 1, 2, 3});
  const double refdiv = 0.8;
  CHECK(piola_contravariant_divergence(scaled, refdiv) ==
        doctest::Approx(piola_contravariant_divergence(unit, refdiv) / (s * s * s)));
}

TEST_CASE("normal and tangential traces agree from both incident cells") {
  const Spaces s = make(skewed_two_cell_mesh());
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ud(-1, 1);
  for (int k : {1, 2}) {
    const DofMap U = build_dofmap(s.mesh, s.faces, s.edges, bdm_basis(k),
                                  BoundaryPolicy::HdivZeroNormal);
    const DofMap W = build_dofmap(s.mesh, s.faces, s.edges, nedelec2_basis(k),
                                  BoundaryPolicy::None);
    FEFunction fu(U), fw(W);
    for (auto& v : fu.coeffs) v = ud(rng);
    for (auto& v : fw.coeffs) v = ud(rng);
    for (int f : s.faces.interior) {
      const FaceInfo& info = s.faces.faces[f];
      const Vec3 A = s.mesh.vertices[info.v[0]], B = s.mesh.vertices[info.v[1]],
                 C = s.mesh.vertices[info.v[2]];
      for (double a = 0.15; a < 0.8; a += 0.2)
        for (double b = 0.1; a + b < 0.95; b += 0.2) {
          const Vec3 x = A + a * (B - A) + b * (C - A);
          Vec3 u0, u1, w0, w1;
          eval_function(fu, info.cell[0], U.frames[info.cell[0]].to_reference(x), &u0, nullptr);
          eval_function(fu, info.cell[1], U.frames[info.cell[1]].to_reference(x), &u1, nullptr);
          CHECK(std::abs(dot(u0 - u1, info.normal)) < 1e-10);
          eval_function(fw, info.cell[0], W.frames[info.cell[0]].to_reference(x), &w0, nullptr);
          eval_function(fw, info.cell[1], W.frames[info.cell[1]].to_reference(x), &w1, nullptr);
          CHECK(norm(cross(info.normal, w0 - w1)) < 1e-10);
        }
    }
  }
}

TEST_CASE("dofmap: global counts and constrained sets") {
  const Spaces s = make(generate_cube_mesh(1));
  const DofMap U = build_dofmap(s.mesh, s.faces, s.edges, bdm_basis(1),
                                BoundaryPolicy::HdivZeroNormal);
  CHECK(U.n_dofs == 54);            // 3 per face x 18 faces
  CHECK(U.n_constrained() == 36);   // 12 boundary faces
  const DofMap P = build_dofmap(s.mesh, s.faces, s.edges, discontinuous_basis(0),
                                BoundaryPolicy::None);
  CHECK(P.n_dofs == 6);
  CHECK(P.zero_mean_constraint);
  const DofMap W = build_dofmap(s.mesh, s.faces, s.edges, nedelec2_basis(1),
                                BoundaryPolicy::None);
  CHECK(W.n_dofs == 2 * s.edges.n_edges());
  CHECK(W.n_constrained() == 0);
}

TEST_CASE("BDM mass matrix is symmetric positive definite") {
  const Spaces s = make(generate_cube_mesh(1));
  const DofMap U = build_dofmap(s.mesh, s.faces, s.edges, bdm_basis(1),
                                BoundaryPolicy::HdivZeroNormal);
  const CSRMatrix M = assemble_mass(U, 4, ExecMode::Serial);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ud(-1, 1);
  double scale = 0.0;
  for (int i = 0; i < M.nrows; ++i)
    for (int p = M.row_ptr[i]; p < M.row_ptr[i + 1]; ++p) {
      CHECK(std::abs(M.val[p] - M.coeff(M.col[p], i)) < 1e-12);
      scale = std::max(scale, std::abs(M.val[p]));
    }
  CHECK(scale > 0.0);
  std::vector<double> x(M.nrows), y;
  for (int trial = 0; trial < 20; ++trial) {
    double nx = 0.0;
    for (auto& v : x) {
      v = ud(rng);
      nx += v * v;
    }
    M.matvec(x, y);
    double q = 0.0;
    for (int i = 0; i < M.nrows; ++i) q += x[i] * y[i];
    CHECK(q > 1e-12 * nx);
  }
}

TEST_CASE("constant fields are reproduced by BDM interpolation") {
  const Spaces s = make(generate_cube_mesh(2));
  const DofMap U = build_dofmap(s.mesh, s.faces, s.edges, bdm_basis(1),
                                BoundaryPolicy::HdivZeroNormal);
  const FEFunction f =
      interp_bdm(pointwise([](const Vec3&) { return Vec3{1, 0, 0}; }), U);
  for (int c = 0; c < s.mesh.n_cells(); ++c)
    for (const Vec3 xh : {Vec3{0.25, 0.25, 0.25}, Vec3{0.1, 0.2, 0.3}}) {
      Vec3 v;
      eval_function(f, c, xh, &v, nullptr);
      CHECK(norm(v - Vec3{1, 0, 0}) < 1e-10);
    }
}

TEST_CASE("gradients of linears are reproduced by Nedelec interpolation") {
  const Spaces s = make(generate_cube_mesh(2));
  const DofMap W = build_dofmap(s.mesh, s.faces, s.edges, nedelec2_basis(1),
                                BoundaryPolicy::None);
  // grad(2x - y + 3z) = (2,-1,3)
  const FEFunction f =
      interp_nedelec(pointwise([](const Vec3&) { return Vec3{2, -1, 3}; }), W);
  for (int c = 0; c < s.mesh.n_cells(); ++c) {
    Vec3 v;
    Mat3 g;
    eval_function(f, c, {0.3, 0.3, 0.2}, &v, &g);
    CHECK(norm(v - Vec3{2, -1, 3}) < 1e-10);
    CHECK(norm(g.curl()) < 1e-10);
  }
}

TEST_CASE("Lagrange spaces are continuous across faces") {
  const Spaces s = make(generate_cube_mesh(2));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ud(-1, 1);
  for (int m : {2, 3}) {
    const DofMap L = build_dofmap(s.mesh, s.faces, s.edges, lagrange_basis(m),
                                  BoundaryPolicy::None);
    FEFunction f(L);
    for (auto& v : f.coeffs) v = ud(rng);
    for (int fi : s.faces.interior) {
      const FaceInfo& info = s.faces.faces[fi];
      const Vec3 A = s.mesh.vertices[info.v[0]], B = s.mesh.vertices[info.v[1]],
                 C = s.mesh.vertices[info.v[2]];
      const Vec3 x = A + 0.27 * (B - A) + 0.41 * (C - A);
      double v0, v1;
      eval_scalar_function(f, info.cell[0], L.frames[info.cell[0]].to_reference(x), &v0, nullptr);
      eval_scalar_function(f, info.cell[1], L.frames[info.cell[1]].to_reference(x), &v1, nullptr);
      CHECK(std::abs(v0 - v1) < 1e-10);
    }
  }
}

}  // TEST_SUITE
