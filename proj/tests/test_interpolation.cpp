#include <cmath>
#include <random>

#include "doctest.h"
#include "tetmhd/interpolation.hpp"
#include "tetmhd/mesh.hpp"
#include "tetmhd/quadrature.hpp"

using namespace tetmhd;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Spaces {
  Mesh mesh;
  FaceSet faces;
  EdgeSet edges;
};

Spaces make(Mesh m) {
  Spaces s;
  s.mesh = std::move(m);
  s.faces = build_face_connectivity(s.mesh);
  s.edges = build_edge_connectivity(s.mesh);
  return s;
}

// Exact integral of sin(pi * x_axis) over a Kuhn tetrahedron, found by
// integrating the cross-section measure along the axis. Inside a chain cell
// the selected coordinate is either the smallest, middle or largest local
// coordinate; the three cases have cross-section measures (h-t)^2/2, t(h-t)
// and t^2/2.
double kuhn_sin_integral(const Mesh& m, int cell, int axis) {
  double lo = 1e300, hi = -1e300;
  int count_lo = 0;
  for (int v : m.cells[cell]) {
    lo = std::min(lo, m.vertices[v][axis]);
    hi = std::max(hi, m.vertices[v][axis]);
  }
  for (int v : m.cells[cell])
    if (std::abs(m.vertices[v][axis] - lo) < 1e-12) ++count_lo;
  const double a = lo, h = hi - lo, c = kPi;
  const double ca = std::cos(c * a), cah = std::cos(c * (a + h));
  const double sa = std::sin(c * a), sah = std::sin(c * (a + h));
  const double M0 = (ca - cah) / c;
  const double M1 = -h * cah / c + (sah - sa) / (c * c);
  const double IC = h * sah / c + (cah - ca) / (c * c);  // int t cos(c(a+t))
  const double M2 = -h * h * cah / c + 2.0 * IC / c;
  if (count_lo == 3) return 0.5 * (h * h * M0 - 2.0 * h * M1 + M2);  // axis smallest
  if (count_lo == 2) return h * M1 - M2;                             // axis middle
  return 0.5 * M2;                                                   // axis largest
}

double l2_error(const PiecewiseField& f, const VectorField& exact, const Mesh& mesh, int deg) {
  const QuadRule rule = tet_rule(deg);
  double s = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellFrame fr = make_cell_frame(mesh, c);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3 d = f.eval(c, rule.points[q]) - exact(c, fr.to_physical(rule.points[q]));
      s += rule.weights[q] * fr.detJ * dot(d, d);
    }
  }
  return std::sqrt(s);
}

Vec3 test1_u(const Vec3& x) {
  return Vec3{std::sin(kPi * x.x) * std::cos(kPi * x.y) * std::cos(kPi * x.z),
              std::cos(kPi * x.x) * std::sin(kPi * x.y) * std::cos(kPi * x.z),
              -2.0 * std::cos(kPi * x.x) * std::cos(kPi * x.y) * std::sin(kPi * x.z)};
}

}  // namespace

TEST_SUITE("interpolation") {

TEST_CASE("BDM interpolation reproduces (P_k)^3 pointwise") {
  const Spaces s = make(generate_cube_mesh(2));
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ud(-1, 1);
  for (int k : {1, 2}) {
    const DofMap U = build_dofmap(s.mesh, s.faces, s.edges, bdm_basis(k),
                                  BoundaryPolicy::HdivZeroNormal);
    double co[3][10];
    for (auto& row : co)
      for (double& v : row) v = ud(rng);
    auto poly = [&](const Vec3& x) {
      auto comp = [&](const double* cc) {
        double v = cc[0] + cc[1] * x.x + cc[2] * x.y + cc[3] * x.z;
        if (k == 2)
          v += cc[4] * x.x * x.x + cc[5] * x.y * x.y + cc[6] * x.z * x.z + cc[7] * x.x * x.y +
               cc[8] * x.x * x.z + cc[9] * x.y * x.z;
        return v;
      };
      return Vec3{comp(co[0]), comp(co[1]), comp(co[2])};
    };
    const FEFunction f = interp_bdm(pointwise(poly), U, 2 * k + 6);
    for (int c = 0; c < s.mesh.n_cells(); c += 7) {
      const Vec3 xh{0.21, 0.34, 0.17};
      Vec3 v;
      eval_function(f, c, xh, &v, nullptr);
      CHECK(norm(v - poly(U.frames[c].to_physical(xh))) < 1e-10);
    }
  }
}

TEST_CASE("BDM interpolation maps divergence-free fields into the discrete kernel") {
  const Spaces s = make(generate_cube_mesh(2));
  const QuadRule rule = tet_rule(4);
  for (int k : {1, 2}) {
    const DofMap U = build_dofmap(s.mesh, s.faces, s.edges, bdm_basis(k),
                                  BoundaryPolicy::HdivZeroNormal);
    const FEFunction f = interp_bdm(pointwise(test1_u), U, 14);
    double worst = 0.0;
    for (int c = 0; c < s.mesh.n_cells(); ++c)
      for (int q = 0; q < rule.size(); ++q) {
        Mat3 g;
        eval_function(f, c, rule.points[q], nullptr, &g);
        worst = std::max(worst, std::abs(g.trace()));
      }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("BDM interpolation error is orthogonal to piecewise P_{k-1}") {
  const Spaces s = make(generate_lshape_mesh(1));
  auto v = [](const Vec3& x) { return Vec3{x.y * x.y, x.z * x.z, x.x * x.x}; };
  const QuadRule rule = tet_rule(8);
  for (int k : {1, 2}) {
    const DofMap U = build_dofmap(s.mesh, s.faces, s.edges, bdm_basis(k),
                                  BoundaryPolicy::HdivZeroNormal);
    const DofMap P = build_dofmap(s.mesh, s.faces, s.edges, discontinuous_basis(k - 1),
                                  BoundaryPolicy::None);
    const FEFunction f = interp_bdm(pointwise(v), U, 12);
    std::vector<double> psi;
    double worst = 0.0;
    for (int c = 0; c < s.mesh.n_cells(); ++c) {
      // moments of the interpolation error against every scalar basis function
      // and every component
      std::vector<double> mom(static_cast<size_t>(P.dofs_per_cell) * 3, 0.0);
      for (int q = 0; q < rule.size(); ++q) {
        Vec3 fv;
        eval_function(f, c, rule.points[q], &fv, nullptr);
        const Vec3 err = v(U.frames[c].to_physical(rule.points[q])) - fv;
        cell_basis_eval_scalar(P, c, rule.points[q], psi, nullptr);
        const double w = rule.weights[q] * U.frames[c].detJ;
        for (int j = 0; j < P.dofs_per_cell; ++j)
          for (int comp = 0; comp < 3; ++comp) mom[j * 3 + comp] += w * psi[j] * err[comp];
      }
      for (double mval : mom) worst = std::max(worst, std::abs(mval));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("Nedelec interpolation reproduces polynomials and kills gradients' curl") {
  const Spaces s = make(generate_cube_mesh(2));
  for (int k : {1, 2}) {
    const DofMap W = build_dofmap(s.mesh, s.faces, s.edges, nedelec2_basis(k),
                                  BoundaryPolicy::None);
    auto H = [k](const Vec3& x) {
      Vec3 v{1.0 + 2.0 * x.y - x.z, 0.5 * x.x + x.z, x.x - 3.0 * x.y};
      if (k == 2) v += Vec3{x.y * x.z, x.x * x.x, x.z * x.z - x.x * x.y};
      return v;
    };
    const FEFunction f = interp_nedelec(pointwise(H), W, 12);
    for (int c = 0; c < s.mesh.n_cells(); c += 5) {
      const Vec3 xh{0.3, 0.25, 0.2};
      Vec3 v;
      eval_function(f, c, xh, &v, nullptr);
      CHECK(norm(v - H(W.frames[c].to_physical(xh))) < 1e-10);
    }
    // gradient of a linear scalar: constant field, curl-free interpolant
    const FEFunction g =
        interp_nedelec(pointwise([](const Vec3&) { return Vec3{1.0, -2.0, 0.5}; }), W, 8);
    for (int c = 0; c < s.mesh.n_cells(); c += 5) {
      Mat3 jac;
      eval_function(g, c, {0.25, 0.25, 0.25}, nullptr, &jac);
      CHECK(norm(jac.curl()) < 1e-10);
    }
  }
}

TEST_CASE("L2 projection reproduces P_m and matches analytic sine cell means") {
  const Mesh m = generate_cube_mesh(2);
  // reproduction
  auto lin = [](const Vec3& x) { return Vec3{1.0 + x.x - 2.0 * x.z, x.y, 0.5 - x.x}; };
  const PiecewiseField pf = l2_project(1, 3, pointwise(lin), m, 8);
  for (int c = 0; c < m.n_cells(); ++c) {
    const CellFrame fr = make_cell_frame(m, c);
    const Vec3 xh{0.3, 0.3, 0.1};
    CHECK(norm(pf.eval(c, xh) - lin(fr.to_physical(xh))) < 1e-12);
  }
  // sine means against the closed-form oracle
  auto sinx = [](const Vec3& x) { return Vec3{std::sin(kPi * x.x), 0, 0}; };
  const PiecewiseField mean = l2_project(0, 1, pointwise([&](const Vec3& x) {
                                           return Vec3{std::sin(kPi * x.x), 0, 0};
                                         }),
                                         m, 14);
  (void)sinx;
  for (int c = 0; c < m.n_cells(); ++c) {
    const double vol = m.cell_volume(c);
    const double want = kuhn_sin_integral(m, c, 0) / vol;
    CHECK(std::abs(mean.coeff[static_cast<size_t>(c) * mean.n_mono()] - want) < 1e-12);
  }
}

TEST_CASE("L2 projection error decays at order m+1") {
  auto f = [](int, const Vec3& x) {
    return Vec3{std::sin(kPi * x.x) * std::cos(kPi * x.y), std::sin(kPi * x.z), 0.0};
  };
  for (int m : {0, 1}) {
    double e_prev = 0.0;
    int n_prev = 0;
    for (int n : {2, 4}) {
      const Mesh mesh = generate_cube_mesh(n);
      const double e = l2_error(l2_project(m, 3, f, mesh, 2 * m + 8), f, mesh, 10);
      if (n_prev > 0) {
        const double rate = std::log(e_prev / e) / std::log(double(n) / n_prev);
        CHECK(rate > m + 1 - 0.25);
      }
      e_prev = e;
      n_prev = n;
    }
  }
}

TEST_CASE("piecewise-constant theta: exactness, sine means, Linf bound") {
  const Mesh m = generate_cube_mesh(2);
  const PiecewiseField c0 = theta_piecewise_constant(
      pointwise([](const Vec3&) { return Vec3{1, -1, 2}; }), m, 6);
  for (int c = 0; c < m.n_cells(); ++c) CHECK(norm(c0.cell_value(c) - Vec3{1, -1, 2}) < 1e-14);

  auto B = [](const Vec3& x) {
    return Vec3{std::sin(kPi * x.y), std::sin(kPi * x.z), std::sin(kPi * x.x)};
  };
  const PiecewiseField th = theta_piecewise_constant(pointwise(B), m, 14);
  const int axes[3] = {1, 2, 0};  // component i of B depends on axes[i]
  for (int c = 0; c < m.n_cells(); ++c) {
    const double vol = m.cell_volume(c);
    const Vec3 got = th.cell_value(c);
    for (int comp = 0; comp < 3; ++comp)
      CHECK(std::abs(got[comp] - kuhn_sin_integral(m, c, axes[comp]) / vol) < 1e-12);
  }
  // || theta - theta_h ||_inf(E) <= C h_E |theta|_W1inf(E) with |B|_W1inf <= pi
  const QuadRule rule = tet_rule(6);
  for (int c = 0; c < m.n_cells(); ++c) {
    const CellFrame fr = make_cell_frame(m, c);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec3 d = B(fr.to_physical(rule.points[q])) - th.cell_value(c);
      const double bound = 2.0 * fr.diameter * kPi;
      CHECK(std::abs(d.x) < bound);
      CHECK(std::abs(d.y) < bound);
      CHECK(std::abs(d.z) < bound);
    }
  }
}

TEST_CASE("Oswald operator is a projection") {
  const Mesh m = generate_cube_mesh(2);
  const FaceSet fs = build_face_connectivity(m);
  // k=2: globally continuous linear input is reproduced
  auto lin = [](const Vec3& x) { return Vec3{x.x - x.y, 2.0 * x.z, 1.0 + x.y}; };
  const PiecewiseField p1 = l2_project(1, 3, pointwise(lin), m, 6);
  const PiecewiseField o1 = oswald(p1, m, nullptr);
  for (size_t i = 0; i < p1.coeff.size(); ++i) CHECK(std::abs(o1.coeff[i] - p1.coeff[i]) < 1e-11);
  // k=1: a global constant on the macro mesh is reproduced
  const MacroMesh mm = build_macro_mesh(m, fs);
  const PiecewiseField p0 = l2_project(0, 3, pointwise([](const Vec3&) {
                                         return Vec3{0.7, -0.2, 0.1};
                                       }),
                                       m, 4);
  const PiecewiseField o0 = oswald(p0, m, &mm);
  for (size_t i = 0; i < p0.coeff.size(); ++i) CHECK(std::abs(o0.coeff[i] - p0.coeff[i]) < 1e-13);
  CHECK_THROWS(oswald(p0, m, nullptr));  // macro mesh required for degree 0
}

TEST_CASE("Oswald macro value is the volume-weighted mean") {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2.0 / 3, 2.0 / 3, 2.0 / 3}};
  m.cells.push_back({0, 1, 2, 3});
  m.cells.push_back({1, 2, 3, 4});
  for (int c = 0; c < 2; ++c)
    if (m.cell_volume(c) < 0) std::swap(m.cells[c][1], m.cells[c][2]);
  REQUIRE(std::abs(m.cell_volume(0) - m.cell_volume(1)) < 1e-14);  // equal volumes
  MacroMesh mm;
  mm.macro_of_cell = {0, 0};
  mm.cells_of_macro = {{0, 1}};
  mm.seed_vertex = {1};
  mm.max_cardinality = 2;
  PiecewiseField p;
  p.mesh = &m;
  p.degree = 0;
  p.ncomp = 1;
  p.mono = {{0, 0, 0}};
  p.coeff = {1.0, 3.0};
  const PiecewiseField o = oswald(p, m, &mm);
  CHECK(o.coeff[0] == doctest::Approx(2.0));
  CHECK(o.coeff[1] == doctest::Approx(2.0));
}

TEST_CASE("Oswald jump bound holds on random piecewise fields") {
  const Mesh m = generate_cube_mesh(2);
  const FaceSet fs = build_face_connectivity(m);
  const MacroMesh mm = build_macro_mesh(m, fs);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ud(-1, 1);
  const QuadRule vol = tet_rule(4);
  const QuadRule tri = tri_rule(4);
  for (int degree : {0, 1}) {
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      PiecewiseField p;
      p.mesh = &m;
      p.degree = degree;
      p.ncomp = 3;
      p.mono.clear();
      for (int a = 0; a <= degree; ++a)
        for (int b = 0; b + a <= degree; ++b)
          for (int c = 0; c + a + b <= degree; ++c) p.mono.push_back({a, b, c});
      p.coeff.resize(static_cast<size_t>(m.n_cells()) * 3 * p.n_mono());
      for (double& v : p.coeff) v = ud(rng);
      const PiecewiseField o = oswald(p, m, degree == 0 ? &mm : nullptr);

      double lhs = 0.0;
      for (int c = 0; c < m.n_cells(); ++c) {
        const CellFrame fr = make_cell_frame(m, c);
        for (int q = 0; q < vol.size(); ++q) {
          const Vec3 d = p.eval(c, vol.points[q]) - o.eval(c, vol.points[q]);
          lhs += fr.diameter * fr.diameter * vol.weights[q] * fr.detJ * dot(d, d);
        }
      }
      double rhs = 0.0;
      for (int f : fs.interior) {
        const FaceInfo& info = fs.faces[f];
        const Vec3 A = m.vertices[info.v[0]], Bv = m.vertices[info.v[1]],
                   C = m.vertices[info.v[2]];
        const CellFrame f0 = make_cell_frame(m, info.cell[0]);
        const CellFrame f1 = make_cell_frame(m, info.cell[1]);
        for (int q = 0; q < tri.size(); ++q) {
          const Vec3 x = A + tri.points[q].x * (Bv - A) + tri.points[q].y * (C - A);
          const Vec3 jump = p.eval(info.cell[0], f0.to_reference(x)) -
                            p.eval(info.cell[1], f1.to_reference(x));
          rhs += std::pow(info.diameter, 3) * 2.0 * info.area * tri.weights[q] * dot(jump, jump);
        }
      }
      REQUIRE(rhs > 0.0);
      worst_ratio = std::max(worst_ratio, lhs / rhs);
    }
    MESSAGE("oswald bound constant, degree ", degree, ": ", worst_ratio);
    CHECK(worst_ratio < 100.0);
  }
}

TEST_CASE("commuting property: div of interpolant equals projected divergence") {
  const Mesh m = generate_cube_mesh(2);
  const FaceSet fs = build_face_connectivity(m);
  const EdgeSet es = build_edge_connectivity(m);
  auto v = [](const Vec3& x) {
    return Vec3{std::sin(kPi * x.x), x.x * x.x * x.y, std::cos(kPi * x.z) * x.y};
  };
  auto div_v = [](const Vec3& x) {
    return kPi * std::cos(kPi * x.x) + x.x * x.x - kPi * std::sin(kPi * x.z) * x.y;
  };
  const QuadRule rule = tet_rule(4);
  for (int k : {1, 2}) {
    const DofMap U = build_dofmap(m, fs, es, bdm_basis(k), BoundaryPolicy::HdivZeroNormal);
    const FEFunction f = interp_bdm(pointwise(v), U, 12);
    const PiecewiseField proj = l2_project(
        k - 1, 1, [&](int, const Vec3& x) { return Vec3{div_v(x), 0, 0}; }, m, 12);
    double worst = 0.0;
    for (int c = 0; c < m.n_cells(); ++c)
      for (int q = 0; q < rule.size(); ++q) {
        Mat3 g;
        eval_function(f, c, rule.points[q], nullptr, &g);
        worst = std::max(worst, std::abs(g.trace() - proj.eval_scalar(c, rule.points[q], 0)));
      }
    CHECK(worst < 1e-9);
  }
}

}  // TEST_SUITE
