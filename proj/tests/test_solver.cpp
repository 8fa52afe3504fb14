#include <cmath>
#include <random>

#include "doctest.h"
#include "tetmhd/cases.hpp"
#include "tetmhd/harness.hpp"
#include "tetmhd/quadrature.hpp"
#include "tetmhd/solver.hpp"

using namespace tetmhd;

TEST_SUITE("solver") {

TEST_CASE("sparse LU matches a dense oracle on random systems") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ud(-1, 1);
  for (int n : {12, 60}) {
    std::vector<Triplet> t;
    DenseMatrix dense(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i != j && std::abs(i - j) % 7 > 2) continue;  // sparse band-ish pattern
        const double v = ud(rng) + (i == j ? 4.0 : 0.0);
        t.push_back({i, j, v});
        dense(i, j) = v;
      }
    const CSRMatrix A = csr_from_triplets(n, n, t);
    SparseLU lu(A);
    std::vector<double> b(n), x, xd;
    for (auto& v : b) v = ud(rng);
    lu.solve(b, x);
    DenseLU dlu(dense);
    dlu.solve(b, xd);
    for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - xd[i]) < 1e-10);
    CHECK(lu.min_pivot() > 0.0);
  }
}

TEST_CASE("singular matrices are reported with the failing column") {
  std::vector<Triplet> t = {{0, 0, 1.0}, {0, 1, 2.0}};  // row 1 empty
  const CSRMatrix A = csr_from_triplets(2, 2, t);
  CHECK_THROWS_WITH_AS(SparseLU{A}, doctest::Contains("singular"), std::runtime_error);
}

TEST_CASE("zero right-hand side yields the zero solution") {
  const Mesh mesh = generate_cube_mesh(1);
  const FaceSet faces = build_face_connectivity(mesh);
  const EdgeSet edges = build_edge_connectivity(mesh);
  const FESpaces s = build_spaces(mesh, faces, edges, 1);
  const ManufacturedCase c = make_case("test1");
  RunConfig cfg;
  const ProblemParams p = make_params(cfg, c);
  RhsData data;
  data.f = data.G = data.g = data.curlB = [](const Vec3&) { return Vec3{0, 0, 0}; };
  const SparseSystem sys =
      assemble_system(s, p, data, {}, QuadDegrees::defaults(1), ExecMode::Serial);
  const SolveReport rep = solve(sys);
  for (double v : rep.full) CHECK(std::abs(v) < 1e-12);
  CHECK(rep.relative_residual <= 1e-9);
}

TEST_CASE("system is nonsingular on the coarsest cube") {
  const Mesh mesh = generate_cube_mesh(1);
  const FaceSet faces = build_face_connectivity(mesh);
  const EdgeSet edges = build_edge_connectivity(mesh);
  const FESpaces s = build_spaces(mesh, faces, edges, 1);
  const ManufacturedCase c = make_case("test1");
  RunConfig cfg;
  const ProblemParams p = make_params(cfg, c);
  const RhsData data = c.rhs_data(p);
  const SparseSystem sys =
      assemble_system(s, p, data, {}, QuadDegrees::defaults(1), ExecMode::Serial);
  SparseLU lu(sys.A_red);
  CHECK(lu.min_pivot() > 1e-12);
  CHECK(lu.max_pivot() / lu.min_pivot() < 1e12);
}

TEST_CASE("patch solutions are reproduced in every dof") {
  for (int k : {1, 2}) {
    RunConfig cfg;
    cfg.case_name = "patch";
    cfg.k = k;
    cfg.levels = {2};
    const RunResult r = run_case(cfg);
    const LevelResult& lv = r.levels[0];
    const FEFunction uI = interp_bdm(pointwise(r.problem.u), lv.spaces->U, 2 * k + 4);
    const FEFunction BI = interp_nedelec(pointwise(r.problem.B), lv.spaces->W, 2 * k + 4);
    double worst = 0.0;
    for (int i = 0; i < lv.spaces->U.n_dofs; ++i)
      worst = std::max(worst, std::abs(lv.u_h.coeffs[i] - uI.coeffs[i]));
    for (int i = 0; i < lv.spaces->W.n_dofs; ++i)
      worst = std::max(worst, std::abs(lv.B_h.coeffs[i] - BI.coeffs[i]));
    for (int i = 0; i < lv.spaces->P.n_dofs; ++i)
      worst = std::max(worst, std::abs(lv.p_h.coeffs[i]));
    CHECK(worst < 1e-8);
    CHECK(lv.solve.relative_residual <= 1e-9);
  }
}

TEST_CASE("pressure is returned with zero mean") {
  RunConfig cfg;
  cfg.case_name = "test1";
  cfg.levels = {2};
  const RunResult r = run_case(cfg);
  const LevelResult& lv = r.levels[0];
  // integrate p_h directly
  const QuadRule rule = tet_rule(4);
  double mean = 0.0, scale = 0.0;
  for (int c = 0; c < lv.mesh->n_cells(); ++c)
    for (int q = 0; q < rule.size(); ++q) {
      double pv;
      eval_scalar_function(lv.p_h, c, rule.points[q], &pv, nullptr);
      mean += rule.weights[q] * lv.spaces->P.frames[c].detJ * pv;
      scale = std::max(scale, std::abs(pv));
    }
  CHECK(std::abs(mean) < 1e-13 * std::max(scale, 1.0));
}

TEST_CASE("errors decay monotonically under refinement") {
  // h = sqrt(3) is below resolving anything; start the comparison at n=2.
  RunConfig cfg;
  cfg.case_name = "test1";
  cfg.levels = {2, 3};
  const RunResult r = run_case(cfg);
  for (const std::string& col : ErrorReport::csv_error_columns())
    CHECK(r.reports[1].column(col) < r.reports[0].column(col));
}

}  // TEST_SUITE
