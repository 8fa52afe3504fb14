#include <cmath>

#include "doctest.h"
#include "tetmhd/cases.hpp"
#include "tetmhd/harness.hpp"
#include "tetmhd/norms.hpp"

using namespace tetmhd;

namespace {

bool bitwise_equal(const CSRMatrix& a, const CSRMatrix& b) {
  return a.nrows == b.nrows && a.row_ptr == b.row_ptr && a.col == b.col && a.val == b.val;
}

struct Setup {
  Mesh mesh;
  FaceSet faces;
  EdgeSet edges;
  FESpaces s;
  Setup(Mesh m, int k) : mesh(std::move(m)) {
    faces = build_face_connectivity(mesh);
    edges = build_edge_connectivity(mesh);
    s = build_spaces(mesh, faces, edges, k);
  }
};

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("OpenMP kernels reproduce the serial reference bitwise") {
  const Setup t(generate_cube_mesh(2), 1);
  const ManufacturedCase c = make_case("test1");
  RunConfig cfg;
  const ProblemParams p = make_params(cfg, c);
  const QuadDegrees qd = QuadDegrees::defaults(1);

  CHECK(bitwise_equal(assemble_aS(t.s, p, qd, ExecMode::Serial),
                      assemble_aS(t.s, p, qd, ExecMode::Parallel)));
  CHECK(bitwise_equal(assemble_c(t.s, p, qd, ExecMode::Serial),
                      assemble_c(t.s, p, qd, ExecMode::Parallel)));
  CHECK(bitwise_equal(assemble_J(t.s, p, qd, ExecMode::Serial),
                      assemble_J(t.s, p, qd, ExecMode::Parallel)));
  CHECK(bitwise_equal(assemble_b(t.s, qd, ExecMode::Serial),
                      assemble_b(t.s, qd, ExecMode::Parallel)));
  CHECK(bitwise_equal(assemble_d(t.s, p, qd, ExecMode::Serial),
                      assemble_d(t.s, p, qd, ExecMode::Parallel)));
  CHECK(bitwise_equal(assemble_aM(t.s, qd, ExecMode::Serial),
                      assemble_aM(t.s, qd, ExecMode::Parallel)));

  const RhsData data = c.rhs_data(p);
  const std::vector<double> r1 = assemble_rhs(t.s, p, data, qd, ExecMode::Serial);
  const std::vector<double> r2 = assemble_rhs(t.s, p, data, qd, ExecMode::Parallel);
  CHECK(r1 == r2);

  const SparseSystem s1 = assemble_system(t.s, p, data, {}, qd, ExecMode::Serial);
  const SparseSystem s2 = assemble_system(t.s, p, data, {}, qd, ExecMode::Parallel);
  CHECK(bitwise_equal(s1.A, s2.A));
  CHECK(bitwise_equal(s1.A_red, s2.A_red));
  CHECK(s1.rhs == s2.rhs);
  CHECK(s1.rhs_red == s2.rhs_red);
}

TEST_CASE("error norms are bitwise reproducible across execution modes") {
  RunConfig cfg;
  cfg.case_name = "test1";
  cfg.levels = {2};
  cfg.mode = ExecMode::Serial;
  const RunResult r1 = run_case(cfg);
  cfg.mode = ExecMode::Parallel;
  const RunResult r2 = run_case(cfg);
  for (const std::string& col : ErrorReport::csv_error_columns())
    CHECK(r1.reports[0].column(col) == r2.reports[0].column(col));
  CHECK(r1.reports[0].err_u_stab == r2.reports[0].err_u_stab);
  CHECK(r1.reports[0].err_B_M == r2.reports[0].err_B_M);
}

}  // TEST_SUITE
