// Benchmark of the OpenMP assembly/norm kernels against the serial reference
// implementation; both must produce bitwise-identical results.
#include <chrono>
#include <cstdio>
#include <string>

#include "tetmhd/cases.hpp"
#include "tetmhd/harness.hpp"
#include "tetmhd/norms.hpp"

using namespace tetmhd;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4;
  const int k = argc > 2 ? std::atoi(argv[2]) : 1;
  std::printf("cube n=%d, k=%d\n", n, k);

  const Mesh mesh = generate_cube_mesh(n);
  const FaceSet faces = build_face_connectivity(mesh);
  const EdgeSet edges = build_edge_connectivity(mesh);
  const FESpaces s = build_spaces(mesh, faces, edges, k);
  const ManufacturedCase c = make_case("test1");
  RunConfig cfg;
  cfg.k = k;
  const ProblemParams p = make_params(cfg, c);
  const QuadDegrees qd = QuadDegrees::defaults(k);
  const RhsData data = c.rhs_data(p);

  std::printf("%d cells, %d velocity dofs, %d magnetic dofs\n\n", mesh.n_cells(), s.U.n_dofs,
              s.W.n_dofs);
  std::printf("%-22s %10s %10s %8s %s\n", "kernel", "serial[s]", "openmp[s]", "speedup",
              "bitwise");

  auto bench = [&](const char* name, auto&& make_result) {
    decltype(make_result(ExecMode::Serial)) rs, rp;
    const double ts = seconds([&] { rs = make_result(ExecMode::Serial); });
    const double tp = seconds([&] { rp = make_result(ExecMode::Parallel); });
    const bool same = rs == rp;
    std::printf("%-22s %10.3f %10.3f %7.2fx %s\n", name, ts, tp, ts / tp,
                same ? "identical" : "DIFFERENT");
    return same;
  };

  bool all_same = true;
  all_same &= bench("assemble_aS", [&](ExecMode m) {
    const CSRMatrix a = assemble_aS(s, p, qd, m);
    return a.val;
  });
  all_same &= bench("assemble_c", [&](ExecMode m) {
    const CSRMatrix a = assemble_c(s, p, qd, m);
    return a.val;
  });
  all_same &= bench("assemble_J", [&](ExecMode m) {
    const CSRMatrix a = assemble_J(s, p, qd, m);
    return a.val;
  });
  all_same &= bench("assemble_aM", [&](ExecMode m) {
    const CSRMatrix a = assemble_aM(s, qd, m);
    return a.val;
  });
  all_same &= bench("assemble_rhs", [&](ExecMode m) { return assemble_rhs(s, p, data, qd, m); });

  const PiecewiseField th = theta_piecewise_constant(p.theta, mesh, 2 * k + 4);
  FEFunction u(s.U), pr(s.P), B(s.W);
  for (size_t i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] = std::sin(0.37 * i);
  for (size_t i = 0; i < B.coeffs.size(); ++i) B.coeffs[i] = std::cos(0.11 * i);
  all_same &= bench("compute_errors", [&](ExecMode m) {
    const ErrorReport e =
        compute_errors(c.exact_fields(), u, pr, B, p, s, th, 2 * k + 4, m);
    return std::vector<double>{e.err_u_L2, e.err_u_stab, e.err_B_M, e.err_total};
  });

  std::printf("\n%s\n", all_same ? "all kernels bitwise reproducible" : "MISMATCH DETECTED");
  return all_same ? 0 : 1;
}
