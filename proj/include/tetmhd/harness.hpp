#ifndef TETMHD_HARNESS_HPP
#define TETMHD_HARNESS_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tetmhd/cases.hpp"
#include "tetmhd/norms.hpp"
#include "tetmhd/solver.hpp"

namespace tetmhd {

/// One refinement study: case, discretization order, parameters, levels.
struct RunConfig {
  std::string case_name = "test1";
  int k = 1;
  double nu = 1.0;
  double sigma = 1.0;
  double mu_a = -1.0;  // default 10 for k=1, 20 for k=2
  double mu_c = 0.5;
  double mu_J1 = 0.05;
  double mu_J2 = 0.01;
  std::vector<int> levels;  // default {1,2,3,4} cube, {1,2,3} L-shape
  std::string mesh_path;    // optional MSH override (single level)
  std::string out_csv;
  int quad_err = -1;  // error-norm quadrature override
  ExecMode mode = default_exec_mode();

  double mu_a_or_default() const { return mu_a > 0 ? mu_a : (k == 2 ? 20.0 : 10.0); }
};

/// Everything one refinement level produced. Mesh data is kept alive so the
/// solutions stay evaluable.
struct LevelResult {
  std::shared_ptr<Mesh> mesh;
  std::shared_ptr<FaceSet> faces;
  std::shared_ptr<EdgeSet> edges;
  std::shared_ptr<FESpaces> spaces;
  FEFunction u_h, p_h, B_h;
  SolveReport solve;
  ErrorReport report;
};

struct RunResult {
  ManufacturedCase problem;
  ProblemParams params;
  std::vector<LevelResult> levels;
  std::vector<ErrorReport> reports;
  std::map<std::string, std::vector<double>> rates;
};

ProblemParams make_params(const RunConfig& cfg, const ManufacturedCase& c);

/// Runs the refinement study: mesh, dof maps, assembly, solve and error
/// norms per level, then the rate table. Solve failures carry the level.
RunResult run_case(const RunConfig& cfg);

/// CSV schema: h, dofs_u, dofs_p, dofs_B, the six error columns, then one
/// rate_ column per error; 6 significant digits; rate cells empty on the
/// first row. Identical configs produce bitwise-identical files.
void emit_csv(const std::vector<ErrorReport>& reports,
              const std::map<std::string, std::vector<double>>& rates, const std::string& path);

std::string format_table(const std::vector<ErrorReport>& reports,
                         const std::map<std::string, std::vector<double>>& rates);

/// Flat key=value file mirroring the CLI flags (case, k, nu, sigma, mu-a,
/// mu-c, mu-j1, mu-j2, levels, mesh, out).
RunConfig parse_config_file(const std::string& path);
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace tetmhd

#endif
