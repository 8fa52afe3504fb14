#include "tetmhd/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tetmhd {

ProblemParams make_params(const RunConfig& cfg, const ManufacturedCase& c) {
  ProblemParams p;
  p.sigma_S = p.sigma_M = cfg.sigma;
  p.nu_S = p.nu_M = cfg.nu;
  p.mu_a = cfg.mu_a_or_default();
  p.mu_c = cfg.mu_c;
  p.mu_J1 = cfg.mu_J1;
  p.mu_J2 = cfg.mu_J2;
  p.k = cfg.k;
  p.chi = pointwise(c.chi);
  p.theta = pointwise(c.theta);
  p.grad_theta = [g = c.grad_theta](int, const Vec3& x) { return g(x); };
  return p;
}

RunResult run_case(const RunConfig& cfg) {
  RunResult res;
  res.problem = make_case(cfg.case_name);
  const ManufacturedCase& c = res.problem;
  res.params = make_params(cfg, c);
  case_self_check(c, res.params, 100, 20240u);

  std::vector<int> levels = cfg.levels;
  if (!cfg.mesh_path.empty())
    levels = {0};
  else if (levels.empty())
    levels = c.domain == "lshape" ? std::vector<int>{1, 2, 3} : std::vector<int>{1, 2, 3, 4};

  const QuadDegrees qd = [&] {
    QuadDegrees q = QuadDegrees::defaults(cfg.k);
    q.rhs_volume += c.rhs_quad_boost;
    q.rhs_face += c.rhs_quad_boost;
    return q;
  }();
  const int err_quad = cfg.quad_err > 0 ? cfg.quad_err
                                        : 2 * cfg.k + 4 + (c.singular_edge ? 2 : 0);

  double prev_h = std::numeric_limits<double>::infinity();
  for (int level : levels) {
    LevelResult lr;
    try {
      lr.mesh = std::make_shared<Mesh>(
          !cfg.mesh_path.empty()
              ? import_msh(cfg.mesh_path)
              : (c.domain == "lshape" ? generate_lshape_mesh(level) : generate_cube_mesh(level)));
      lr.faces = std::make_shared<FaceSet>(build_face_connectivity(*lr.mesh));
      lr.edges = std::make_shared<EdgeSet>(build_edge_connectivity(*lr.mesh));
      lr.spaces = std::make_shared<FESpaces>(
          build_spaces(*lr.mesh, *lr.faces, *lr.edges, cfg.k));
      const FESpaces& s = *lr.spaces;

      const RhsData data = c.rhs_data(res.params);
      const FEFunction u_exact_h = interp_bdm(pointwise(c.u), s.U, 2 * cfg.k + 4);
      std::vector<double> constrained_values(s.U.n_dofs, 0.0);
      for (int i = 0; i < s.U.n_dofs; ++i)
        if (s.U.constrained[i]) constrained_values[i] = u_exact_h.coeffs[i];

      const SparseSystem sys = assemble_system(s, res.params, data, constrained_values, qd, cfg.mode);
      lr.solve = solve(sys);
      if (lr.solve.relative_residual > 1e-9)
        throw std::runtime_error("solver residual " + std::to_string(lr.solve.relative_residual));

      lr.u_h = FEFunction(s.U);
      lr.u_h.coeffs = lr.solve.u;
      lr.p_h = FEFunction(s.P);
      lr.p_h.coeffs = lr.solve.p;
      lr.B_h = FEFunction(s.W);
      lr.B_h.coeffs = lr.solve.B;

      const PiecewiseField theta_h = theta_piecewise_constant(res.params.theta, *lr.mesh,
                                                              2 * cfg.k + 4);
      lr.report = compute_errors(c.exact_fields(), lr.u_h, lr.p_h, lr.B_h, res.params, s, theta_h,
                                 err_quad, cfg.mode);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_case: " + cfg.case_name + " level " + std::to_string(level) +
                               ": " + e.what());
    }
    if (lr.report.h >= prev_h)
      throw std::runtime_error("run_case: refinement levels must strictly decrease h");
    prev_h = lr.report.h;
    res.reports.push_back(lr.report);
    res.levels.push_back(std::move(lr));
  }
  res.rates = convergence_rates(res.reports);
  if (!cfg.out_csv.empty()) emit_csv(res.reports, res.rates, cfg.out_csv);
  return res;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void emit_csv(const std::vector<ErrorReport>& reports,
              const std::map<std::string, std::vector<double>>& rates, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot write " + path);
  const auto& cols = ErrorReport::csv_error_columns();
  out << "h,dofs_u,dofs_p,dofs_B";
  for (const auto& c : cols) out << ',' << c;
  for (const auto& c : cols) out << ",rate_" << c;
  out << '\n';
  for (size_t i = 0; i < reports.size(); ++i) {
    const ErrorReport& r = reports[i];
    out << fmt6(r.h) << ',' << r.dofs_u << ',' << r.dofs_p << ',' << r.dofs_B;
    for (const auto& c : cols) out << ',' << fmt6(r.column(c));
    for (const auto& c : cols) {
      out << ',';
      if (i > 0) out << fmt6(rates.at(c)[i]);
    }
    out << '\n';
  }
}

std::string format_table(const std::vector<ErrorReport>& reports,
                         const std::map<std::string, std::vector<double>>& rates) {
  const auto& cols = ErrorReport::csv_error_columns();
  std::ostringstream os;
  os << "    h        dofs(u/p/B)      ";
  for (const auto& c : cols) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%-11s(rate) ", c.c_str() + 4);
    os << buf;
  }
  os << '\n';
  for (size_t i = 0; i < reports.size(); ++i) {
    const ErrorReport& r = reports[i];
    char head[64];
    std::snprintf(head, sizeof(head), "%8.4f %6d/%5d/%6d  ", r.h, r.dofs_u, r.dofs_p, r.dofs_B);
    os << head;
    for (const auto& c : cols) {
      char buf[48];
      if (i > 0)
        std::snprintf(buf, sizeof(buf), "%-10.3e(%5.2f) ", r.column(c), rates.at(c)[i]);
      else
        std::snprintf(buf, sizeof(buf), "%-10.3e(  -  ) ", r.column(c));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto parse_levels = [](const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
  };
  if (key == "case")
    cfg.case_name = value;
  else if (key == "k")
    cfg.k = std::stoi(value);
  else if (key == "nu")
    cfg.nu = std::stod(value);
  else if (key == "sigma")
    cfg.sigma = std::stod(value);
  else if (key == "mu-a" || key == "mu_a")
    cfg.mu_a = std::stod(value);
  else if (key == "mu-c" || key == "mu_c")
    cfg.mu_c = std::stod(value);
  else if (key == "mu-j1" || key == "mu_j1")
    cfg.mu_J1 = std::stod(value);
  else if (key == "mu-j2" || key == "mu_j2")
    cfg.mu_J2 = std::stod(value);
  else if (key == "levels")
    cfg.levels = parse_levels(value);
  else if (key == "mesh")
    cfg.mesh_path = value;
  else if (key == "out")
    cfg.out_csv = value;
  else if (key == "quad-err" || key == "quad_err")
    cfg.quad_err = std::stoi(value);
  else
    throw std::invalid_argument("unknown config key: " + key);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_config_file: cannot open " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto ltrim = line.find_first_not_of(" \t\r");
    if (ltrim == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("parse_config_file: missing '=' at line " + std::to_string(lineno));
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace tetmhd
