#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tetmhd/harness.hpp"

using namespace tetmhd;

int main(int argc, char** argv) {
  CLI::App app{"Stabilized H(div) x H(curl) finite element solver for linearized "
               "incompressible MHD on tetrahedral meshes"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run a manufactured-solution refinement study");
  std::string config_path;
  RunConfig cfg;
  std::string case_name;
  std::vector<int> levels;
  double mu_a = -1.0, mu_c = -1.0, mu_j1 = -1.0, mu_j2 = -1.0, nu = -1.0, sigma = -1.0;
  int k = 0;
  std::string mesh_path, out_csv;
  bool serial = false;

  run->add_option("--config", config_path, "key=value config file (flags override it)");
  run->add_option("--case", case_name, "test1 | test2 | patch")
      ->check(CLI::IsMember({"test1", "test2", "patch"}));
  run->add_option("--k", k, "polynomial degree (1 or 2)")->check(CLI::Range(1, 2));
  run->add_option("--nu", nu, "diffusion nu_S = nu_M");
  run->add_option("--sigma", sigma, "reaction sigma_S = sigma_M");
  run->add_option("--mu-a", mu_a, "interior-penalty parameter (default 10 for k=1, 20 for k=2)");
  run->add_option("--mu-c", mu_c, "upwind parameter (default 0.5)");
  run->add_option("--mu-j1", mu_j1, "first jump-penalization parameter (default 0.05)");
  run->add_option("--mu-j2", mu_j2, "second jump-penalization parameter (default 0.01)");
  run->add_option("--levels", levels, "refinement levels, e.g. --levels 1 2 3 4")
      ->check(CLI::PositiveNumber);
  run->add_option("--mesh", mesh_path, "MSH v2.2 file overriding the built-in generator");
  run->add_option("--out", out_csv, "CSV output path");
  run->add_flag("--serial", serial, "use the serial reference kernels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) cfg = parse_config_file(config_path);
    if (!case_name.empty()) cfg.case_name = case_name;
    if (k > 0) cfg.k = k;
    if (nu > 0) cfg.nu = nu;
    if (sigma >= 0) cfg.sigma = sigma;
    if (mu_a >= 0) cfg.mu_a = mu_a;
    if (mu_c >= 0) cfg.mu_c = mu_c;
    if (mu_j1 >= 0) cfg.mu_J1 = mu_j1;
    if (mu_j2 >= 0) cfg.mu_J2 = mu_j2;
    if (!levels.empty()) cfg.levels = levels;
    if (!mesh_path.empty()) cfg.mesh_path = mesh_path;
    if (!out_csv.empty()) cfg.out_csv = out_csv;
    if (serial) cfg.mode = ExecMode::Serial;

    std::printf("case=%s k=%d nu=%g sigma=%g mu_a=%g mu_c=%g mu_J1=%g mu_J2=%g\n",
                cfg.case_name.c_str(), cfg.k, cfg.nu, cfg.sigma, cfg.mu_a_or_default(), cfg.mu_c,
                cfg.mu_J1, cfg.mu_J2);
    const RunResult res = run_case(cfg);
    std::printf("%s", format_table(res.reports, res.rates).c_str());
    for (size_t i = 0; i < res.levels.size(); ++i)
      std::printf("level %zu: solve residual %.2e, factor %.2fs (%zu nnz), refine %d\n", i,
                  res.levels[i].solve.relative_residual, res.levels[i].solve.factor_seconds,
                  res.levels[i].solve.factor_nnz, res.levels[i].solve.refinement_steps);
    if (!cfg.out_csv.empty()) std::printf("wrote %s\n", cfg.out_csv.c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
