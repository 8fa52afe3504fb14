#ifndef TETMHD_NORMS_HPP
#define TETMHD_NORMS_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tetmhd/assembly.hpp"

namespace tetmhd {

/// Exact-solution callbacks needed by the error norms.
struct ExactFields {
  std::function<Vec3(const Vec3&)> u;
  std::function<Mat3(const Vec3&)> grad_u;
  std::function<double(const Vec3&)> p;
  std::function<Vec3(const Vec3&)> B;
  std::function<Vec3(const Vec3&)> curl_B;
};

/// Per-mesh error norms. Composite entries satisfy
/// err_u_stab^2 = err_u_S^2 + err_u_upw^2 + err_u_cip^2 + err_u_curl^2 and
/// err_B_M^2 = sigma_M err_B_L2^2 + nu_M err_B_curl^2 by construction.
struct ErrorReport {
  double h = 0.0;
  int dofs_u = 0, dofs_p = 0, dofs_B = 0;
  double err_u_L2 = 0.0, err_u_H1 = 0.0;
  double err_u_S = 0.0, err_u_upw = 0.0, err_u_cip = 0.0, err_u_curl = 0.0, err_u_stab = 0.0;
  double err_p_L2 = 0.0;
  double err_B_L2 = 0.0, err_B_curl = 0.0, err_B_M = 0.0;
  double err_total = 0.0;

  double column(const std::string& name) const;
  static const std::vector<std::string>& csv_error_columns();
};

/// Evaluates every error norm between the exact callbacks and the discrete
/// solution. The curl-stabilization terms use the piecewise-constant theta_h;
/// gamma = max(h, nu_M) rescales the curl seminorm. The total norm adds the
/// coefficient-weighted field norms and the two jump sums, the jump sums
/// entering squared exactly as printed in its definition.
ErrorReport compute_errors(const ExactFields& exact, const FEFunction& u_h, const FEFunction& p_h,
                           const FEFunction& B_h, const ProblemParams& params, const FESpaces& s,
                           const PiecewiseField& theta_h, int quad_degree, ExecMode mode);

/// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i); NaN for the first row or for
/// vanishing errors.
std::map<std::string, std::vector<double>> convergence_rates(const std::vector<ErrorReport>& reports);

}  // namespace tetmhd

#endif
