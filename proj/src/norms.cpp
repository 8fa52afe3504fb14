#include "tetmhd/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tetmhd/quadrature.hpp"

namespace tetmhd {

namespace {

struct CellPartials {
  double uL2 = 0, uH1 = 0, uEps = 0, pL2 = 0, BL2 = 0, Bcurl = 0, curlx = 0;
};

struct FacePartials {
  double penalty = 0;  // h_f^{-1} ||[e]||^2, all faces
  double upwind = 0;   // |||chi.n|^{1/2}[e]||^2, interior
  double cip1 = 0;     // ||[theta x e]||^2, all faces
  double cip2 = 0;     // h_f^2 ||[curl_h(e x theta_h)]||^2, interior
  double cip2_exact_theta = 0;  // same with analytic theta (total norm)
};

Vec3 curl_cross(const Vec3& u, const Mat3& gu, const Vec3& theta, const Mat3& gt) {
  return gt.trace() * u - gu.trace() * theta + gu * theta - gt * u;
}

}  // namespace

double ErrorReport::column(const std::string& name) const {
  if (name == "err_u_L2") return err_u_L2;
  if (name == "err_u_H1") return err_u_H1;
  if (name == "err_p_L2") return err_p_L2;
  if (name == "err_B_L2") return err_B_L2;
  if (name == "err_B_curl") return err_B_curl;
  if (name == "err_total") return err_total;
  if (name == "err_u_stab") return err_u_stab;
  if (name == "err_B_M") return err_B_M;
  throw std::invalid_argument("ErrorReport::column: unknown column " + name);
}

const std::vector<std::string>& ErrorReport::csv_error_columns() {
  static const std::vector<std::string> cols = {"err_u_L2", "err_u_H1",   "err_p_L2",
                                                "err_B_L2", "err_B_curl", "err_total"};
  return cols;
}

ErrorReport compute_errors(const ExactFields& exact, const FEFunction& u_h, const FEFunction& p_h,
                           const FEFunction& B_h, const ProblemParams& params, const FESpaces& s,
                           const PiecewiseField& theta_h, int quad_degree, ExecMode mode) {
  const Mesh& mesh = *s.mesh;
  const FaceSet& faces = *s.faces;
  const int nc = mesh.n_cells();
  const QuadRule vol = tet_rule(quad_degree);
  const QuadRule tri = tri_rule(quad_degree);

  std::vector<CellPartials> cp(nc);
  parallel_for(mode, nc, [&](std::ptrdiff_t c) {
    const CellFrame& fr = s.U.frames[c];
    const Vec3 theta_c = theta_h.cell_value(static_cast<int>(c));
    CellPartials acc;
    Vec3 uv, Bv;
    Mat3 ug, Bg;
    double pv;
    for (int q = 0; q < vol.size(); ++q) {
      const Vec3 xhat = vol.points[q];
      const Vec3 x = fr.to_physical(xhat);
      const double w = vol.weights[q] * fr.detJ;
      eval_function(u_h, static_cast<int>(c), xhat, &uv, &ug);
      eval_function(B_h, static_cast<int>(c), xhat, &Bv, &Bg);
      eval_scalar_function(p_h, static_cast<int>(c), xhat, &pv, nullptr);
      const Vec3 eu = exact.u(x) - uv;
      const Mat3 geu = exact.grad_u(x) - ug;
      const Vec3 eB = exact.B(x) - Bv;
      const Vec3 ecurlB = exact.curl_B(x) - Bg.curl();
      const double ep = exact.p(x) - pv;
      acc.uL2 += w * dot(eu, eu);
      acc.uH1 += w * geu.ddot(geu);
      const Mat3 eps = geu.sym();
      acc.uEps += w * eps.ddot(eps);
      acc.pL2 += w * ep * ep;
      acc.BL2 += w * dot(eB, eB);
      acc.Bcurl += w * dot(ecurlB, ecurlB);
      // theta_h is constant on the cell: its divergence and Jacobian vanish.
      const Vec3 cx = curl_cross(eu, geu, theta_c, Mat3{});
      acc.curlx += w * fr.diameter * fr.diameter * dot(cx, cx);
    }
    cp[c] = acc;
  });

  const int nf = faces.n_faces();
  std::vector<FacePartials> fp(nf);
  parallel_for(mode, nf, [&](std::ptrdiff_t f) {
    const FaceInfo& fi = faces.faces[f];
    const Vec3 A = mesh.vertices[fi.v[0]], B = mesh.vertices[fi.v[1]], C = mesh.vertices[fi.v[2]];
    const bool interior = !fi.is_boundary();
    FacePartials acc;
    Vec3 uv[2];
    Mat3 ug[2];
    for (int q = 0; q < tri.size(); ++q) {
      const double sq = tri.points[q].x, tq = tri.points[q].y;
      const Vec3 x = A + sq * (B - A) + tq * (C - A);
      const double w = 2.0 * fi.area * tri.weights[q];
      const Vec3 n = fi.normal;
      const Vec3 theta = params.theta(fi.cell[0], x);
      const Mat3 gtheta = params.grad_theta(fi.cell[0], x);
      const Vec3 chi = params.chi(fi.cell[0], x);

      Vec3 jump_e{0, 0, 0}, jump_cx_h{0, 0, 0}, jump_cx{0, 0, 0};
      if (interior) {
        // Per-side error fields. theta_h differs across the face, so the
        // exact part does not cancel from [curl_h(e x theta_h)].
        const Vec3 ue = exact.u(x);
        const Mat3 gue = exact.grad_u(x);
        for (int sd = 0; sd < 2; ++sd) {
          const int c = fi.cell[sd];
          eval_function(u_h, c, s.U.frames[c].to_reference(x), &uv[sd], &ug[sd]);
          const Vec3 eu = ue - uv[sd];
          const Mat3 geu = gue - ug[sd];
          const double sg = fi.sign[sd];
          jump_e += sg * eu;
          jump_cx_h += sg * curl_cross(eu, geu, theta_h.cell_value(c), Mat3{});
          jump_cx += sg * curl_cross(eu, geu, theta, gtheta);
        }
      } else {
        const int c = fi.cell[0];
        eval_function(u_h, c, s.U.frames[c].to_reference(x), &uv[0], &ug[0]);
        jump_e = exact.u(x) - uv[0];
      }
      acc.penalty += (w / fi.diameter) * dot(jump_e, jump_e);
      const Vec3 tj = cross(theta, jump_e);
      acc.cip1 += w * dot(tj, tj);
      if (interior) {
        acc.upwind += w * std::abs(dot(chi, n)) * dot(jump_e, jump_e);
        const double h2 = fi.diameter * fi.diameter;
        acc.cip2 += w * h2 * dot(jump_cx_h, jump_cx_h);
        acc.cip2_exact_theta += w * h2 * dot(jump_cx, jump_cx);
      }
    }
    fp[f] = acc;
  });

  CellPartials cs;
  for (const auto& a : cp) {
    cs.uL2 += a.uL2;
    cs.uH1 += a.uH1;
    cs.uEps += a.uEps;
    cs.pL2 += a.pL2;
    cs.BL2 += a.BL2;
    cs.Bcurl += a.Bcurl;
    cs.curlx += a.curlx;
  }
  FacePartials fs;
  for (const auto& a : fp) {
    fs.penalty += a.penalty;
    fs.upwind += a.upwind;
    fs.cip1 += a.cip1;
    fs.cip2 += a.cip2;
    fs.cip2_exact_theta += a.cip2_exact_theta;
  }

  ErrorReport rep;
  rep.h = mesh.max_diameter();
  rep.dofs_u = s.U.n_dofs;
  rep.dofs_p = s.P.n_dofs;
  rep.dofs_B = s.W.n_dofs;
  rep.err_u_L2 = std::sqrt(cs.uL2);
  rep.err_u_H1 = std::sqrt(cs.uH1);
  rep.err_p_L2 = std::sqrt(cs.pL2);
  rep.err_B_L2 = std::sqrt(cs.BL2);
  rep.err_B_curl = std::sqrt(cs.Bcurl);

  const double S2 = params.sigma_S * cs.uL2 + params.nu_S * cs.uEps +
                    params.nu_S * params.mu_a * fs.penalty;
  const double upw2 = params.mu_c * fs.upwind;
  const double cip2 = params.mu_J1 * fs.cip1 + params.mu_J2 * fs.cip2;
  const double gamma = std::max(rep.h, params.nu_M);
  const double curl2 = cs.curlx / gamma;
  rep.err_u_S = std::sqrt(S2);
  rep.err_u_upw = std::sqrt(upw2);
  rep.err_u_cip = std::sqrt(cip2);
  rep.err_u_curl = std::sqrt(curl2);
  rep.err_u_stab = std::sqrt(S2 + upw2 + cip2 + curl2);
  rep.err_B_M = std::sqrt(params.sigma_M * cs.BL2 + params.nu_M * cs.Bcurl);
  rep.err_total = params.sigma_S * rep.err_u_L2 + params.nu_S * rep.err_u_H1 +
                  params.sigma_M * rep.err_B_L2 + params.nu_M * rep.err_B_curl +
                  params.mu_J1 * fs.cip1 + params.mu_J2 * fs.cip2_exact_theta;
  return rep;
}

std::map<std::string, std::vector<double>> convergence_rates(
    const std::vector<ErrorReport>& reports) {
  std::map<std::string, std::vector<double>> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const std::string& col : ErrorReport::csv_error_columns()) {
    std::vector<double> rates(reports.size(), nan);
    for (size_t i = 1; i < reports.size(); ++i) {
      const double e0 = reports[i - 1].column(col), e1 = reports[i].column(col);
      const double h0 = reports[i - 1].h, h1 = reports[i].h;
      // errors at roundoff level (reproduced exact solutions) get no rate
      if (e0 > 1e-10 && e1 > 1e-10 && h0 > h1)
        rates[i] = std::log(e0 / e1) / std::log(h0 / h1);
    }
    out[col] = rates;
  }
  return out;
}

}  // namespace tetmhd
