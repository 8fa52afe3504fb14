#include "tetmhd/cases.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tetmhd {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat3 zero_mat(const Vec3&) { return Mat3{}; }

ManufacturedCase make_test1() {
  ManufacturedCase c;
  c.name = "test1";
  c.domain = "cube";
  c.u = [](const Vec3& x) {
    return Vec3{std::sin(kPi * x.x) * std::cos(kPi * x.y) * std::cos(kPi * x.z),
                std::cos(kPi * x.x) * std::sin(kPi * x.y) * std::cos(kPi * x.z),
                -2.0 * std::cos(kPi * x.x) * std::cos(kPi * x.y) * std::sin(kPi * x.z)};
  };
  c.grad_u = [](const Vec3& x) {
    const double sx = std::sin(kPi * x.x), cx = std::cos(kPi * x.x);
    const double sy = std::sin(kPi * x.y), cy = std::cos(kPi * x.y);
    const double sz = std::sin(kPi * x.z), cz = std::cos(kPi * x.z);
    Mat3 g;
    g(0, 0) = kPi * cx * cy * cz;
    g(0, 1) = -kPi * sx * sy * cz;
    g(0, 2) = -kPi * sx * cy * sz;
    g(1, 0) = -kPi * sx * sy * cz;
    g(1, 1) = kPi * cx * cy * cz;
    g(1, 2) = -kPi * cx * sy * sz;
    g(2, 0) = 2.0 * kPi * sx * cy * sz;
    g(2, 1) = 2.0 * kPi * cx * sy * sz;
    g(2, 2) = -2.0 * kPi * cx * cy * cz;
    return g;
  };
  c.div_eps_u = [u = c.u](const Vec3& x) { return -1.5 * kPi * kPi * u(x); };
  c.p = [](const Vec3& x) {
    return std::sin(kPi * x.x) + std::sin(kPi * x.y) - 2.0 * std::sin(kPi * x.z);
  };
  c.grad_p = [](const Vec3& x) {
    return Vec3{kPi * std::cos(kPi * x.x), kPi * std::cos(kPi * x.y),
                -2.0 * kPi * std::cos(kPi * x.z)};
  };
  c.B = [](const Vec3& x) {
    return Vec3{std::sin(kPi * x.y), std::sin(kPi * x.z), std::sin(kPi * x.x)};
  };
  c.curl_B = [](const Vec3& x) {
    return Vec3{-kPi * std::cos(kPi * x.z), -kPi * std::cos(kPi * x.x),
                -kPi * std::cos(kPi * x.y)};
  };
  c.curl_curl_B = [B = c.B](const Vec3& x) { return kPi * kPi * B(x); };
  c.chi = c.u;
  c.theta = c.B;
  c.grad_theta = [](const Vec3& x) {
    Mat3 g;
    g(0, 1) = kPi * std::cos(kPi * x.y);
    g(1, 2) = kPi * std::cos(kPi * x.z);
    g(2, 0) = kPi * std::cos(kPi * x.x);
    return g;
  };
  return c;
}

ManufacturedCase make_test2() {
  ManufacturedCase c;
  c.name = "test2";
  c.domain = "lshape";
  c.u = [](const Vec3& x) { return Vec3{x.y * x.y, x.z * x.z, x.x * x.x}; };
  c.grad_u = [](const Vec3& x) {
    Mat3 g;
    g(0, 1) = 2.0 * x.y;
    g(1, 2) = 2.0 * x.z;
    g(2, 0) = 2.0 * x.x;
    return g;
  };
  c.div_eps_u = [](const Vec3&) { return Vec3{1.0, 1.0, 1.0}; };
  c.p = [](const Vec3&) { return 0.0; };
  c.grad_p = [](const Vec3&) { return Vec3{0, 0, 0}; };
  // B = grad r with r = rho^(2/3) sin((2/3)(atan2(y,x) + pi/2)); the branch
  // cut of atan2 lies inside the removed quadrant x<0, y<0.
  c.B = [](const Vec3& x) {
    const double a = 2.0 / 3.0;
    const double rho = std::sqrt(x.x * x.x + x.y * x.y);
    if (rho < 1e-300) return Vec3{0, 0, 0};
    const double phi = std::atan2(x.y, x.x);
    const double th = phi + 0.5 * kPi;
    const double s = std::sin(a * th), cs = std::cos(a * th);
    const double f = a * std::pow(rho, a - 1.0);
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    return Vec3{f * (cphi * s - sphi * cs), f * (sphi * s + cphi * cs), 0.0};
  };
  c.curl_B = [](const Vec3&) { return Vec3{0, 0, 0}; };
  c.curl_curl_B = [](const Vec3&) { return Vec3{0, 0, 0}; };
  c.chi = [](const Vec3&) { return Vec3{1.0, 2.0, -1.0}; };
  c.theta = [](const Vec3&) { return Vec3{1.0, -1.0, 2.0}; };
  c.grad_theta = zero_mat;
  c.rhs_quad_boost = 4;
  c.singular_edge = true;
  return c;
}

ManufacturedCase make_patch() {
  ManufacturedCase c;
  c.name = "patch";
  c.domain = "cube";
  c.u = [](const Vec3& x) {
    return Vec3{x.x + 2.0 * x.y + 3.0 * x.z, 4.0 * x.x + 5.0 * x.y + 6.0 * x.z,
                7.0 * x.x + 8.0 * x.y - 6.0 * x.z};
  };
  c.grad_u = [](const Vec3&) {
    Mat3 g;
    g(0, 0) = 1; g(0, 1) = 2; g(0, 2) = 3;
    g(1, 0) = 4; g(1, 1) = 5; g(1, 2) = 6;
    g(2, 0) = 7; g(2, 1) = 8; g(2, 2) = -6;
    return g;
  };
  c.div_eps_u = [](const Vec3&) { return Vec3{0, 0, 0}; };
  c.p = [](const Vec3&) { return 0.0; };
  c.grad_p = [](const Vec3&) { return Vec3{0, 0, 0}; };
  c.B = [](const Vec3& x) { return Vec3{x.z, x.x, x.y}; };
  c.curl_B = [](const Vec3&) { return Vec3{1.0, 1.0, 1.0}; };
  c.curl_curl_B = [](const Vec3&) { return Vec3{0, 0, 0}; };
  c.chi = [](const Vec3&) { return Vec3{1.0, 2.0, -1.0}; };
  c.theta = [](const Vec3& x) { return Vec3{x.y, x.z, x.x}; };
  c.grad_theta = [](const Vec3&) {
    Mat3 g;
    g(0, 1) = 1;
    g(1, 2) = 1;
    g(2, 0) = 1;
    return g;
  };
  return c;
}

ManufacturedCase make_kernel() {
  ManufacturedCase c;
  c.name = "kernel";
  c.domain = "cube";
  auto zero3 = [](const Vec3&) { return Vec3{0, 0, 0}; };
  c.u = zero3;
  c.grad_u = zero_mat;
  c.div_eps_u = zero3;
  c.p = [](const Vec3&) { return 0.0; };
  c.grad_p = zero3;
  c.B = zero3;
  c.curl_B = zero3;
  c.curl_curl_B = zero3;
  ManufacturedCase t1 = make_test1();
  c.chi = t1.chi;
  c.theta = t1.theta;
  c.grad_theta = t1.grad_theta;
  // G = curl(psi, psi, psi) with psi and grad(psi) vanishing on the boundary,
  // so G is divergence free with zero normal trace: orthogonal to gradients.
  auto bump = [](double t) { return t * (1.0 - t); };
  auto dbump = [](double t) { return 1.0 - 2.0 * t; };
  auto psi_x = [bump, dbump](const Vec3& x) {
    const double h = bump(x.x) * bump(x.y) * bump(x.z);
    return 2.0 * h * dbump(x.x) * bump(x.y) * bump(x.z);
  };
  auto psi_y = [bump, dbump](const Vec3& x) {
    const double h = bump(x.x) * bump(x.y) * bump(x.z);
    return 2.0 * h * bump(x.x) * dbump(x.y) * bump(x.z);
  };
  auto psi_z = [bump, dbump](const Vec3& x) {
    const double h = bump(x.x) * bump(x.y) * bump(x.z);
    return 2.0 * h * bump(x.x) * bump(x.y) * dbump(x.z);
  };
  c.extra_G = [psi_x, psi_y, psi_z](const Vec3& x) {
    return Vec3{psi_y(x) - psi_z(x), psi_z(x) - psi_x(x), psi_x(x) - psi_y(x)};
  };
  // the load is a degree-11 polynomial; integrate it exactly so that its
  // orthogonality to gradients survives discretization
  c.rhs_quad_boost = 8;
  return c;
}

}  // namespace

Vec3 ManufacturedCase::load_f(const Vec3& x, const ProblemParams& pp) const {
  return pp.sigma_S * u(x) - pp.nu_S * div_eps_u(x) + grad_u(x) * chi(x) +
         cross(theta(x), curl_B(x)) - grad_p(x);
}

Vec3 ManufacturedCase::load_G(const Vec3& x, const ProblemParams& pp) const {
  const Mat3 gu = grad_u(x);
  const Mat3 gt = grad_theta(x);
  const Vec3 uv = u(x), tv = theta(x);
  const Vec3 curl_u_theta = gt.trace() * uv - gu.trace() * tv + gu * tv - gt * uv;
  Vec3 G = pp.sigma_M * B(x) + pp.nu_M * curl_curl_B(x) - curl_u_theta;
  if (extra_G) G += extra_G(x);
  return G;
}

RhsData ManufacturedCase::rhs_data(const ProblemParams& pp) const {
  RhsData d;
  d.f = [this, pp](const Vec3& x) { return load_f(x, pp); };
  d.G = [this, pp](const Vec3& x) { return load_G(x, pp); };
  d.g = u;
  d.curlB = curl_B;
  return d;
}

ExactFields ManufacturedCase::exact_fields() const {
  ExactFields e;
  e.u = u;
  e.grad_u = grad_u;
  e.p = p;
  e.B = B;
  e.curl_B = curl_B;
  return e;
}

ManufacturedCase make_case(const std::string& name) {
  if (name == "test1") return make_test1();
  if (name == "test2") return make_test2();
  if (name == "patch") return make_patch();
  if (name == "kernel") return make_kernel();
  throw std::invalid_argument("make_case: unknown case " + name);
}

double case_self_check(const ManufacturedCase& c, const ProblemParams& pp, int npoints,
                       unsigned seed, double tol) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> wide(-0.95, 0.95);
  const double delta = 1e-5;
  double worst = 0.0;

  auto fd_grad = [&](const std::function<Vec3(const Vec3&)>& f, const Vec3& x) {
    Mat3 g;
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += delta;
      xm[j] -= delta;
      const Vec3 d = (f(xp) - f(xm)) / (2.0 * delta);
      for (int i = 0; i < 3; ++i) g(i, j) = d[i];
    }
    return g;
  };
  auto track_vec = [&](const Vec3& got, const Vec3& want) {
    worst = std::max(worst, norm(got - want) / (1.0 + norm(want)));
  };
  auto track_mat = [&](const Mat3& got, const Mat3& want) {
    const Mat3 d = got - want;
    worst = std::max(worst, std::sqrt(d.ddot(d)) / (1.0 + std::sqrt(want.ddot(want))));
  };

  for (int it = 0; it < npoints; ++it) {
    Vec3 x;
    if (c.domain == "cube") {
      x = {unit(rng), unit(rng), unit(rng)};
    } else {
      do {
        x = {wide(rng), wide(rng), wide(rng)};
      } while ((x.x < 0.08 && x.y < 0.08) ||
               (c.singular_edge && std::sqrt(x.x * x.x + x.y * x.y) < 0.15));
    }
    track_mat(c.grad_u(x), fd_grad(c.u, x));
    track_mat(c.grad_theta(x), fd_grad(c.theta, x));
    {
      Vec3 gp;
      for (int j = 0; j < 3; ++j) {
        Vec3 xp = x, xm = x;
        xp[j] += delta;
        xm[j] -= delta;
        gp[j] = (c.p(xp) - c.p(xm)) / (2.0 * delta);
      }
      track_vec(c.grad_p(x), gp);
    }
    track_vec(c.curl_B(x), fd_grad(c.B, x).curl());
    track_vec(c.curl_curl_B(x), fd_grad(c.curl_B, x).curl());
    {
      // FD divergence of the symmetric gradient, column by column.
      Vec3 div_eps{0, 0, 0};
      for (int j = 0; j < 3; ++j) {
        Vec3 xp = x, xm = x;
        xp[j] += delta;
        xm[j] -= delta;
        const Mat3 ep = c.grad_u(xp).sym(), em = c.grad_u(xm).sym();
        for (int i = 0; i < 3; ++i) div_eps[i] += (ep(i, j) - em(i, j)) / (2.0 * delta);
      }
      track_vec(c.div_eps_u(x), div_eps);

      // Loads rebuilt from finite-difference pieces.
      const Mat3 gu_fd = fd_grad(c.u, x);
      const Vec3 curlB_fd = fd_grad(c.B, x).curl();
      Vec3 gp_fd;
      for (int j = 0; j < 3; ++j) {
        Vec3 xp = x, xm = x;
        xp[j] += delta;
        xm[j] -= delta;
        gp_fd[j] = (c.p(xp) - c.p(xm)) / (2.0 * delta);
      }
      const Vec3 f_fd = pp.sigma_S * c.u(x) - pp.nu_S * div_eps + gu_fd * c.chi(x) +
                        cross(c.theta(x), curlB_fd) - gp_fd;
      track_vec(c.load_f(x, pp), f_fd);

      const Mat3 gt_fd = fd_grad(c.theta, x);
      const Vec3 curl_ut = gt_fd.trace() * c.u(x) - gu_fd.trace() * c.theta(x) +
                           gu_fd * c.theta(x) - gt_fd * c.u(x);
      Vec3 G_fd = pp.sigma_M * c.B(x) + pp.nu_M * fd_grad(c.curl_B, x).curl() - curl_ut;
      if (c.extra_G) G_fd += c.extra_G(x);
      track_vec(c.load_G(x, pp), G_fd);
    }
  }
  if (worst > tol)
    throw std::runtime_error("case_self_check: " + c.name + " mismatch " + std::to_string(worst));
  return worst;
}

}  // namespace tetmhd
