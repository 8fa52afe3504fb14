#ifndef TETMHD_CASES_HPP
#define TETMHD_CASES_HPP

#include <functional>
#include <string>

#include "tetmhd/assembly.hpp"
#include "tetmhd/norms.hpp"

namespace tetmhd {

/// Manufactured problem: exact fields with analytic derivatives, advective
/// fields, and the loads derived from the strong equations.
struct ManufacturedCase {
  std::string name;
  std::string domain;  // "cube" or "lshape"
  std::function<Vec3(const Vec3&)> u;
  std::function<Mat3(const Vec3&)> grad_u;
  std::function<double(const Vec3&)> p;
  std::function<Vec3(const Vec3&)> grad_p;
  std::function<Vec3(const Vec3&)> div_eps_u;
  std::function<Vec3(const Vec3&)> B;
  std::function<Vec3(const Vec3&)> curl_B;
  std::function<Vec3(const Vec3&)> curl_curl_B;
  std::function<Vec3(const Vec3&)> chi;
  std::function<Vec3(const Vec3&)> theta;
  std::function<Mat3(const Vec3&)> grad_theta;
  /// Extra divergence-free magnetic load with vanishing normal trace
  /// (used by the homogeneous driver case); may be empty.
  std::function<Vec3(const Vec3&)> extra_G;
  int rhs_quad_boost = 0;   // raises rhs quadrature for singular data
  bool singular_edge = false;  // field blows up on the reentrant edge

  /// f = sigma_S u - nu_S div(eps(u)) + (grad u) chi + theta x curl B - grad p.
  Vec3 load_f(const Vec3& x, const ProblemParams& pp) const;
  /// G = sigma_M B + nu_M curl curl B - curl(u x theta) (+ extra_G).
  Vec3 load_G(const Vec3& x, const ProblemParams& pp) const;

  RhsData rhs_data(const ProblemParams& pp) const;
  ExactFields exact_fields() const;
};

/// Registry: test1 (cube, trigonometric), test2 (L-shape, singular magnetic
/// field), patch (polynomial solution inside the discrete spaces), kernel
/// (zero solution fields, gradient-orthogonal magnetic driver).
ManufacturedCase make_case(const std::string& name);

/// Cross-validates the analytic derivatives and both loads against centered
/// finite differences at random interior points; returns the worst relative
/// mismatch. Throws if it exceeds tol.
double case_self_check(const ManufacturedCase& c, const ProblemParams& pp, int npoints,
                       unsigned seed, double tol = 1e-5);

}  // namespace tetmhd

#endif
