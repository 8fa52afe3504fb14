#include "tetmhd/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace tetmhd {

double QuadRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  // Newton iteration on P_n over [-1,1], then map to [0,1].
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = t;
      if (n == 1) { p1 = t; }
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(t), p0 = P_{n-1}(t)
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 - t);  // descending t -> ascending x
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

double tet_monomial_integral(int a, int b, int c) {
  // a! b! c! / (a+b+c+3)!
  double num = 1.0;
  for (int i = 2; i <= a; ++i) num *= i;
  for (int i = 2; i <= b; ++i) num *= i;
  for (int i = 2; i <= c; ++i) num *= i;
  double den = 1.0;
  for (int i = 2; i <= a + b + c + 3; ++i) den *= i;
  return num / den;
}

double tri_monomial_integral(int a, int b) {
  double num = 1.0;
  for (int i = 2; i <= a; ++i) num *= i;
  for (int i = 2; i <= b; ++i) num *= i;
  double den = 1.0;
  for (int i = 2; i <= a + b + 2; ++i) den *= i;
  return num / den;
}

QuadRule edge_rule(int degree) {
  if (degree < 0 || degree > 40) throw std::invalid_argument("edge_rule: unsupported degree");
  const int n = (degree + 2) / 2;
  std::vector<double> x, w;
  gauss_legendre_01(std::max(n, 1), x, w);
  QuadRule r;
  r.exactness_degree = 2 * std::max(n, 1) - 1;
  for (size_t i = 0; i < x.size(); ++i) {
    r.points.push_back({x[i], 0.0, 0.0});
    r.weights.push_back(w[i]);
  }
  return r;
}

QuadRule tri_rule(int degree) {
  if (degree < 0 || degree > 14) throw std::invalid_argument("tri_rule: unsupported degree");
  QuadRule r;
  r.exactness_degree = degree;
  if (degree <= 1) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 0.0});
    r.weights.push_back(0.5);
    r.exactness_degree = 1;
    return r;
  }
  // Collapsed product rule: x = u, y = v(1-u), Jacobian (1-u).
  // A monomial of total degree d becomes degree d+1 in u and d in v.
  const int n = (degree + 2 + 1) / 2;  // ceil((degree+2)/2)
  std::vector<double> x, w;
  gauss_legendre_01(n, x, w);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = x[i], v = x[j];
      r.points.push_back({u, v * (1.0 - u), 0.0});
      r.weights.push_back(w[i] * w[j] * (1.0 - u));
    }
  return r;
}

QuadRule tet_rule(int degree) {
  if (degree < 0 || degree > 14) throw std::invalid_argument("tet_rule: unsupported degree");
  QuadRule r;
  r.exactness_degree = degree;
  if (degree <= 1) {
    r.points.push_back({0.25, 0.25, 0.25});
    r.weights.push_back(1.0 / 6.0);
    r.exactness_degree = 1;
    return r;
  }
  // Collapsed product rule: x = u, y = v(1-u), z = w(1-u)(1-v),
  // Jacobian (1-u)^2 (1-v). Degree d maps to degree d+2 in u, d+1 in v, d in w.
  const int n = (degree + 3 + 1) / 2;  // ceil((degree+3)/2)
  std::vector<double> x, w;
  gauss_legendre_01(n, x, w);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double u = x[i], v = x[j], t = x[k];
        r.points.push_back({u, v * (1.0 - u), t * (1.0 - u) * (1.0 - v)});
        r.weights.push_back(w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - v));
      }
  return r;
}

}  // namespace tetmhd
