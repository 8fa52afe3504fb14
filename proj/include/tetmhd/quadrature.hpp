#ifndef TETMHD_QUADRATURE_HPP
#define TETMHD_QUADRATURE_HPP

#include <vector>

#include "tetmhd/geometry.hpp"

namespace tetmhd {

/// Quadrature rule on a reference domain (tetrahedron, triangle or segment).
/// Points are reference coordinates; unused coordinates are zero for lower
/// dimensional rules. Weights sum to the reference measure: 1/6 for the
/// tetrahedron {x,y,z >= 0, x+y+z <= 1}, 1/2 for the triangle
/// {x,y >= 0, x+y <= 1}, 1 for the segment [0,1].
struct QuadRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
  int exactness_degree = 0;
  bool has_negative_weights = false;

  int size() const { return static_cast<int>(points.size()); }
  double weight_sum() const;
};

/// Rule on the reference tetrahedron exact for total degree <= degree.
/// Supported range 0..14; throws std::invalid_argument above that.
QuadRule tet_rule(int degree);

/// Rule on the reference triangle exact for total degree <= degree.
QuadRule tri_rule(int degree);

/// Gauss rule on [0,1] exact for degree <= degree (points on the x axis).
QuadRule edge_rule(int degree);

/// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

/// Exact integral of x^a y^b z^c over the reference tetrahedron.
double tet_monomial_integral(int a, int b, int c);

/// Exact integral of x^a y^b over the reference triangle.
double tri_monomial_integral(int a, int b);

}  // namespace tetmhd

#endif
