#ifndef TETMHD_GEOMETRY_HPP
#define TETMHD_GEOMETRY_HPP

#include <array>
#include <cmath>

namespace tetmhd {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<std::array<double, 3>, 3> a{};

  double& operator()(int i, int j) { return a[i][j]; }
  double operator()(int i, int j) const { return a[i][j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = a[i][j] + o(i, j);
    return r;
  }

  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = a[i][j] - o(i, j);
    return r;
  }

  Mat3 operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = a[i][j] * s;
    return r;
  }

  Vec3 operator*(const Vec3& v) const {
    return {a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
            a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
            a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += a[i][k] * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = a[j][i];
    return r;
  }

  double det() const {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }

  Mat3 inverse() const {
    const double d = det();
    Mat3 r;
    r(0, 0) = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / d;
    r(0, 1) = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / d;
    r(0, 2) = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / d;
    r(1, 0) = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / d;
    r(1, 1) = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / d;
    r(1, 2) = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / d;
    r(2, 0) = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / d;
    r(2, 1) = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / d;
    r(2, 2) = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / d;
    return r;
  }

  double trace() const { return a[0][0] + a[1][1] + a[2][2]; }

  /// Frobenius inner product A:B.
  double ddot(const Mat3& o) const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += a[i][j] * o(i, j);
    return s;
  }

  /// Symmetric part (A + A^T)/2.
  Mat3 sym() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (a[i][j] + a[j][i]);
    return r;
  }

  /// Curl of a vector field from its Jacobian (rows = components, cols = derivatives).
  Vec3 curl() const {
    return {a[2][1] - a[1][2], a[0][2] - a[2][0], a[1][0] - a[0][1]};
  }
};

/// Outer product a b^T.
inline Mat3 outer(const Vec3& a, const Vec3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
  return r;
}

}  // namespace tetmhd

#endif
