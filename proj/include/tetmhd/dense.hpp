#ifndef TETMHD_DENSE_HPP
#define TETMHD_DENSE_HPP

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tetmhd {

/// Small dense row-major matrix used for element-local moment systems.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  const double* row_ptr(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }
  double* row_ptr(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }

  double norm1() const {
    double best = 0.0;
    for (int j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (int i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting of a small square matrix.
class DenseLU {
public:
  explicit DenseLU(DenseMatrix a) : lu_(std::move(a)), piv_(lu_.rows()) {
    const int n = lu_.rows();
    assert(n == lu_.cols());
    for (int i = 0; i < n; ++i) piv_[i] = i;
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(lu_(k, k));
      for (int i = k + 1; i < n; ++i) {
        const double v = std::abs(lu_(i, k));
        if (v > best) { best = v; p = i; }
      }
      if (best == 0.0) throw std::runtime_error("DenseLU: singular matrix");
      if (p != k) {
        std::swap(piv_[p], piv_[k]);
        for (int j = 0; j < n; ++j) std::swap(lu_(p, j), lu_(k, j));
      }
      for (int i = k + 1; i < n; ++i) {
        lu_(i, k) /= lu_(k, k);
        const double lik = lu_(i, k);
        if (lik == 0.0) continue;
        for (int j = k + 1; j < n; ++j) lu_(i, j) -= lik * lu_(k, j);
      }
    }
  }

  void solve(const std::vector<double>& b, std::vector<double>& x) const {
    const int n = lu_.rows();
    x.resize(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv_[i]];
    for (int i = 1; i < n; ++i) {
      double s = x[i];
      for (int j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = x[i];
      for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
  }

  DenseMatrix inverse() const {
    const int n = lu_.rows();
    DenseMatrix inv(n, n);
    std::vector<double> b(n, 0.0), x;
    for (int j = 0; j < n; ++j) {
      b.assign(n, 0.0);
      b[j] = 1.0;
      solve(b, x);
      for (int i = 0; i < n; ++i) inv(i, j) = x[i];
    }
    return inv;
  }

private:
  DenseMatrix lu_;
  std::vector<int> piv_;
};

/// Solves A X = I and returns X; also reports the 1-norm condition estimate.
inline DenseMatrix dense_inverse(const DenseMatrix& a, double* cond1 = nullptr) {
  DenseLU lu(a);
  DenseMatrix inv = lu.inverse();
  if (cond1) *cond1 = a.norm1() * inv.norm1();
  return inv;
}

}  // namespace tetmhd

#endif
