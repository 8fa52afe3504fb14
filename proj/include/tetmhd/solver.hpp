#ifndef TETMHD_SOLVER_HPP
#define TETMHD_SOLVER_HPP

#include <vector>

#include "tetmhd/assembly.hpp"
#include "tetmhd/sparse.hpp"

namespace tetmhd {

/// Sparse LU with partial pivoting over a reverse Cuthill-McKee column
/// pre-ordering (left-looking, Gilbert-Peierls style). Factorization is
/// single-threaded; solves are reentrant.
class SparseLU {
public:
  /// delay_to_end: nodes ordered after all others (zero-diagonal saddle-point
  /// rows, so pivoting stays structure-preserving elsewhere). coords: dof
  /// positions enabling the geometric nested-dissection pre-order; without
  /// them a quotient-graph minimum-degree order is used.
  explicit SparseLU(const CSRMatrix& a, const std::vector<int>* delay_to_end = nullptr,
                    const std::vector<Vec3>* coords = nullptr);

  void solve(const std::vector<double>& b, std::vector<double>& x) const;

  double min_pivot() const { return min_pivot_; }
  double max_pivot() const { return max_pivot_; }
  size_t fill_nnz() const { return li_.size() + ui_.size(); }

private:
  int n_ = 0;
  std::vector<int> perm_;  // RCM column/row pre-order: B = A(perm,perm)
  std::vector<int> pivot_row_, pivot_order_;
  std::vector<int> lp_, li_;
  std::vector<double> lx_;
  std::vector<int> up_, ui_;
  std::vector<double> ux_;
  std::vector<double> udiag_;
  double min_pivot_ = 0.0, max_pivot_ = 0.0;
};

struct SolveReport {
  std::vector<double> full;  // solution in the [u | p | mult | B] layout
  std::vector<double> u, p, B;
  double multiplier = 0.0;
  double relative_residual = 0.0;
  double min_pivot = 0.0, max_pivot = 0.0;
  int refinement_steps = 0;
  double factor_seconds = 0.0, solve_seconds = 0.0;
  size_t factor_nnz = 0;
};

/// Factors and solves the reduced system, applies up to three steps of
/// iterative refinement, expands constrained dofs, and returns the pressure
/// with its mean removed. The residual is measured against the unfactored
/// reduced matrix.
SolveReport solve(const SparseSystem& sys);

}  // namespace tetmhd

#endif
