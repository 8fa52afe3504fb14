#ifndef TETMHD_SPARSE_HPP
#define TETMHD_SPARSE_HPP

#include <functional>
#include <vector>

#include "tetmhd/parallel.hpp"

namespace tetmhd {

struct CSRMatrix {
  int nrows = 0, ncols = 0;
  std::vector<int> row_ptr;  // size nrows+1
  std::vector<int> col;
  std::vector<double> val;

  size_t nnz() const { return col.size(); }
  void matvec(const std::vector<double>& x, std::vector<double>& y) const;
  /// y += A^T x
  void matvec_transpose_add(const std::vector<double>& x, std::vector<double>& y) const;
  double coeff(int i, int j) const;  // 0 if not stored
};

/// Local contribution of one entity (cell or face): a dense rows x cols block.
struct LocalBlock {
  std::vector<int> rows, cols;
  std::vector<double> vals;  // row-major rows.size() x cols.size()

  void reset(int nr, int nc) {
    rows.assign(nr, -1);
    cols.assign(nc, -1);
    vals.assign(static_cast<size_t>(nr) * nc, 0.0);
  }
  double& operator()(int i, int j) { return vals[static_cast<size_t>(i) * cols.size() + j]; }
};

/// Assembles a CSR matrix from per-entity dense blocks. The kernel is run for
/// every entity (in parallel under ExecMode::Parallel) writing into a private
/// LocalBlock; the global accumulation is a stable sort by (row, col) that
/// preserves entity order, so the result is bitwise identical for any thread
/// count and for the serial reference mode.
CSRMatrix assemble_blocks(ExecMode mode, int nrows, int ncols, int n_entities,
                          const std::function<void(int, LocalBlock&)>& kernel);

/// Same two-phase pattern for vectors: per-entity (index, value) pairs summed
/// in entity order.
std::vector<double> assemble_vector(ExecMode mode, int n, int n_entities,
                                    const std::function<void(int, std::vector<int>&,
                                                             std::vector<double>&)>& kernel);

/// Sum of per-entity partial scalars, reduced in entity-index order.
double ordered_sum(ExecMode mode, int n_entities, const std::function<double(int)>& kernel);

/// C = alpha*A (pattern preserved).
CSRMatrix scaled(const CSRMatrix& a, double alpha);

/// Triplet list used when composing block systems.
struct Triplet {
  int row, col;
  double val;
};

/// Builds a CSR matrix from triplets, summing duplicates in input order.
CSRMatrix csr_from_triplets(int nrows, int ncols, std::vector<Triplet>& t);

void append_block(std::vector<Triplet>& t, const CSRMatrix& a, int row_off, int col_off,
                  double alpha, bool transpose = false);

}  // namespace tetmhd

#endif
