#include "tetmhd/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace tetmhd {

void CSRMatrix::matvec(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(nrows, 0.0);
  for (int i = 0; i < nrows; ++i) {
    double s = 0.0;
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * x[col[p]];
    y[i] = s;
  }
}

void CSRMatrix::matvec_transpose_add(const std::vector<double>& x, std::vector<double>& y) const {
  for (int i = 0; i < nrows; ++i)
    for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) y[col[p]] += val[p] * x[i];
}

double CSRMatrix::coeff(int i, int j) const {
  for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
    if (col[p] == j) return val[p];
  return 0.0;
}

namespace {

struct OrderedTriplet {
  int row, col;
  long order;
  double val;
};

CSRMatrix compress(int nrows, int ncols, std::vector<OrderedTriplet>& t) {
  std::sort(t.begin(), t.end(), [](const OrderedTriplet& a, const OrderedTriplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.order < b.order;
  });
  CSRMatrix m;
  m.nrows = nrows;
  m.ncols = ncols;
  m.row_ptr.assign(nrows + 1, 0);
  size_t i = 0;
  while (i < t.size()) {
    size_t j = i + 1;
    double s = t[i].val;
    while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) s += t[j++].val;
    m.col.push_back(t[i].col);
    m.val.push_back(s);
    m.row_ptr[t[i].row + 1] += 1;
    i = j;
  }
  for (int r = 0; r < nrows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

}  // namespace

CSRMatrix assemble_blocks(ExecMode mode, int nrows, int ncols, int n_entities,
                          const std::function<void(int, LocalBlock&)>& kernel) {
  std::vector<LocalBlock> blocks(n_entities);
  parallel_for(mode, n_entities, [&](std::ptrdiff_t e) { kernel(static_cast<int>(e), blocks[e]); });

  std::vector<OrderedTriplet> t;
  size_t total = 0;
  for (const auto& b : blocks) total += b.vals.size();
  t.reserve(total);
  long order = 0;
  for (const auto& b : blocks) {
    const int nr = static_cast<int>(b.rows.size());
    const int nc = static_cast<int>(b.cols.size());
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j)
        t.push_back({b.rows[i], b.cols[j], order++, b.vals[static_cast<size_t>(i) * nc + j]});
  }
  blocks.clear();
  blocks.shrink_to_fit();
  return compress(nrows, ncols, t);
}

std::vector<double> assemble_vector(ExecMode mode, int n, int n_entities,
                                    const std::function<void(int, std::vector<int>&,
                                                             std::vector<double>&)>& kernel) {
  std::vector<std::vector<int>> idx(n_entities);
  std::vector<std::vector<double>> val(n_entities);
  parallel_for(mode, n_entities, [&](std::ptrdiff_t e) { kernel(static_cast<int>(e), idx[e], val[e]); });
  std::vector<double> out(n, 0.0);
  for (int e = 0; e < n_entities; ++e)
    for (size_t i = 0; i < idx[e].size(); ++i) out[idx[e][i]] += val[e][i];
  return out;
}

double ordered_sum(ExecMode mode, int n_entities, const std::function<double(int)>& kernel) {
  std::vector<double> parts(n_entities, 0.0);
  parallel_for(mode, n_entities, [&](std::ptrdiff_t e) { parts[e] = kernel(static_cast<int>(e)); });
  double s = 0.0;
  for (double p : parts) s += p;
  return s;
}

CSRMatrix scaled(const CSRMatrix& a, double alpha) {
  CSRMatrix m = a;
  for (double& v : m.val) v *= alpha;
  return m;
}

CSRMatrix csr_from_triplets(int nrows, int ncols, std::vector<Triplet>& tr) {
  std::vector<OrderedTriplet> t;
  t.reserve(tr.size());
  long order = 0;
  for (const Triplet& x : tr) t.push_back({x.row, x.col, order++, x.val});
  return compress(nrows, ncols, t);
}

void append_block(std::vector<Triplet>& t, const CSRMatrix& a, int row_off, int col_off,
                  double alpha, bool transpose) {
  for (int i = 0; i < a.nrows; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      if (transpose)
        t.push_back({row_off + a.col[p], col_off + i, alpha * a.val[p]});
      else
        t.push_back({row_off + i, col_off + a.col[p], alpha * a.val[p]});
    }
}

}  // namespace tetmhd
