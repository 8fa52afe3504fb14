#include "tetmhd/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace tetmhd {

namespace {

std::vector<int> rcm_order(const CSRMatrix& a) {
  const int n = a.nrows;
  // Symmetrized adjacency.
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const int j = a.col[p];
      if (j == i) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) degree[i] = static_cast<int>(adj[i].size());

  for (int seed_pass = 0; seed_pass < n; ++seed_pass) {
    int seed = -1;
    for (int i = 0; i < n; ++i)
      if (!visited[i] && (seed < 0 || degree[i] < degree[seed])) seed = i;
    if (seed < 0) break;
    std::queue<int> bfs;
    bfs.push(seed);
    visited[seed] = 1;
    while (!bfs.empty()) {
      const int v = bfs.front();
      bfs.pop();
      order.push_back(v);
      std::vector<int> next;
      for (int w : adj[v])
        if (!visited[w]) {
          visited[w] = 1;
          next.push_back(w);
        }
      std::sort(next.begin(), next.end(), [&](int x, int y) {
        if (degree[x] != degree[y]) return degree[x] < degree[y];
        return x < y;
      });
      for (int w : next) bfs.push(w);
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

// Quotient-graph minimum-degree ordering with upfront merging of
// indistinguishable nodes (identical closed neighborhoods; finite-element
// entity dofs come in such groups). Eliminated supernodes leave behind clique
// "elements"; absorbed elements are dropped lazily. The heap holds possibly
// stale weighted degrees; entries are re-keyed when popped.
std::vector<int> min_degree_order(const CSRMatrix& a, const std::vector<char>& skip) {
  const int n = a.nrows;
  std::vector<std::vector<int>> nadj(n);
  for (int i = 0; i < n; ++i) {
    if (skip[i]) continue;
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const int j = a.col[p];
      if (j == i || skip[j]) continue;
      nadj[i].push_back(j);
      nadj[j].push_back(i);
    }
  }
  for (auto& nb : nadj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  // Group nodes with equal closed neighborhoods.
  std::vector<int> group_of(n, -1);
  std::vector<std::vector<int>> groups;
  {
    std::map<std::vector<int>, int> seen;
    std::vector<int> key;
    for (int v = 0; v < n; ++v) {
      if (skip[v]) continue;
      key = nadj[v];
      key.push_back(v);
      std::sort(key.begin(), key.end());
      auto [it, inserted] = seen.emplace(key, static_cast<int>(groups.size()));
      if (inserted) groups.emplace_back();
      group_of[v] = it->second;
      groups[it->second].push_back(v);
    }
  }
  const int ng = static_cast<int>(groups.size());
  std::vector<int> weight(ng);
  std::vector<std::vector<int>> adj(ng);
  for (int g = 0; g < ng; ++g) {
    weight[g] = static_cast<int>(groups[g].size());
    for (int u : nadj[groups[g][0]]) {
      const int h = group_of[u];
      if (h != g) adj[g].push_back(h);
    }
    std::sort(adj[g].begin(), adj[g].end());
    adj[g].erase(std::unique(adj[g].begin(), adj[g].end()), adj[g].end());
  }

  std::vector<std::vector<int>> velems(ng);
  std::vector<std::vector<int>> members;
  std::vector<char> dead(ng, 0), elem_dead;
  std::vector<int> stamp(ng, 0);
  int cur_stamp = 0;

  // Compacts dead entries out of v's lists; returns the weighted degree and
  // optionally the deduplicated neighborhood.
  auto neighborhood = [&](int v, std::vector<int>* out) {
    ++cur_stamp;
    stamp[v] = cur_stamp;
    long deg = 0;
    auto visit = [&](int u) {
      if (stamp[u] != cur_stamp) {
        stamp[u] = cur_stamp;
        deg += weight[u];
        if (out) out->push_back(u);
      }
    };
    auto& av = adj[v];
    size_t w = 0;
    for (int u : av)
      if (!dead[u]) {
        av[w++] = u;
        visit(u);
      }
    av.resize(w);
    auto& ev = velems[v];
    w = 0;
    for (int e : ev) {
      if (elem_dead[e]) continue;
      ev[w++] = e;
      auto& me = members[e];
      size_t mw = 0;
      for (int u : me)
        if (!dead[u]) {
          me[mw++] = u;
          if (u != v) visit(u);
        }
      me.resize(mw);
    }
    ev.resize(w);
    return deg;
  };

  using Entry = std::pair<long, int>;  // (weighted degree, group)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  for (int g = 0; g < ng; ++g) {
    long d = 0;
    for (int u : adj[g]) d += weight[u];
    heap.push({d, g});
  }

  std::vector<int> gorder;
  gorder.reserve(ng);
  std::vector<int> nbrs;
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (dead[v]) continue;
    const long d_now = neighborhood(v, nullptr);
    if (d_now != d) {
      heap.push({d_now, v});
      continue;
    }
    nbrs.clear();
    neighborhood(v, &nbrs);
    gorder.push_back(v);
    dead[v] = 1;
    for (int e : velems[v]) elem_dead[e] = 1;
    const int enew = static_cast<int>(members.size());
    members.push_back(nbrs);
    elem_dead.push_back(0);
    for (int u : nbrs) velems[u].push_back(enew);
  }
  for (int g = 0; g < ng; ++g)
    if (!dead[g]) gorder.push_back(g);

  std::vector<int> order;
  order.reserve(n);
  for (int g : gorder)
    for (int v : groups[g]) order.push_back(v);
  return order;
}

// Geometric nested dissection: split along the widest coordinate axis,
// peel off the vertex separator, recurse, separator last. Small sets and
// separators are ordered by minimum degree on their subgraph.
class NestedDissection {
public:
  NestedDissection(const CSRMatrix& a, const std::vector<Vec3>& coords,
                   const std::vector<char>& skip)
      : coords_(coords), adj_(a.nrows), local_id_(a.nrows, -1) {
    const int n = a.nrows;
    for (int i = 0; i < n; ++i) {
      if (skip[i]) continue;
      for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
        const int j = a.col[p];
        if (j == i || skip[j]) continue;
        adj_[i].push_back(j);
        adj_[j].push_back(i);
      }
    }
    for (auto& nb : adj_) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    std::vector<int> all;
    for (int i = 0; i < n; ++i)
      if (!skip[i]) all.push_back(i);
    order_.reserve(all.size());
    recurse(all);
  }

  std::vector<int> take() { return std::move(order_); }

private:
  void emit_min_degree(const std::vector<int>& nodes) {
    if (nodes.empty()) return;
    for (size_t i = 0; i < nodes.size(); ++i) local_id_[nodes[i]] = static_cast<int>(i);
    std::vector<Triplet> t;
    for (size_t i = 0; i < nodes.size(); ++i)
      for (int w : adj_[nodes[i]])
        if (local_id_[w] >= 0) t.push_back({static_cast<int>(i), local_id_[w], 1.0});
    const CSRMatrix sub = csr_from_triplets(static_cast<int>(nodes.size()),
                                            static_cast<int>(nodes.size()), t);
    const std::vector<char> noskip(nodes.size(), 0);
    for (int v : min_degree_order(sub, noskip)) order_.push_back(nodes[v]);
    for (int v : nodes) local_id_[v] = -1;
  }

  void recurse(std::vector<int>& nodes) {
    if (nodes.size() <= 400) {
      emit_min_degree(nodes);
      return;
    }
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (int v : nodes)
      for (int ax = 0; ax < 3; ++ax) {
        lo[ax] = std::min(lo[ax], coords_[v][ax]);
        hi[ax] = std::max(hi[ax], coords_[v][ax]);
      }
    int axis = 0;
    for (int ax = 1; ax < 3; ++ax)
      if (hi[ax] - lo[ax] > hi[axis] - lo[axis]) axis = ax;
    const size_t half = nodes.size() / 2;
    std::nth_element(nodes.begin(), nodes.begin() + half, nodes.end(), [&](int x, int y) {
      if (coords_[x][axis] != coords_[y][axis]) return coords_[x][axis] < coords_[y][axis];
      return x < y;
    });
    std::vector<int> a(nodes.begin(), nodes.begin() + half);
    std::vector<int> b(nodes.begin() + half, nodes.end());
    for (int v : b) local_id_[v] = 1;
    std::vector<int> sep, a_inner;
    for (int v : a) {
      bool cut = false;
      for (int w : adj_[v])
        if (local_id_[w] == 1) {
          cut = true;
          break;
        }
      (cut ? sep : a_inner).push_back(v);
    }
    for (int v : b) local_id_[v] = -1;
    if (sep.empty() || a_inner.empty()) {  // degenerate split
      emit_min_degree(nodes);
      return;
    }
    recurse(a_inner);
    recurse(b);
    emit_min_degree(sep);
  }

  const std::vector<Vec3>& coords_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> local_id_;
  std::vector<int> order_;
};

}  // namespace

SparseLU::SparseLU(const CSRMatrix& a, const std::vector<int>* delay_to_end,
                   const std::vector<Vec3>* coords) {
  if (a.nrows != a.ncols) throw std::invalid_argument("SparseLU: matrix must be square");
  n_ = a.nrows;
  std::vector<char> skip(n_, 0);
  if (delay_to_end)
    for (int i : *delay_to_end) skip[i] = 1;
  if (coords && static_cast<int>(coords->size()) == n_)
    perm_ = NestedDissection(a, *coords, skip).take();
  else
    perm_ = min_degree_order(a, skip);
  if (delay_to_end)
    for (int i : *delay_to_end) perm_.push_back(i);
  if (static_cast<int>(perm_.size()) != n_) perm_ = rcm_order(a);

  // B = A(perm, perm) in CSC form.
  std::vector<int> inv(n_);
  for (int i = 0; i < n_; ++i) inv[perm_[i]] = i;
  std::vector<int> bp(n_ + 1, 0);
  std::vector<int> bi(a.nnz());
  std::vector<double> bx(a.nnz());
  for (int i = 0; i < n_; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) bp[inv[a.col[p]] + 1] += 1;
  for (int j = 0; j < n_; ++j) bp[j + 1] += bp[j];
  {
    std::vector<int> next(bp.begin(), bp.end() - 1);
    for (int i = 0; i < n_; ++i)
      for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
        const int j = inv[a.col[p]];
        const int q = next[j]++;
        bi[q] = inv[i];
        bx[q] = a.val[p];
      }
  }

  pivot_row_.assign(n_, -1);   // pivot order -> B row
  pivot_order_.assign(n_, -1); // B row -> pivot order
  lp_.assign(n_ + 1, 0);
  up_.assign(n_ + 1, 0);
  udiag_.assign(n_, 0.0);

  std::vector<double> x(n_, 0.0);
  std::vector<int> stack(n_), dfs_pos(n_), topo(n_);
  std::vector<int> mark(n_, -1);
  min_pivot_ = std::numeric_limits<double>::infinity();
  max_pivot_ = 0.0;

  for (int j = 0; j < n_; ++j) {
    // Symbolic: rows reachable from the pattern of B(:,j) through finished
    // L columns, in topological order.
    int top = n_;
    for (int p = bp[j]; p < bp[j + 1]; ++p) {
      int r = bi[p];
      if (mark[r] == j) continue;
      int head = 0;
      stack[0] = r;
      dfs_pos[r] = pivot_order_[r] >= 0 ? lp_[pivot_order_[r]] : -1;
      mark[r] = j;
      while (head >= 0) {
        const int node = stack[head];
        const int t = pivot_order_[node];
        bool descended = false;
        if (t >= 0) {
          int& pos = dfs_pos[node];
          while (pos < lp_[t + 1]) {
            const int child = li_[pos++];
            if (mark[child] != j) {
              mark[child] = j;
              stack[++head] = child;
              dfs_pos[child] = pivot_order_[child] >= 0 ? lp_[pivot_order_[child]] : -1;
              descended = true;
              break;
            }
          }
        }
        if (!descended) {
          topo[--top] = node;
          --head;
        }
      }
    }
    // Numeric solve against the finished columns.
    for (int p = bp[j]; p < bp[j + 1]; ++p) x[bi[p]] = bx[p];
    for (int t = top; t < n_; ++t) {
      const int r = topo[t];
      const int piv = pivot_order_[r];
      if (piv < 0) continue;
      const double xr = x[r];
      if (xr == 0.0) continue;
      for (int p = lp_[piv]; p < lp_[piv + 1]; ++p) x[li_[p]] -= lx_[p] * xr;
    }
    // Threshold partial pivoting: keep the diagonal row when it is within a
    // factor 10 of the largest candidate, so the fill-reducing order survives.
    int piv_row = -1;
    double best = 0.0;
    for (int t = top; t < n_; ++t) {
      const int r = topo[t];
      if (pivot_order_[r] >= 0) continue;
      const double v = std::abs(x[r]);
      if (v > best || piv_row < 0) {
        best = v;
        piv_row = r;
      }
    }
    if (piv_row < 0 || best == 0.0)
      throw std::runtime_error("SparseLU: singular matrix at column " + std::to_string(j));
    if (pivot_order_[j] < 0 && std::abs(x[j]) >= 0.1 * best) piv_row = j;
    const double pivot = x[piv_row];
    min_pivot_ = std::min(min_pivot_, std::abs(pivot));
    max_pivot_ = std::max(max_pivot_, std::abs(pivot));
    udiag_[j] = pivot;
    for (int t = top; t < n_; ++t) {
      const int r = topo[t];
      const int piv = pivot_order_[r];
      if (piv >= 0) {
        ui_.push_back(piv);
        ux_.push_back(x[r]);
      } else if (r != piv_row && x[r] != 0.0) {
        li_.push_back(r);
        lx_.push_back(x[r] / pivot);
      }
      x[r] = 0.0;
    }
    lp_[j + 1] = static_cast<int>(li_.size());
    up_[j + 1] = static_cast<int>(ui_.size());
    pivot_order_[piv_row] = j;
    pivot_row_[j] = piv_row;
  }
}

void SparseLU::solve(const std::vector<double>& b, std::vector<double>& xout) const {
  std::vector<double> work(n_);
  for (int i = 0; i < n_; ++i) work[i] = b[perm_[i]];
  std::vector<double> y(n_);
  for (int t = 0; t < n_; ++t) {
    const double yt = work[pivot_row_[t]];
    y[t] = yt;
    if (yt == 0.0) continue;
    for (int p = lp_[t]; p < lp_[t + 1]; ++p) work[li_[p]] -= lx_[p] * yt;
  }
  for (int j = n_ - 1; j >= 0; --j) {
    const double zj = y[j] / udiag_[j];
    y[j] = zj;
    if (zj == 0.0) continue;
    for (int p = up_[j]; p < up_[j + 1]; ++p) y[ui_[p]] -= ux_[p] * zj;
  }
  xout.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j) xout[perm_[j]] = y[j];
}

SolveReport solve(const SparseSystem& sys) {
  using clock = std::chrono::steady_clock;
  SolveReport rep;
  const auto t0 = clock::now();
  // Pressure rows have a zero diagonal block: schedule them (and the
  // multiplier) last so elimination stays on the velocity/magnetic blocks.
  std::vector<int> delayed;
  std::vector<Vec3> coords(sys.full_of_red.size());
  for (size_t r = 0; r < sys.full_of_red.size(); ++r) {
    const int i = sys.full_of_red[r];
    if (i == sys.layout.mult) delayed.push_back(static_cast<int>(r));
    coords[r] = sys.dof_coords.empty() ? Vec3{} : sys.dof_coords[i];
  }
  SparseLU lu(sys.A_red, &delayed, sys.dof_coords.empty() ? nullptr : &coords);
  const auto t1 = clock::now();
  rep.factor_seconds = std::chrono::duration<double>(t1 - t0).count();
  rep.min_pivot = lu.min_pivot();
  rep.max_pivot = lu.max_pivot();
  rep.factor_nnz = lu.fill_nnz();

  const int n = static_cast<int>(sys.rhs_red.size());
  std::vector<double> x(n, 0.0), r(n), dx(n), ax(n);
  lu.solve(sys.rhs_red, x);
  double bnorm = 0.0;
  for (double v : sys.rhs_red) bnorm = std::max(bnorm, std::abs(v));
  if (bnorm == 0.0) bnorm = 1.0;
  double relres = 0.0;
  for (int step = 0; step <= 3; ++step) {
    sys.A_red.matvec(x, ax);
    double rmax = 0.0;
    for (int i = 0; i < n; ++i) {
      r[i] = sys.rhs_red[i] - ax[i];
      rmax = std::max(rmax, std::abs(r[i]));
    }
    relres = rmax / bnorm;
    rep.refinement_steps = step;
    if (relres <= 1e-11 || step == 3) break;
    lu.solve(r, dx);
    for (int i = 0; i < n; ++i) x[i] += dx[i];
  }
  rep.relative_residual = relres;
  const auto t2 = clock::now();
  rep.solve_seconds = std::chrono::duration<double>(t2 - t1).count();

  rep.full = sys.expand(x);
  const BlockLayout& L = sys.layout;
  rep.u.assign(rep.full.begin() + L.u_off, rep.full.begin() + L.u_off + L.n_u);
  rep.p.assign(rep.full.begin() + L.p_off, rep.full.begin() + L.p_off + L.n_p);
  rep.B.assign(rep.full.begin() + L.B_off, rep.full.begin() + L.B_off + L.n_B);
  rep.multiplier = rep.full[L.mult];

  // Remove the residual pressure mean left by the multiplier formulation.
  if (!sys.pressure_mean.empty() && sys.domain_volume > 0.0) {
    double mean = 0.0;
    for (int j = 0; j < L.n_p; ++j) mean += sys.pressure_mean[j] * rep.p[j];
    mean /= sys.domain_volume;
    for (int j = 0; j < L.n_p; ++j) rep.p[j] -= mean * sys.pressure_one[j];
    for (int j = 0; j < L.n_p; ++j) rep.full[L.p_off + j] = rep.p[j];
  }
  return rep;
}

}  // namespace tetmhd
