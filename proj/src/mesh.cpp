#include "tetmhd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace tetmhd {

namespace {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return dot(cross(b - a, c - a), d - a) / 6.0;
}

struct LatticeKey {
  long i, j, k;
  bool operator<(const LatticeKey& o) const {
    if (i != o.i) return i < o.i;
    if (j != o.j) return j < o.j;
    return k < o.k;
  }
};

// Kuhn split of the axis-aligned subcube with integer min corner (ci,cj,ck)
// on a lattice of spacing 1/n. The six tetrahedra are the chains
// corner -> +e_p0 -> +e_p1 -> +e_p2 over all permutations, all sharing the
// main diagonal, which makes neighbouring subcubes conforming.
void emit_kuhn_cells(long ci, long cj, long ck, double spacing,
                     std::map<LatticeKey, int>& vertex_ids, Mesh& mesh) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto vertex_id = [&](long i, long j, long k) {
    const LatticeKey key{i, j, k};
    auto it = vertex_ids.find(key);
    if (it != vertex_ids.end()) return it->second;
    const int id = mesh.n_vertices();
    vertex_ids.emplace(key, id);
    mesh.vertices.push_back({i * spacing, j * spacing, k * spacing});
    return id;
  };
  for (const auto& p : perms) {
    long pos[3] = {ci, cj, ck};
    std::array<int, 4> cell;
    cell[0] = vertex_id(pos[0], pos[1], pos[2]);
    for (int s = 0; s < 3; ++s) {
      pos[p[s]] += 1;
      cell[s + 1] = vertex_id(pos[0], pos[1], pos[2]);
    }
    if (signed_volume(mesh.vertices[cell[0]], mesh.vertices[cell[1]],
                      mesh.vertices[cell[2]], mesh.vertices[cell[3]]) < 0.0)
      std::swap(cell[1], cell[2]);
    mesh.cells.push_back(cell);
  }
}

// Tags boundary faces by the dominant outward-normal axis: 1,2 = x-,x+,
// 3,4 = y-,y+, 5,6 = z-,z+.
void tag_boundary_faces(Mesh& mesh) {
  std::map<std::array<int, 3>, std::pair<int, int>> count;  // face -> (count, owner cell)
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int lf = 0; lf < 4; ++lf) {
      std::array<int, 3> key = {mesh.cells[c][local_faces[lf][0]],
                                mesh.cells[c][local_faces[lf][1]],
                                mesh.cells[c][local_faces[lf][2]]};
      std::sort(key.begin(), key.end());
      auto it = count.find(key);
      if (it == count.end())
        count.emplace(key, std::make_pair(1, c * 4 + lf));
      else
        it->second.first += 1;
    }
  for (const auto& [key, cnt] : count) {
    if (cnt.first != 1) continue;
    const int c = cnt.second / 4, lf = cnt.second % 4;
    const Vec3 a = mesh.vertices[mesh.cells[c][local_faces[lf][0]]];
    const Vec3 b = mesh.vertices[mesh.cells[c][local_faces[lf][1]]];
    const Vec3 d = mesh.vertices[mesh.cells[c][local_faces[lf][2]]];
    const Vec3 n = cross(b - a, d - a);
    int axis = 0;
    double best = std::abs(n.x);
    if (std::abs(n.y) > best) { axis = 1; best = std::abs(n.y); }
    if (std::abs(n.z) > best) { axis = 2; }
    const bool positive = n[axis] > 0.0;
    mesh.boundary_tags[key] = 2 * axis + (positive ? 2 : 1);
  }
}

}  // namespace

double Mesh::cell_volume(int c) const {
  const auto& t = cells[c];
  return signed_volume(vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]);
}

Vec3 Mesh::cell_centroid(int c) const {
  const auto& t = cells[c];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]] + vertices[t[3]]) * 0.25;
}

double Mesh::cell_diameter(int c) const {
  const auto& t = cells[c];
  double best = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      best = std::max(best, norm(vertices[t[i]] - vertices[t[j]]));
  return best;
}

double Mesh::cell_inradius(int c) const {
  const auto& t = cells[c];
  double area = 0.0;
  for (const auto& lf : local_faces) {
    const Vec3 a = vertices[t[lf[0]]], b = vertices[t[lf[1]]], d = vertices[t[lf[2]]];
    area += 0.5 * norm(cross(b - a, d - a));
  }
  return 3.0 * cell_volume(c) / area;
}

double Mesh::total_volume() const {
  double v = 0.0;
  for (int c = 0; c < n_cells(); ++c) v += cell_volume(c);
  return v;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (int c = 0; c < n_cells(); ++c) h = std::max(h, cell_diameter(c));
  return h;
}

Mesh generate_cube_mesh(int n) {
  if (n < 1) throw std::invalid_argument("generate_cube_mesh: n must be >= 1");
  Mesh mesh;
  std::map<LatticeKey, int> ids;
  const double spacing = 1.0 / n;
  for (long k = 0; k < n; ++k)
    for (long j = 0; j < n; ++j)
      for (long i = 0; i < n; ++i) emit_kuhn_cells(i, j, k, spacing, ids, mesh);
  tag_boundary_faces(mesh);
  return mesh;
}

Mesh generate_lshape_mesh(int n) {
  if (n < 1) throw std::invalid_argument("generate_lshape_mesh: n must be >= 1");
  Mesh mesh;
  std::map<LatticeKey, int> ids;
  const double spacing = 1.0 / n;
  // Unit-cube origins covering [-1,1]^3 minus the quadrant column x<0, y<0.
  static const int origins[6][3] = {{0, 0, -1}, {-1, 0, -1}, {0, -1, -1},
                                    {0, 0, 0},  {-1, 0, 0},  {0, -1, 0}};
  for (const auto& o : origins)
    for (long k = 0; k < n; ++k)
      for (long j = 0; j < n; ++j)
        for (long i = 0; i < n; ++i)
          emit_kuhn_cells(o[0] * static_cast<long>(n) + i, o[1] * static_cast<long>(n) + j,
                          o[2] * static_cast<long>(n) + k, spacing, ids, mesh);
  tag_boundary_faces(mesh);
  return mesh;
}

FaceSet build_face_connectivity(const Mesh& mesh) {
  FaceSet fs;
  fs.cell_faces.resize(mesh.n_cells());
  std::map<std::array<int, 3>, int> index;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int lf = 0; lf < 4; ++lf) {
      std::array<int, 3> key = {mesh.cells[c][local_faces[lf][0]],
                                mesh.cells[c][local_faces[lf][1]],
                                mesh.cells[c][local_faces[lf][2]]};
      std::array<int, 3> oriented = key;
      std::sort(key.begin(), key.end());
      auto it = index.find(key);
      int f;
      if (it == index.end()) {
        f = fs.n_faces();
        index.emplace(key, f);
        FaceInfo info;
        info.v = key;
        const Vec3 a = mesh.vertices[key[0]], b = mesh.vertices[key[1]], d = mesh.vertices[key[2]];
        const Vec3 nn = cross(b - a, d - a);
        info.area = 0.5 * norm(nn);
        info.normal = normalized(nn);
        info.diameter = std::max({norm(b - a), norm(d - a), norm(d - b)});
        fs.faces.push_back(info);
      } else {
        f = it->second;
      }
      FaceInfo& info = fs.faces[f];
      const int slot = info.cell[0] < 0 ? 0 : (info.cell[1] < 0 ? 1 : 2);
      if (slot == 2)
        throw std::runtime_error("build_face_connectivity: non-conforming mesh, face shared by >2 cells");
      info.cell[slot] = c;
      info.local_face[slot] = lf;
      const Vec3 a = mesh.vertices[oriented[0]], b = mesh.vertices[oriented[1]],
                 d = mesh.vertices[oriented[2]];
      const Vec3 outward = cross(b - a, d - a);
      info.sign[slot] = dot(outward, info.normal) > 0.0 ? 1 : -1;
      fs.cell_faces[c][lf] = f;
    }
  }
  for (int f = 0; f < fs.n_faces(); ++f) {
    FaceInfo& info = fs.faces[f];
    if (info.is_boundary()) {
      auto it = mesh.boundary_tags.find(info.v);
      info.tag = it == mesh.boundary_tags.end() ? 0 : it->second;
      fs.boundary.push_back(f);
    } else {
      fs.interior.push_back(f);
    }
  }
  return fs;
}

EdgeSet build_edge_connectivity(const Mesh& mesh) {
  EdgeSet es;
  es.cell_edges.resize(mesh.n_cells());
  std::map<std::array<int, 2>, int> index;
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int le = 0; le < 6; ++le) {
      std::array<int, 2> key = {mesh.cells[c][local_edges[le][0]],
                                mesh.cells[c][local_edges[le][1]]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      auto [it, inserted] = index.emplace(key, es.n_edges());
      if (inserted) es.edges.push_back(key);
      es.cell_edges[c][le] = it->second;
    }
  return es;
}

MacroMesh build_macro_mesh(const Mesh& mesh, const FaceSet& faces) {
  const int nc = mesh.n_cells();
  const int nv = mesh.n_vertices();

  std::vector<std::vector<int>> star(nv);
  for (int c = 0; c < nc; ++c)
    for (int v : mesh.cells[c]) star[v].push_back(c);

  // Hop distance of each vertex from the boundary (over mesh edges).
  std::vector<int> depth(nv, -1);
  std::queue<int> bfs;
  for (int f : faces.boundary)
    for (int v : faces.faces[f].v)
      if (depth[v] < 0) {
        depth[v] = 0;
        bfs.push(v);
      }
  EdgeSet es = build_edge_connectivity(mesh);
  std::vector<std::vector<int>> vertex_nbrs(nv);
  for (const auto& e : es.edges) {
    vertex_nbrs[e[0]].push_back(e[1]);
    vertex_nbrs[e[1]].push_back(e[0]);
  }
  while (!bfs.empty()) {
    const int v = bfs.front();
    bfs.pop();
    for (int w : vertex_nbrs[v])
      if (depth[w] < 0) {
        depth[w] = depth[v] + 1;
        bfs.push(w);
      }
  }

  // Interior-most vertices first, larger stars first, index as tie-break.
  std::vector<int> order(nv);
  for (int v = 0; v < nv; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (depth[a] != depth[b]) return depth[a] > depth[b];
    if (star[a].size() != star[b].size()) return star[a].size() > star[b].size();
    return a < b;
  });

  MacroMesh mm;
  mm.macro_of_cell.assign(nc, -1);
  for (int v : order) {
    bool free = !star[v].empty();
    for (int c : star[v])
      if (mm.macro_of_cell[c] >= 0) { free = false; break; }
    if (!free) continue;
    const int m = mm.n_macro();
    mm.cells_of_macro.emplace_back(star[v]);
    mm.seed_vertex.push_back(v);
    for (int c : star[v]) mm.macro_of_cell[c] = m;
  }

  // Merge leftover cells into a face-adjacent macroelement.
  bool progress = true;
  while (progress) {
    progress = false;
    bool remaining = false;
    for (int c = 0; c < nc; ++c) {
      if (mm.macro_of_cell[c] >= 0) continue;
      int target = -1;
      for (int f : faces.cell_faces[c]) {
        const FaceInfo& info = faces.faces[f];
        const int nbr = info.cell[0] == c ? info.cell[1] : info.cell[0];
        if (nbr >= 0 && mm.macro_of_cell[nbr] >= 0) {
          const int m = mm.macro_of_cell[nbr];
          if (target < 0 || mm.cells_of_macro[m].size() < mm.cells_of_macro[target].size())
            target = m;
        }
      }
      if (target >= 0) {
        mm.macro_of_cell[c] = target;
        mm.cells_of_macro[target].push_back(c);
        progress = true;
      } else {
        remaining = true;
      }
    }
    if (!remaining) break;
    if (!progress)
      throw std::runtime_error("build_macro_mesh: leftover cell not adjacent to any macroelement");
  }

  for (const auto& cells : mm.cells_of_macro)
    mm.max_cardinality = std::max(mm.max_cardinality, static_cast<int>(cells.size()));
  return mm;
}

double shape_regularity_constant(const Mesh& mesh) {
  double c = 0.0;
  for (int e = 0; e < mesh.n_cells(); ++e)
    c = std::max(c, mesh.cell_diameter(e) / mesh.cell_inradius(e));
  return c;
}

double local_quasi_uniformity_constant(const Mesh& mesh, const FaceSet& faces) {
  double c = 1.0;
  for (int f : faces.interior) {
    const FaceInfo& info = faces.faces[f];
    const double ha = mesh.cell_diameter(info.cell[0]);
    const double hb = mesh.cell_diameter(info.cell[1]);
    c = std::max(c, std::max(ha / hb, hb / ha));
  }
  return c;
}

namespace {

[[noreturn]] void msh_error(const std::string& what, int line) {
  std::ostringstream os;
  os << "import_msh: " << what << " (line " << line << ")";
  throw std::runtime_error(os.str());
}

}  // namespace

Mesh import_msh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("import_msh: cannot open " + path);

  Mesh mesh;
  std::map<long, int> node_ids;
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) return false;
    ++lineno;
    return true;
  };

  bool seen_nodes = false;
  while (next_line(line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      std::string fmt;
      if (!next_line(fmt)) msh_error("malformed section: truncated MeshFormat", lineno);
      std::istringstream is(fmt);
      double version = 0.0;
      int filetype = 0;
      is >> version >> filetype;
      if (!is || filetype != 0) msh_error("malformed section: not an ASCII file", lineno);
      if (version < 2.0 || version >= 3.0) msh_error("malformed section: only MSH v2.x supported", lineno);
      if (!next_line(line) || line.rfind("$EndMeshFormat", 0) != 0)
        msh_error("malformed section: missing $EndMeshFormat", lineno);
    } else if (line.rfind("$Nodes", 0) == 0) {
      if (!next_line(line)) msh_error("malformed section: truncated Nodes", lineno);
      long count = -1;
      {
        std::istringstream is(line);
        is >> count;
        if (!is || count <= 0) msh_error("malformed section: empty Nodes section", lineno);
      }
      for (long i = 0; i < count; ++i) {
        if (!next_line(line)) msh_error("malformed section: truncated Nodes", lineno);
        std::istringstream is(line);
        long id;
        double x, y, z;
        is >> id >> x >> y >> z;
        if (!is) msh_error("malformed section: bad node line", lineno);
        node_ids[id] = mesh.n_vertices();
        mesh.vertices.push_back({x, y, z});
      }
      if (!next_line(line) || line.rfind("$EndNodes", 0) != 0)
        msh_error("malformed section: missing $EndNodes", lineno);
      seen_nodes = true;
    } else if (line.rfind("$Elements", 0) == 0) {
      if (!seen_nodes) msh_error("malformed section: Elements before Nodes", lineno);
      if (!next_line(line)) msh_error("malformed section: truncated Elements", lineno);
      long count = -1;
      {
        std::istringstream is(line);
        is >> count;
        if (!is || count < 0) msh_error("malformed section: bad element count", lineno);
      }
      for (long i = 0; i < count; ++i) {
        if (!next_line(line)) msh_error("malformed section: truncated Elements", lineno);
        std::istringstream is(line);
        long id = 0;
        int type = 0, ntags = 0;
        is >> id >> type >> ntags;
        if (!is) msh_error("malformed section: bad element line", lineno);
        int physical = 0;
        for (int t = 0; t < ntags; ++t) {
          int tag;
          is >> tag;
          if (!is) msh_error("malformed section: bad element tags", lineno);
          if (t == 0) physical = tag;
        }
        auto read_node = [&]() {
          long nid;
          is >> nid;
          if (!is) msh_error("malformed section: bad element connectivity", lineno);
          auto it = node_ids.find(nid);
          if (it == node_ids.end()) msh_error("malformed section: unknown node id", lineno);
          return it->second;
        };
        if (type == 4) {
          std::array<int, 4> cell = {read_node(), read_node(), read_node(), read_node()};
          const double vol = signed_volume(mesh.vertices[cell[0]], mesh.vertices[cell[1]],
                                           mesh.vertices[cell[2]], mesh.vertices[cell[3]]);
          if (vol <= 0.0) msh_error("inverted cell", lineno);
          mesh.cells.push_back(cell);
        } else if (type == 2) {
          std::array<int, 3> tri = {read_node(), read_node(), read_node()};
          std::sort(tri.begin(), tri.end());
          mesh.boundary_tags[tri] = physical;
        } else if (type == 15 || type == 1) {
          // points and lines carry no data we use
          continue;
        } else {
          msh_error("unsupported element type " + std::to_string(type), lineno);
        }
      }
      if (!next_line(line) || line.rfind("$EndElements", 0) != 0)
        msh_error("malformed section: missing $EndElements", lineno);
    }
    // other sections ($PhysicalNames, ...) are skipped by the outer loop
  }
  if (mesh.n_cells() == 0) throw std::runtime_error("import_msh: no tetrahedra in " + path);
  return mesh;
}

}  // namespace tetmhd
