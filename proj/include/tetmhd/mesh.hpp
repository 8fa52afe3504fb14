#ifndef TETMHD_MESH_HPP
#define TETMHD_MESH_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "tetmhd/geometry.hpp"

namespace tetmhd {

/// Local faces opposite each vertex, ordered so the right-hand rule gives the
/// outward normal on a positively oriented cell.
inline constexpr int local_faces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

/// Local edges in (low, high) local-vertex order.
inline constexpr int local_edges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

/// Conforming tetrahedral mesh. Cells store their four vertex indices in an
/// order giving positive signed volume. Boundary tags are keyed by the sorted
/// vertex triple of the boundary face.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;
  std::map<std::array<int, 3>, int> boundary_tags;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }

  double cell_volume(int c) const;
  Vec3 cell_centroid(int c) const;
  /// Diameter = longest edge of the tetrahedron.
  double cell_diameter(int c) const;
  /// Radius of the inscribed ball, 3V / (total face area).
  double cell_inradius(int c) const;
  double total_volume() const;
  double max_diameter() const;
};

/// Oriented face connectivity. Face vertices are stored sorted ascending by
/// global index; the canonical normal follows the right-hand rule on that
/// ordering. sign[s] is +1 when the outward normal of cell[s] equals the
/// canonical normal, -1 when it is opposite.
struct FaceInfo {
  std::array<int, 3> v;
  Vec3 normal;
  double area = 0.0;
  double diameter = 0.0;
  std::array<int, 2> cell{-1, -1};
  std::array<int, 2> local_face{-1, -1};
  std::array<int, 2> sign{0, 0};
  int tag = -1;

  bool is_boundary() const { return cell[1] < 0; }
};

struct FaceSet {
  std::vector<FaceInfo> faces;
  std::vector<int> interior;
  std::vector<int> boundary;
  /// 4 global face ids per cell, indexed by local face.
  std::vector<std::array<int, 4>> cell_faces;

  int n_faces() const { return static_cast<int>(faces.size()); }
};

/// Edge connectivity; edges store (low, high) global vertex pairs.
struct EdgeSet {
  std::vector<std::array<int, 2>> edges;
  /// 6 global edge ids per cell, local order (01,02,03,12,13,23).
  std::vector<std::array<int, 6>> cell_edges;

  int n_edges() const { return static_cast<int>(edges.size()); }
};

/// Partition of the cells into connected macroelements, each containing the
/// full star of at least one mesh vertex.
struct MacroMesh {
  std::vector<int> macro_of_cell;
  std::vector<std::vector<int>> cells_of_macro;
  std::vector<int> seed_vertex;
  int max_cardinality = 0;

  int n_macro() const { return static_cast<int>(cells_of_macro.size()); }
};

/// Structured mesh of the unit cube [0,1]^3: n^3 subcubes, each split into
/// six tetrahedra sharing the subcube main diagonal.
Mesh generate_cube_mesh(int n);

/// Structured mesh of the extruded L-shape [-1,1]^3 \ ([-1,0)^2 x [-1,1]).
/// Each of the six unit cubes is meshed at resolution n; the reentrant edge
/// {x=0, y=0} coincides with mesh edges at every resolution.
Mesh generate_lshape_mesh(int n);

/// Builds oriented face connectivity; throws on non-conforming input.
FaceSet build_face_connectivity(const Mesh& mesh);

EdgeSet build_edge_connectivity(const Mesh& mesh);

/// Greedy vertex-star agglomeration: seeds macroelements with full vertex
/// stars (interior-most, largest star first), then merges leftover cells
/// into face-adjacent macroelements.
MacroMesh build_macro_mesh(const Mesh& mesh, const FaceSet& faces);

/// Reads an ASCII Gmsh v2.2 file (Nodes + 4-node tetrahedra + 3-node boundary
/// triangles). Boundary tags come from the elements' first (physical) tag.
Mesh import_msh(const std::string& path);

/// Shape diagnostics used by the mesh-quality checks.
double shape_regularity_constant(const Mesh& mesh);       // max h_E / rho_E
double local_quasi_uniformity_constant(const Mesh& mesh, const FaceSet& faces);

}  // namespace tetmhd

#endif
