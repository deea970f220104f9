#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace sgl {

using cplx = std::complex<double>;
using Mask = std::vector<std::vector<int>>;

enum class LatticeKind { square, triangular, custom };

struct Edge {
  int u, v;
};

// Finite piece of a lattice. Interior vertices are numbered 0..n_interior()-1
// (so an interior vertex id doubles as its Laplacian row), boundary vertices
// follow in counterclockwise boundary order.
class LatticeDomain {
 public:
  static LatticeDomain square(const Mask& mask, double mesh = 1.0);
  static LatticeDomain triangular(const Mask& mask, double mesh = 1.0);
  // Arbitrary graph, mostly for small hand-built test cases. Boundary
  // vertices keep the order in which they appear unless boundary_order is
  // given (as indices into `pos`).
  static LatticeDomain from_graph(const std::vector<cplx>& pos,
                                  const std::vector<Edge>& edges,
                                  const std::vector<bool>& boundary,
                                  const std::vector<int>& boundary_order = {});

  LatticeKind kind() const { return kind_; }
  double mesh() const { return mesh_; }
  int n_vertices() const { return static_cast<int>(pos_.size()); }
  int n_interior() const { return n_interior_; }
  int n_boundary() const { return n_vertices() - n_interior_; }
  bool is_boundary(int v) const { return v >= n_interior_; }

  // position in lattice units; physical position is mesh() * position(v)
  cplx position(int v) const { return pos_[v]; }
  std::array<int, 2> cell(int v) const { return cell_[v]; }
  int vertex_at(int i, int j) const;  // -1 if not a vertex

  // For interior vertices all lattice neighbours; for boundary vertices only
  // the interior ones. Edges never join two boundary vertices.
  const std::vector<int>& neighbors(int v) const { return nbr_[v]; }
  const std::vector<Edge>& edges() const { return edges_; }

  // boundary_order()[k] == n_interior() + k
  std::vector<int> boundary_order() const;
  int boundary_index(int v) const;
  int boundary_at(int k) const;  // cyclic

  void mark(const std::string& name, int v) { marked_[name] = v; }
  int marked(const std::string& name) const;
  const std::map<std::string, int>& marked_points() const { return marked_; }

  // Exterior turning angle at boundary vertex v of the boundary polyline.
  double turning(int v) const;
  // Sum of turning angles over the ccw walk (from, to]; from == to gives 0.
  double boundary_winding(int from, int to) const;
  double total_winding() const;

  // direction vectors (grid offsets), ccw
  static const std::vector<std::array<int, 2>>& directions(LatticeKind k);

 private:
  static LatticeDomain from_mask(LatticeKind k, const Mask& mask, double mesh);
  void build_edges();

  LatticeKind kind_ = LatticeKind::custom;
  double mesh_ = 1.0;
  int n_interior_ = 0;
  std::vector<cplx> pos_;
  std::vector<std::array<int, 2>> cell_;
  std::vector<std::vector<int>> nbr_;
  std::vector<Edge> edges_;
  std::unordered_map<long long, int> cell_index_;
  std::map<std::string, int> marked_;
};

cplx lattice_position(LatticeKind k, int i, int j);

// {lattice, mask, mesh, marked: {name: [i, j]}}
LatticeDomain domain_from_json(const nlohmann::json& j);

struct Cut {
  std::vector<int> delta;
  std::vector<std::vector<int>> components;  // interior vertices only
  const std::vector<int>& left() const { return components.at(0); }
  const std::vector<int>& right() const { return components.at(1); }
};

// Components are ordered by mean x-coordinate (left first).
Cut split_by_cut(const LatticeDomain& d, const std::vector<int>& delta,
                 bool allow_multi = false);

// Doubled graph of the wired square-lattice graph: black vertices are the
// interior vertices, the root (all boundary vertices merged) and the
// plaquettes having an interior corner; white vertices are the edges.
struct DoubledGraph {
  int n_interior = 0;
  int root = 0;                       // black id of the merged boundary
  std::vector<std::array<int, 2>> faces;  // lower-left corner of each plaquette
  std::vector<Edge> primal_edges;     // white id -> domain edge
  // white id -> {endpoint u, endpoint v, face a, face b} as black ids;
  // boundary endpoints are mapped to root
  std::vector<std::array<int, 4>> white_nbr;
  std::vector<std::vector<int>> black_nbr;  // black id -> white ids
  int face_black(int f) const { return n_interior + 1 + f; }
  int n_black() const { return n_interior + 1 + static_cast<int>(faces.size()); }
  int n_white() const { return static_cast<int>(primal_edges.size()); }
  int find_face(int i, int j) const;
  std::unordered_map<long long, int> face_index;

  // counts restricted to the interior complex
  int interior_vertices = 0, interior_edges = 0, interior_faces = 0;
};

DoubledGraph double_graph(const LatticeDomain& d);

inline long long cell_key(int i, int j) {
  return (static_cast<long long>(i) << 32) ^ static_cast<unsigned int>(j);
}

Mask rectangle_mask(int rows, int cols);

}  // namespace sgl
