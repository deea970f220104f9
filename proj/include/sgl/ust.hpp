#pragma once

#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "sgl/lattice.hpp"
#include "sgl/random.hpp"

namespace sgl {

// Spanning tree of the domain wired at the boundary: every interior vertex
// points to a neighbour, chains end at a boundary vertex.
struct SpanningTree {
  std::vector<int> parent;  // indexed by interior vertex
  bool operator==(const SpanningTree&) const = default;
};

SpanningTree wilson_ust(const LatticeDomain& d, Rng& rng);

// Loop-erased walk from y; the last entry is the boundary vertex hit.
std::vector<int> lerw_branch(const LatticeDomain& d, int y, Rng& rng);

// log det Laplacian + log Harm(y, {x}); -infinity if x is unreachable
double lerw_log_partition(const LatticeDomain& d, int x, int y);

// Branch of the tree from an interior vertex down to the boundary.
std::vector<int> tree_branch(const LatticeDomain& d, const SpanningTree& t, int y);

// Perfect matching of the doubled graph with the root vertex and the
// corner plaquette f0 removed.
struct DimerMatching {
  std::vector<int> white_mate;  // white id -> black id
  std::vector<int> black_mate;  // black id -> white id, -1 for removed blacks
  int removed_face = -1;        // black id of f0
  bool operator==(const DimerMatching&) const = default;
};

// Plaquette adjacent to the root used as the removed dual vertex.
int temperley_root_face(const DoubledGraph& g);

// Lookup of the white id of a domain edge.
class EdgeIndex {
 public:
  explicit EdgeIndex(const DoubledGraph& g);
  int operator()(int u, int v) const;  // -1 if absent

 private:
  std::unordered_map<long long, int> map_;
};

DimerMatching temperley_matching(const LatticeDomain& d, const DoubledGraph& g,
                                 const SpanningTree& t);
SpanningTree tree_from_matching(const LatticeDomain& d, const DoubledGraph& g,
                                const DimerMatching& m);
// throws std::invalid_argument unless m covers every retained vertex once
void check_perfect(const DoubledGraph& g, const DimerMatching& m);

// Integer height on the bounded faces of the trimmed doubled graph. Faces
// are unions of the half-size squares cut out by the doubled graph; a
// square is named by its lower-left corner (X, Y) in half lattice units.
struct HeightFunction {
  std::unordered_map<long long, int> square_face;  // square -> face id
  std::vector<int> height;                         // face id -> height
  std::vector<std::array<int, 2>> squares;
  // height of the face containing square (X, Y); throws if outside
  int at(int X, int Y) const;
  bool has(int X, int Y) const { return square_face.count(cell_key(X, Y)) > 0; }
};

// Crossing an edge with its black end on the left: -3 if matched, +1 if not.
HeightFunction height_function(const LatticeDomain& d, const DoubledGraph& g,
                               const DimerMatching& m);

void write_tree_csv(const LatticeDomain& d, const SpanningTree& t, const std::string& path);
void write_matching_csv(const LatticeDomain& d, const DoubledGraph& g, const DimerMatching& m,
                        const std::string& path);
void write_height_csv(const HeightFunction& h, const std::string& path);

}  // namespace sgl
