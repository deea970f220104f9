#include "sgl/ust.hpp"

#include <fstream>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "sgl/linalg.hpp"

namespace sgl {

namespace {

int random_neighbor(const LatticeDomain& d, int v, Rng& rng) {
  const auto& nb = d.neighbors(v);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(nb.size()) - 1);
  return nb[pick(rng)];
}

long long edge_key(int u, int v) { return cell_key(std::min(u, v), std::max(u, v)); }

}  // namespace

SpanningTree wilson_ust(const LatticeDomain& d, Rng& rng) {
  const int n = d.n_interior();
  std::vector<char> in_tree(d.n_vertices(), 0);
  for (int v = n; v < d.n_vertices(); ++v) in_tree[v] = 1;
  std::vector<int> next(n, -1);
  for (int start = 0; start < n; ++start) {
    int v = start;
    while (!in_tree[v]) {
      next[v] = random_neighbor(d, v, rng);
      v = next[v];
    }
    for (v = start; !in_tree[v]; v = next[v]) in_tree[v] = 1;
  }
  return SpanningTree{next};
}

std::vector<int> lerw_branch(const LatticeDomain& d, int y, Rng& rng) {
  if (y < 0 || y >= d.n_interior()) throw std::invalid_argument("lerw_branch: y must be interior");
  std::vector<int> path{y};
  std::vector<int> pos(d.n_vertices(), -1);
  pos[y] = 0;
  int v = y;
  while (!d.is_boundary(v)) {
    v = random_neighbor(d, v, rng);
    if (pos[v] >= 0) {
      for (size_t k = pos[v] + 1; k < path.size(); ++k) pos[path[k]] = -1;
      path.resize(pos[v] + 1);
    } else {
      pos[v] = static_cast<int>(path.size());
      path.push_back(v);
    }
  }
  return path;
}

double lerw_log_partition(const LatticeDomain& d, int x, int y) {
  if (y < 0 || y >= d.n_interior()) throw std::invalid_argument("lerw_log_partition: y must be interior");
  Eigen::VectorXd bv = Eigen::VectorXd::Zero(d.n_boundary());
  bv[d.boundary_index(x)] = 1;
  double harm = harmonic_extension(d, bv)[y];
  if (!(harm > 0)) return -std::numeric_limits<double>::infinity();
  return logdet(laplacian(d)) + std::log(harm);
}

std::vector<int> tree_branch(const LatticeDomain& d, const SpanningTree& t, int y) {
  std::vector<int> path{y};
  while (!d.is_boundary(path.back())) {
    if (path.size() > t.parent.size() + 1) throw std::invalid_argument("tree has a cycle");
    path.push_back(t.parent[path.back()]);
  }
  return path;
}

int temperley_root_face(const DoubledGraph& g) {
  int best = 0;
  for (int f = 1; f < static_cast<int>(g.faces.size()); ++f) {
    auto a = g.faces[f], b = g.faces[best];
    if (std::pair(a[1], a[0]) < std::pair(b[1], b[0])) best = f;
  }
  return g.face_black(best);
}

EdgeIndex::EdgeIndex(const DoubledGraph& g) {
  for (int e = 0; e < g.n_white(); ++e)
    map_[edge_key(g.primal_edges[e].u, g.primal_edges[e].v)] = e;
}

int EdgeIndex::operator()(int u, int v) const {
  auto it = map_.find(edge_key(u, v));
  return it == map_.end() ? -1 : it->second;
}

DimerMatching temperley_matching(const LatticeDomain& d, const DoubledGraph& g,
                                 const SpanningTree& t) {
  const int n = d.n_interior();
  if (static_cast<int>(t.parent.size()) != n) throw std::invalid_argument("tree size mismatch");
  EdgeIndex index(g);
  DimerMatching m;
  m.white_mate.assign(g.n_white(), -1);
  m.black_mate.assign(g.n_black(), -1);
  m.removed_face = temperley_root_face(g);
  std::vector<char> tree_edge(g.n_white(), 0);
  for (int v = 0; v < n; ++v) {
    int e = index(v, t.parent[v]);
    if (e < 0 || tree_edge[e]) throw std::invalid_argument("not a spanning tree");
    tree_edge[e] = 1;
    m.black_mate[v] = e;
    m.white_mate[e] = v;
  }
  for (int v = 0; v < n; ++v) tree_branch(d, t, v);

  // the dual edges of the remaining edges form a tree on the plaquettes
  std::vector<char> seen(g.n_black(), 0);
  std::queue<int> q;
  q.push(m.removed_face);
  seen[m.removed_face] = 1;
  int used = 0;
  while (!q.empty()) {
    int f = q.front();
    q.pop();
    for (int e : g.black_nbr[f]) {
      if (tree_edge[e]) continue;
      int h = g.white_nbr[e][2] == f ? g.white_nbr[e][3] : g.white_nbr[e][2];
      if (seen[h]) continue;
      seen[h] = 1;
      m.black_mate[h] = e;
      m.white_mate[e] = h;
      ++used;
      q.push(h);
    }
  }
  if (used != static_cast<int>(g.faces.size()) - 1 || used != g.n_white() - n)
    throw std::logic_error("complement of the tree is not a dual spanning tree");
  return m;
}

SpanningTree tree_from_matching(const LatticeDomain& d, const DoubledGraph& g,
                                const DimerMatching& m) {
  const int n = d.n_interior();
  SpanningTree t;
  t.parent.resize(n);
  for (int v = 0; v < n; ++v) {
    int e = m.black_mate[v];
    if (e < 0) throw std::invalid_argument("vertex is unmatched");
    auto [a, b] = g.primal_edges[e];
    t.parent[v] = a == v ? b : a;
  }
  return t;
}

void check_perfect(const DoubledGraph& g, const DimerMatching& m) {
  if (static_cast<int>(m.white_mate.size()) != g.n_white() ||
      static_cast<int>(m.black_mate.size()) != g.n_black())
    throw std::invalid_argument("matching size mismatch");
  for (int b = 0; b < g.n_black(); ++b) {
    bool removed = b == g.root || b == m.removed_face;
    if (removed != (m.black_mate[b] < 0)) throw std::invalid_argument("matching is not perfect");
    if (!removed && m.white_mate[m.black_mate[b]] != b)
      throw std::invalid_argument("matching is inconsistent");
  }
  for (int w = 0; w < g.n_white(); ++w) {
    int b = m.white_mate[w];
    if (b < 0 || m.black_mate[b] != w) throw std::invalid_argument("matching is not perfect");
  }
}

int HeightFunction::at(int X, int Y) const {
  auto it = square_face.find(cell_key(X, Y));
  if (it == square_face.end()) throw std::out_of_range("square is not in a bounded face");
  return height[it->second];
}

namespace {

struct Side {
  int black = -1, white = -1;  // -1 when the side is not a retained edge
  std::array<int, 2> black_pt{};
};

// classify the segment between two half-unit points
Side side_edge(const LatticeDomain& d, const DoubledGraph& g, const EdgeIndex& index,
               const DimerMatching& m, std::array<int, 2> p, std::array<int, 2> q) {
  auto parity = [](std::array<int, 2> a) { return std::array<int, 2>{a[0] & 1, a[1] & 1}; };
  std::array<int, 2> bp = p, wp = q;
  if ((parity(p)[0] ^ parity(p)[1]) == 1) std::swap(bp, wp);
  Side s;
  s.black_pt = bp;
  int black;
  if ((bp[0] & 1) == 0) {
    black = d.vertex_at(bp[0] / 2, bp[1] / 2);
    if (black < 0 || d.is_boundary(black)) return s;
  } else {
    int f = g.find_face((bp[0] - 1) / 2, (bp[1] - 1) / 2);
    if (f < 0) return s;
    black = g.face_black(f);
    if (black == m.removed_face) return s;
  }
  int u, v;
  if (wp[0] & 1) {
    u = d.vertex_at((wp[0] - 1) / 2, wp[1] / 2);
    v = d.vertex_at((wp[0] + 1) / 2, wp[1] / 2);
  } else {
    u = d.vertex_at(wp[0] / 2, (wp[1] - 1) / 2);
    v = d.vertex_at(wp[0] / 2, (wp[1] + 1) / 2);
  }
  if (u < 0 || v < 0) return s;
  int e = index(u, v);
  if (e < 0) return s;
  s.black = black;
  s.white = e;
  return s;
}

int find_root(std::vector<int>& p, int x) {
  while (p[x] != x) x = p[x] = p[p[x]];
  return x;
}

}  // namespace

HeightFunction height_function(const LatticeDomain& d, const DoubledGraph& g,
                               const DimerMatching& m) {
  check_perfect(g, m);
  EdgeIndex index(g);
  HeightFunction h;
  std::unordered_map<long long, int> sq;
  std::vector<std::array<int, 2>> squares;
  for (auto f : g.faces)
    for (int a = 0; a <= 1; ++a)
      for (int b = 0; b <= 1; ++b) {
        sq[cell_key(2 * f[0] + a, 2 * f[1] + b)] = static_cast<int>(squares.size());
        squares.push_back({2 * f[0] + a, 2 * f[1] + b});
      }
  const int ns = static_cast<int>(squares.size());
  const int outer = ns;
  std::vector<int> uf(ns + 1);
  std::iota(uf.begin(), uf.end(), 0);

  // neighbour direction k: right, up, left, down; side endpoints in half units
  const int dx[4] = {1, 0, -1, 0}, dy[4] = {0, 1, 0, -1};
  auto side_pts = [](std::array<int, 2> s, int k) {
    int X = s[0], Y = s[1];
    switch (k) {
      case 0: return std::array<std::array<int, 2>, 2>{{{X + 1, Y}, {X + 1, Y + 1}}};
      case 1: return std::array<std::array<int, 2>, 2>{{{X, Y + 1}, {X + 1, Y + 1}}};
      case 2: return std::array<std::array<int, 2>, 2>{{{X, Y}, {X, Y + 1}}};
      default: return std::array<std::array<int, 2>, 2>{{{X, Y}, {X + 1, Y}}};
    }
  };
  auto neighbor = [&](int s, int k) {
    auto it = sq.find(cell_key(squares[s][0] + dx[k], squares[s][1] + dy[k]));
    return it == sq.end() ? outer : it->second;
  };

  std::vector<std::array<Side, 4>> sides(ns);
  for (int s = 0; s < ns; ++s)
    for (int k = 0; k < 4; ++k) {
      auto pts = side_pts(squares[s], k);
      sides[s][k] = side_edge(d, g, index, m, pts[0], pts[1]);
      if (sides[s][k].white < 0) uf[find_root(uf, s)] = find_root(uf, neighbor(s, k));
    }

  // bounded faces are the classes not merged with the outside
  std::vector<int> face_of_class(ns + 1, -1);
  int base_sq = -1;
  for (int s = 0; s < ns; ++s) {
    int c = find_root(uf, s);
    if (c == find_root(uf, outer)) continue;
    if (face_of_class[c] < 0) {
      face_of_class[c] = static_cast<int>(h.height.size());
      h.height.push_back(0);
    }
    h.square_face[cell_key(squares[s][0], squares[s][1])] = face_of_class[c];
    h.squares.push_back(squares[s]);
    if (base_sq < 0 || std::pair(squares[s][1], squares[s][0]) <
                           std::pair(squares[base_sq][1], squares[base_sq][0]))
      base_sq = s;
  }
  if (base_sq < 0) return h;

  std::vector<std::vector<int>> members(h.height.size());
  for (int s = 0; s < ns; ++s) {
    int c = find_root(uf, s);
    if (c != find_root(uf, outer)) members[face_of_class[c]].push_back(s);
  }
  std::vector<char> done(h.height.size(), 0);
  std::queue<int> q;
  int base = face_of_class[find_root(uf, base_sq)];
  done[base] = 1;
  q.push(base);
  while (!q.empty()) {
    int f = q.front();
    q.pop();
    for (int s : members[f])
      for (int k = 0; k < 4; ++k) {
        const Side& e = sides[s][k];
        if (e.white < 0) continue;
        int t = neighbor(s, k);
        if (t == outer || find_root(uf, t) == find_root(uf, outer)) continue;
        int ft = face_of_class[find_root(uf, t)];
        // black on the left of the crossing direction?
        double mx = 0, my = 0;
        auto pts = side_pts(squares[s], k);
        mx = 0.5 * (pts[0][0] + pts[1][0]);
        my = 0.5 * (pts[0][1] + pts[1][1]);
        double cross = dx[k] * (e.black_pt[1] - my) - dy[k] * (e.black_pt[0] - mx);
        bool matched = m.white_mate[e.white] == e.black;
        int inc = matched ? -3 : 1;
        if (cross < 0) inc = -inc;
        if (!done[ft]) {
          done[ft] = 1;
          h.height[ft] = h.height[f] + inc;
          q.push(ft);
        } else if (h.height[ft] != h.height[f] + inc) {
          throw std::invalid_argument("height function is not well defined");
        }
      }
  }
  for (char c : done)
    if (!c) throw std::logic_error("bounded faces are not connected");
  return h;
}

void write_tree_csv(const LatticeDomain& d, const SpanningTree& t, const std::string& path) {
  std::ofstream out(path);
  out << "x0,y0,x1,y1\n";
  for (int v = 0; v < static_cast<int>(t.parent.size()); ++v) {
    cplx a = d.position(v), b = d.position(t.parent[v]);
    out << a.real() << ',' << a.imag() << ',' << b.real() << ',' << b.imag() << '\n';
  }
}

void write_matching_csv(const LatticeDomain& d, const DoubledGraph& g, const DimerMatching& m,
                        const std::string& path) {
  std::ofstream out(path);
  out << "x0,y0,x1,y1\n";
  for (int w = 0; w < g.n_white(); ++w) {
    auto [u, v] = g.primal_edges[w];
    cplx mid = 0.5 * (d.position(u) + d.position(v));
    int b = m.white_mate[w];
    cplx pb;
    if (b < g.n_interior) {
      pb = d.position(b);
    } else {
      auto f = g.faces[b - g.n_interior - 1];
      pb = cplx(f[0] + 0.5, f[1] + 0.5);
    }
    out << mid.real() << ',' << mid.imag() << ',' << pb.real() << ',' << pb.imag() << '\n';
  }
}

void write_height_csv(const HeightFunction& h, const std::string& path) {
  std::ofstream out(path);
  out << "x,y,height\n";
  for (auto s : h.squares)
    out << 0.5 * s[0] + 0.25 << ',' << 0.5 * s[1] + 0.25 << ',' << h.at(s[0], s[1]) << '\n';
}

}  // namespace sgl
