#include "sgl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <stdexcept>

namespace sgl {

namespace {

bool interior_connected(int n, const std::vector<std::vector<int>>& nbr) {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : nbr[v])
      if (w < n && !seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n;
}

}  // namespace

const std::vector<std::array<int, 2>>& LatticeDomain::directions(LatticeKind k) {
  static const std::vector<std::array<int, 2>> sq{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  static const std::vector<std::array<int, 2>> tri{{1, 0}, {0, 1}, {-1, 1},
                                                   {-1, 0}, {0, -1}, {1, -1}};
  static const std::vector<std::array<int, 2>> none;
  switch (k) {
    case LatticeKind::square: return sq;
    case LatticeKind::triangular: return tri;
    default: return none;
  }
}

cplx lattice_position(LatticeKind k, int i, int j) {
  if (k == LatticeKind::triangular)
    return {i + 0.5 * j, j * std::sqrt(3.0) / 2.0};
  return {static_cast<double>(i), static_cast<double>(j)};
}

LatticeDomain LatticeDomain::square(const Mask& mask, double mesh) {
  return from_mask(LatticeKind::square, mask, mesh);
}

LatticeDomain LatticeDomain::triangular(const Mask& mask, double mesh) {
  return from_mask(LatticeKind::triangular, mask, mesh);
}

LatticeDomain LatticeDomain::from_mask(LatticeKind kind, const Mask& mask, double mesh) {
  if (mesh <= 0) throw std::invalid_argument("mesh must be positive");
  const auto& dirs = directions(kind);
  const int k = static_cast<int>(dirs.size());

  std::vector<std::array<int, 2>> cells;
  std::unordered_map<long long, int> index;
  for (int r = 0; r < static_cast<int>(mask.size()); ++r)
    for (int c = 0; c < static_cast<int>(mask[r].size()); ++c)
      if (mask[r][c]) {
        index[cell_key(c, r)] = static_cast<int>(cells.size());
        cells.push_back({c, r});
      }
  const int n = static_cast<int>(cells.size());
  if (n == 0) throw std::invalid_argument("empty mask");

  auto inside = [&](int i, int j) { return index.count(cell_key(i, j)) > 0; };

  {
    std::vector<std::vector<int>> nb(n);
    for (int v = 0; v < n; ++v)
      for (auto [di, dj] : dirs) {
        auto it = index.find(cell_key(cells[v][0] + di, cells[v][1] + dj));
        if (it != index.end()) nb[v].push_back(it->second);
      }
    if (!interior_connected(n, nb)) throw std::invalid_argument("mask is disconnected");
  }

  // Walk the contour of the union of cells with the interior on the left.
  // A state (v, d) is the cell face between interior v and exterior v + e_d.
  int total_faces = 0;
  for (auto& c : cells)
    for (auto [di, dj] : dirs)
      if (!inside(c[0] + di, c[1] + dj)) ++total_faces;

  const int down = kind == LatticeKind::square ? 3 : 4;
  std::array<int, 2> v0 = cells[0];
  int d0 = down;
  std::array<int, 2> v = v0;
  int d = d0;
  std::vector<std::array<int, 2>> ext;
  int visited = 0;
  auto add = [](std::array<int, 2> a, std::array<int, 2> b) {
    return std::array<int, 2>{a[0] + b[0], a[1] + b[1]};
  };
  do {
    ext.push_back(add(v, dirs[d]));
    ++visited;
    if (visited > total_faces) break;
    int dn = (d + 1) % k;
    auto w1 = add(v, dirs[dn]);
    if (!inside(w1[0], w1[1])) {
      d = dn;
    } else if (kind == LatticeKind::square) {
      auto w2 = add(w1, dirs[d]);
      if (!inside(w2[0], w2[1])) {
        v = w1;
      } else {
        v = w2;
        d = (d + k - 1) % k;
      }
    } else {
      v = w1;
      d = (d + k - 1) % k;
    }
  } while (!(v == v0 && d == d0));
  if (visited != total_faces) throw std::invalid_argument("mask has holes");

  std::vector<std::array<int, 2>> order;
  for (auto& e : ext)
    if (order.empty() || order.back() != e) order.push_back(e);
  while (order.size() > 1 && order.back() == order.front()) order.pop_back();
  {
    std::set<std::array<int, 2>> s(order.begin(), order.end());
    if (s.size() != order.size())
      throw std::invalid_argument("boundary is not a simple cycle (pinched region)");
  }

  LatticeDomain dom;
  dom.kind_ = kind;
  dom.mesh_ = mesh;
  dom.n_interior_ = n;
  dom.cell_ = cells;
  dom.cell_.insert(dom.cell_.end(), order.begin(), order.end());
  for (int i = 0; i < static_cast<int>(dom.cell_.size()); ++i) {
    dom.cell_index_[cell_key(dom.cell_[i][0], dom.cell_[i][1])] = i;
    dom.pos_.push_back(lattice_position(kind, dom.cell_[i][0], dom.cell_[i][1]));
  }
  dom.nbr_.resize(dom.cell_.size());
  for (int u = 0; u < dom.n_vertices(); ++u)
    for (auto dd : dirs) {
      int w = dom.vertex_at(dom.cell_[u][0] + dd[0], dom.cell_[u][1] + dd[1]);
      if (u < n) {
        if (w < 0) throw std::logic_error("interior vertex with missing neighbour");
        dom.nbr_[u].push_back(w);
      } else if (w >= 0 && w < n) {
        dom.nbr_[u].push_back(w);
      }
    }
  dom.build_edges();
  return dom;
}

LatticeDomain LatticeDomain::from_graph(const std::vector<cplx>& pos,
                                        const std::vector<Edge>& edges,
                                        const std::vector<bool>& boundary,
                                        const std::vector<int>& boundary_order) {
  const int nv = static_cast<int>(pos.size());
  if (static_cast<int>(boundary.size()) != nv)
    throw std::invalid_argument("boundary flags do not match vertex count");
  std::vector<int> order_old;
  for (int i = 0; i < nv; ++i)
    if (!boundary[i]) order_old.push_back(i);
  const int n = static_cast<int>(order_old.size());
  if (boundary_order.empty()) {
    for (int i = 0; i < nv; ++i)
      if (boundary[i]) order_old.push_back(i);
  } else {
    for (int b : boundary_order) {
      if (b < 0 || b >= nv || !boundary[b])
        throw std::invalid_argument("boundary_order lists a non-boundary vertex");
      order_old.push_back(b);
    }
  }
  if (static_cast<int>(order_old.size()) != nv)
    throw std::invalid_argument("boundary_order must list every boundary vertex once");
  std::vector<int> newid(nv, -1);
  for (int i = 0; i < nv; ++i) {
    if (newid[order_old[i]] >= 0) throw std::invalid_argument("repeated boundary vertex");
    newid[order_old[i]] = i;
  }

  LatticeDomain dom;
  dom.kind_ = LatticeKind::custom;
  dom.n_interior_ = n;
  dom.pos_.resize(nv);
  dom.cell_.resize(nv);
  dom.nbr_.resize(nv);
  for (int i = 0; i < nv; ++i) {
    dom.pos_[newid[i]] = pos[i];
    dom.cell_[newid[i]] = {i, 0};
    dom.cell_index_[cell_key(i, 0)] = newid[i];
  }
  for (auto e : edges) {
    int a = newid.at(e.u), b = newid.at(e.v);
    if (a >= n && b >= n) continue;
    dom.nbr_[a].push_back(b);
    dom.nbr_[b].push_back(a);
  }
  if (!interior_connected(n, dom.nbr_))
    throw std::invalid_argument("interior subgraph is disconnected");
  dom.build_edges();
  return dom;
}

void LatticeDomain::build_edges() {
  edges_.clear();
  for (int u = 0; u < n_interior_; ++u)
    for (int w : nbr_[u])
      if (w >= n_interior_ || u < w) edges_.push_back({u, w});
}

int LatticeDomain::vertex_at(int i, int j) const {
  auto it = cell_index_.find(cell_key(i, j));
  return it == cell_index_.end() ? -1 : it->second;
}

std::vector<int> LatticeDomain::boundary_order() const {
  std::vector<int> o(n_boundary());
  for (int k = 0; k < n_boundary(); ++k) o[k] = n_interior_ + k;
  return o;
}

int LatticeDomain::boundary_index(int v) const {
  if (v < n_interior_ || v >= n_vertices())
    throw std::invalid_argument("not a boundary vertex");
  return v - n_interior_;
}

int LatticeDomain::boundary_at(int k) const {
  int m = n_boundary();
  return n_interior_ + ((k % m) + m) % m;
}

int LatticeDomain::marked(const std::string& name) const {
  auto it = marked_.find(name);
  if (it == marked_.end()) throw std::invalid_argument("no marked point '" + name + "'");
  return it->second;
}

double LatticeDomain::turning(int v) const {
  int k = boundary_index(v);
  if (n_boundary() < 3) return 0.0;
  cplx a = pos_[boundary_at(k - 1)], b = pos_[v], c = pos_[boundary_at(k + 1)];
  return std::arg((c - b) / (b - a));
}

double LatticeDomain::boundary_winding(int from, int to) const {
  int i = boundary_index(from), j = boundary_index(to);
  int m = n_boundary();
  double s = 0;
  for (int k = 1; k <= (j - i + m) % m; ++k) s += turning(boundary_at(i + k));
  return s;
}

double LatticeDomain::total_winding() const {
  double s = 0;
  for (int k = 0; k < n_boundary(); ++k) s += turning(boundary_at(k));
  return s;
}

LatticeDomain domain_from_json(const nlohmann::json& j) {
  std::string lat = j.value("lattice", "square");
  Mask mask = j.at("mask").get<Mask>();
  double mesh = j.value("mesh", 1.0);
  LatticeDomain d = lat == "triangular"  ? LatticeDomain::triangular(mask, mesh)
                    : lat == "square"    ? LatticeDomain::square(mask, mesh)
                    : throw std::invalid_argument("unknown lattice '" + lat + "'");
  if (j.contains("marked"))
    for (auto& [name, ij] : j.at("marked").items()) {
      int v = d.vertex_at(ij.at(0).get<int>(), ij.at(1).get<int>());
      if (v < 0) throw std::invalid_argument("marked point '" + name + "' is not a vertex");
      d.mark(name, v);
    }
  return d;
}

Cut split_by_cut(const LatticeDomain& d, const std::vector<int>& delta, bool allow_multi) {
  const int n = d.n_interior();
  std::vector<int> label(n, -1);
  for (int v : delta) {
    if (v < 0 || v >= n) throw std::invalid_argument("cut vertex is not interior");
    if (label[v] == -2) throw std::invalid_argument("repeated cut vertex");
    label[v] = -2;
  }
  std::vector<std::vector<int>> comps;
  for (int s = 0; s < n; ++s) {
    if (label[s] != -1) continue;
    int c = static_cast<int>(comps.size());
    comps.emplace_back();
    std::queue<int> q;
    q.push(s);
    label[s] = c;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      comps[c].push_back(v);
      for (int w : d.neighbors(v))
        if (w < n && label[w] == -1) {
          label[w] = c;
          q.push(w);
        }
    }
  }
  if (comps.size() < 2 && !(allow_multi || comps.empty()))
    throw std::invalid_argument("cut does not separate the domain");
  if (comps.size() > 2 && !allow_multi)
    throw std::invalid_argument("cut leaves more than two components");

  auto mean_x = [&](const std::vector<int>& c) {
    double s = 0;
    for (int v : c) s += d.position(v).real();
    return s / c.size();
  };
  std::stable_sort(comps.begin(), comps.end(),
                   [&](auto& a, auto& b) { return mean_x(a) < mean_x(b); });
  for (auto& c : comps) std::sort(c.begin(), c.end());

  // exhaustive separation check
  for (int i = 0; i < static_cast<int>(comps.size()); ++i)
    for (int v : comps[i]) label[v] = i;
  for (auto e : d.edges())
    if (e.u < n && e.v < n && label[e.u] >= 0 && label[e.v] >= 0 && label[e.u] != label[e.v])
      throw std::logic_error("cut components are adjacent");

  Cut cut;
  cut.delta = delta;
  cut.components = std::move(comps);
  if (cut.components.size() == 1 && !allow_multi) cut.components.emplace_back();
  return cut;
}

int DoubledGraph::find_face(int i, int j) const {
  auto it = face_index.find(cell_key(i, j));
  return it == face_index.end() ? -1 : it->second;
}

DoubledGraph double_graph(const LatticeDomain& d) {
  if (d.kind() != LatticeKind::square)
    throw std::invalid_argument("double_graph: only square-lattice domains are supported");
  DoubledGraph g;
  const int n = d.n_interior();
  g.n_interior = n;
  g.root = n;

  for (int v = 0; v < n; ++v) {
    auto [i, j] = d.cell(v);
    for (int a = -1; a <= 0; ++a)
      for (int b = -1; b <= 0; ++b) {
        long long key = cell_key(i + a, j + b);
        if (!g.face_index.count(key)) {
          g.face_index[key] = static_cast<int>(g.faces.size());
          g.faces.push_back({i + a, j + b});
        }
      }
  }
  g.primal_edges = d.edges();
  g.white_nbr.resize(g.primal_edges.size());
  g.black_nbr.assign(g.n_black(), {});
  for (int e = 0; e < g.n_white(); ++e) {
    auto [u, v] = g.primal_edges[e];
    auto cu = d.cell(u), cv = d.cell(v);
    int lo_i = std::min(cu[0], cv[0]), lo_j = std::min(cu[1], cv[1]);
    int fa, fb;
    if (cu[1] == cv[1]) {  // horizontal
      fa = g.find_face(lo_i, lo_j);
      fb = g.find_face(lo_i, lo_j - 1);
    } else {
      fa = g.find_face(lo_i, lo_j);
      fb = g.find_face(lo_i - 1, lo_j);
    }
    if (fa < 0 || fb < 0) throw std::logic_error("edge without two faces");
    std::array<int, 4> nb{u < n ? u : g.root, v < n ? v : g.root, g.face_black(fa),
                          g.face_black(fb)};
    g.white_nbr[e] = nb;
    for (int b : nb) g.black_nbr[b].push_back(e);
  }

  g.interior_vertices = n;
  for (auto e : g.primal_edges)
    if (e.u < n && e.v < n) ++g.interior_edges;
  for (auto f : g.faces) {
    bool all = true;
    for (int a = 0; a <= 1; ++a)
      for (int b = 0; b <= 1; ++b) {
        int w = d.vertex_at(f[0] + a, f[1] + b);
        all = all && w >= 0 && w < n;
      }
    if (all) ++g.interior_faces;
  }
  return g;
}

Mask rectangle_mask(int rows, int cols) {
  return Mask(rows, std::vector<int>(cols, 1));
}

}  // namespace sgl
