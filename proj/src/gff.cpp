#include "sgl/gff.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <queue>
#include <set>
#include <stdexcept>

namespace sgl {

using std::numbers::pi;

ABBoundary ab_boundary_values(const LatticeDomain& d, const std::vector<int>& marked,
                              const std::vector<double>& a, double b, int anchor) {
  if (marked.size() != a.size() + 1)
    throw std::invalid_argument("need one jump coefficient per x_i plus the point y");
  for (int v : marked) d.boundary_index(v);
  d.boundary_index(anchor);
  if (std::find(marked.begin(), marked.end(), anchor) != marked.end())
    throw std::invalid_argument("anchor coincides with a marked point");

  ABBoundary r{a, b, anchor, marked, Eigen::VectorXd::Zero(d.n_boundary())};
  double asum = 0;
  for (double ai : a) asum += ai;
  auto jump_after = [&](int v) {
    for (size_t i = 0; i < a.size(); ++i)
      if (marked[i] == v) return pi * a[i];
    if (marked.back() == v) return -pi * asum - 2 * pi * b;
    return 0.0;
  };
  const int m = d.n_boundary();
  const int k0 = d.boundary_index(anchor);
  for (int k = 1; k < m; ++k) {
    int prev = d.boundary_at(k0 + k - 1), v = d.boundary_at(k0 + k);
    r.resolved[d.boundary_index(v)] =
        r.resolved[d.boundary_index(prev)] + b * d.turning(v) + jump_after(prev);
  }
  return r;
}

Eigen::VectorXd two_arc_boundary(const LatticeDomain& d, int x, int y, double lambda) {
  const int m = d.n_boundary();
  const int kx = d.boundary_index(x), ky = d.boundary_index(y);
  Eigen::VectorXd bv(m);
  for (int k = 0; k < m; ++k) {
    int off = (k - kx + m) % m, yoff = (ky - kx + m) % m;
    bv[k] = (off >= 1 && off <= yoff) ? lambda : -lambda;
  }
  return bv;
}

GffSampler::GffSampler(const LatticeDomain& d, const Eigen::VectorXd& bv)
    : fact_(laplacian(d)), boundary_(bv) {
  mean_ = fact_.solve(boundary_flux(d, bv));
}

FieldSample GffSampler::sample(Rng& rng) const {
  FieldSample s;
  s.mean = mean_;
  s.boundary = boundary_;
  s.interior = mean_ + fact_.correlate(standard_normal(rng, fact_.n()));
  return s;
}

FieldSample sample_gff(const LatticeDomain& d, const Eigen::VectorXd& bv, Rng& rng) {
  return GffSampler(d, bv).sample(rng);
}

double dirichlet_energy(const LatticeDomain& d, const Eigen::VectorXd& in,
                        const Eigen::VectorXd& bv) {
  auto val = [&](int v) { return d.is_boundary(v) ? bv[d.boundary_index(v)] : in[v]; };
  double e = 0;
  for (auto [u, v] : d.edges()) {
    double t = val(u) - val(v);
    e += t * t;
  }
  return e;
}

double log_partition_fn(const LatticeDomain& d, const Eigen::VectorXd& bv) {
  Factorization f(laplacian(d));
  Eigen::VectorXd m = f.solve(boundary_flux(d, bv));
  return -0.5 * f.logdet() - 0.5 * dirichlet_energy(d, m, bv);
}

MarkovDecomposer::MarkovDecomposer(const LatticeDomain& d, const Cut& cut) : d_(&d), cut_(cut) {
  std::vector<int> dpos(d.n_interior(), -1);
  for (size_t i = 0; i < cut.delta.size(); ++i) dpos[cut.delta[i]] = static_cast<int>(i);
  for (const auto& comp : cut.components) {
    facts_.emplace_back(laplacian(d, comp));
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(comp.size(), cut.delta.size());
    for (size_t i = 0; i < comp.size(); ++i)
      for (int w : d.neighbors(comp[i]))
        if (w < d.n_interior() && dpos[w] >= 0) B(i, dpos[w]) += 1;
    coupling_.push_back(std::move(B));
  }
}

Eigen::VectorXd MarkovDecomposer::trace(const Eigen::VectorXd& in) const {
  Eigen::VectorXd w(cut_.delta.size());
  for (size_t i = 0; i < cut_.delta.size(); ++i) w[i] = in[cut_.delta[i]];
  return w;
}

MarkovParts MarkovDecomposer::operator()(const Eigen::VectorXd& in) const {
  const int n = d_->n_interior();
  MarkovParts p{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  Eigen::VectorXd w = trace(in);
  for (size_t i = 0; i < cut_.delta.size(); ++i) p.pw[cut_.delta[i]] = w[i];
  for (size_t c = 0; c < cut_.components.size(); ++c) {
    const auto& comp = cut_.components[c];
    if (comp.empty()) continue;
    Eigen::VectorXd ext = facts_[c].solve(Eigen::VectorXd(coupling_[c] * w));
    Eigen::VectorXd& rest = c == 0 ? p.phi_l : p.phi_r;
    for (size_t i = 0; i < comp.size(); ++i) {
      p.pw[comp[i]] = ext[i];
      rest[comp[i]] = in[comp[i]] - ext[i];
    }
  }
  return p;
}

MarkovParts markov_decompose(const LatticeDomain& d, const FieldSample& s, const Cut& cut) {
  return MarkovDecomposer(d, cut)(s.interior);
}

namespace {

Eigen::MatrixXd sym_sqrt(const DenseSym& Q, bool inverse = false) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Q + Q.transpose()));
  if (es.eigenvalues().minCoeff() <= 0) throw std::invalid_argument("matrix is not positive definite");
  Eigen::VectorXd s = es.eigenvalues().array().sqrt();
  if (inverse) s = s.cwiseInverse();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double log_gaussian_quadratic_integral(const DenseSym& M, const Eigen::VectorXd& m,
                                       const DenseSym& Q) {
  const int n = static_cast<int>(Q.rows());
  if (M.rows() != n || m.size() != n) throw std::invalid_argument("size mismatch");
  if (n == 0) return 0;
  Eigen::MatrixXd R = sym_sqrt(Q);
  Eigen::MatrixXd A = R * M * R;
  Eigen::MatrixXd I_A = Eigen::MatrixXd::Identity(n, n) - 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(I_A);
  if (es.eigenvalues().minCoeff() <= 0)
    throw std::domain_error("spectral condition violated: 1 - Q^{1/2} M Q^{1/2} is not positive");
  Eigen::VectorXd u = es.eigenvectors().transpose() * (R * m);
  double quad = (u.array().square() / es.eigenvalues().array()).sum();
  return -0.5 * es.eigenvalues().array().log().sum() + 0.5 * quad;
}

double gaussian_quadratic_integral(const DenseSym& M, const Eigen::VectorXd& m,
                                   const DenseSym& Q) {
  return std::exp(log_gaussian_quadratic_integral(M, m, Q));
}

double cameron_martin_density(const Eigen::VectorXd& h, const Eigen::VectorXd& m,
                              const DenseSym& Q) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Q);
  Eigen::VectorXd qm = ldlt.solve(m);
  return std::exp(qm.dot(h) - 0.5 * qm.dot(m));
}

double rn_density_on_cut(const Eigen::VectorXd& w, const DenseSym& N1, const DenseSym& N2) {
  if (N1.rows() != N2.rows() || w.size() != N1.rows())
    throw std::invalid_argument("size mismatch");
  return std::exp(0.5 * (logdet(N2) - logdet(N1)) + 0.5 * w.dot((N1 - N2) * w));
}

double rn_density_covariance(const Eigen::VectorXd& h, const DenseSym& Q, const DenseSym& R) {
  const int n = static_cast<int>(Q.rows());
  Eigen::MatrixXd Qmh = sym_sqrt(Q, true);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n) - Qmh * R * Qmh;
  S = 0.5 * (S + S.transpose());
  Eigen::MatrixXd I_S = Eigen::MatrixXd::Identity(n, n) - S;
  Eigen::VectorXd u = Qmh * h;
  double quad = u.dot(S * I_S.ldlt().solve(u));
  return std::exp(-0.5 * logdet(I_S) - 0.5 * quad);
}

CouplingResult coupling_constant_check(const std::array<CutDomain, 4>& g) {
  std::array<Eigen::MatrixXd, 4> N;
  std::array<Eigen::VectorXd, 4> mu;
  std::array<double, 4> logZ{};
  for (int k = 0; k < 4; ++k) {
    const auto& gd = g[k];
    if (gd.delta != g[0].delta) throw std::invalid_argument("cut mismatch");
    std::vector<int> delta;
    for (auto [i, j] : gd.delta) {
      int v = gd.domain.vertex_at(i, j);
      if (v < 0 || gd.domain.is_boundary(v)) throw std::invalid_argument("cut mismatch");
      delta.push_back(v);
    }
    Cut cut = split_by_cut(gd.domain, delta, true);
    N[k] = neumann_jump(gd.domain, cut);
    Factorization f(laplacian(gd.domain));
    Eigen::VectorXd m = f.solve(boundary_flux(gd.domain, gd.boundary));
    mu[k].resize(delta.size());
    for (size_t i = 0; i < delta.size(); ++i) mu[k][i] = m[delta[i]];
    logZ[k] = -0.5 * f.logdet() - 0.5 * dirichlet_energy(gd.domain, m, gd.boundary);
  }
  // index: 0=11, 1=12, 2=21, 3=22
  Eigen::VectorXd d21 = mu[2] - mu[0], d12 = mu[1] - mu[0];
  Eigen::MatrixXd M = 2 * N[0] - N[2] - N[1];
  Eigen::VectorXd m = N[2] * d21 + N[1] * d12;
  double c = 0.5 * (logdet(N[2]) + logdet(N[1]) - 2 * logdet(N[0])) -
             0.5 * d21.dot(N[2] * d21) - 0.5 * d12.dot(N[1] * d12);
  CouplingResult r;
  r.log_lhs = c + log_gaussian_quadratic_integral(M, m, N[0].inverse());
  r.log_rhs = logZ[0] + logZ[3] - logZ[1] - logZ[2];
  r.lhs = std::exp(r.log_lhs);
  r.rhs = std::exp(r.log_rhs);
  r.residual = std::abs(std::expm1(r.log_lhs - r.log_rhs));
  return r;
}

std::array<CutDomain, 4> hybrid_domains(LatticeKind kind, const CouplingSide& s1,
                                        const CouplingSide& s2, int cut_col) {
  const int rows = static_cast<int>(std::max(s1.mask.size(), s2.mask.size()));
  auto cell = [](const Mask& m, int r, int c) {
    return r >= 0 && r < static_cast<int>(m.size()) && c >= 0 &&
                   c < static_cast<int>(m[r].size())
               ? m[r][c]
               : 0;
  };
  for (int r = -1; r <= rows; ++r)
    for (int c = cut_col - 1; c <= cut_col + 1; ++c) {
      if (cell(s1.mask, r, c) != cell(s2.mask, r, c)) throw std::invalid_argument("cut mismatch");
      if (std::abs(s1.boundary(c, r) - s2.boundary(c, r)) > 1e-12)
        throw std::invalid_argument("cut mismatch");
    }
  const CouplingSide* side[2] = {&s1, &s2};
  std::array<CutDomain, 4> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const CouplingSide& L = *side[i];
      const CouplingSide& R = *side[j];
      int cols = 0;
      for (int r = 0; r < rows; ++r)
        cols = std::max({cols, static_cast<int>(r < static_cast<int>(L.mask.size()) ? L.mask[r].size() : 0),
                         static_cast<int>(r < static_cast<int>(R.mask.size()) ? R.mask[r].size() : 0)});
      Mask m(rows, std::vector<int>(cols, 0));
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m[r][c] = c < cut_col ? cell(L.mask, r, c) : cell(R.mask, r, c);
      LatticeDomain dom = kind == LatticeKind::square ? LatticeDomain::square(m)
                                                      : LatticeDomain::triangular(m);
      Eigen::VectorXd bv(dom.n_boundary());
      for (int k = 0; k < dom.n_boundary(); ++k) {
        auto [ci, cj] = dom.cell(dom.boundary_at(k));
        bv[k] = ci < cut_col ? L.boundary(ci, cj) : R.boundary(ci, cj);
      }
      std::vector<std::array<int, 2>> delta;
      for (int r = 0; r < rows; ++r)
        if (cell(m, r, cut_col)) delta.push_back({cut_col, r});
      out[2 * i + j] = CutDomain{std::move(dom), std::move(bv), std::move(delta)};
    }
  return out;
}

Interface zero_level_interface(const LatticeDomain& d, const FieldSample& s, int start) {
  if (d.kind() != LatticeKind::triangular)
    throw std::invalid_argument("interface tracing needs a triangular-lattice domain");
  Interface itf;
  std::vector<char> positive(d.n_vertices());
  for (int v = 0; v < d.n_vertices(); ++v) {
    double x = s.value(d, v);
    if (x == 0) ++itf.perturbed;
    positive[v] = x >= 0;
  }

  const int m = d.n_boundary();
  const int k0 = d.boundary_index(start);
  int k = 0;
  while (k < m && !(!positive[d.boundary_at(k0 + k)] && positive[d.boundary_at(k0 + k + 1)])) ++k;
  if (k == m) throw std::invalid_argument("boundary has no sign change");
  int u = d.boundary_at(k0 + k + 1), v = d.boundary_at(k0 + k);

  const auto& dirs = LatticeDomain::directions(LatticeKind::triangular);
  auto dir_index = [&](int a, int b) {
    auto ca = d.cell(a), cb = d.cell(b);
    for (int i = 0; i < 6; ++i)
      if (ca[0] + dirs[i][0] == cb[0] && ca[1] + dirs[i][1] == cb[1]) return i;
    throw std::logic_error("interface vertices are not adjacent");
  };
  const int max_steps = 4 * d.n_vertices() + 8;
  for (int step = 0; step < max_steps; ++step) {
    itf.crossed.push_back({u, v});
    itf.path.push_back(0.5 * (d.position(u) + d.position(v)));
    int dv = dir_index(u, v);
    auto cu = d.cell(u);
    int w = d.vertex_at(cu[0] + dirs[(dv + 5) % 6][0], cu[1] + dirs[(dv + 5) % 6][1]);
    if (w < 0) return itf;
    if (positive[w])
      u = w;
    else
      v = w;
  }
  throw std::runtime_error("interface tracing did not terminate");
}

bool on_plus_side(const LatticeDomain& d, const Interface& itf, const FieldSample& s, int target) {
  std::set<std::pair<int, int>> blocked;
  for (auto e : itf.crossed) {
    blocked.insert({e.u, e.v});
    blocked.insert({e.v, e.u});
  }
  std::vector<char> seen(d.n_vertices(), 0);
  std::queue<int> q;
  for (int k = 0; k < d.n_boundary(); ++k) {
    int b = d.boundary_at(k);
    if (s.value(d, b) > 0) {
      seen[b] = 1;
      q.push(b);
    }
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (v == target) return true;
    for (int w : d.neighbors(v))
      if (!seen[w] && !blocked.count({v, w})) {
        seen[w] = 1;
        q.push(w);
      }
  }
  return false;
}

void write_field_csv(std::ostream& os, const LatticeDomain& d, const FieldSample& s) {
  os << "vertex,x,y,value,boundary\n" << std::setprecision(12);
  for (int v = 0; v < d.n_vertices(); ++v) {
    cplx p = d.mesh() * d.position(v);
    os << v << ',' << p.real() << ',' << p.imag() << ',' << s.value(d, v) << ','
       << (d.is_boundary(v) ? 1 : 0) << '\n';
  }
}

}  // namespace sgl
