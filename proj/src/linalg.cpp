#include "sgl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <stdexcept>

#include <gmpxx.h>

namespace sgl {

std::vector<int> nested_dissection(const std::vector<std::array<int, 2>>& coords) {
  std::vector<int> out;
  out.reserve(coords.size());
  std::function<void(std::vector<int>)> rec = [&](std::vector<int> idx) {
    if (idx.size() <= 32) {
      std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::pair(coords[a][1], coords[a][0]) < std::pair(coords[b][1], coords[b][0]);
      });
      out.insert(out.end(), idx.begin(), idx.end());
      return;
    }
    int lo[2] = {coords[idx[0]][0], coords[idx[0]][1]}, hi[2] = {lo[0], lo[1]};
    for (int v : idx)
      for (int a = 0; a < 2; ++a) {
        lo[a] = std::min(lo[a], coords[v][a]);
        hi[a] = std::max(hi[a], coords[v][a]);
      }
    int ax = (hi[0] - lo[0] >= hi[1] - lo[1]) ? 0 : 1;
    if (hi[ax] == lo[ax]) {
      std::sort(idx.begin(), idx.end());
      out.insert(out.end(), idx.begin(), idx.end());
      return;
    }
    std::vector<int> vals;
    for (int v : idx) vals.push_back(coords[v][ax]);
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    int mid = vals[vals.size() / 2];
    std::vector<int> l, r, s;
    for (int v : idx) {
      int c = coords[v][ax];
      (c < mid ? l : c > mid ? r : s).push_back(v);
    }
    if (l.empty() && r.empty()) {
      out.insert(out.end(), s.begin(), s.end());
      return;
    }
    rec(std::move(l));
    rec(std::move(r));
    std::sort(s.begin(), s.end());
    out.insert(out.end(), s.begin(), s.end());
  };
  std::vector<int> all(coords.size());
  for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i] = i;
  rec(std::move(all));
  return out;
}

Factorization::Factorization(const SparseSym& A) : n_(A.n()) {
  if (A.a.rows() != A.a.cols()) throw std::invalid_argument("matrix is not square");
  if (n_ == 0) return;
  order_ = static_cast<int>(A.coords.size()) == n_ ? nested_dissection(A.coords)
                                                    : std::vector<int>(n_);
  if (static_cast<int>(A.coords.size()) != n_)
    for (int i = 0; i < n_; ++i) order_[i] = i;
  std::vector<int> inv(n_);
  for (int p = 0; p < n_; ++p) inv[order_[p]] = p;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.a.nonZeros());
  for (int k = 0; k < A.a.outerSize(); ++k)
    for (SpMat::InnerIterator it(A.a, k); it; ++it)
      t.emplace_back(inv[it.row()], inv[it.col()], it.value());
  SpMat B(n_, n_);
  B.setFromTriplets(t.begin(), t.end());
  auto llt = std::make_shared<LLT>(B);
  if (llt->info() != Eigen::Success) throw std::runtime_error("matrix is not positive definite");
  logdet_ = 0;
  SpMat Lm = llt->matrixL();
  for (int i = 0; i < n_; ++i) {
    double p = Lm.coeff(i, i);
    if (!(p > 0)) throw std::runtime_error("matrix is not positive definite");
    logdet_ += 2 * std::log(p);
  }
  llt_ = std::move(llt);
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
  if (n_ == 0) return {};
  Eigen::VectorXd bp(n_);
  for (int p = 0; p < n_; ++p) bp[p] = b[order_[p]];
  Eigen::VectorXd y = llt_->solve(bp), x(n_);
  for (int p = 0; p < n_; ++p) x[order_[p]] = y[p];
  return x;
}

Eigen::MatrixXd Factorization::solve(const Eigen::MatrixXd& b) const {
  if (n_ == 0) return Eigen::MatrixXd(0, b.cols());
  Eigen::MatrixXd bp(n_, b.cols());
  for (int p = 0; p < n_; ++p) bp.row(p) = b.row(order_[p]);
  Eigen::MatrixXd y = llt_->solve(bp), x(n_, b.cols());
  for (int p = 0; p < n_; ++p) x.row(order_[p]) = y.row(p);
  return x;
}

Eigen::VectorXd Factorization::correlate(const Eigen::VectorXd& xi) const {
  if (n_ == 0) return {};
  Eigen::VectorXd y = llt_->matrixU().solve(xi), x(n_);
  for (int p = 0; p < n_; ++p) x[order_[p]] = y[p];
  return x;
}

SparseSym laplacian(const LatticeDomain& d, const std::vector<int>& rows) {
  const int m = static_cast<int>(rows.size());
  std::vector<int> pos(d.n_vertices(), -1);
  for (int i = 0; i < m; ++i) {
    if (rows[i] < 0 || rows[i] >= d.n_interior())
      throw std::invalid_argument("laplacian rows must be interior vertices");
    pos[rows[i]] = i;
  }
  std::vector<Eigen::Triplet<double>> t;
  SparseSym A;
  A.coords.resize(m);
  for (int i = 0; i < m; ++i) {
    int v = rows[i];
    A.coords[i] = d.cell(v);
    t.emplace_back(i, i, static_cast<double>(d.neighbors(v).size()));
    for (int w : d.neighbors(v))
      if (pos[w] >= 0) t.emplace_back(i, pos[w], -1.0);
  }
  A.a.resize(m, m);
  A.a.setFromTriplets(t.begin(), t.end());
  return A;
}

SparseSym laplacian(const LatticeDomain& d) {
  std::vector<int> rows(d.n_interior());
  for (int i = 0; i < d.n_interior(); ++i) rows[i] = i;
  return laplacian(d, rows);
}

SparseSym laplacian_without(const LatticeDomain& d, const std::vector<int>& removed) {
  std::vector<char> gone(d.n_interior(), 0);
  for (int v : removed) gone.at(v) = 1;
  std::vector<int> rows;
  for (int v = 0; v < d.n_interior(); ++v)
    if (!gone[v]) rows.push_back(v);
  return laplacian(d, rows);
}

double logdet(const SparseSym& A) { return Factorization(A).logdet(); }

double logdet(const DenseSym& A) {
  if (A.rows() == 0) return 0;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw std::runtime_error("matrix is not positive definite");
  return 2 * llt.matrixLLT().diagonal().array().log().sum();
}

namespace {

// fraction-free Gaussian elimination
mpz_class bareiss_det(std::vector<std::vector<mpz_class>> m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace

TreeCount spanning_tree_count(const LatticeDomain& d, bool rooted_at_boundary) {
  SparseSym A;
  if (rooted_at_boundary) {
    A = laplacian(d);
  } else {
    // full graph Laplacian with the last vertex deleted
    const int nv = d.n_vertices();
    std::vector<Eigen::Triplet<double>> t;
    std::vector<double> deg(nv, 0);
    for (auto e : d.edges()) {
      deg[e.u] += 1;
      deg[e.v] += 1;
      if (e.u < nv - 1 && e.v < nv - 1) {
        t.emplace_back(e.u, e.v, -1.0);
        t.emplace_back(e.v, e.u, -1.0);
      }
    }
    for (int v = 0; v < nv - 1; ++v) t.emplace_back(v, v, deg[v]);
    A.a.resize(nv - 1, nv - 1);
    A.a.setFromTriplets(t.begin(), t.end());
    A.coords.clear();
  }
  TreeCount r;
  r.log_count = logdet(A);
  if (A.n() <= 100) {
    Eigen::MatrixXd D(A.a);
    std::vector<std::vector<mpz_class>> m(A.n(), std::vector<mpz_class>(A.n()));
    for (int i = 0; i < A.n(); ++i)
      for (int j = 0; j < A.n(); ++j) m[i][j] = static_cast<long>(std::lround(D(i, j)));
    r.exact = bareiss_det(std::move(m)).get_str();
  }
  return r;
}

DenseSym green_block(const LatticeDomain& d, const std::vector<int>& S) {
  Factorization f(laplacian(d));
  const int k = static_cast<int>(S.size());
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(d.n_interior(), k);
  for (int j = 0; j < k; ++j) rhs(S[j], j) = 1;
  Eigen::MatrixXd x = f.solve(rhs);
  DenseSym G(k, k);
  for (int i = 0; i < k; ++i) G.row(i) = x.row(S[i]);
  return 0.5 * (G + G.transpose());
}

Eigen::VectorXd boundary_flux(const LatticeDomain& d, const Eigen::VectorXd& bv) {
  if (bv.size() != d.n_boundary())
    throw std::invalid_argument("boundary values must cover every boundary vertex");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d.n_interior());
  for (int v = 0; v < d.n_interior(); ++v)
    for (int w : d.neighbors(v))
      if (d.is_boundary(w)) rhs[v] += bv[d.boundary_index(w)];
  return rhs;
}

Eigen::VectorXd harmonic_extension(const LatticeDomain& d, const Eigen::VectorXd& bv) {
  return Factorization(laplacian(d)).solve(boundary_flux(d, bv));
}

DenseSym neumann_jump(const LatticeDomain& d, const Cut& cut) {
  const int k = static_cast<int>(cut.delta.size());
  std::vector<int> dpos(d.n_interior(), -1);
  for (int i = 0; i < k; ++i) dpos[cut.delta[i]] = i;
  DenseSym N = Eigen::MatrixXd(laplacian(d, cut.delta).a);
  for (const auto& comp : cut.components) {
    if (comp.empty()) continue;
    const int m = static_cast<int>(comp.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, k);
    for (int i = 0; i < m; ++i)
      for (int w : d.neighbors(comp[i]))
        if (w < d.n_interior() && dpos[w] >= 0) B(i, dpos[w]) += 1;
    // columns of P are harmonic extensions of the unit vectors on delta
    Eigen::MatrixXd P = Factorization(laplacian(d, comp)).solve(B);
    N -= B.transpose() * P;
  }
  return 0.5 * (N + N.transpose());
}

DetCheck det_factorization_check(const LatticeDomain& d, const Cut& cut) {
  DetCheck c;
  c.lhs = logdet(laplacian(d));
  c.rhs = logdet(neumann_jump(d, cut));
  for (const auto& comp : cut.components)
    if (!comp.empty()) c.rhs += logdet(laplacian(d, comp));
  c.residual = std::abs(c.lhs - c.rhs);
  return c;
}

void write_matrix_market(std::ostream& os, const SparseSym& A) {
  std::vector<std::tuple<int, int, double>> lower;
  for (int k = 0; k < A.a.outerSize(); ++k)
    for (SpMat::InnerIterator it(A.a, k); it; ++it)
      if (it.row() >= it.col()) lower.emplace_back(it.row(), it.col(), it.value());
  os << "%%MatrixMarket matrix coordinate real symmetric\n"
     << A.n() << ' ' << A.n() << ' ' << lower.size() << '\n'
     << std::setprecision(17);
  for (auto [i, j, v] : lower) os << i + 1 << ' ' << j + 1 << ' ' << v << '\n';
}

void write_matrix_market(std::ostream& os, const Eigen::MatrixXd& A) {
  os << "%%MatrixMarket matrix array real general\n"
     << A.rows() << ' ' << A.cols() << '\n'
     << std::setprecision(17);
  for (int j = 0; j < A.cols(); ++j)
    for (int i = 0; i < A.rows(); ++i) os << A(i, j) << '\n';
}

}  // namespace sgl
