#include "sgl/loops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sgl/kernels.hpp"
#include "sgl/linalg.hpp"

namespace sgl {

using std::numbers::pi;

namespace {

void check_sets(const LatticeDomain& d, const std::vector<int>& K1, const std::vector<int>& K2) {
  std::vector<char> seen(d.n_interior(), 0);
  for (const auto* K : {&K1, &K2})
    for (int v : *K) {
      if (v < 0 || v >= d.n_interior()) throw std::invalid_argument("loop sets must be interior vertices");
      if (seen[v]) throw std::invalid_argument("loop sets overlap");
      seen[v] = 1;
    }
}

// columns: hitting distribution of `target` for walks started in the rest
// of the interior, evaluated at `from`
Eigen::MatrixXd hitting(const LatticeDomain& d, const std::vector<int>& target, const std::vector<int>& from) {
  std::vector<int> pos(d.n_interior(), -1);
  {
    std::vector<char> gone(d.n_interior(), 0);
    for (int v : target) gone[v] = 1;
    int k = 0;
    for (int v = 0; v < d.n_interior(); ++v)
      if (!gone[v]) pos[v] = k++;
  }
  Factorization f(laplacian_without(d, target));
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(f.n(), static_cast<int>(target.size()));
  for (size_t j = 0; j < target.size(); ++j)
    for (int w : d.neighbors(target[j]))
      if (!d.is_boundary(w) && pos[w] >= 0) rhs(pos[w], j) += 1;
  Eigen::MatrixXd h = f.solve(rhs);
  Eigen::MatrixXd T(from.size(), target.size());
  for (size_t i = 0; i < from.size(); ++i) T.row(i) = h.row(pos[from[i]]);
  return T;
}

}  // namespace

double loop_mass_det(const LatticeDomain& d, const std::vector<int>& K1, const std::vector<int>& K2) {
  check_sets(d, K1, K2);
  std::vector<int> both = K1;
  both.insert(both.end(), K2.begin(), K2.end());
  return logdet(laplacian_without(d, K1)) + logdet(laplacian_without(d, K2)) - logdet(laplacian(d)) -
         logdet(laplacian_without(d, both));
}

KernelMatrix hm_kernel_matrices(const LatticeDomain& d, const std::vector<int>& K1,
                                const std::vector<int>& K2) {
  check_sets(d, K1, K2);
  if (K1.empty() || K2.empty()) throw std::invalid_argument("loop sets must be nonempty");
  KernelMatrix k;
  k.T12 = hitting(d, K2, K1);
  k.T21 = hitting(d, K1, K2);
  double worst = std::max(k.T12.rowwise().sum().maxCoeff(), k.T21.rowwise().sum().maxCoeff());
  k.p = 1 - worst;
  return k;
}

double fredholm_route(const Eigen::MatrixXd& T12, const Eigen::MatrixXd& T21) {
  if (T12.cols() != T21.rows() || T12.rows() != T21.cols())
    throw std::invalid_argument("kernel shapes do not match");
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(T12.rows(), T12.rows()) - T12 * T21;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  double logdet = 0;
  int sign = 1;
  const Eigen::MatrixXd& LU = lu.matrixLU();
  for (int i = 0; i < LU.rows(); ++i) {
    logdet += std::log(std::abs(LU(i, i)));
    if (LU(i, i) < 0) sign = -sign;
  }
  if (lu.permutationP().determinant() < 0) sign = -sign;
  if (sign < 0) throw std::domain_error("det(1 - T12 T21) is negative");
  return -logdet;
}

SeriesResult series_route(const KernelMatrix& k, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be positive");
  Eigen::MatrixXd M = k.T12 * k.T21;
  Eigen::MatrixXd P = M;
  SeriesResult r;
  for (int n = 1; n <= n_max; ++n) {
    r.value += P.trace() / n;
    if (n < n_max) P = P * M;
  }
  double q = (1 - k.p) * (1 - k.p);
  double S = static_cast<double>(std::min(k.T12.rows(), k.T21.rows()));
  r.tail_bound = q < 1 ? S * std::pow(q, n_max + 1) / ((n_max + 1) * (1 - q))
                       : std::numeric_limits<double>::infinity();
  return r;
}

LoopMassReport loop_mass_report(const LatticeDomain& d, const std::vector<int>& K1,
                                const std::vector<int>& K2, int n_max) {
  LoopMassReport r;
  r.det_route = loop_mass_det(d, K1, K2);
  auto k = hm_kernel_matrices(d, K1, K2);
  r.fredholm_route = fredholm_route(k.T12, k.T21);
  r.series = series_route(k, n_max);
  r.det_vs_fredholm = std::abs(r.det_route - r.fredholm_route);
  r.series_residual = std::abs(r.series.value - r.fredholm_route);
  r.agree = r.det_vs_fredholm < 1e-9 && r.series_residual <= r.series.tail_bound + 1e-12;
  return r;
}

namespace {

// density in theta of the harmonic measure of the unit upper semicircle
// seen from z in the upper half-disk, by reflection
double half_disk_harm(cplx z, double theta) {
  cplx e = std::polar(1.0, theta);
  double s = 1 - std::norm(z);
  return s / (2 * pi) * (1 / std::norm(e - z) - 1 / std::norm(e - std::conj(z)));
}

}  // namespace

double semicircle_fredholm(const SemicircleConfig& cfg, int n) {
  const double r = cfg.r, c = cfg.c;
  bool nested = std::abs(c) + r < 1;
  bool apart = std::abs(c) > 1 + r;
  if (!(r > 0) || !(nested || apart)) throw std::invalid_argument("semicircle configuration overlaps");
  if (n < 2) throw std::invalid_argument("need at least two nodes");
  const double w = pi / n;
  Eigen::MatrixXd T12(n, n), T21(n, n);
  for (int i = 0; i < n; ++i) {
    double ti = (i + 0.5) * w;
    // from c + r e^{i t} on dK1 to the unit semicircle
    cplx z = c + std::polar(r, ti);
    cplx zi = std::abs(z) < 1 ? z : 1.0 / std::conj(z);
    // from e^{i t} on K2 to dK1, after inverting the exterior of K1
    cplx u = r / (std::conj(std::polar(1.0, ti)) - c);
    for (int j = 0; j < n; ++j) {
      double tj = (j + 0.5) * w;
      T12(i, j) = half_disk_harm(zi, tj) * w;
      T21(i, j) = half_disk_harm(u, tj) * w;
    }
  }
  return fredholm_route(T12, T21);
}

SemicircleResult semicircle_benchmark(double r, double c) {
  SemicircleResult res;
  res.small_hull = r <= 0.3;
  SemicircleConfig cfg{r, c};
  int n = 16;
  double prev = semicircle_fredholm(cfg, n);
  for (;;) {
    n *= 2;
    double cur = semicircle_fredholm(cfg, n);
    if (std::abs(cur - prev) < 0.01 * std::abs(cur) || n >= 4096) {
      res.estimate = cur;
      break;
    }
    prev = cur;
  }
  res.nodes = n;
  res.target = 2 * r * r;
  res.rel_error = std::abs(res.estimate - res.target) / res.target;
  return res;
}

MoebiusCheck moebius_invariance_check(double r, double x) {
  if (!(x > 0 && x < 1)) throw std::invalid_argument("x must lie in (0, 1)");
  Mobius phi{-x, 1, -1, x};
  double e1 = phi(r).real(), e2 = phi(-r).real();
  MoebiusCheck m;
  m.image = {std::abs(e1 - e2) / 2, (e1 + e2) / 2};
  m.direct = semicircle_benchmark(m.image.r, m.image.c).estimate;
  m.benchmark = semicircle_benchmark(r).estimate;
  double hcap = m.image.r * m.image.r;
  double s = -schwarzian(joukowski_map(), 1 / x).real() / 6;
  m.target = 2 * hcap * s;
  m.residual = std::abs(m.direct - m.target) / m.target;
  return m;
}

}  // namespace sgl
