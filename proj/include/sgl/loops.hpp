#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "sgl/lattice.hpp"

namespace sgl {

using cplx = std::complex<double>;

// log det D\K1 + log det D\K2 - log det D - log det D\(K1 u K2) for the
// Dirichlet Laplacian; K1, K2 disjoint sets of interior vertices
double loop_mass_det(const LatticeDomain& d, const std::vector<int>& K1, const std::vector<int>& K2);

// T12(x, y): walk from x in K1 first hits K2 at y (before the boundary);
// T21 likewise from K2 to K1
struct KernelMatrix {
  Eigen::MatrixXd T12, T21;
  double p = 0;  // 1 - largest row sum over both matrices
};
KernelMatrix hm_kernel_matrices(const LatticeDomain& d, const std::vector<int>& K1,
                                const std::vector<int>& K2);

// -log det(1 - T12 T21)
double fredholm_route(const Eigen::MatrixXd& T12, const Eigen::MatrixXd& T21);

struct SeriesResult {
  double value = 0;
  double tail_bound = 0;  // bound on the omitted terms
};
// sum_{n <= n_max} Tr((T12 T21)^n)/n; the tail uses q = (1-p)^2 and
// Tr(M^n) <= min(|K1|, |K2|) q^n
SeriesResult series_route(const KernelMatrix& k, int n_max);

struct LoopMassReport {
  double det_route = 0, fredholm_route = 0;
  SeriesResult series;
  double det_vs_fredholm = 0;   // |det - fredholm|
  double series_residual = 0;   // |series - fredholm|
  bool agree = false;           // residuals within 1e-9 and the tail bound
};
LoopMassReport loop_mass_report(const LatticeDomain& d, const std::vector<int>& K1,
                                const std::vector<int>& K2, int n_max = 60);

// Continuum configuration in H: K2 the unit semicircle, K1 the half-disk of
// radius r centred at c on the real line (inside the unit half-disk, or
// outside the unit disk).
struct SemicircleConfig {
  double r = 0.1;
  double c = 0;
};
// Nystrom value of -log det(1 - T12 T21) with n midpoint nodes per arc
double semicircle_fredholm(const SemicircleConfig& cfg, int n);

struct SemicircleResult {
  double estimate = 0;
  double target = 0;  // 2 r^2 = 2 hcap(K1)
  double rel_error = 0;
  int nodes = 0;
  bool small_hull = true;  // false when r exceeds 0.3
};
// doubles the node count until the value moves by less than 1%
SemicircleResult semicircle_benchmark(double r, double c = 0);

struct MoebiusCheck {
  double direct = 0;      // Fredholm value after the Mobius transport
  double benchmark = 0;   // untransported value
  double target = 0;      // 2 hcap(phi(K1)) (-S psi/6)(1/x)
  double residual = 0;    // |direct - target|/target
  SemicircleConfig image;
};
// phi(z) = (1 - x z)/(x - z), psi(z) = z + 1/z
MoebiusCheck moebius_invariance_check(double r, double x);

}  // namespace sgl
