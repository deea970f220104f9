#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace sgl {

using cplx = std::complex<double>;

struct Mobius {
  cplx a = 1, b = 0, c = 0, d = 1;  // z -> (a z + b)/(c z + d)
  cplx operator()(cplx z) const { return (a * z + b) / (c * z + d); }
  cplx deriv(cplx z) const { return (a * d - b * c) / ((c * z + d) * (c * z + d)); }
  cplx deriv2(cplx z) const { return -2.0 * c * (a * d - b * c) / std::pow(c * z + d, 3); }
  cplx deriv3(cplx z) const { return 6.0 * c * c * (a * d - b * c) / std::pow(c * z + d, 4); }
  Mobius inverse() const { return {d, -b, -c, a}; }
  Mobius then(const Mobius& m) const;  // m o this
  static Mobius cayley();              // disk -> half-plane, z -> i(1+z)/(1-z)
  static Mobius disk_automorphism(cplx center, double angle);  // z -> e^{i angle}(z - c)/(1 - conj(c) z)
};

enum class RefDomain { half_plane, disk };

// Domain D = phi(ref) for a reference domain and a Mobius map.
struct Config {
  RefDomain ref = RefDomain::half_plane;
  Mobius phi;
};

// Kernels in the half-plane normalisation, P = Im y/|x-y|^2,
// H(x,y) = 1/(x-y)^2, H(y) = 1/Im y; on the unit disk P and H(x,y) are the
// exact transports and H(y) = 1/(1-|y|^2). Other domains transport with
// |phi'| weights. Boundary densities are against arc length.
double poisson_kernel(const Config& c, cplx y, cplx x);
double excursion_kernel(const Config& c, cplx x, cplx y);
double conformal_radius(const Config& c, cplx y);

struct ABParams {
  std::vector<double> a;  // a[0] belongs to the seed, then one per force point
  double b = 0;
  double kappa = 0;
  int eps = 1;
};

// a_i = eps rho_i / sqrt(2 pi kappa), b = eps (4 - kappa)/sqrt(8 pi kappa); the
// seed carries rho_0 = 2
ABParams kappa_to_ab(double kappa, int eps = 1, const std::vector<double>& rho = {});
double central_charge(double kappa);
double highest_weight(double p, double q, double kappa);
// b' = b + (1/2) sum a_i
double radial_b_prime(const ABParams& p);

struct ExponentResiduals {
  double boundary = 0;  // |pi a (2b + a)/2 - h_{1;2}|
  double det = 0;       // |(-1/2 + 6 pi b^2) + c/2|
};
ExponentResiduals exponent_match_check(double kappa);

// (a,b) harmonic function on D = M(H) with marked points x_i on the real
// line of H and the target at infinity:
//   h(w) = sum a_i arg(phi(w) - x_i) - b (arg phi'(w) - arg phi'(w_ref)),  phi = M^{-1}.
std::function<double(cplx)> ab_harmonic(const Mobius& M, const std::vector<double>& x,
                                        const std::vector<double>& a, double b,
                                        std::optional<cplx> w_ref = std::nullopt);

// Analytic map with three derivatives.
struct Jet {
  cplx f, f1, f2, f3;
};
using AnalyticMap = std::function<Jet(cplx)>;
AnalyticMap mobius_map(const Mobius& m);
AnalyticMap joukowski_map();  // z + 1/z
AnalyticMap compose(const AnalyticMap& outer, const AnalyticMap& inner);
cplx schwarzian(const AnalyticMap& psi, cplx z);

// Round disk with boundary points.
struct Disk {
  cplx center = 0;
  double R = 1;
};

// Integral over D minus eps-balls around the points of
// sum_jk C_jk grad arg(w - p_j) . grad arg(w - p_k).
double disk_energy_integral(const Disk& D, const std::vector<cplx>& p,
                            const std::vector<std::vector<double>>& C, double eps);
// eps -> 0 limit by Richardson extrapolation of the integral plus
// sum_k pi C_kk log eps
double disk_energy_limit(const Disk& D, const std::vector<cplx>& p,
                         const std::vector<std::vector<double>>& C);

// Regularised Dirichlet energy of m = -a arg(w - x) + (2b + a) arg(w - y)
// on a disk, with Euclidean local coordinates at x and y.
double reg_dirichlet_energy(const Disk& D, cplx x, cplx y, double a, double b);
// pi a (2b+a)(log|phi'(x0)| + log|phi'(y0)| + 2 log|y0 - x0|)
//   + b^2 (int_D |grad log|phi'||^2 + 2 int_U log|phi'|)
double reg_energy_closed_form(const AnalyticMap& phi, cplx x0, cplx y0, double a, double b);

struct PAIntegrals {
  double bulk = 0;      // int_D |grad log|phi'||^2 dA
  double boundary = 0;  // int_U log|phi'| dl
};
PAIntegrals pa_integrals(const AnalyticMap& phi);
// -(1/6 pi)(1/2 int_D |grad sigma|^2 + int_U sigma), sigma = log|phi'|
double pa_correction(const AnalyticMap& phi);

struct ZetaRectangle {
  double zeta0 = 0;
  double zeta_prime0 = 0;
  double logdet = 0;  // -zeta'(0)
};
// Dirichlet Laplacian on an a x b rectangle; t0 splits the heat-trace integral
ZetaRectangle zeta_logdet_rectangle(double a, double b, double t0 = 1.0);
// Tr exp(-t Delta) on the rectangle
double heat_trace_rectangle(double a, double b, double t);

// Marked points for partition-function shapes. Boundary points carry a
// weight each; the first is the seed (rho_0 = 2 or a[0]).
struct ShapeResult {
  double kernel_log = 0;
  double det_exponent = 0;
};
// chordal: sum_{i<j} -rho_i rho_j/(4 kappa) log H(z_i, z_j);
// radial (y given): adds 2 alpha log H(y) - sum rho rho_i/(2 kappa) log P(y, z_i)
// with rho = (kappa - 6 - sum_{i>0} rho_i)/2
ShapeResult sle_log_partition_shape(const Config& c, double kappa, const std::vector<cplx>& z,
                                    const std::vector<double>& rho, std::optional<cplx> y = std::nullopt);
// free-field side: chordal points x_1..x_n (weights a_i) and boundary target y,
// or radial with bulk target y
ShapeResult ff_log_partition_shape(const Config& c, const ABParams& p, const std::vector<cplx>& x,
                                   cplx y, bool radial);

}  // namespace sgl
