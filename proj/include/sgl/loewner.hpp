#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "sgl/random.hpp"

namespace sgl {

using cplx = std::complex<double>;

// Force point of an SLE(kappa, rho) driver. A non-real position stands for
// the conjugate pair (z, conj z), each carrying weight rho.
struct ForcePoint {
  cplx z;
  double rho = 0;
};

struct Driver {
  std::vector<double> t;  // t[0] = 0, strictly increasing
  std::vector<double> W;  // W(t[k])
  std::string kind = "deterministic";
  double kappa = 0;
  std::vector<ForcePoint> force;                  // initial force points
  std::vector<std::vector<cplx>> force_path;      // force point positions per time
  int reflections = 0;                            // steps where W was reflected off a force point
  bool target_reached = false;                    // a conjugate pair hit the real line

  int steps() const { return static_cast<int>(t.size()) - 1; }
  double T() const { return t.back(); }
  double at(double s) const;  // piecewise-linear interpolation
};

Driver make_driver(std::vector<double> t, std::vector<double> W);
Driver make_driver(const std::function<double(double)>& W, double T, int n);

// Composition of elementary vertical-slit maps. Step k maps
// g -> W_k + sqrt((g - W_k)^2 + 4 dt_k).
class MapStack {
 public:
  MapStack() = default;
  explicit MapStack(double w0) : w0_(w0) {}
  void append(double dt, double W);
  void append(const MapStack& other);
  int size() const { return static_cast<int>(dt_.size()); }
  double dt(int k) const { return dt_[k]; }
  double W(int k) const { return W_[k]; }
  // driving value after n steps (initial value for n = 0)
  double W_after(int n) const { return n == 0 ? w0_ : W_[n - 1]; }
  double time(int n) const;
  double hcap(int n) const { return 2 * time(n); }
  double hcap() const { return hcap(size()); }

 private:
  double w0_ = 0;
  std::vector<double> dt_, W_;
};

MapStack evolve(const Driver& d);

// Image of a point under the first n maps, with the derivative carried as
// log|g'| and a continuously tracked arg g'.
struct GPoint {
  cplx z0;
  cplx g;
  double log_abs_gp = 0;
  double arg_gp = 0;
  bool swallowed = false;
  double swallow_time = -1;
  cplx gp() const { return std::polar(std::exp(log_abs_gp), arg_gp); }
  // advance through one slit step; freezes once Im g falls below tol
  void step(double dt, double W, double t_after, double tol = 1e-10);
};

GPoint g_eval(const MapStack& s, cplx z, int n = -1);
cplx g_apply(const MapStack& s, cplx z, int n = -1);
cplx g_prime(const MapStack& s, cplx z, int n = -1);

// Tip of the hull after each step: gamma(t_k) = f_1 o ... o f_k(W_k).
std::vector<cplx> trace(const MapStack& s);

Driver sample_sle_driver(double kappa, double T, double dt, Rng& rng, double x0 = 0);
// Euler-Maruyama for dW = sqrt(kappa) dB + sum rho_i/(W - Z_i) dt with
// dZ_i = 2/(Z_i - W) dt. W is reflected off real force points with rho > -2;
// a collision with rho <= -2 throws std::domain_error.
Driver sample_sle_kr_driver(double kappa, const std::vector<ForcePoint>& force, double T, double dt,
                            Rng& rng, double x0 = 0);
// radial SLE aiming at y through the conjugate pair with rho = (kappa - 6)/2
Driver sample_radial_driver(double kappa, cplx y, double T, double dt, Rng& rng);

// m_t(z) = -a arg(g_t(z) - W_t) - b arg g_t'(z)
double observable_m(const GPoint& p, double W, double a, double b);
double observable_m(const MapStack& s, int n, cplx z, double a, double b);

// Dirichlet Green function of the upper half-plane
double green_h(cplx z, cplx w);
// G_0(z1, z2) - G_t(z1, z2) after n steps; z1 == z2 uses the diagonal limit
double green_variation(const MapStack& s, int n, cplx z1, cplx z2);
double green_variation(const GPoint& p1, const GPoint& p2);

struct MartingaleReport {
  double mean = 0, se = 0, target = 0;
  long paths = 0, stopped = 0;
  bool pass = false;
};

// Monte-Carlo check of E[exp(sum c_k m_t(z_k) - 1/2 sum c_j c_k (G_0 - G_t)(z_j, z_k))]
// = exp(sum c_k m_0(z_k)) with (a, b) from kappa_to_ab.
MartingaleReport exp_martingale_test(double kappa, const std::vector<cplx>& z,
                                     const std::vector<double>& c, double t, long n_paths,
                                     double dt, std::uint64_t seed);
// Monte-Carlo check of E[m_t(z)] = m_0(z)
MartingaleReport m_martingale_test(double kappa, cplx z, double t, long n_paths, double dt,
                                   std::uint64_t seed);

// Driving function of a simple curve from 0 by vertical-slit unzipping.
Driver extract_driving(const std::vector<cplx>& curve);

void write_driver_csv(const Driver& d, const std::string& path);
void write_trace_csv(const std::vector<cplx>& pts, const std::string& path);

}  // namespace sgl
