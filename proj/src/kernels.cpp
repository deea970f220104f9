#include "sgl/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sgl {

using std::numbers::pi;

Mobius Mobius::then(const Mobius& m) const {
  return {m.a * a + m.b * c, m.a * b + m.b * d, m.c * a + m.d * c, m.c * b + m.d * d};
}

Mobius Mobius::cayley() { return {cplx(0, 1), cplx(0, 1), -1, 1}; }

Mobius Mobius::disk_automorphism(cplx center, double angle) {
  cplx u = std::polar(1.0, angle);
  return {u, -u * center, -std::conj(center), 1};
}

namespace {

constexpr double kTol = 1e-9;

void check_interior(RefDomain r, cplx u) {
  bool ok = r == RefDomain::half_plane ? u.imag() > 0 : std::abs(u) < 1;
  if (!ok || !std::isfinite(u.real()) || !std::isfinite(u.imag()))
    throw std::invalid_argument("point is not inside the domain");
}

void check_boundary(RefDomain r, cplx s) {
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
    throw std::invalid_argument("boundary point maps to infinity");
  bool ok = r == RefDomain::half_plane ? std::abs(s.imag()) < kTol * (1 + std::abs(s))
                                       : std::abs(std::abs(s) - 1) < kTol;
  if (!ok) throw std::invalid_argument("point is not on the boundary");
}

}  // namespace

double poisson_kernel(const Config& c, cplx y, cplx x) {
  Mobius inv = c.phi.inverse();
  cplx u = inv(y), s = inv(x);
  check_interior(c.ref, u);
  check_boundary(c.ref, s);
  double jac = std::abs(inv.deriv(x));
  double base = c.ref == RefDomain::half_plane ? u.imag() / std::norm(s - u)
                                               : 0.5 * (1 - std::norm(u)) / std::norm(s - u);
  return base * jac;
}

double excursion_kernel(const Config& c, cplx x, cplx y) {
  if (std::abs(x - y) < kTol) throw std::invalid_argument("excursion kernel at coincident points");
  Mobius inv = c.phi.inverse();
  cplx s = inv(x), t = inv(y);
  check_boundary(c.ref, s);
  check_boundary(c.ref, t);
  return std::abs(inv.deriv(x)) * std::abs(inv.deriv(y)) / std::norm(s - t);
}

double conformal_radius(const Config& c, cplx y) {
  Mobius inv = c.phi.inverse();
  cplx u = inv(y);
  check_interior(c.ref, u);
  double base = c.ref == RefDomain::half_plane ? 1 / u.imag() : 1 / (1 - std::norm(u));
  return base * std::abs(inv.deriv(y));
}

ABParams kappa_to_ab(double kappa, int eps, const std::vector<double>& rho) {
  if (!(kappa > 0)) throw std::invalid_argument("kappa must be positive");
  ABParams p;
  p.kappa = kappa;
  p.eps = eps;
  p.a.push_back(eps * 2 / std::sqrt(2 * pi * kappa));
  for (double r : rho) p.a.push_back(eps * r / std::sqrt(2 * pi * kappa));
  p.b = eps * (4 - kappa) / std::sqrt(8 * pi * kappa);
  return p;
}

double central_charge(double kappa) { return 1 - 1.5 * (kappa - 4) * (kappa - 4) / kappa; }

double highest_weight(double p, double q, double kappa) {
  double u = p * kappa - 4 * q, v = kappa - 4;
  return (u * u - v * v) / (16 * kappa);
}

double radial_b_prime(const ABParams& p) {
  double s = 0;
  for (double a : p.a) s += a;
  return p.b + 0.5 * s;
}

ExponentResiduals exponent_match_check(double kappa) {
  auto p = kappa_to_ab(kappa);
  double a = p.a[0], b = p.b;
  ExponentResiduals r;
  r.boundary = std::abs(pi * a * (2 * b + a) / 2 - highest_weight(1, 2, kappa));
  r.det = std::abs((-0.5 + 6 * pi * b * b) + central_charge(kappa) / 2);
  return r;
}

std::function<double(cplx)> ab_harmonic(const Mobius& M, const std::vector<double>& x,
                                        const std::vector<double>& a, double b,
                                        std::optional<cplx> w_ref) {
  if (x.size() != a.size()) throw std::invalid_argument("one coefficient per marked point");
  Mobius phi = M.inverse();
  cplx ref = w_ref ? *w_ref : M(cplx(0, 1));
  if (!(phi(ref).imag() > 0)) throw std::invalid_argument("reference point outside the domain");
  cplx ref_den = phi.c * ref + phi.d;
  return [=](cplx w) {
    cplx z = phi(w);
    if (!(z.imag() >= 0)) throw std::invalid_argument("point outside the domain");
    double h = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      if (std::abs(z - x[i]) < 1e-14) throw std::invalid_argument("evaluation at a marked point");
      h += a[i] * std::arg(z - x[i]);
    }
    // arg phi' = arg det - 2 arg(c w + d), continued along the segment from ref
    double darg = -2 * std::arg((phi.c * w + phi.d) / ref_den);
    return h - b * darg;
  };
}

AnalyticMap mobius_map(const Mobius& m) {
  return [m](cplx z) { return Jet{m(z), m.deriv(z), m.deriv2(z), m.deriv3(z)}; };
}

AnalyticMap joukowski_map() {
  return [](cplx z) {
    return Jet{z + 1.0 / z, 1.0 - 1.0 / (z * z), 2.0 / (z * z * z), -6.0 / (z * z * z * z)};
  };
}

AnalyticMap compose(const AnalyticMap& outer, const AnalyticMap& inner) {
  return [outer, inner](cplx z) {
    Jet h = inner(z), g = outer(h.f);
    return Jet{g.f, g.f1 * h.f1, g.f2 * h.f1 * h.f1 + g.f1 * h.f2,
               g.f3 * h.f1 * h.f1 * h.f1 + 3.0 * g.f2 * h.f1 * h.f2 + g.f1 * h.f3};
  };
}

cplx schwarzian(const AnalyticMap& psi, cplx z) {
  Jet j = psi(z);
  if (std::abs(j.f1) == 0) throw std::domain_error("schwarzian: vanishing derivative");
  cplx q = j.f2 / j.f1;
  return j.f3 / j.f1 - 1.5 * q * q;
}

namespace {

using GL = boost::math::quadrature::gauss<double, 30>;

// smooth cutoff: 1 on [0, 1/2], 0 on [1, inf)
double cutoff(double t) {
  if (t <= 0.5) return 1;
  if (t >= 1) return 0;
  double s = 2 * t - 1;
  double e0 = std::exp(-1 / s), e1 = std::exp(-1 / (1 - s));
  return e1 / (e0 + e1);
}

struct EnergyIntegrand {
  const std::vector<cplx>& p;
  const std::vector<std::vector<double>>& C;
  double operator()(cplx w) const {
    double s = 0;
    for (size_t j = 0; j < p.size(); ++j) {
      cplx uj = std::conj(1.0 / (w - p[j]));
      for (size_t k = 0; k < p.size(); ++k)
        if (C[j][k] != 0) s += C[j][k] * std::real(uj / (w - p[k]));
    }
    return s;
  }
};

double cutoff_radius(const Disk& D, const std::vector<cplx>& p) {
  double rho = D.R / 2;
  for (size_t j = 0; j < p.size(); ++j)
    for (size_t k = j + 1; k < p.size(); ++k) rho = std::min(rho, std::abs(p[j] - p[k]) / 3);
  return rho;
}

double bulk_part(const Disk& D, const std::vector<cplx>& p, const EnergyIntegrand& f, double rho) {
  const int n_theta = 1024;
  auto weight = [&](cplx w) {
    double s = 1;
    for (cplx q : p) s -= cutoff(std::abs(w - q) / rho);
    return s;
  };
  auto ring = [&](double r) {
    double s = 0;
    for (int k = 0; k < n_theta; ++k) {
      cplx w = D.center + std::polar(r, 2 * pi * k / n_theta);
      double wt = weight(w);
      if (wt != 0) s += wt * f(w);
    }
    return s * 2 * pi / n_theta * r;
  };
  const int pieces = 8;
  double s = 0;
  for (int k = 0; k < pieces; ++k) s += GL::integrate(ring, D.R * k / pieces, D.R * (k + 1) / pieces);
  return s;
}

double near_part(const Disk& D, cplx q, const EnergyIntegrand& f, double rho, double eps) {
  const double theta_n = std::arg(D.center - q);
  auto rmax = [&](double u) { return 2 * D.R * std::cos(u); };
  auto radial = [&](double u) {
    double top = std::min(rmax(u), rho);
    if (top <= eps) return 0.0;
    cplx dir = std::polar(1.0, theta_n + u);
    auto g = [&](double s) {
      double r = std::exp(s);
      return cutoff(r / rho) * f(q + r * dir) * r * r;
    };
    double mid = std::log(rho / 2);
    double lo = std::log(eps), hi = std::log(top);
    if (hi <= mid) return GL::integrate(g, lo, hi);
    return GL::integrate(g, lo, mid) + GL::integrate(g, mid, hi);
  };
  double ue = std::acos(eps / (2 * D.R)), uh = std::acos(rho / (4 * D.R)), ur = std::acos(rho / (2 * D.R));
  double s = GL::integrate(radial, -ur, ur);
  s += GL::integrate(radial, ur, uh) + GL::integrate(radial, -uh, -ur);
  // split the outer pieces geometrically toward the endpoint
  double a = uh;
  for (int k = 0; k < 6; ++k) {
    double b = ue - (ue - uh) * std::pow(0.25, k + 1);
    if (k == 5) b = ue;
    s += GL::integrate(radial, a, b) + GL::integrate(radial, -b, -a);
    a = b;
  }
  return s;
}

void check_on_circle(const Disk& D, const std::vector<cplx>& p) {
  for (cplx q : p)
    if (std::abs(std::abs(q - D.center) - D.R) > 1e-9 * D.R)
      throw std::invalid_argument("marked point is not on the disk boundary");
}

}  // namespace

double disk_energy_integral(const Disk& D, const std::vector<cplx>& p,
                            const std::vector<std::vector<double>>& C, double eps) {
  check_on_circle(D, p);
  EnergyIntegrand f{p, C};
  double rho = cutoff_radius(D, p);
  if (!(eps < rho / 4)) throw std::invalid_argument("eps too large for the marked-point spacing");
  double s = bulk_part(D, p, f, rho);
  for (cplx q : p) s += near_part(D, q, f, rho, eps);
  return s;
}

double disk_energy_limit(const Disk& D, const std::vector<cplx>& p,
                         const std::vector<std::vector<double>>& C) {
  check_on_circle(D, p);
  EnergyIntegrand f{p, C};
  double rho = cutoff_radius(D, p);
  double bulk = bulk_part(D, p, f, rho);
  double diag = 0;
  for (size_t k = 0; k < p.size(); ++k) diag += pi * C[k][k];
  const int levels = 4;
  std::vector<double> T(levels);
  for (int k = 0; k < levels; ++k) {
    double eps = rho / 8 * std::pow(0.5, k);
    double s = bulk + diag * std::log(eps);
    for (cplx q : p) s += near_part(D, q, f, rho, eps);
    T[k] = s;
  }
  // Richardson in powers of eps
  for (int m = 1; m < levels; ++m) {
    double fac = std::pow(2.0, m);
    for (int k = levels - 1; k >= m; --k) T[k] = (fac * T[k] - T[k - 1]) / (fac - 1);
  }
  if (!std::isfinite(T.back())) throw std::runtime_error("energy quadrature did not converge");
  return T.back();
}

double reg_dirichlet_energy(const Disk& D, cplx x, cplx y, double a, double b) {
  double cy = 2 * b + a;
  std::vector<std::vector<double>> C{{a * a, -a * cy}, {-a * cy, cy * cy}};
  if (a == 0 && b == 0) {
    check_on_circle(D, {x, y});
    return 0;
  }
  return disk_energy_limit(D, {x, y}, C);
}

PAIntegrals pa_integrals(const AnalyticMap& phi) {
  const int n_theta = 512;
  PAIntegrals r;
  auto ring = [&](double rad) {
    double s = 0;
    for (int k = 0; k < n_theta; ++k) {
      Jet j = phi(std::polar(rad, 2 * pi * k / n_theta));
      s += std::norm(j.f2 / j.f1);
    }
    return s * 2 * pi / n_theta * rad;
  };
  r.bulk = boost::math::quadrature::gauss<double, 60>::integrate(ring, 0.0, 1.0);
  const int n_b = 2048;
  for (int k = 0; k < n_b; ++k) r.boundary += std::log(std::abs(phi(std::polar(1.0, 2 * pi * k / n_b)).f1));
  r.boundary *= 2 * pi / n_b;
  return r;
}

double pa_correction(const AnalyticMap& phi) {
  auto I = pa_integrals(phi);
  return -(0.5 * I.bulk + I.boundary) / (6 * pi);
}

double reg_energy_closed_form(const AnalyticMap& phi, cplx x0, cplx y0, double a, double b) {
  double s = pi * a * (2 * b + a) *
             (std::log(std::abs(phi(x0).f1)) + std::log(std::abs(phi(y0).f1)) + 2 * std::log(std::abs(y0 - x0)));
  if (b != 0) {
    auto I = pa_integrals(phi);
    s += b * b * (I.bulk + 2 * I.boundary);
  }
  return s;
}

namespace {

// sum_{j>=1} exp(-pi^2 j^2 t / a^2), split as smooth part A and exponentially small part E
// when the dual (Poisson-summed) series is used: value = A + E
struct Theta {
  double A = 0, E = 0;
  double value() const { return A + E; }
};

Theta theta1(double a, double t, bool dual) {
  Theta th;
  if (!dual) {
    for (int j = 1;; ++j) {
      double term = std::exp(-pi * pi * j * j * t / (a * a));
      th.E += term;
      if (term < 1e-300 || term < 1e-18 * th.E) break;
    }
    return th;
  }
  double pre = a / std::sqrt(pi * t);
  th.A = pre / 2 - 0.5;
  for (int n = 1;; ++n) {
    double term = pre * std::exp(-a * a * n * n / t);
    th.E += term;
    if (term == 0 || term < 1e-18 * std::abs(th.A + th.E)) break;
  }
  return th;
}

}  // namespace

double heat_trace_rectangle(double a, double b, double t) {
  auto one = [t](double s) { return theta1(s, t, pi * pi * t / (s * s) < 1).value(); };
  return one(a) * one(b);
}

ZetaRectangle zeta_logdet_rectangle(double a, double b, double t0) {
  if (!(a > 0) || !(b > 0) || !(t0 > 0)) throw std::invalid_argument("sides and split must be positive");
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto small = [&](double t) {
    Theta ta = theta1(a, t, true), tb = theta1(b, t, true);
    return (ta.A * tb.E + ta.E * tb.A + ta.E * tb.E) / t;
  };
  auto large = [&](double t) { return heat_trace_rectangle(a, b, t) / t; };
  double err1 = 0, err2 = 0;
  double I1 = GK::integrate(small, 0.0, t0, 15, 1e-14, &err1);
  double I2 = GK::integrate(large, t0, std::numeric_limits<double>::infinity(), 15, 1e-14, &err2);
  double scale = std::abs(I1) + std::abs(I2) + 1;
  if (err1 + err2 > 1e-8 * scale) throw std::runtime_error("zeta quadrature did not converge");
  ZetaRectangle z;
  z.zeta0 = 0.25;
  z.zeta_prime0 = I1 + I2 - a * b / (4 * pi * t0) + (a + b) / (2 * std::sqrt(pi * t0)) +
                  0.25 * (std::numbers::egamma + std::log(t0));
  z.logdet = -z.zeta_prime0;
  return z;
}

ShapeResult sle_log_partition_shape(const Config& c, double kappa, const std::vector<cplx>& z,
                                    const std::vector<double>& rho, std::optional<cplx> y) {
  if (z.size() != rho.size() + 1) throw std::invalid_argument("need the seed plus one weight per force point");
  std::vector<double> w{2.0};
  w.insert(w.end(), rho.begin(), rho.end());
  ShapeResult r;
  r.det_exponent = -central_charge(kappa) / 2;
  for (size_t i = 0; i < z.size(); ++i)
    for (size_t j = i + 1; j < z.size(); ++j)
      r.kernel_log += -w[i] * w[j] / (4 * kappa) * std::log(excursion_kernel(c, z[i], z[j]));
  if (y) {
    double sum = 0;
    for (double q : rho) sum += q;
    double rr = (kappa - 6 - sum) / 2;
    double alpha = rr / (4 * kappa) * (rr - kappa + 4);
    r.kernel_log += 2 * alpha * std::log(conformal_radius(c, *y));
    for (size_t i = 0; i < z.size(); ++i)
      r.kernel_log += -rr * w[i] / (2 * kappa) * std::log(poisson_kernel(c, *y, z[i]));
  }
  return r;
}

ShapeResult ff_log_partition_shape(const Config& c, const ABParams& p, const std::vector<cplx>& x,
                                   cplx y, bool radial) {
  if (x.size() != p.a.size()) throw std::invalid_argument("one coefficient per marked point");
  ShapeResult r;
  r.det_exponent = -0.5 + 6 * pi * p.b * p.b;
  double abar = 0;
  for (double a : p.a) abar += a;
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j)
      r.kernel_log += -pi * p.a[i] * p.a[j] / 2 * std::log(excursion_kernel(c, x[i], x[j]));
  if (!radial) {
    for (size_t i = 0; i < x.size(); ++i)
      r.kernel_log += pi / 2 * p.a[i] * (2 * p.b + abar) * std::log(excursion_kernel(c, x[i], y));
  } else {
    double bp = radial_b_prime(p);
    r.kernel_log += pi * bp * (bp - 2 * p.b) * std::log(conformal_radius(c, y));
    for (size_t i = 0; i < x.size(); ++i)
      r.kernel_log += pi * p.a[i] * bp * std::log(poisson_kernel(c, y, x[i]));
  }
  return r;
}

}  // namespace sgl
