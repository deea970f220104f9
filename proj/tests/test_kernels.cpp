#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sgl/kernels.hpp"
#include "sgl/random.hpp"

using namespace sgl;
using std::numbers::pi;

namespace {

Config half_plane() { return {}; }
Config unit_disk() { return {RefDomain::disk, {}}; }

// half-plane presentation of the unit disk
Config disk_via_cayley() { return {RefDomain::half_plane, Mobius::cayley().inverse()}; }

Mobius similarity(cplx lambda, cplx shift) { return {lambda, shift, 0, 1}; }

double laplacian(const std::function<double(cplx)>& f, cplx z, double h) {
  return (f(z + h) + f(z - h) + f(z + cplx(0, h)) + f(z - cplx(0, h)) - 4 * f(z)) / (h * h);
}

}  // namespace

TEST(Kernels, KappaToAb) {
  auto k4 = kappa_to_ab(4);
  EXPECT_NEAR(k4.a[0], 1 / std::sqrt(2 * pi), 1e-15);
  EXPECT_EQ(k4.b, 0.0);
  auto k2 = kappa_to_ab(2);
  EXPECT_NEAR(k2.a[0], 1 / std::sqrt(pi), 1e-15);
  EXPECT_NEAR(k2.b, 1 / (2 * std::sqrt(pi)), 1e-15);
  EXPECT_THROW(kappa_to_ab(0), std::invalid_argument);
  Rng rng(11);
  std::uniform_real_distribution<double> U(0.3, 9);
  for (int k = 0; k < 20; ++k) {
    double kappa = U(rng);
    auto p = kappa_to_ab(kappa);
    EXPECT_NEAR(p.b / p.a[0], 1 - kappa / 4, 1e-12);
    auto m = kappa_to_ab(kappa, -1);
    EXPECT_EQ(m.a[0], -p.a[0]);
    EXPECT_EQ(m.b, -p.b);
  }
}

TEST(Kernels, CentralChargeAndWeights) {
  EXPECT_NEAR(central_charge(4), 1, 1e-15);
  EXPECT_NEAR(central_charge(2), -2, 1e-15);
  EXPECT_NEAR(central_charge(8), -2, 1e-15);
  EXPECT_NEAR(central_charge(6), 0, 1e-15);
  for (double kappa : {0.7, 2.0, 8.0 / 3, 4.0, 6.0, 8.0}) {
    EXPECT_NEAR(highest_weight(1, 2, kappa), (6 - kappa) / (2 * kappa), 1e-13);
    for (auto [p, q] : {std::pair{1, 2}, {2, 1}, {1, 3}, {3, 2}})
      EXPECT_NEAR(highest_weight(p, q, kappa), highest_weight(q, p, 16 / kappa), 1e-13);
  }
}

TEST(Kernels, ExponentMatch) {
  for (double kappa = 0.25; kappa <= 12; kappa += 0.25) {
    auto r = exponent_match_check(kappa);
    EXPECT_LT(r.boundary, 1e-12) << kappa;
    EXPECT_LT(r.det, 1e-12) << kappa;
  }
}

TEST(Kernels, RadialBPrime) {
  Rng rng(5);
  std::uniform_real_distribution<double> K(0.5, 8), R(-1.5, 3);
  for (int k = 0; k < 10; ++k) {
    double kappa = K(rng);
    std::vector<double> rho{R(rng), R(rng)};
    double sum = rho[0] + rho[1];
    double rr = (kappa - 6 - sum) / 2;
    auto p = kappa_to_ab(kappa, 1, rho);
    EXPECT_NEAR(radial_b_prime(p), -rr / std::sqrt(2 * pi * kappa), 1e-12);
  }
}

TEST(Kernels, PoissonKernelNormalisation) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  cplx y(0.3, 0.8);
  auto line = [&](double x) { return poisson_kernel(half_plane(), y, x); };
  double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(GK::integrate(line, -inf, inf, 15, 1e-12), pi, 1e-9);
  cplx yd(0.4, -0.3);
  auto circle = [&](double th) { return poisson_kernel(unit_disk(), yd, std::polar(1.0, th)); };
  EXPECT_NEAR(GK::integrate(circle, 0.0, 2 * pi, 15, 1e-12), pi, 1e-9);
  EXPECT_NEAR(laplacian([&](cplx w) { return poisson_kernel(half_plane(), w, 0.7); }, y, 1e-3), 0, 1e-4);
  EXPECT_THROW(poisson_kernel(half_plane(), cplx(0, -1), 0.0), std::invalid_argument);
  EXPECT_THROW(poisson_kernel(half_plane(), cplx(0, 1), cplx(0, 0.1)), std::invalid_argument);
  EXPECT_THROW(poisson_kernel(unit_disk(), 0.0, 0.5), std::invalid_argument);
}

TEST(Kernels, DiskTransport) {
  Rng rng(3);
  std::uniform_real_distribution<double> U(0, 2 * pi), Rad(0, 0.95);
  for (int k = 0; k < 20; ++k) {
    cplx y = std::polar(Rad(rng), U(rng));
    cplx x1 = std::polar(1.0, U(rng)), x2 = std::polar(1.0, U(rng));
    EXPECT_NEAR(poisson_kernel(disk_via_cayley(), y, x1), poisson_kernel(unit_disk(), y, x1),
                1e-8 * poisson_kernel(unit_disk(), y, x1));
    EXPECT_NEAR(excursion_kernel(disk_via_cayley(), x1, x2), 1 / std::norm(x1 - x2), 1e-8 / std::norm(x1 - x2));
    EXPECT_NEAR(conformal_radius(disk_via_cayley(), y), 2 * conformal_radius(unit_disk(), y), 1e-9);
  }
  EXPECT_DOUBLE_EQ(conformal_radius(unit_disk(), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(conformal_radius(half_plane(), cplx(5, 2)), 0.5);
  EXPECT_DOUBLE_EQ(excursion_kernel(half_plane(), -1.0, 1.0), 0.25);
  EXPECT_THROW(excursion_kernel(half_plane(), 1.0, 1.0), std::invalid_argument);
}

TEST(Kernels, ConformalCovariance) {
  Config c{RefDomain::disk, similarity(cplx(1.5, 0.5), cplx(2, -1))};
  double lam = std::abs(cplx(1.5, 0.5));
  cplx y(0.2, 0.1), x = std::polar(1.0, 0.4), x2 = std::polar(1.0, 2.9);
  auto f = c.phi;
  EXPECT_NEAR(conformal_radius(c, f(y)), conformal_radius(unit_disk(), y) / lam, 1e-12);
  EXPECT_NEAR(poisson_kernel(c, f(y), f(x)), poisson_kernel(unit_disk(), y, x) / lam, 1e-12);
  EXPECT_NEAR(excursion_kernel(c, f(x), f(x2)), excursion_kernel(unit_disk(), x, x2) / (lam * lam), 1e-12);
}

TEST(Kernels, MobiusAlgebra) {
  Mobius m{cplx(1, 2), cplx(0.5, 0), cplx(0.3, -0.1), cplx(2, 1)};
  Mobius n{cplx(0, 1), 1, cplx(1, 0), cplx(-2, 0.5)};
  cplx z(0.3, 0.7);
  EXPECT_LT(std::abs(m.then(n)(z) - n(m(z))), 1e-12);
  EXPECT_LT(std::abs(m.inverse()(m(z)) - z), 1e-12);
  EXPECT_LT(std::abs(Mobius::cayley()(0.0) - cplx(0, 1)), 1e-15);
  auto aut = Mobius::disk_automorphism(cplx(0.3, 0.4), 1.1);
  EXPECT_LT(std::abs(aut(cplx(0.3, 0.4))), 1e-15);
  EXPECT_NEAR(std::abs(aut(std::polar(1.0, 2.0))), 1, 1e-14);
  double h = 1e-5;
  EXPECT_LT(std::abs(m.deriv(z) - (m(z + h) - m(z - h)) / (2 * h)), 1e-8);
  EXPECT_LT(std::abs(m.deriv2(z) - (m.deriv(z + h) - m.deriv(z - h)) / (2 * h)), 1e-7);
  EXPECT_LT(std::abs(m.deriv3(z) - (m.deriv2(z + h) - m.deriv2(z - h)) / (2 * h)), 1e-6);
}

TEST(Kernels, Schwarzian) {
  Mobius m{cplx(1, 2), cplx(0.5, 0), cplx(0.3, -0.1), cplx(2, 1)};
  EXPECT_LT(std::abs(schwarzian(mobius_map(m), cplx(0.4, 0.2))), 1e-12);
  EXPECT_LT(std::abs(schwarzian(joukowski_map(), 2.0) - (-2.0 / 3)), 1e-12);
  cplx z(1.3, 0.4);
  EXPECT_LT(std::abs(schwarzian(joukowski_map(), z) + 6.0 / ((z * z - 1.0) * (z * z - 1.0))), 1e-12);
  // S(mu o f) = S(f), S(f o mu) = (S f o mu) mu'^2
  auto J = joukowski_map();
  EXPECT_LT(std::abs(schwarzian(compose(mobius_map(m), J), z) - schwarzian(J, z)), 1e-10);
  cplx lhs = schwarzian(compose(J, mobius_map(m)), z);
  cplx rhs = schwarzian(J, m(z)) * m.deriv(z) * m.deriv(z);
  EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::abs(rhs));
  EXPECT_THROW(schwarzian(J, 1.0), std::domain_error);
}

TEST(Kernels, ABHarmonicHalfPlane) {
  double a = 0.4, b = 0.25;
  auto h = ab_harmonic(Mobius{}, {0.0}, {a}, b);
  EXPECT_NEAR(h(cplx(1, 1e-9)), 0, 1e-8);
  EXPECT_NEAR(h(cplx(-1, 1e-9)), a * pi, 1e-8);
  EXPECT_NEAR(laplacian(h, cplx(0.3, 0.5), 1e-3), 0, 1e-5);
  EXPECT_THROW(h(0.0), std::invalid_argument);
  EXPECT_THROW(h(cplx(0, -1)), std::invalid_argument);
  EXPECT_THROW(ab_harmonic(Mobius{}, {0.0, 1.0}, {a}, b), std::invalid_argument);
}

TEST(Kernels, ABHarmonicDiskWinding) {
  // on the disk the boundary values follow b times the winding of the tangent
  double a = 0.4, b = 0.25;
  Mobius M = Mobius::cayley().inverse();
  auto h = ab_harmonic(M, {-1.0, 2.0}, {a, -0.3}, b);
  double xa = std::arg(M(-1.0)), xb = std::arg(M(2.0));
  if (xa < 0) xa += 2 * pi;
  if (xb < 0) xb += 2 * pi;
  double lo = std::min(xa, xb), hi = std::max(xa, xb);
  double r = 1 - 1e-9;
  double ref = h(std::polar(r, lo + 0.05)) - b * (lo + 0.05);
  for (double th = lo + 0.05; th < hi - 0.05; th += 0.1)
    EXPECT_NEAR(h(std::polar(r, th)) - b * th, ref, 1e-6);
  EXPECT_NEAR(laplacian(h, cplx(0.1, -0.2), 1e-3), 0, 1e-5);
}

TEST(Kernels, DiskSelfEnergy) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  Disk D{0, 1};
  std::vector<std::vector<double>> C{{1}};
  for (double eps : {0.05, 0.01}) {
    double ue = std::acos(eps / 2);
    double oracle = GK::integrate([&](double u) { return std::log(2 * std::cos(u) / eps); }, -ue, ue, 15, 1e-13);
    EXPECT_NEAR(disk_energy_integral(D, {1.0}, C, eps), oracle, 1e-7);
  }
  EXPECT_NEAR(disk_energy_limit(D, {1.0}, C), 0, 1e-6);
  EXPECT_THROW(disk_energy_integral(D, {0.5}, C, 0.01), std::invalid_argument);
}

TEST(Kernels, DiskCrossEnergy) {
  // finite cross term on the unit disk, oracle by nested tanh-sinh in polar coordinates
  boost::math::quadrature::tanh_sinh<double> ts;
  auto K = [](cplx w) { return std::real(std::conj(1.0 / (w - 1.0)) / (w + 1.0)); };
  auto inner = [&](double r) {
    auto f = [&](double th) { return K(std::polar(r, th)) * r; };
    return ts.integrate(f, 0.0, pi) + ts.integrate(f, pi, 2 * pi);
  };
  double oracle = ts.integrate(inner, 0.0, 1.0);
  EXPECT_NEAR(oracle, -pi * std::log(2.0), 1e-5);
  std::vector<std::vector<double>> C{{0, 0.5}, {0.5, 0}};
  EXPECT_NEAR(disk_energy_limit(Disk{0, 1}, {1.0, -1.0}, C), oracle, 1e-5);
}

TEST(Kernels, EnergyScaling) {
  double a = 0.6, b = 0.2;
  double e1 = reg_dirichlet_energy(Disk{0, 1}, 1.0, -1.0, a, b);
  double lam = 2.5;
  double e2 = reg_dirichlet_energy(Disk{cplx(1, 1), lam}, cplx(1 + lam, 1), cplx(1 - lam, 1), a, b);
  double cy = 2 * b + a;
  EXPECT_NEAR(e2 - e1, pi * (a * a + cy * cy) * std::log(lam), 1e-6);
}

TEST(Kernels, EnergyMatchesClosedForm) {
  Rng rng(17);
  std::uniform_real_distribution<double> U(0, 1);
  double e_ref = reg_dirichlet_energy(Disk{0, 1}, 1.0, -1.0, 0.5, 0.3);
  double c_ref = reg_energy_closed_form(mobius_map({}), 1.0, -1.0, 0.5, 0.3);
  for (int k = 0; k < 5; ++k) {
    double a = 0.2 + 0.6 * U(rng), b = -0.3 + 0.6 * U(rng);
    double e0 = reg_dirichlet_energy(Disk{0, 1}, 1.0, -1.0, a, b);
    double c0 = reg_energy_closed_form(mobius_map({}), 1.0, -1.0, a, b);
    cplx c = std::polar(0.6 * U(rng), 2 * pi * U(rng));
    Mobius aut = Mobius::disk_automorphism(c, 2 * pi * U(rng));
    double lam = 0.5 + 2 * U(rng);
    cplx shift(U(rng), U(rng));
    Mobius phi = aut.then(similarity(lam, shift));
    double th = 2 * pi * U(rng);
    cplx x0 = std::polar(1.0, th), y0 = std::polar(1.0, th + 1 + 3 * U(rng));
    double e = reg_dirichlet_energy(Disk{shift, lam}, phi(x0), phi(y0), a, b);
    double cf = reg_energy_closed_form(mobius_map(phi), x0, y0, a, b);
    EXPECT_NEAR(e - e0, cf - c0, 1e-3 * std::max(1.0, std::abs(cf - c0))) << k;
  }
  EXPECT_TRUE(std::isfinite(e_ref) && std::isfinite(c_ref));
}

TEST(Kernels, PolyakovAlvarez) {
  EXPECT_NEAR(pa_correction(mobius_map({})), 0, 1e-14);
  for (double lam : {0.5, 2.0, 7.0})
    EXPECT_NEAR(pa_correction(mobius_map(similarity(lam, 0.3))), -std::log(lam) / 3, 1e-12);
  // disk automorphisms leave the anomaly at zero
  for (double r : {0.2, 0.5}) {
    auto I = pa_integrals(mobius_map(Mobius::disk_automorphism(std::polar(r, 0.7), 0.3)));
    EXPECT_NEAR(I.bulk, -4 * pi * std::log(1 - r * r), 1e-8);
    EXPECT_NEAR(I.boundary, 2 * pi * std::log(1 - r * r), 1e-10);
    EXPECT_NEAR(pa_correction(mobius_map(Mobius::disk_automorphism(std::polar(r, 0.7), 0.3))), 0, 1e-9);
  }
  // rotation of the parameter disk
  auto f = compose(joukowski_map(), mobius_map(similarity(0.3, 2.0)));
  auto g = compose(f, mobius_map(similarity(std::polar(1.0, 0.9), 0)));
  EXPECT_NEAR(pa_correction(f), pa_correction(g), 1e-8);
}

TEST(Kernels, HeatTraceRectangle) {
  for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 0.5}, {0.3, 3.0}}) {
    for (double t : {0.001, 0.05, 0.4, 2.0}) {
      double direct = 0;
      for (int m = 1; m < 4000; ++m) {
        double em = std::exp(-pi * pi * m * m * t / (a * a));
        if (em < 1e-300) break;
        for (int n = 1; n < 4000; ++n) {
          double en = std::exp(-pi * pi * n * n * t / (b * b));
          if (em * en < 1e-300) break;
          direct += em * en;
        }
      }
      EXPECT_NEAR(heat_trace_rectangle(a, b, t), direct, 1e-10 * std::max(1.0, direct)) << a << " " << t;
    }
  }
  double t = 1e-4;
  double asym = 1 / (4 * pi * t) - 2 / (4 * std::sqrt(pi * t)) + 0.25;
  EXPECT_NEAR(heat_trace_rectangle(1, 1, t), asym, 1e-8);
}

TEST(Kernels, ZetaRectangle) {
  auto z = zeta_logdet_rectangle(1, 1);
  EXPECT_DOUBLE_EQ(z.zeta0, 0.25);
  EXPECT_DOUBLE_EQ(z.logdet, -z.zeta_prime0);
  EXPECT_NEAR(zeta_logdet_rectangle(1, 1, 0.5).zeta_prime0, z.zeta_prime0, 1e-6);
  EXPECT_NEAR(zeta_logdet_rectangle(1, 1, 3.0).zeta_prime0, z.zeta_prime0, 1e-6);
  EXPECT_NEAR(zeta_logdet_rectangle(2, 0.5).zeta_prime0, zeta_logdet_rectangle(0.5, 2).zeta_prime0, 1e-9);
  for (double lam : {0.5, 2.0, 3.7}) {
    auto s = zeta_logdet_rectangle(lam * 1.5, lam * 0.8);
    auto r = zeta_logdet_rectangle(1.5, 0.8);
    EXPECT_NEAR(s.zeta_prime0 - r.zeta_prime0, 2 * 0.25 * std::log(lam), 1e-4);
    EXPECT_NEAR(s.logdet - r.logdet, -0.5 * std::log(lam), 1e-4);
  }
  EXPECT_THROW(zeta_logdet_rectangle(0, 1), std::invalid_argument);
}

TEST(Kernels, ChordalShapeExponent) {
  // two-point chordal: H(x, y) carries h_{1;2}
  for (double kappa : {2.0, 8.0 / 3, 4.0, 6.0}) {
    auto s1 = sle_log_partition_shape(half_plane(), kappa, {0.0, 1.0}, {kappa - 6});
    auto s2 = sle_log_partition_shape(half_plane(), kappa, {0.0, 3.0}, {kappa - 6});
    EXPECT_NEAR((s2.kernel_log - s1.kernel_log) / std::log(excursion_kernel(half_plane(), 0.0, 3.0)),
                highest_weight(1, 2, kappa), 1e-12);
    EXPECT_NEAR(s1.det_exponent, -central_charge(kappa) / 2, 1e-15);
    // two seeds
    auto s3 = sle_log_partition_shape(half_plane(), kappa, {0.0, 1.0}, {2.0});
    auto s4 = sle_log_partition_shape(half_plane(), kappa, {0.0, 2.0}, {2.0});
    EXPECT_NEAR((s4.kernel_log - s3.kernel_log) / std::log(0.25), -1 / kappa, 1e-12);
  }
  EXPECT_THROW(sle_log_partition_shape(half_plane(), 2, {0.0}, {1.0}), std::invalid_argument);
}

TEST(Kernels, SleMatchesFreeField) {
  Rng rng(23);
  std::uniform_real_distribution<double> K(0.5, 8), R(-1.5, 3), X(-3, 3);
  Config c{RefDomain::disk, similarity(cplx(1.2, 0.4), cplx(0.5, 0.5))};
  for (int k = 0; k < 10; ++k) {
    double kappa = K(rng);
    std::vector<double> rho{R(rng), R(rng)};
    std::vector<cplx> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(c.phi(std::polar(1.0, 1.5 * i + 0.3 * X(rng))));
    // chordal: target carries kappa - 6 - sum rho
    double rho_y = kappa - 6 - rho[0] - rho[1];
    auto sle = sle_log_partition_shape(c, kappa, {pts[0], pts[1], pts[2], pts[3]}, {rho[0], rho[1], rho_y});
    auto p = kappa_to_ab(kappa, 1, rho);
    auto ff = ff_log_partition_shape(c, p, {pts[0], pts[1], pts[2]}, pts[3], false);
    EXPECT_NEAR(sle.kernel_log, ff.kernel_log, 1e-10 * std::max(1.0, std::abs(ff.kernel_log)));
    EXPECT_NEAR(sle.det_exponent, ff.det_exponent, 1e-12);
    // radial
    cplx y = c.phi(std::polar(0.5 * (X(rng) + 3) / 6, X(rng)));
    auto sr = sle_log_partition_shape(c, kappa, {pts[0], pts[1], pts[2]}, rho, y);
    auto fr = ff_log_partition_shape(c, p, {pts[0], pts[1], pts[2]}, y, true);
    EXPECT_NEAR(sr.kernel_log, fr.kernel_log, 1e-10 * std::max(1.0, std::abs(fr.kernel_log)));
  }
}

TEST(Kernels, ShapeMobiusCovariance) {
  // under a Mobius change of domain the chordal shape shifts by -h (log|phi'(x)| + log|phi'(y)|)
  double kappa = 3.0;
  Mobius phi{cplx(2, 0), cplx(1, 0), cplx(0.5, 0), cplx(1.5, 0)};  // real, preserves H
  double x = -0.5, y = 1.7;
  auto s0 = sle_log_partition_shape(half_plane(), kappa, {x, y}, {kappa - 6});
  auto s1 = sle_log_partition_shape(Config{RefDomain::half_plane, phi}, kappa, {phi(x), phi(y)}, {kappa - 6});
  double h = highest_weight(1, 2, kappa);
  double shift = -h * (std::log(std::abs(phi.deriv(x))) + std::log(std::abs(phi.deriv(y))));
  EXPECT_NEAR(s1.kernel_log - s0.kernel_log, shift, 1e-12);
}
