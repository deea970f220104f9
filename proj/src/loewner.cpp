#include "sgl/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "sgl/kernels.hpp"
#include "sgl/stats.hpp"

namespace sgl {

using std::numbers::pi;

namespace {

// root of w^2 = s in the closed upper half-plane; on the real line the sign of hint
cplx upper_sqrt(cplx s, double hint) {
  cplx w = std::sqrt(s);
  if (w.imag() < 0 || (w.imag() == 0 && (w.real() < 0) != (hint < 0))) w = -w;
  return w;
}

}  // namespace

double Driver::at(double s) const {
  if (s <= t.front()) return W.front();
  if (s >= t.back()) return W.back();
  auto it = std::upper_bound(t.begin(), t.end(), s);
  size_t k = it - t.begin();
  double u = (s - t[k - 1]) / (t[k] - t[k - 1]);
  return (1 - u) * W[k - 1] + u * W[k];
}

Driver make_driver(std::vector<double> t, std::vector<double> W) {
  if (t.empty() || t.size() != W.size()) throw std::invalid_argument("driver: size mismatch");
  if (t[0] != 0) throw std::invalid_argument("driver: time must start at 0");
  for (size_t k = 1; k < t.size(); ++k)
    if (!(t[k] > t[k - 1])) throw std::invalid_argument("driver: time must increase");
  Driver d;
  d.t = std::move(t);
  d.W = std::move(W);
  return d;
}

Driver make_driver(const std::function<double(double)>& W, double T, int n) {
  std::vector<double> t(n + 1), w(n + 1);
  for (int k = 0; k <= n; ++k) {
    t[k] = T * k / n;
    w[k] = W(t[k]);
  }
  return make_driver(std::move(t), std::move(w));
}

void MapStack::append(double dt, double W) {
  if (!(dt > 0)) throw std::invalid_argument("map step must have positive duration");
  dt_.push_back(dt);
  W_.push_back(W);
}

void MapStack::append(const MapStack& other) {
  for (int k = 0; k < other.size(); ++k) append(other.dt(k), other.W(k));
}

double MapStack::time(int n) const {
  double s = 0;
  for (int k = 0; k < n; ++k) s += dt_[k];
  return s;
}

MapStack evolve(const Driver& d) {
  MapStack s(d.W.front());
  for (int k = 0; k < d.steps(); ++k) s.append(d.t[k + 1] - d.t[k], d.W[k + 1]);
  return s;
}

void GPoint::step(double dt, double W, double t_after, double tol) {
  if (swallowed) return;
  cplx u = g - W;
  cplx w = upper_sqrt(u * u + 4 * dt, u.real());
  cplx f = u / w;
  log_abs_gp += std::log(std::abs(f));
  arg_gp += std::arg(f);
  g = W + w;
  if (g.imag() < tol) {
    swallowed = true;
    swallow_time = t_after;
  }
}

GPoint g_eval(const MapStack& s, cplx z, int n) {
  if (n < 0) n = s.size();
  GPoint p;
  p.z0 = z;
  p.g = z;
  double t = 0;
  for (int k = 0; k < n && !p.swallowed; ++k) {
    t += s.dt(k);
    p.step(s.dt(k), s.W(k), t);
  }
  return p;
}

cplx g_apply(const MapStack& s, cplx z, int n) { return g_eval(s, z, n).g; }
cplx g_prime(const MapStack& s, cplx z, int n) { return g_eval(s, z, n).gp(); }

std::vector<cplx> trace(const MapStack& s) {
  std::vector<cplx> out;
  out.reserve(s.size() + 1);
  out.emplace_back(s.W_after(0), 0);
  for (int k = 0; k < s.size(); ++k) {
    cplx w = s.W(k);
    for (int j = k; j >= 0; --j) {
      cplx u = w - s.W(j);
      w = s.W(j) + upper_sqrt(u * u - 4 * s.dt(j), u.real());
    }
    out.push_back(w);
  }
  return out;
}

Driver sample_sle_kr_driver(double kappa, const std::vector<ForcePoint>& force, double T, double dt,
                            Rng& rng, double x0) {
  if (kappa < 0) throw std::invalid_argument("kappa must be non-negative");
  if (!(T > 0) || !(dt > 0)) throw std::invalid_argument("T and dt must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
  const double h = T / n;
  const double cap = 10 * std::sqrt(std::max(kappa, 1.0) * h);
  Driver d;
  d.kind = force.empty() ? "sle" : "sle-rho";
  d.kappa = kappa;
  d.force = force;
  d.t.push_back(0);
  d.W.push_back(x0);
  std::vector<cplx> Z;
  std::vector<int> side;
  for (auto f : force) {
    Z.push_back(f.z);
    bool real = f.z.imag() == 0;
    if (real && std::isfinite(f.z.real()) && f.z.real() == x0)
      throw std::invalid_argument("force point placed at the seed");
    side.push_back(real ? (x0 > f.z.real() ? 1 : -1) : 0);
  }
  d.force_path.assign(force.size(), {});
  for (size_t i = 0; i < force.size(); ++i) d.force_path[i].push_back(Z[i]);

  std::normal_distribution<double> N;
  double W = x0;
  for (int k = 0; k < n; ++k) {
    double xi = N(rng);
    double drift = 0;
    for (size_t i = 0; i < Z.size(); ++i) {
      if (!std::isfinite(Z[i].real())) continue;
      if (side[i] != 0) drift += force[i].rho / (W - Z[i].real());
      else drift += 2 * force[i].rho * std::real(1.0 / (W - Z[i]));
    }
    double move = std::clamp(drift * h, -cap, cap);
    double Wn = W + std::sqrt(kappa * h) * xi + move;
    bool stop = false;
    for (size_t i = 0; i < Z.size(); ++i) {
      if (!std::isfinite(Z[i].real())) continue;
      Z[i] += 2 * h / (Z[i] - W);
      if (side[i] != 0) {
        Z[i] = Z[i].real();
        if ((Wn - Z[i].real()) * side[i] <= 0) {
          if (force[i].rho <= -2) throw std::domain_error("driver hit a force point with rho <= -2");
          Wn = Z[i].real() + side[i] * std::max(std::abs(Wn - Z[i].real()), 1e-12);
          ++d.reflections;
        }
      } else if (Z[i].imag() <= 0) {
        stop = true;
      }
    }
    if (stop) {
      d.target_reached = true;
      break;
    }
    W = Wn;
    d.t.push_back((k + 1) * h);
    d.W.push_back(W);
    for (size_t i = 0; i < Z.size(); ++i) d.force_path[i].push_back(Z[i]);
  }
  return d;
}

Driver sample_sle_driver(double kappa, double T, double dt, Rng& rng, double x0) {
  return sample_sle_kr_driver(kappa, {}, T, dt, rng, x0);
}

Driver sample_radial_driver(double kappa, cplx y, double T, double dt, Rng& rng) {
  if (!(y.imag() > 0)) throw std::invalid_argument("radial target must lie in the upper half-plane");
  Driver d = sample_sle_kr_driver(kappa, {{y, (kappa - 6) / 2}}, T, dt, rng);
  d.kind = "radial";
  return d;
}

double observable_m(const GPoint& p, double W, double a, double b) {
  return -a * std::arg(p.g - W) - b * p.arg_gp;
}

double observable_m(const MapStack& s, int n, cplx z, double a, double b) {
  GPoint p = g_eval(s, z, n);
  if (p.swallowed) throw std::domain_error("point swallowed");
  return observable_m(p, s.W_after(n), a, b);
}

double green_h(cplx z, cplx w) { return -std::log(std::abs((z - w) / (z - std::conj(w)))) / (2 * pi); }

double green_variation(const GPoint& p1, const GPoint& p2) {
  if (p1.swallowed || p2.swallowed) throw std::domain_error("point swallowed");
  if (p1.z0 == p2.z0)
    return (std::log(p1.z0.imag()) - std::log(p1.g.imag()) + p1.log_abs_gp) / (2 * pi);
  return green_h(p1.z0, p2.z0) - green_h(p1.g, p2.g);
}

double green_variation(const MapStack& s, int n, cplx z1, cplx z2) {
  return green_variation(g_eval(s, z1, n), g_eval(s, z2, n));
}

namespace {

// Runs SLE_kappa paths to time t with every point tracked; f receives the
// final points and driving value. A path stops once some Im g_t(z) falls
// below a fraction of its starting value.
template <class F>
MartingaleReport run_paths(double kappa, const std::vector<cplx>& z, double t, long n_paths, double dt,
                           std::uint64_t seed, double target, F f) {
  const int n = std::max(1, static_cast<int>(std::ceil(t / dt - 1e-9)));
  const double h = t / n;
  Running acc;
  MartingaleReport r;
  std::normal_distribution<double> N;
  for (long i = 0; i < n_paths; ++i) {
    Rng rng = stream_rng(seed, i);
    std::vector<GPoint> p(z.size());
    for (size_t k = 0; k < z.size(); ++k) p[k].z0 = p[k].g = z[k];
    double W = 0;
    bool stopped = false;
    for (int s = 0; s < n && !stopped; ++s) {
      double Wn = W + std::sqrt(kappa * h) * N(rng);
      std::vector<GPoint> q = p;
      for (size_t k = 0; k < z.size(); ++k) {
        q[k].step(h, Wn, (s + 1) * h, 0.02 * z[k].imag());
        stopped = stopped || q[k].swallowed;
      }
      if (stopped) break;
      p = std::move(q);
      W = Wn;
    }
    if (stopped) ++r.stopped;
    acc.add(f(p, W));
  }
  r.paths = acc.n;
  r.mean = acc.mean;
  r.se = acc.se();
  r.target = target;
  r.pass = r.se > 0 ? std::abs(r.mean - r.target) < 3 * r.se : std::abs(r.mean - r.target) < 1e-12;
  return r;
}

}  // namespace

MartingaleReport exp_martingale_test(double kappa, const std::vector<cplx>& z,
                                     const std::vector<double>& c, double t, long n_paths,
                                     double dt, std::uint64_t seed) {
  if (z.size() != c.size()) throw std::invalid_argument("one coefficient per point");
  auto ab = kappa_to_ab(kappa);
  const double a = ab.a[0], b = ab.b;
  double m0 = 0;
  for (size_t k = 0; k < z.size(); ++k) m0 += c[k] * (-a * std::arg(z[k]));
  return run_paths(kappa, z, t, n_paths, dt, seed, std::exp(m0),
                   [&](const std::vector<GPoint>& p, double W) {
                     double s = 0;
                     for (size_t j = 0; j < p.size(); ++j) {
                       s += c[j] * observable_m(p[j], W, a, b);
                       for (size_t k = 0; k < p.size(); ++k)
                         s -= 0.5 * c[j] * c[k] * green_variation(p[j], p[k]);
                     }
                     return std::exp(s);
                   });
}

MartingaleReport m_martingale_test(double kappa, cplx z, double t, long n_paths, double dt,
                                   std::uint64_t seed) {
  auto ab = kappa_to_ab(kappa);
  const double a = ab.a[0], b = ab.b;
  return run_paths(kappa, {z}, t, n_paths, dt, seed, -a * std::arg(z),
                   [&](const std::vector<GPoint>& p, double W) { return observable_m(p[0], W, a, b); });
}

namespace {

double orient(cplx a, cplx b, cplx c) { return std::imag(std::conj(b - a) * (c - a)); }

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
  double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

Driver extract_driving(const std::vector<cplx>& curve) {
  if (curve.size() < 2) throw std::invalid_argument("curve needs at least two points");
  if (curve[0].imag() != 0) throw std::invalid_argument("curve must start on the real line");
  const size_t n = curve.size();
  for (size_t i = 1; i < n; ++i)
    if (!(curve[i].imag() > 0)) throw std::invalid_argument("curve leaves the upper half-plane");
  for (size_t i = 0; i + 1 < n; ++i)
    for (size_t j = i + 2; j + 1 < n; ++j)
      if (segments_cross(curve[i], curve[i + 1], curve[j], curve[j + 1]))
        throw std::invalid_argument("curve is self-intersecting");

  std::vector<cplx> p(curve.begin() + 1, curve.end());
  for (auto& z : p) z -= curve[0].real();
  std::vector<double> t{0}, W{curve[0].real()};
  double time = 0;
  for (size_t k = 0; k < p.size(); ++k) {
    cplx u = p[k];
    if (!(u.imag() > 0)) throw std::invalid_argument("curve is not simple");
    double w = u.real(), dt = u.imag() * u.imag() / 4;
    for (size_t j = k + 1; j < p.size(); ++j) {
      cplx v = p[j] - w;
      p[j] = w + upper_sqrt(v * v + 4 * dt, v.real());
    }
    // points carrying no capacity at double precision are merged
    if (time + dt == time) continue;
    time += dt;
    t.push_back(time);
    W.push_back(w + curve[0].real());
  }
  Driver d = make_driver(std::move(t), std::move(W));
  d.kind = "extracted";
  return d;
}

void write_driver_csv(const Driver& d, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "t,W\n";
  for (size_t k = 0; k < d.t.size(); ++k) out << d.t[k] << ',' << d.W[k] << '\n';
}

void write_trace_csv(const std::vector<cplx>& pts, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "x,y\n";
  for (auto z : pts) out << z.real() << ',' << z.imag() << '\n';
}

}  // namespace sgl
