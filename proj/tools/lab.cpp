#include "lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/version.hpp>
#include <Eigen/Core>

#include "sgl/kernels.hpp"
#include "sgl/linalg.hpp"
#include "sgl/loops.hpp"
#include "sgl/stats.hpp"
#include "sgl/ust.hpp"

namespace sgl::lab {

using std::numbers::pi;
namespace fs = std::filesystem;

bool Report::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json Report::to_json() const {
  json j;
  j["name"] = name;
  j["pass"] = pass();
  j["checks"] = json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs},
                           {"residual", c.residual},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"seconds", c.seconds},
                           {"detail", c.detail}});
  return j;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class T>
T get(const json& cfg, const char* key, T fallback) {
  if (!cfg.is_object() || !cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config field '") + key + "' has the wrong type");
  }
}

std::vector<double> get_list(const json& cfg, const char* key, std::vector<double> fallback) {
  return get<std::vector<double>>(cfg, key, std::move(fallback));
}

Check make_check(std::string name, double lhs, double rhs, double tol, Clock::time_point t0) {
  Check c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.residual = std::abs(lhs - rhs);
  c.tolerance = tol;
  c.pass = c.residual < tol;
  c.seconds = since(t0);
  return c;
}

std::pair<int, int> parse_grid(const std::string& s) {
  auto x = s.find('x');
  if (x == std::string::npos) throw std::invalid_argument("grid must look like 12x12");
  try {
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("grid must look like 12x12");
  }
}

// random rectangle with a random full row or column cut
Report verify_det_factorization(const json& cfg, std::uint64_t seed) {
  const int instances = get(cfg, "instances", 50);
  const int max_side = get(cfg, "max_side", 40);
  std::optional<std::pair<int, int>> grid;
  if (cfg.contains("grid")) grid = parse_grid(cfg.at("grid").get<std::string>());
  Rng rng = stream_rng(seed, 0);
  std::uniform_int_distribution<int> side(3, std::max(3, max_side));
  Report r{"det-factorization", {}};
  auto t0 = Clock::now();
  double worst = 0;
  json rows = json::array();
  for (int k = 0; k < instances; ++k) {
    int nr = grid ? grid->first : side(rng), nc = grid ? grid->second : side(rng);
    auto d = LatticeDomain::square(rectangle_mask(nr, nc));
    bool vertical = nc >= 3 && (nr < 3 || std::bernoulli_distribution(0.5)(rng));
    std::vector<int> delta;
    if (vertical) {
      int c = std::uniform_int_distribution<int>(1, nc - 2)(rng);
      for (int j = 0; j < nr; ++j) delta.push_back(d.vertex_at(c, j));
    } else {
      int c = std::uniform_int_distribution<int>(1, nr - 2)(rng);
      for (int i = 0; i < nc; ++i) delta.push_back(d.vertex_at(i, c));
    }
    auto dc = det_factorization_check(d, split_by_cut(d, delta));
    worst = std::max(worst, dc.residual);
    rows.push_back({{"rows", nr}, {"cols", nc}, {"lhs", dc.lhs}, {"rhs", dc.rhs}, {"residual", dc.residual}});
  }
  auto c = make_check("det-factorization", worst, 0, 1e-9, t0);
  c.detail["instances"] = rows;
  r.checks.push_back(c);
  return r;
}

std::vector<int> blob(const LatticeDomain& d, int x, int y, int radius) {
  std::vector<int> s;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b) {
      int v = d.vertex_at(x + a, y + b);
      if (v >= 0 && !d.is_boundary(v) && std::abs(a) + std::abs(b) <= radius) s.push_back(v);
    }
  return s;
}

struct LoopInstance {
  LatticeDomain d;
  std::vector<int> K1, K2;
};

LoopInstance loop_instance(Rng& rng, int max_side) {
  std::uniform_int_distribution<int> side(6, std::max(6, max_side));
  int rows = side(rng), cols = side(rng);
  LoopInstance in{LatticeDomain::square(rectangle_mask(rows, cols)), {}, {}};
  std::uniform_int_distribution<int> X(0, cols - 1), Y(0, rows - 1), rad(0, 3);
  std::set<int> used;
  auto pick = [&](std::vector<int>& K) {
    while (K.empty())
      for (int v : blob(in.d, X(rng), Y(rng), rad(rng)))
        if (!used.count(v)) K.push_back(v);
    used.insert(K.begin(), K.end());
  };
  pick(in.K1);
  pick(in.K2);
  return in;
}

Report verify_loop_mass_routes(const json& cfg, std::uint64_t seed) {
  const int instances = get(cfg, "instances", 20);
  const int max_side = get(cfg, "max_side", 40);
  Rng rng = stream_rng(seed, 0);
  auto t0 = Clock::now();
  double worst_det = 0, worst_excess = -std::numeric_limits<double>::infinity();
  json rows = json::array();
  for (int k = 0; k < instances; ++k) {
    auto in = loop_instance(rng, max_side);
    auto rep = loop_mass_report(in.d, in.K1, in.K2);
    worst_det = std::max(worst_det, rep.det_vs_fredholm);
    worst_excess = std::max(worst_excess, rep.series_residual - rep.series.tail_bound);
    rows.push_back({{"det", rep.det_route},
                    {"fredholm", rep.fredholm_route},
                    {"series", rep.series.value},
                    {"tail_bound", rep.series.tail_bound}});
  }
  Report r{"loop-mass-routes", {}};
  auto c = make_check("det-vs-fredholm", worst_det, 0, 1e-9, t0);
  c.detail["instances"] = rows;
  r.checks.push_back(c);
  Check s = make_check("series-within-tail-bound", std::max(worst_excess, 0.0), 0, 1e-12, t0);
  r.checks.push_back(s);
  return r;
}

Report verify_fredholm_symmetry(const json& cfg, std::uint64_t seed) {
  const int instances = get(cfg, "instances", 20);
  Rng rng = stream_rng(seed, 0);
  auto t0 = Clock::now();
  double worst = 0;
  for (int k = 0; k < instances; ++k) {
    auto in = loop_instance(rng, get(cfg, "max_side", 30));
    auto km = hm_kernel_matrices(in.d, in.K1, in.K2);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(km.T12.rows(), km.T12.rows()) - km.T12 * km.T21;
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(km.T21.rows(), km.T21.rows()) - km.T21 * km.T12;
    worst = std::max(worst, std::abs(a.determinant() - b.determinant()));
  }
  return {"fredholm-symmetry", {make_check("det(1-T12T21)-det(1-T21T12)", worst, 0, 1e-12, t0)}};
}

Report verify_pfident(const json& cfg, std::uint64_t) {
  const int n = get(cfg, "kappas", 50);
  auto t0 = Clock::now();
  double wb = 0, wd = 0;
  for (int k = 1; k <= n; ++k) {
    double kappa = 12.0 * k / n;
    auto e = exponent_match_check(kappa);
    wb = std::max(wb, e.boundary);
    wd = std::max(wd, e.det);
  }
  return {"pfident-exponents",
          {make_check("boundary-exponent", wb, 0, 1e-12, t0), make_check("determinant-exponent", wd, 0, 1e-12, t0)}};
}

Report verify_reg_energy(const json& cfg, std::uint64_t seed) {
  const int configs = get(cfg, "configs", 5);
  Rng rng = stream_rng(seed, 0);
  std::uniform_real_distribution<double> U(0, 1);
  auto t0 = Clock::now();
  double worst = 0;
  json rows = json::array();
  for (int k = 0; k < configs; ++k) {
    double a = 0.2 + 0.6 * U(rng), b = -0.3 + 0.6 * U(rng);
    double e0 = reg_dirichlet_energy(Disk{0, 1}, 1.0, -1.0, a, b);
    double c0 = reg_energy_closed_form(mobius_map({}), 1.0, -1.0, a, b);
    Mobius aut = Mobius::disk_automorphism(std::polar(0.6 * U(rng), 2 * pi * U(rng)), 2 * pi * U(rng));
    double lam = 0.5 + 2 * U(rng);
    cplx shift(U(rng), U(rng));
    Mobius phi = aut.then(Mobius{lam, shift, 0, 1});
    double th = 2 * pi * U(rng);
    cplx x0 = std::polar(1.0, th), y0 = std::polar(1.0, th + 1 + 3 * U(rng));
    double quad = reg_dirichlet_energy(Disk{shift, lam}, phi(x0), phi(y0), a, b) - e0;
    double closed = reg_energy_closed_form(mobius_map(phi), x0, y0, a, b) - c0;
    double rel = std::abs(quad - closed) / std::max(1.0, std::abs(closed));
    worst = std::max(worst, rel);
    rows.push_back({{"a", a}, {"b", b}, {"quadrature", quad}, {"closed_form", closed}, {"rel_error", rel}});
  }
  Report r{"reg-energy", {}};
  auto c = make_check("quadrature-vs-closed-form", worst, 0, 1e-3, t0);
  c.detail["configs"] = rows;
  r.checks.push_back(c);
  auto t1 = Clock::now();
  double cross = disk_energy_limit(Disk{0, 1}, {1.0, -1.0}, {{0, 0.5}, {0.5, 0}});
  r.checks.push_back(make_check("cross-term-antipodal", cross, -pi * std::log(2.0), 1e-4, t1));
  return r;
}

Report verify_pa_scaling(const json& cfg, std::uint64_t) {
  auto lambdas = get_list(cfg, "lambdas", {2.0, 3.0});
  double a = get(cfg, "a", 1.5), b = get(cfg, "b", 0.8);
  auto t0 = Clock::now();
  auto base = zeta_logdet_rectangle(a, b);
  Report r{"pa-scaling", {}};
  for (double lam : lambdas) {
    auto s = zeta_logdet_rectangle(lam * a, lam * b);
    std::ostringstream name;
    name << "zeta-prime-shift-lambda-" << lam;
    auto c = make_check(name.str(), s.zeta_prime0 - base.zeta_prime0, 2 * base.zeta0 * std::log(lam), 1e-4, t0);
    c.detail["logdet_shift"] = s.logdet - base.logdet;
    c.detail["logdet_expected"] = -2 * base.zeta0 * std::log(lam);
    r.checks.push_back(c);
  }
  auto t1 = Clock::now();
  r.checks.push_back(make_check("pa-similarity", pa_correction(mobius_map(Mobius{2.0, 0, 0, 1})),
                                -std::log(2.0) / 3, 1e-10, t1));
  return r;
}

Report verify_semicircle(const json& cfg, std::uint64_t) {
  double r0 = get(cfg, "r", 0.1);
  double x = get(cfg, "x", 0.5), rm = get(cfg, "moebius_r", 0.05);
  Report r{"semicircle", {}};
  auto t0 = Clock::now();
  auto a = semicircle_benchmark(r0);
  Check c;
  c.name = "semicircle-target";
  c.lhs = a.estimate;
  c.rhs = a.target;
  c.residual = a.rel_error;
  c.tolerance = 0.10;
  c.pass = c.residual < c.tolerance;
  c.detail = {{"nodes", a.nodes}, {"estimate_over_r2", a.estimate / (r0 * r0)}, {"small_hull", a.small_hull}};
  c.seconds = since(t0);
  r.checks.push_back(c);
  auto t1 = Clock::now();
  auto h = semicircle_benchmark(r0 / 2);
  Check s = make_check("semicircle-halving-ratio", h.estimate / a.estimate, 0.25, 0.05 * 0.25, t1);
  r.checks.push_back(s);
  auto t2 = Clock::now();
  auto m = moebius_invariance_check(rm, x);
  Check mc;
  mc.name = "moebius-schwarzian";
  mc.lhs = m.direct;
  mc.rhs = m.target;
  mc.residual = m.residual;
  mc.tolerance = 0.10;
  mc.pass = mc.residual < mc.tolerance;
  mc.detail = {{"untransported", m.benchmark},
               {"image_radius", m.image.r},
               {"image_center", m.image.c},
               {"schwarzian_factor", -schwarzian(joukowski_map(), 1 / x).real() / 6}};
  mc.seconds = since(t2);
  r.checks.push_back(mc);
  return r;
}

Report verify_temperley(const json& cfg, std::uint64_t seed) {
  const int n = get(cfg, "samples", 2000);
  const int side = get(cfg, "side", 12);
  auto d = LatticeDomain::square(rectangle_mask(side, side));
  auto g = double_graph(d);
  auto t0 = Clock::now();
  long bad = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng = stream_rng(seed, i);
    auto t = wilson_ust(d, rng);
    auto m = temperley_matching(d, g, t);
    try {
      check_perfect(g, m);
      height_function(d, g, m);
    } catch (const std::exception&) {
      ++bad;
      continue;
    }
    if (!(tree_from_matching(d, g, m) == t)) ++bad;
  }
  auto c = make_check("round-trip-failures", static_cast<double>(bad), 0, 0.5, t0);
  c.detail["samples"] = n;
  return {"temperley", {c}};
}

Report verify_lerw_exit(const json& cfg, std::uint64_t seed) {
  const long runs = get(cfg, "runs", 100000L);
  Mask mask = rectangle_mask(4, 5);
  mask[0][4] = 0;
  auto d = LatticeDomain::square(mask);
  int y = d.vertex_at(1, 1);
  auto t0 = Clock::now();
  // exit law from the first-step equations
  const int n = d.n_interior(), m = d.n_boundary();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n), B = Eigen::MatrixXd::Zero(n, m);
  for (int v = 0; v < n; ++v) {
    double deg = static_cast<double>(d.neighbors(v).size());
    for (int w : d.neighbors(v)) {
      if (w < n) P(v, w) -= 1 / deg;
      else B(v, d.boundary_index(w)) += 1 / deg;
    }
  }
  Eigen::MatrixXd H = P.partialPivLu().solve(B);
  std::vector<double> probs(m), obs(m, 0);
  for (int k = 0; k < m; ++k) probs[k] = H(y, k);
  Rng rng = stream_rng(seed, 0);
  for (long i = 0; i < runs; ++i) obs[d.boundary_index(lerw_branch(d, y, rng).back())] += 1;
  double p = chi2_gof_pvalue(obs, probs);
  Check c;
  c.name = "exit-law-chi2-pvalue";
  c.lhs = p;
  c.rhs = 0.001;
  c.residual = p;
  c.tolerance = 0.001;
  c.pass = p > 0.001;
  c.seconds = since(t0);
  c.detail["runs"] = runs;

  auto t1 = Clock::now();
  auto r2 = LatticeDomain::square(rectangle_mask(2, 3));
  int yy = r2.vertex_at(0, 0), x = r2.vertex_at(-1, 0);
  double count = std::exp(spanning_tree_count(r2).log_count);
  Rng rng2 = stream_rng(seed, 1);
  Running hit;
  for (long i = 0; i < runs; ++i) {
    auto t = wilson_ust(r2, rng2);
    hit.add(tree_branch(r2, t, yy).back() == x ? count : 0.0);
  }
  Check z = make_check("lerw-partition-mc", hit.mean, std::exp(lerw_log_partition(r2, x, yy)), 3 * hit.se(), t1);
  z.detail["se"] = hit.se();
  return {"lerw-exit", {c, z}};
}

Check martingale_check(const std::string& name, const MartingaleReport& m, Clock::time_point t0) {
  Check c;
  c.name = name;
  c.lhs = m.mean;
  c.rhs = m.target;
  c.residual = std::abs(m.mean - m.target);
  c.tolerance = 3 * m.se;
  c.pass = m.pass;
  c.seconds = since(t0);
  c.detail = {{"se", m.se}, {"paths", m.paths}, {"stopped", m.stopped}};
  return c;
}

const std::vector<double> kKappas{2.0, 8.0 / 3, 4.0, 6.0, 8.0};

std::string kappa_name(double k) {
  std::ostringstream s;
  s.precision(4);
  s << "kappa-" << k;
  return s.str();
}

Report verify_martingale(const json& cfg, std::uint64_t seed) {
  auto kappas = get_list(cfg, "kappas", kKappas);
  const long paths = get(cfg, "paths", 10000L);
  double t = get(cfg, "t", 0.25), dt = get(cfg, "dt", 1e-3);
  cplx z(get(cfg, "x", 1.0), get(cfg, "y", 1.0));
  Report r{"martingale", {}};
  for (size_t k = 0; k < kappas.size(); ++k) {
    auto t0 = Clock::now();
    r.checks.push_back(martingale_check(kappa_name(kappas[k]),
                                        m_martingale_test(kappas[k], z, t, paths, dt, splitmix64(seed + k)), t0));
  }
  return r;
}

Report verify_exp_martingale(const json& cfg, std::uint64_t seed) {
  auto kappas = get_list(cfg, "kappas", kKappas);
  const long paths = get(cfg, "paths", 10000L);
  double t = get(cfg, "t", 0.25), dt = get(cfg, "dt", 1e-3), c = get(cfg, "c", 1.0);
  cplx z(get(cfg, "x", 0.0), get(cfg, "y", 2.0));
  Report r{"exp-martingale", {}};
  for (size_t k = 0; k < kappas.size(); ++k) {
    auto t0 = Clock::now();
    r.checks.push_back(martingale_check(
        kappa_name(kappas[k]), exp_martingale_test(kappas[k], {z}, {c}, t, paths, dt, splitmix64(seed + 100 + k)),
        t0));
  }
  return r;
}

// quadruple of hybrid domains from two sides that differ away from the collar
Report verify_coupling_constant(const json& cfg, std::uint64_t seed) {
  const int quads = get(cfg, "quadruples", 10);
  Rng rng = stream_rng(seed, 0);
  std::uniform_real_distribution<double> U(-1, 1);
  auto t0 = Clock::now();
  double worst = 0;
  int trivial = 0;
  json rows = json::array();
  int made = 0;
  while (made < quads) {
    int rows_n = std::uniform_int_distribution<int>(5, 9)(rng);
    int cols_n = std::uniform_int_distribution<int>(6, 10)(rng);
    int cut = std::uniform_int_distribution<int>(2, cols_n - 3)(rng);
    Mask m1 = rectangle_mask(rows_n, cols_n), m2 = m1;
    auto excise = [&](int lo, int hi) {
      if (lo > hi) return;
      int c = std::uniform_int_distribution<int>(lo, hi)(rng);
      int r = std::uniform_int_distribution<int>(1, rows_n - 2)(rng);
      m2[r][c] = 0;
    };
    excise(0, cut - 2);
    excise(cut + 2, cols_n - 1);
    double a1 = U(rng), b1 = U(rng), a2 = U(rng);
    auto f1 = [=](int i, int j) { return a1 * std::sin(0.7 * i + 0.4 * j) + b1 * 0.1 * j; };
    auto f2 = [=](int i, int j) {
      double extra = (i < cut - 1 || i > cut + 1) ? a2 * std::cos(0.5 * j + 0.3 * i) : 0.0;
      return f1(i, j) + extra;
    };
    std::array<CutDomain, 4> g;
    try {
      g = hybrid_domains(LatticeKind::square, {m1, f1}, {m2, f2}, cut);
    } catch (const std::invalid_argument&) {
      continue;
    }
    auto res = coupling_constant_check(g);
    worst = std::max(worst, res.residual);
    if (std::abs(res.log_rhs) < 1e-6) ++trivial;
    rows.push_back({{"rows", rows_n}, {"cols", cols_n}, {"cut", cut}, {"lhs", res.lhs}, {"rhs", res.rhs},
                    {"residual", res.residual}});
    ++made;
  }
  auto c = make_check("lhs-vs-partition-ratio", worst, 0, 1e-8, t0);
  c.detail["quadruples"] = rows;
  c.detail["trivial"] = trivial;
  return {"coupling-constant", {c}};
}

Eigen::MatrixXd random_spd(Rng& rng, int n, double shift) {
  Eigen::MatrixXd X = standard_normal(rng, n * n).reshaped(n, n);
  return X * X.transpose() / n + shift * Eigen::MatrixXd::Identity(n, n);
}

Report verify_cm_density(const json& cfg, std::uint64_t seed) {
  const long samples = get(cfg, "samples", 200000L);
  Report r{"cm-density", {}};
  auto t0 = Clock::now();
  double worst = 0;
  for (double lam : {-2.0, 0.3, 0.8}) {
    Eigen::MatrixXd M(1, 1), Q(1, 1);
    M << lam;
    Q << 1;
    worst = std::max(worst, std::abs(gaussian_quadratic_integral(M, Eigen::VectorXd::Zero(1), Q) -
                                     std::pow(1 - lam, -0.5)));
  }
  r.checks.push_back(make_check("gint-1d-exact", worst, 0, 1e-12, t0));

  Rng rng = stream_rng(seed, 0);
  const int n = 4;
  Eigen::MatrixXd Q = random_spd(rng, n, 0.5);
  Eigen::MatrixXd X = standard_normal(rng, n * n).reshaped(n, n);
  Eigen::MatrixXd M = 0.05 * (X + X.transpose());
  Eigen::VectorXd m = 0.3 * standard_normal(rng, n);
  Eigen::MatrixXd L = Q.llt().matrixL();
  Eigen::MatrixXd N1 = random_spd(rng, n, 1.0), N2 = random_spd(rng, n, 1.0);
  Eigen::MatrixXd L1 = N1.inverse().llt().matrixL();
  Eigen::VectorXd shift = 0.5 * standard_normal(rng, n);
  auto t1 = Clock::now();
  Running gint, cm, rn, rnc;
  for (long i = 0; i < samples; ++i) {
    Eigen::VectorXd h = L * standard_normal(rng, n);
    gint.add(std::exp(0.5 * h.dot(M * h) + m.dot(h)));
    cm.add(cameron_martin_density(h, shift, Q));
    Eigen::VectorXd w = L1 * standard_normal(rng, n);
    rn.add(rn_density_on_cut(w, N1, N2));
    rnc.add(rn_density_covariance(w, N1.inverse(), N2.inverse()));
  }
  auto mc = [&](const std::string& name, const Running& acc, double target) {
    auto c = make_check(name, acc.mean, target, 3 * acc.se(), t1);
    c.detail["se"] = acc.se();
    c.detail["samples"] = acc.n;
    return c;
  };
  r.checks.push_back(mc("gint-monte-carlo", gint, gaussian_quadratic_integral(M, m, Q)));
  r.checks.push_back(mc("cameron-martin-mass", cm, 1.0));
  r.checks.push_back(mc("rn-on-cut-mass", rn, 1.0));
  r.checks.push_back(mc("rn-covariance-form-mass", rnc, 1.0));
  return r;
}

using VerifyFn = std::function<Report(const json&, std::uint64_t)>;

const std::map<std::string, VerifyFn>& registry() {
  static const std::map<std::string, VerifyFn> r{
      {"det-factorization", verify_det_factorization},
      {"loop-mass-routes", verify_loop_mass_routes},
      {"fredholm-symmetry", verify_fredholm_symmetry},
      {"pfident-exponents", verify_pfident},
      {"reg-energy", verify_reg_energy},
      {"pa-scaling", verify_pa_scaling},
      {"semicircle", verify_semicircle},
      {"temperley", verify_temperley},
      {"lerw-exit", verify_lerw_exit},
      {"martingale", verify_martingale},
      {"exp-martingale", verify_exp_martingale},
      {"coupling-constant", verify_coupling_constant},
      {"cm-density", verify_cm_density},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& verify_names() {
  static const std::vector<std::string> names{
      "det-factorization", "loop-mass-routes", "fredholm-symmetry", "pfident-exponents", "reg-energy",
      "pa-scaling",        "semicircle",       "temperley",         "lerw-exit",         "martingale",
      "exp-martingale",    "coupling-constant", "cm-density"};
  return names;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"sample-gff", "sample-ust", "run-sle", "level-line-driving",
                                              "height-vs-field"};
  return names;
}

Report verify(const std::string& name, const json& config, std::uint64_t seed) {
  auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown verify target '" + name + "'");
  if (!config.is_object() && !config.is_null()) throw std::invalid_argument("config must be a JSON object");
  return it->second(config.is_null() ? json::object() : config, seed);
}

json manifest(const std::string& command, const json& config, std::uint64_t seed, int workers,
              double wall_seconds) {
  json m;
  m["command"] = command;
  std::ostringstream h;
  h << std::hex << std::hash<std::string>{}(config.dump());
  m["config_hash"] = h.str();
  m["config"] = config;
  m["master_seed"] = seed;
  m["seed_scheme"] = "stream_rng(master, index): seed_seq of the 32-bit halves of splitmix64(master) and splitmix64(index ^ 0x5bd1e995)";
  m["worker_seeds"] = json::array();
  for (int w = 0; w < workers; ++w) m["worker_seeds"].push_back(splitmix64(seed ^ static_cast<std::uint64_t>(w)));
  std::ostringstream eigen, boost;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  m["versions"] = {{"sle-gff-lab", "0.1.0"}, {"compiler", __VERSION__}, {"eigen", eigen.str()}, {"boost", boost.str()}};
  m["wall_seconds"] = wall_seconds;
  return m;
}

LevelLineDisk level_line_disk(int radius) {
  if (radius < 4) throw std::invalid_argument("disk radius too small");
  const int M = radius + 2;
  Mask mask(2 * M + 1, std::vector<int>(4 * M + 1, 0));
  for (int r = 0; r <= 2 * M; ++r)
    for (int c = 0; c <= 4 * M; ++c) {
      cplx p = lattice_position(LatticeKind::triangular, c - 2 * M, r - M);
      if (std::abs(p) < radius) mask[r][c] = 1;
    }
  LevelLineDisk disk{LatticeDomain::triangular(mask), lattice_position(LatticeKind::triangular, 2 * M, M),
                     static_cast<double>(radius)};
  double bx = 1e300, by = 1e300;
  for (int k = 0; k < disk.domain.n_boundary(); ++k) {
    int v = disk.domain.boundary_at(k);
    cplx p = disk.domain.position(v) - disk.center;
    double dx = std::abs(p + disk.radius), dy = std::abs(p - disk.radius);
    if (dx < bx) bx = dx, disk.x = v;
    if (dy < by) by = dy, disk.y = v;
  }
  return disk;
}

std::optional<Driver> level_line_driver(const LevelLineDisk& disk, const GffSampler& sampler,
                                        const LevelLineOptions& opt, Rng& rng, std::vector<cplx>* mapped) {
  auto f = sampler.sample(rng);
  f.interior = sampler.mean() + opt.field_scale * (f.interior - sampler.mean());
  auto itf = zero_level_interface(disk.domain, f, disk.x);
  std::vector<cplx> w;
  const cplx I(0, 1);
  for (cplx z : itf.path) {
    cplx zeta = (z - disk.center) / (disk.radius + 1);
    cplx u = I * (1.0 + zeta) / (1.0 - zeta);
    if (std::abs(u) > opt.cut_radius) break;
    w.push_back(u);
  }
  if (w.size() < 2) return std::nullopt;
  std::vector<cplx> curve{0.0};
  double x0 = w[0].real();
  for (cplx u : w) curve.push_back(u - x0);
  if (mapped) *mapped = curve;
  try {
    return extract_driving(curve);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

LevelLineStats level_line_experiment(int radius, long paths, std::uint64_t seed, const LevelLineOptions& opt,
                                     const std::string& out_dir) {
  auto disk = level_line_disk(radius);
  GffSampler sampler(disk.domain, two_arc_boundary(disk.domain, disk.x, disk.y, std::sqrt(pi / 8)));
  LevelLineStats st;
  st.paths = paths;
  st.t = opt.run_time / 4;
  std::vector<double> wt, inc;
  std::ofstream csv;
  if (!out_dir.empty()) {
    csv.open(fs::path(out_dir) / "level_line_driving.csv");
    csv.precision(17);
    csv << "path,T,W_t,W_2t\n";
  }
  for (long p = 0; p < paths; ++p) {
    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(p));
    auto d = level_line_driver(disk, sampler, opt, rng);
    if (!d) {
      ++st.failed;
      continue;
    }
    if (d->T() < 2 * st.t) continue;
    double a = d->at(st.t), b = d->at(2 * st.t);
    wt.push_back(a);
    inc.push_back(b - a);
    if (csv) csv << p << ',' << d->T() << ',' << a << ',' << b << '\n';
  }
  st.used = static_cast<long>(wt.size());
  if (st.used < 10) return st;
  Running acc;
  for (double v : wt) acc.add(v);
  st.mean = acc.mean;
  st.var_ratio = acc.variance() / (4 * st.t);
  st.jb_pvalue = jarque_bera_pvalue(wt);
  st.inc_jb_pvalue = jarque_bera_pvalue(inc);
  st.pass = st.var_ratio >= 0.85 && st.var_ratio <= 1.15 && st.jb_pvalue > 0.001 && st.inc_jb_pvalue > 0.001;
  return st;
}

namespace {

fs::path ensure_dir(const std::string& out) {
  fs::path p = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(p);
  return p;
}

LatticeDomain domain_from_config(const json& cfg, LatticeKind fallback_kind) {
  if (cfg.contains("domain")) return domain_from_json(cfg.at("domain"));
  int rows = get(cfg, "rows", 16), cols = get(cfg, "cols", 16);
  return fallback_kind == LatticeKind::triangular ? LatticeDomain::triangular(rectangle_mask(rows, cols))
                                                  : LatticeDomain::square(rectangle_mask(rows, cols));
}

ExperimentResult run_sample_gff(const json& cfg, std::uint64_t seed, const fs::path& out) {
  auto kind = get<std::string>(cfg, "lattice", "square") == "triangular" ? LatticeKind::triangular
                                                                          : LatticeKind::square;
  auto d = domain_from_config(cfg, kind);
  const int samples = get(cfg, "samples", 1);
  double lambda = get(cfg, "lambda", 0.0);
  Eigen::VectorXd bv = Eigen::VectorXd::Zero(d.n_boundary());
  if (lambda != 0) {
    int x = d.boundary_at(0), y = d.boundary_at(d.n_boundary() / 2);
    bv = two_arc_boundary(d, x, y, lambda);
  }
  GffSampler s(d, bv);
  ExperimentResult res;
  for (int i = 0; i < samples; ++i) {
    Rng rng = stream_rng(seed, i);
    auto f = s.sample(rng);
    auto path = out / ("gff_" + std::to_string(i) + ".csv");
    std::ofstream os(path);
    write_field_csv(os, d, f);
    res.files.push_back(path.string());
  }
  res.summary = {{"vertices", d.n_interior()}, {"samples", samples}, {"log_partition", log_partition_fn(d, bv)}};
  return res;
}

ExperimentResult run_sample_ust(const json& cfg, std::uint64_t seed, const fs::path& out) {
  auto d = domain_from_config(cfg, LatticeKind::square);
  auto g = double_graph(d);
  const int samples = get(cfg, "samples", 1);
  ExperimentResult res;
  for (int i = 0; i < samples; ++i) {
    Rng rng = stream_rng(seed, i);
    auto t = wilson_ust(d, rng);
    auto m = temperley_matching(d, g, t);
    auto h = height_function(d, g, m);
    std::string tag = std::to_string(i);
    write_tree_csv(d, t, (out / ("tree_" + tag + ".csv")).string());
    write_matching_csv(d, g, m, (out / ("matching_" + tag + ".csv")).string());
    write_height_csv(h, (out / ("height_" + tag + ".csv")).string());
    for (auto f : {"tree_", "matching_", "height_"}) res.files.push_back((out / (f + tag + ".csv")).string());
  }
  auto count = spanning_tree_count(d);
  res.summary = {{"vertices", d.n_interior()}, {"samples", samples}, {"log_tree_count", count.log_count}};
  if (!count.exact.empty()) res.summary["tree_count"] = count.exact;
  return res;
}

ExperimentResult run_sle(const json& cfg, std::uint64_t seed, const fs::path& out) {
  double kappa = get(cfg, "kappa", 4.0), T = get(cfg, "T", 1.0), dt = get(cfg, "dt", 1e-3);
  const int paths = get(cfg, "paths", 100);
  bool traces = get(cfg, "traces", true);
  ExperimentResult res;
  Running end;
  for (int p = 0; p < paths; ++p) {
    Rng rng = stream_rng(seed, p);
    auto d = sample_sle_driver(kappa, T, dt, rng);
    end.add(d.W.back());
    std::string tag = std::to_string(p);
    write_driver_csv(d, (out / ("driver_" + tag + ".csv")).string());
    res.files.push_back((out / ("driver_" + tag + ".csv")).string());
    if (traces) {
      write_trace_csv(trace(evolve(d)), (out / ("trace_" + tag + ".csv")).string());
      res.files.push_back((out / ("trace_" + tag + ".csv")).string());
    }
  }
  res.summary = {{"kappa", kappa}, {"T", T}, {"paths", paths}, {"var_W_T_over_kappa_T", end.variance() / (kappa * T)}};
  return res;
}

ExperimentResult run_level_line(const json& cfg, std::uint64_t seed, const fs::path& out) {
  LevelLineOptions opt;
  opt.run_time = get(cfg, "run_time", opt.run_time);
  opt.cut_radius = get(cfg, "cut_radius", opt.cut_radius);
  opt.field_scale = get(cfg, "field_scale", opt.field_scale);
  auto st = level_line_experiment(get(cfg, "mesh", 64), get(cfg, "paths", 2000L), seed, opt, out.string());
  ExperimentResult res;
  res.summary = {{"paths", st.paths},         {"used", st.used},
                 {"failed", st.failed},       {"t", st.t},
                 {"var_ratio", st.var_ratio}, {"var_over_t", 4 * st.var_ratio},
                 {"mean", st.mean},           {"jb_pvalue", st.jb_pvalue},
                 {"increment_jb_pvalue", st.inc_jb_pvalue}};
  res.pass = st.pass;
  res.files.push_back((out / "level_line_driving.csv").string());
  return res;
}

// variance of the Temperley height at the centre against the GFF variance
ExperimentResult run_height_vs_field(const json& cfg, std::uint64_t seed, const fs::path& out) {
  auto sides = get<std::vector<int>>(cfg, "sides", {8, 16, 32});
  const int samples = get(cfg, "samples", 400);
  ExperimentResult res;
  auto path = out / "height_vs_field.csv";
  std::ofstream csv(path);
  csv.precision(12);
  csv << "side,var_height,var_gff,ratio\n";
  json rows = json::array();
  for (int L : sides) {
    auto d = LatticeDomain::square(rectangle_mask(L, L));
    auto g = double_graph(d);
    int c = d.vertex_at(L / 2, L / 2);
    double var_gff = green_block(d, {c})(0, 0);
    Running h;
    for (int i = 0; i < samples; ++i) {
      Rng rng = stream_rng(seed, static_cast<std::uint64_t>(L) * 1000003 + i);
      auto t = wilson_ust(d, rng);
      auto hf = height_function(d, g, temperley_matching(d, g, t));
      h.add(hf.at(2 * (L / 2), 2 * (L / 2)));
    }
    csv << L << ',' << h.variance() << ',' << var_gff << ',' << h.variance() / var_gff << '\n';
    rows.push_back({{"side", L}, {"var_height", h.variance()}, {"var_gff", var_gff}});
  }
  res.summary = {{"rows", rows}};
  res.files.push_back(path.string());
  return res;
}

}  // namespace

ExperimentResult experiment(const std::string& name, const json& config, std::uint64_t seed,
                            const std::string& out_dir) {
  static const std::map<std::string, std::function<ExperimentResult(const json&, std::uint64_t, const fs::path&)>>
      runners{{"sample-gff", run_sample_gff},
              {"sample-ust", run_sample_ust},
              {"run-sle", run_sle},
              {"level-line-driving", run_level_line},
              {"height-vs-field", run_height_vs_field}};
  auto it = runners.find(name);
  if (it == runners.end()) throw std::invalid_argument("unknown experiment '" + name + "'");
  json cfg = config.is_null() ? json::object() : config;
  if (!cfg.is_object()) throw std::invalid_argument("config must be a JSON object");
  return it->second(cfg, seed, ensure_dir(out_dir));
}

}  // namespace sgl::lab
