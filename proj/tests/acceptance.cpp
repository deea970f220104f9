// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "lab.hpp"

namespace {

using namespace sgl::lab;

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<std::pair<bool, std::string>()> run;
};

std::string describe(const Report& r) {
  std::string s;
  char buf[256];
  for (const auto& c : r.checks) {
    std::snprintf(buf, sizeof buf, " [%s %s lhs=%.6g rhs=%.6g res=%.3g tol=%.3g]", c.name.c_str(),
                  c.pass ? "ok" : "bad", c.lhs, c.rhs, c.residual, c.tolerance);
    s += buf;
  }
  return s;
}

std::pair<bool, std::string> suites(const std::vector<std::string>& names, std::uint64_t seed,
                                    const std::function<bool(const Check&)>& keep = {}) {
  bool ok = true;
  std::string s;
  for (const auto& n : names) {
    auto r = verify(n, json::object(), seed);
    if (keep) std::erase_if(r.checks, [&](const Check& c) { return !keep(c); });
    ok = ok && r.pass();
    s += " " + n + ":" + describe(r);
  }
  return {ok, s};
}

}  // namespace

int main() {
  // failing criteria recorded as documented deviations
  const std::set<int> known{3, 4};
  std::vector<Criterion> cs{
      {1, "determinant factorization", 5, [] { return suites({"det-factorization"}, 1); }},
      {2, "loop-mass three routes", 10, [] { return suites({"loop-mass-routes"}, 2); }},
      {3, "semicircle benchmark", 30,
       [] { return suites({"semicircle"}, 3, [](const Check& c) { return c.name.rfind("semicircle", 0) == 0; }); }},
      {4, "Moebius/Schwarzian transport", 30,
       [] { return suites({"semicircle"}, 4, [](const Check& c) { return c.name == "moebius-schwarzian"; }); }},
      {5, "exponent algebra", 1, [] { return suites({"pfident-exponents"}, 5); }},
      {6, "regularized Dirichlet energy", 60, [] { return suites({"reg-energy"}, 6); }},
      {7, "zeta-rectangle scaling", 60, [] { return suites({"pa-scaling"}, 7); }},
      {8, "martingale suite", 300, [] { return suites({"martingale", "exp-martingale"}, 8); }},
      {9, "coupling constant", 10, [] { return suites({"coupling-constant"}, 9); }},
      {10, "Temperley and LERW statistics", 120, [] { return suites({"temperley", "lerw-exit"}, 10); }},
      {11, "kappa=4 level-line driving", 1800,
       [] {
         auto st = level_line_experiment(64, 2000, 11);
         char buf[256];
         std::snprintf(buf, sizeof buf, " paths=%ld used=%ld failed=%ld t=%.3g var_ratio=%.4f jb_p=%.3g inc_jb_p=%.3g",
                       st.paths, st.used, st.failed, st.t, st.var_ratio, st.jb_pvalue, st.inc_jb_pvalue);
         return std::pair<bool, std::string>{st.pass, buf};
       }},
      {12, "Gaussian density suite", 60, [] { return suites({"cm-density"}, 12); }},
  };

  int hard_fail = 0;
  for (const auto& c : cs) {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      std::tie(pass, detail) = c.run();
    } catch (const std::exception& e) {
      detail = std::string(" exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < c.budget_seconds;
    bool ok = pass && in_time;
    const char* note = ok ? "" : known.count(c.id) ? " (known deviation, see decisions ledger)" : "";
    std::printf("Criterion %d: %s %s (%.1f s of %.0f s)%s%s\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str(), secs,
                c.budget_seconds, note, detail.c_str());
    std::fflush(stdout);
    if (!ok && !known.count(c.id)) ++hard_fail;
  }
  return hard_fail == 0 ? 0 : 1;
}
