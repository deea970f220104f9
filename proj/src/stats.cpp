#include "sgl/stats.hpp"

#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace sgl {

double covariance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("covariance: bad sizes");
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / (x.size() - 1);
}

double chi2_pvalue(double stat, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

double chi2_gof_pvalue(const std::vector<double>& obs, const std::vector<double>& p,
                       double min_expected) {
  double total = 0;
  for (double o : obs) total += o;
  double stat = 0, eo = 0, ee = 0;
  int bins = 0;
  for (size_t i = 0; i < obs.size(); ++i) {
    eo += obs[i];
    ee += p[i] * total;
    if (ee >= min_expected) {
      stat += (eo - ee) * (eo - ee) / ee;
      ++bins;
      eo = ee = 0;
    }
  }
  if (ee > 0) {
    stat += (eo - ee) * (eo - ee) / ee;
    ++bins;
  }
  if (bins < 2) return 1.0;
  return chi2_pvalue(stat, bins - 1);
}

double jarque_bera_pvalue(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double m = 0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  double s = m3 / std::pow(m2, 1.5), k = m4 / (m2 * m2);
  double jb = n / 6.0 * (s * s + 0.25 * (k - 3) * (k - 3));
  return chi2_pvalue(jb, 2);
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

}  // namespace sgl
