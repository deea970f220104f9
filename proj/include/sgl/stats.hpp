#pragma once

#include <cmath>
#include <vector>

namespace sgl {

struct Running {
  long n = 0;
  double mean = 0, m2 = 0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double se() const { return n > 1 ? std::sqrt(variance() / n) : 0.0; }
};

// sample covariance of paired observations
double covariance(const std::vector<double>& x, const std::vector<double>& y);

// upper tail of the chi-squared distribution
double chi2_pvalue(double stat, double dof);
// Pearson test of observed counts against probabilities (bins with
// expected count below min_expected are pooled)
double chi2_gof_pvalue(const std::vector<double>& observed,
                       const std::vector<double>& probabilities, double min_expected = 5);
// Jarque-Bera normality test
double jarque_bera_pvalue(const std::vector<double>& x);
double normal_cdf(double x);

}  // namespace sgl
