#pragma once

#include <array>
#include <functional>
#include <ostream>
#include <vector>

#include "sgl/lattice.hpp"
#include "sgl/linalg.hpp"
#include "sgl/random.hpp"

namespace sgl {

struct ABBoundary {
  std::vector<double> a;
  double b = 0;
  int anchor = -1;
  std::vector<int> marked;   // x_1..x_n, y
  Eigen::VectorXd resolved;  // indexed by boundary order
};

// Values on the boundary walk: increments b * turning angle between marked
// points, a jump of pi*a_i when stepping past x_i and of -pi*sum(a) - 2*pi*b
// when stepping past y. The marked vertex itself carries the value before
// the jump.
ABBoundary ab_boundary_values(const LatticeDomain& d, const std::vector<int>& marked,
                              const std::vector<double>& a, double b, int anchor);

// -lambda on the ccw arc (y, x], +lambda on (x, y]
Eigen::VectorXd two_arc_boundary(const LatticeDomain& d, int x, int y, double lambda);

struct FieldSample {
  Eigen::VectorXd interior;
  Eigen::VectorXd boundary;
  Eigen::VectorXd mean;
  double value(const LatticeDomain& d, int v) const {
    return d.is_boundary(v) ? boundary[d.boundary_index(v)] : interior[v];
  }
};

class GffSampler {
 public:
  GffSampler(const LatticeDomain& d, const Eigen::VectorXd& boundary_values);
  FieldSample sample(Rng& rng) const;
  const Eigen::VectorXd& mean() const { return mean_; }
  const Factorization& factorization() const { return fact_; }

 private:
  Factorization fact_;
  Eigen::VectorXd boundary_, mean_;
};

FieldSample sample_gff(const LatticeDomain& d, const Eigen::VectorXd& boundary_values, Rng& rng);

double dirichlet_energy(const LatticeDomain& d, const Eigen::VectorXd& interior,
                        const Eigen::VectorXd& boundary_values);
double log_partition_fn(const LatticeDomain& d, const Eigen::VectorXd& boundary_values);

struct MarkovParts {
  Eigen::VectorXd phi_l, pw, phi_r;
};

// Reuses one factorization per component across samples.
class MarkovDecomposer {
 public:
  MarkovDecomposer(const LatticeDomain& d, const Cut& cut);
  MarkovParts operator()(const Eigen::VectorXd& interior) const;
  Eigen::VectorXd trace(const Eigen::VectorXd& interior) const;

 private:
  const LatticeDomain* d_;
  Cut cut_;
  std::vector<Factorization> facts_;
  std::vector<Eigen::MatrixXd> coupling_;
};

MarkovParts markov_decompose(const LatticeDomain& d, const FieldSample& s, const Cut& cut);

// int exp(h'Mh/2 + m'h) dN(0,Q)(h); throws unless 1 - Q^{1/2} M Q^{1/2} > 0
double log_gaussian_quadratic_integral(const DenseSym& M, const Eigen::VectorXd& m,
                                       const DenseSym& Q);
double gaussian_quadratic_integral(const DenseSym& M, const Eigen::VectorXd& m,
                                   const DenseSym& Q);

// dN(m,Q)/dN(0,Q) at h
double cameron_martin_density(const Eigen::VectorXd& h, const Eigen::VectorXd& m,
                              const DenseSym& Q);

// density of N(0, N2^{-1}) against N(0, N1^{-1}) at w
double rn_density_on_cut(const Eigen::VectorXd& w, const DenseSym& N1, const DenseSym& N2);
// dN(0,R)/dN(0,Q) at h in the form det(1-S)^{-1/2} exp(-<S(1-S)^{-1}Q^{-1/2}h, Q^{-1/2}h>/2)
// with S = 1 - Q^{-1/2} R Q^{-1/2}
double rn_density_covariance(const Eigen::VectorXd& h, const DenseSym& Q, const DenseSym& R);

struct CutDomain {
  LatticeDomain domain;
  Eigen::VectorXd boundary;                  // by boundary order
  std::vector<std::array<int, 2>> delta;     // cut cells, shared by all four
};

struct CouplingResult {
  double lhs = 0, rhs = 0, residual = 0;
  double log_lhs = 0, log_rhs = 0;
};

// g = {11, 12, 21, 22}; lhs is the integral of the product of the two
// Radon-Nikodym derivatives of the cut traces, rhs the partition-function
// ratio Z11 Z22 / (Z12 Z21)
CouplingResult coupling_constant_check(const std::array<CutDomain, 4>& g);

// Hybrid domains glued along a column: columns < cut_col from side i,
// columns >= cut_col from side j, cut = column cut_col. Masks and boundary
// functions must agree on the collar cut_col-1..cut_col+1.
struct CouplingSide {
  Mask mask;
  std::function<double(int i, int j)> boundary;
};
std::array<CutDomain, 4> hybrid_domains(LatticeKind kind, const CouplingSide& s1,
                                        const CouplingSide& s2, int cut_col);

struct Interface {
  std::vector<Edge> crossed;  // (plus vertex, minus vertex)
  std::vector<cplx> path;     // midpoints of crossed edges, lattice units
  int perturbed = 0;          // zero values treated as positive
};

// Exploration between the sign clusters, starting at the first (-,+) pair
// of consecutive boundary vertices found walking ccw from `start`, keeping
// + on the right.
Interface zero_level_interface(const LatticeDomain& d, const FieldSample& s, int start);

// true if v is connected to the + side of the interface without crossing it
bool on_plus_side(const LatticeDomain& d, const Interface& itf, const FieldSample& s, int v);

void write_field_csv(std::ostream& os, const LatticeDomain& d, const FieldSample& s);

}  // namespace sgl
