#pragma once

#include <array>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sgl/lattice.hpp"

namespace sgl {

using SpMat = Eigen::SparseMatrix<double>;
using DenseSym = Eigen::MatrixXd;

struct SparseSym {
  SpMat a;
  std::vector<std::array<int, 2>> coords;  // grid coordinates per row, for ordering
  int n() const { return static_cast<int>(a.rows()); }
};

// Cholesky factorization behind a nested-dissection permutation. Immutable
// once built; solves are const and may run concurrently.
class Factorization {
 public:
  explicit Factorization(const SparseSym& A);
  int n() const { return n_; }
  double logdet() const { return logdet_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  // L^{-T} xi mapped back to the original ordering: covariance A^{-1} when
  // xi is standard normal.
  Eigen::VectorXd correlate(const Eigen::VectorXd& xi) const;

 private:
  int n_ = 0;
  std::vector<int> order_;  // new position -> original row
  using LLT = Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>;
  std::shared_ptr<const LLT> llt_;
  double logdet_ = 0;
};

std::vector<int> nested_dissection(const std::vector<std::array<int, 2>>& coords);

SparseSym laplacian(const LatticeDomain& d);
// principal submatrix of the Dirichlet Laplacian on the given interior
// vertices (rows in the order given); everything else acts as boundary
SparseSym laplacian(const LatticeDomain& d, const std::vector<int>& rows);
// drop the listed interior vertices (they become Dirichlet)
SparseSym laplacian_without(const LatticeDomain& d, const std::vector<int>& removed);

double logdet(const SparseSym& A);
double logdet(const DenseSym& A);

struct TreeCount {
  double log_count = 0;
  std::string exact;  // decimal; empty when exact mode was not used
};
// rooted: all boundary vertices merged into a root. Exact big-integer
// arithmetic is used when the matrix has at most 100 rows.
TreeCount spanning_tree_count(const LatticeDomain& d, bool rooted_at_boundary = true);

DenseSym green_block(const LatticeDomain& d, const std::vector<int>& S);

// boundary_values indexed by boundary order (size n_boundary)
Eigen::VectorXd harmonic_extension(const LatticeDomain& d, const Eigen::VectorXd& boundary_values);
Eigen::VectorXd boundary_flux(const LatticeDomain& d, const Eigen::VectorXd& boundary_values);

DenseSym neumann_jump(const LatticeDomain& d, const Cut& cut);

struct DetCheck {
  double lhs = 0, rhs = 0, residual = 0;
};
DetCheck det_factorization_check(const LatticeDomain& d, const Cut& cut);

void write_matrix_market(std::ostream& os, const SparseSym& A);
void write_matrix_market(std::ostream& os, const Eigen::MatrixXd& A);

}  // namespace sgl
