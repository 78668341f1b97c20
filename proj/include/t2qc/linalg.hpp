#pragma once

#include <Eigen/Dense>

#include "t2qc/subset.hpp"

namespace t2qc {

struct EigenSym {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // columns match values
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations
/// (off-diagonal Frobenius tolerance 1e-12 relative, at most 100 sweeps).
EigenSym jacobi_eigensym(const Eigen::MatrixXd& a);

/// Cholesky-based solver for a symmetric positive-definite system with a
/// condition-number guard. Construction throws NumericError when the matrix
/// is not PD or its spectral condition number exceeds `cond_limit`.
class SpdSolver {
  public:
    explicit SpdSolver(const Eigen::MatrixXd& s, double cond_limit = 1e12);

    /// d' S^{-1} d via the factorization (no explicit inverse).
    double quad_form(const Eigen::VectorXd& d) const;

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

    double condition() const { return cond_; }

  private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double cond_ = 0.0;
};

/// Rows/columns of `m` restricted to the subset, preserving order.
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, SignSubset subset);
Eigen::VectorXd subvector(const Eigen::VectorXd& v, SignSubset subset);

/// Smallest eigenvalue relative to the largest; PD check helper.
double min_eigen_ratio(const Eigen::MatrixXd& sym);

}  // namespace t2qc
