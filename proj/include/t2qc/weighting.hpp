#pragma once

#include <Eigen/Dense>

#include "t2qc/dataset.hpp"
#include "t2qc/subset.hpp"

namespace t2qc {

/// Per-day weighting matrix: entry (j,j') = |U_ij n U_ij'| / (n_ij n_ij').
/// Rows/columns of signs with zero observations carry no meaning and are
/// excluded via the `defined` mask instead of 0/0 arithmetic.
struct WeightMatrix {
    Date day;
    Eigen::MatrixXd entries;  // zero where undefined
    SignSubset defined = 0;

    int p() const { return int(entries.rows()); }
};

WeightMatrix weight_matrix(const DaySummary& summary);

/// Hadamard product W ⊙ Σ restricted to the defined signs; exactly symmetric.
struct ScaledCovariance {
    Eigen::MatrixXd sigma_xbar;  // |defined| x |defined|
    SignSubset active = 0;
};

ScaledCovariance scaled_covariance(const WeightMatrix& w,
                                   const Eigen::MatrixXd& sigma);

}  // namespace t2qc
