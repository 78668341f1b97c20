#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "t2qc/dataset.hpp"

namespace t2qc {

/// Robust univariate location and scale: the tau estimator with tuning
/// constants c1 = 4.5 (location weights) and c2 = 3.0 (scale rho), scale
/// consistency-corrected for the normal model.
struct TauEstimate {
    double location;
    double scale;
};

TauEstimate tau_location_scale(std::span<const double> x);

/// The tau scale alone; throws NumericError("degenerate scale") on constant
/// input.
double robust_scale(std::span<const double> x);

struct OgkOptions {
    int iterations = 2;     // orthogonalization passes
    bool reweight = true;   // one hard-rejection reweighting step
    double beta = 0.9;      // rejection quantile
};

struct RobustEstimates {
    std::vector<std::string> signs;  // empty when estimating unnamed columns
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    int n_used = 0;
    std::string scale_estimator;
    int iterations = 0;
    bool reweighted = false;

    int p() const { return int(mu.size()); }
};

/// Orthogonalized pairwise (Gnanadesikan-Kettenring) covariance with tau
/// scales, hard-rejection reweighting as the final step. Output is
/// symmetric positive definite on success.
RobustEstimates ogk_estimate(const Eigen::MatrixXd& rows,
                             const OgkOptions& options = {},
                             const std::vector<std::string>& names = {});

/// Rows = participant-days inside [first, last] with every sign observed,
/// ordered day-major then participant id.
Eigen::MatrixXd complete_case_matrix(const StudyDataset& data, const Date& first,
                                     const Date& last);

/// First `count` study days as an inclusive date range.
std::pair<Date, Date> phase1_range(const StudyDataset& data, int count);

void save_estimates(const std::string& path, const RobustEstimates& est);
RobustEstimates load_estimates(const std::string& path);

}  // namespace t2qc
