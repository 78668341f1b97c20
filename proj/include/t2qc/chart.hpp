#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "t2qc/dataset.hpp"
#include "t2qc/myt.hpp"
#include "t2qc/robust.hpp"
#include "t2qc/subset.hpp"
#include "t2qc/ucl.hpp"

namespace t2qc {

/// Quadratic-form monitoring statistic (x - mu)' S^{-1} (x - mu), computed
/// through a symmetric factorization with a condition guard at 1e12.
double t_squared(const Eigen::VectorXd& mean_vec, const Eigen::VectorXd& mu,
                 const Eigen::MatrixXd& sigma_xbar);

/// The day's monitoring system restricted to signs with at least one
/// observation: reduced mean vector, reduced center, W ⊙ Σ̂ sub-block, and
/// the active subset identity for the control-limit lookup.
struct ReducedSystem {
    Eigen::VectorXd mean;
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma_xbar;
    SignSubset active = 0;
};

/// Empty optional when every sign is unmeasured (a "no data" day).
std::optional<ReducedSystem> reduce_dimensions(const DaySummary& summary,
                                               const RobustEstimates& est);

enum class PointStatus { ok, no_data, numeric_error };

struct ChartPoint {
    Date day;
    SignSubset active = 0;
    double t2 = 0.0;   // meaningful only when status == ok
    double ucl = 0.0;  // likewise
    bool signal = false;
    bool phase1 = false;
    PointStatus status = PointStatus::ok;
    std::string error;  // set when status == numeric_error
    std::vector<int> counts;
    std::optional<MytReport> myt;
};

struct ChartSeries {
    std::vector<std::string> signs;
    std::vector<ChartPoint> points;

    bool any_signal(bool prospective_only = true) const {
        for (const auto& pt : points)
            if (pt.signal && (!prospective_only || !pt.phase1)) return true;
        return false;
    }
};

struct ChartOptions {
    int phase1_days = 19;          // points in the estimation window get flagged
    bool include_phase1 = true;    // chart them retrospectively
    bool decompose_signals = false;  // attach MYT reports on signal days
};

/// One point per study day: daily summary -> weighting -> scaled covariance
/// -> dimension reduction -> T-squared vs the subset's control limit.
/// Numerical failures are recorded on the day and charting continues.
ChartSeries run_chart(const StudyDataset& data, const RobustEstimates& est,
                      const UclTable& ucls, const ChartOptions& options = {});

void write_chart_csv(std::ostream& out, const ChartSeries& series);
void write_chart_csv_file(const std::string& path, const ChartSeries& series);

/// JSON variant with embedded decomposition reports.
void write_chart_json_file(const std::string& path, const ChartSeries& series);

}  // namespace t2qc
