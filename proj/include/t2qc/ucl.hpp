#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "t2qc/dataset.hpp"
#include "t2qc/subset.hpp"

namespace t2qc {

struct UclConfig {
    int m = 19;               // phase-1 day count fed to the simulation
    int n_bar = 1;            // average per-day sample size
    double alpha = 0.02;      // false-alarm rate
    int inner_reps = 10000;   // T-squared draws per replicate
    int outer_reps = 100;     // independent estimation replicates
    std::uint64_t seed = 0;
    bool use_estimation = true;  // false: score against the true parameters
    int threads = 0;             // 0 = hardware concurrency

    void validate() const;
};

struct UclEntry {
    SignSubset subset = 0;
    double ucl = 0.0;
    double se = 0.0;  // Monte-Carlo standard error of the averaged limit
    int retries = 0;
};

struct UclTable {
    std::vector<std::string> signs;
    UclConfig config;
    std::map<SignSubset, UclEntry> entries;

    const UclEntry& lookup(SignSubset subset) const;
    bool covers(SignSubset subset) const { return entries.count(subset) != 0; }
};

/// Average n_ij over the phase-1 window and all signs, rounded to the
/// nearest integer.
int n_bar(const StudyDataset& data, const Date& first, const Date& last);

/// Monte-Carlo control limit for one sign subset: per replicate, draw
/// m*n_bar observation vectors, fit robust estimates, draw `inner_reps`
/// daily means from N(mu, sigma/n_bar), score them against the fitted
/// parameters, and take the ceil((1-alpha)*inner) order statistic; the limit
/// is the mean over replicates.
UclEntry simulate_ucl(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                      SignSubset subset, const UclConfig& cfg);

/// Limits for every nonempty subset of the sign list (p <= 12), each from
/// its own deterministic substream of the seed.
UclTable ucl_table(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                   const std::vector<std::string>& signs, const UclConfig& cfg);

/// Limits for an explicit list of subsets (same substreams as ucl_table).
UclTable ucl_table_for(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                       const std::vector<std::string>& signs,
                       const std::vector<SignSubset>& subsets,
                       const UclConfig& cfg);

void save_ucl_table(const std::string& path, const UclTable& table);
UclTable load_ucl_table(const std::string& path);

}  // namespace t2qc
