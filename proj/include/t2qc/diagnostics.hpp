#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace t2qc {

struct TestResult {
    std::string name;
    std::vector<std::pair<std::string, double>> statistics;
    std::vector<std::pair<std::string, double>> p_values;
    double level = 0.05;
    bool pass = false;
    int n_used = 0;

    double p_value(const std::string& key) const;
};

/// Mardia's multivariate skewness and kurtosis tests on complete rows.
/// Skewness: N*b1p/6 against chi-square with p(p+1)(p+2)/6 df; kurtosis:
/// normal reference for b2p. Passes when both p-values exceed the level.
TestResult mardia_test(const Eigen::MatrixXd& rows, double level = 0.05);

/// Bartlett's test of sphericity: -(n-1-(2p+5)/6) log det(R) against
/// chi-square with p(p-1)/2 df. Passes (gate: correlation present) when the
/// p-value is below the level.
TestResult bartlett_sphericity(const Eigen::MatrixXd& corr, int n,
                               double level = 0.05);

struct AcfResult {
    std::vector<double> r;  // indexed by lag, 0..max_lag; r[0] == 1
    double band = 0.0;      // +-1.96/sqrt(N)
    int n_used = 0;
};

/// Sample autocorrelations of a gappy series: missing entries are dropped
/// and the remaining points treated as consecutive.
AcfResult acf(const std::vector<std::optional<double>>& series, int max_lag);

}  // namespace t2qc
