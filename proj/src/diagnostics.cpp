#include "t2qc/diagnostics.hpp"

#include <cmath>

#include "t2qc/errors.hpp"
#include "t2qc/linalg.hpp"
#include "t2qc/statfun.hpp"

namespace t2qc {

double TestResult::p_value(const std::string& key) const {
    for (const auto& [k, v] : p_values)
        if (k == key) return v;
    throw DataError("no p-value named '" + key + "'");
}

TestResult mardia_test(const Eigen::MatrixXd& rows, double level) {
    const int n = int(rows.rows());
    const int p = int(rows.cols());
    if (n < p + 2) throw DataError("mardia_test: need at least p+2 rows");

    const Eigen::VectorXd mean = rows.colwise().mean();
    Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
    Eigen::MatrixXd s = (centered.transpose() * centered) / double(n);  // MLE

    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success || min_eigen_ratio(s) <= 1e-12)
        throw NumericError("mardia_test: singular sample covariance");

    // u_i = S^{-1/2} (x_i - mean); b1p = sum of squared entries of the third
    // moment tensor of u, b2p = mean squared norm^2.
    Eigen::MatrixXd u = llt.matrixL().solve(centered.transpose()).transpose();

    double b2p = 0.0;
    for (int i = 0; i < n; ++i) {
        const double q = u.row(i).squaredNorm();
        b2p += q * q;
    }
    b2p /= double(n);

    double b1p = 0.0;
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
            for (int c = 0; c < p; ++c) {
                double m = 0.0;
                for (int i = 0; i < n; ++i) m += u(i, a) * u(i, b) * u(i, c);
                m /= double(n);
                b1p += m * m;
            }

    const double skew_stat = double(n) * b1p / 6.0;
    const double skew_df = double(p) * (p + 1) * (p + 2) / 6.0;
    const double skew_p = chi2_sf(skew_stat, skew_df);

    const double kurt_mean = double(p) * (p + 2);
    const double kurt_sd = std::sqrt(8.0 * double(p) * (p + 2) / double(n));
    const double kurt_z = (b2p - kurt_mean) / kurt_sd;
    const double kurt_p = 2.0 * normal_sf(std::fabs(kurt_z));

    TestResult res;
    res.name = "mardia";
    res.statistics = {{"b1p", b1p}, {"skewness_chi2", skew_stat},
                      {"b2p", b2p}, {"kurtosis_z", kurt_z}};
    res.p_values = {{"skewness", skew_p}, {"kurtosis", kurt_p}};
    res.level = level;
    res.pass = skew_p > level && kurt_p > level;
    res.n_used = n;
    return res;
}

TestResult bartlett_sphericity(const Eigen::MatrixXd& corr, int n, double level) {
    const int p = int(corr.rows());
    if (corr.cols() != p) throw DataError("bartlett: matrix not square");
    if (n <= p) throw DataError("bartlett: sample size must exceed p");
    if (!corr.isApprox(corr.transpose(), 1e-12))
        throw DataError("bartlett: matrix not symmetric");
    for (int j = 0; j < p; ++j)
        if (std::fabs(corr(j, j) - 1.0) > 1e-9)
            throw DataError("bartlett: diagonal must be 1");

    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
        throw NumericError("bartlett: correlation matrix not positive definite");
    double logdet = 0.0;
    for (int j = 0; j < p; ++j)
        logdet += 2.0 * std::log(llt.matrixL()(j, j));

    const double stat = -(double(n) - 1.0 - (2.0 * p + 5.0) / 6.0) * logdet;
    const double df = double(p) * (p - 1) / 2.0;
    const double pv = chi2_sf(stat, df);

    TestResult res;
    res.name = "bartlett_sphericity";
    res.statistics = {{"chi2", stat}, {"df", df}};
    res.p_values = {{"sphericity", pv}};
    res.level = level;
    res.pass = pv < level;  // gate: correlations present
    res.n_used = n;
    return res;
}

AcfResult acf(const std::vector<std::optional<double>>& series, int max_lag) {
    std::vector<double> x;
    for (const auto& v : series)
        if (v) x.push_back(*v);
    const int n = int(x.size());
    if (n < 10) throw DataError("acf: need at least 10 observed points");
    if (max_lag < 1 || max_lag >= n) throw DataError("acf: bad max_lag");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (denom <= 0.0) throw NumericError("acf: zero-variance series");

    AcfResult res;
    res.n_used = n;
    res.band = 1.96 / std::sqrt(double(n));
    res.r.resize(max_lag + 1);
    res.r[0] = 1.0;
    for (int h = 1; h <= max_lag; ++h) {
        double num = 0.0;
        for (int t = 0; t + h < n; ++t)
            num += (x[t] - mean) * (x[t + h] - mean);
        res.r[h] = num / denom;
    }
    return res;
}

}  // namespace t2qc
