#include "t2qc/robust.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "t2qc/linalg.hpp"
#include "t2qc/statfun.hpp"

namespace t2qc {

namespace {

constexpr double kC1 = 4.5;
constexpr double kC2 = 3.0;

double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + n / 2;
    std::nth_element(v.begin(), mid, v.end());
    double hi = *mid;
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

// E[rho_{c2}] under the standard normal after MAD standardization; makes the
// tau scale consistent at the normal model.
double rho_consistency() {
    static const double es2 = [] {
        const double b = kC2 * 0.6744897501960817;  // c2 * qnorm(0.75)
        const double phi = std::exp(-0.5 * b * b) / std::sqrt(2.0 * M_PI);
        return 2.0 * ((1.0 - b * b) * normal_cdf(b) - b * phi + b * b) - 1.0;
    }();
    return es2;
}

}  // namespace

TauEstimate tau_location_scale(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw DataError("tau estimate needs at least 2 observations");

    std::vector<double> work(x.begin(), x.end());
    const double med = median_inplace(work);
    for (std::size_t i = 0; i < n; ++i) work[i] = std::fabs(x[i] - med);
    const double s0 = median_inplace(work);
    if (!(s0 > 0.0)) throw NumericError("degenerate scale");

    double wsum = 0.0, wxsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (x[i] - med) / (s0 * kC1);
        const double t = 1.0 - u * u;
        if (t > 0.0) {
            const double w = t * t;
            wsum += w;
            wxsum += w * x[i];
        }
    }
    const double mu = wxsum / wsum;

    double rho_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (x[i] - mu) / s0;
        rho_sum += std::min(z * z, kC2 * kC2);
    }
    const double scale = s0 * std::sqrt(rho_sum / (double(n) * rho_consistency()));
    return {mu, scale};
}

double robust_scale(std::span<const double> x) {
    return tau_location_scale(x).scale;
}

RobustEstimates ogk_estimate(const Eigen::MatrixXd& rows,
                             const OgkOptions& options,
                             const std::vector<std::string>& names) {
    const int n = int(rows.rows());
    const int p = int(rows.cols());
    if (p < 1) throw DataError("ogk_estimate: no columns");
    if (n < p + 2)
        throw InsufficientDataError("insufficient Phase I data: " + std::to_string(n) +
                        " rows for " + std::to_string(p) + " signs");

    auto col_scale = [&](const Eigen::MatrixXd& m, int j) {
        std::span<const double> col(m.col(j).data(), std::size_t(m.rows()));
        try {
            return tau_location_scale(col);
        } catch (const NumericError&) {
            std::string which = j < int(names.size()) ? names[j]
                                                      : "column " + std::to_string(j);
            throw NumericError("degenerate scale for sign " + which);
        }
    };

    // Orthogonalization passes: standardize columns by tau scale, estimate a
    // correlation-like matrix from pairwise Gnanadesikan-Kettenring
    // covariances, rotate onto its eigenvectors.
    Eigen::MatrixXd z = rows;
    Eigen::MatrixXd transform = Eigen::MatrixXd::Identity(p, p);
    std::vector<double> buf(std::size_t(n), 0.0);
    for (int pass = 0; pass < options.iterations; ++pass) {
        Eigen::VectorXd d(p);
        for (int j = 0; j < p; ++j) d[j] = col_scale(z, j).scale;
        Eigen::MatrixXd y = z * d.cwiseInverse().asDiagonal();

        Eigen::MatrixXd u = Eigen::MatrixXd::Identity(p, p);
        for (int j = 0; j < p; ++j) {
            for (int k = 0; k < j; ++k) {
                for (int i = 0; i < n; ++i) buf[i] = y(i, j) + y(i, k);
                const double sp = robust_scale(buf);
                for (int i = 0; i < n; ++i) buf[i] = y(i, j) - y(i, k);
                const double sm = robust_scale(buf);
                u(j, k) = u(k, j) = 0.25 * (sp * sp - sm * sm);
            }
        }
        const EigenSym es = jacobi_eigensym(u);
        z = y * es.vectors;
        transform = transform * d.asDiagonal() * es.vectors;
    }

    Eigen::VectorXd score_loc(p), score_scale(p);
    for (int j = 0; j < p; ++j) {
        const TauEstimate t = col_scale(z, j);
        score_loc[j] = t.location;
        score_scale[j] = t.scale;
    }
    Eigen::VectorXd mu = transform * score_loc;
    Eigen::MatrixXd sigma = transform * score_scale.cwiseAbs2().asDiagonal() *
                            transform.transpose();
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    int n_used = n;

    if (options.reweight) {
        // Squared distances in the orthogonalized metric equal the
        // Mahalanobis distances for the raw estimate.
        Eigen::VectorXd d2(n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < p; ++j) {
                const double t = (z(i, j) - score_loc[j]) / score_scale[j];
                s += t * t;
            }
            d2[i] = s;
        }
        std::vector<double> med_work(d2.data(), d2.data() + n);
        const double med_d2 = median_inplace(med_work);
        const double cutoff = chi2_quantile(options.beta, p) * med_d2 /
                              chi2_quantile(0.5, p);

        std::vector<int> keep;
        keep.reserve(n);
        for (int i = 0; i < n; ++i)
            if (d2[i] <= cutoff) keep.push_back(i);
        if (int(keep.size()) < p + 2)
            throw NumericError("reweighting rejected too many rows");

        Eigen::VectorXd wmu = Eigen::VectorXd::Zero(p);
        for (int i : keep) wmu += rows.row(i).transpose();
        wmu /= double(keep.size());
        Eigen::MatrixXd wcov = Eigen::MatrixXd::Zero(p, p);
        for (int i : keep) {
            Eigen::VectorXd c = rows.row(i).transpose() - wmu;
            wcov += c * c.transpose();
        }
        wcov /= double(keep.size());
        mu = wmu;
        sigma = 0.5 * (wcov + wcov.transpose()).eval();
        n_used = int(keep.size());
    }

    if (min_eigen_ratio(sigma) <= 1e-10)
        throw NumericError("robust covariance is numerically singular");

    RobustEstimates est;
    est.signs = names;
    est.mu = std::move(mu);
    est.sigma = std::move(sigma);
    est.n_used = n_used;
    est.scale_estimator = "tau(c1=4.5,c2=3.0)";
    est.iterations = options.iterations;
    est.reweighted = options.reweight;
    return est;
}

Eigen::MatrixXd complete_case_matrix(const StudyDataset& data, const Date& first,
                                     const Date& last) {
    const int p = data.p();
    std::vector<Eigen::VectorXd> rows;
    for (int d = 0; d < data.n_days(); ++d) {
        const Date day = data.days()[d];
        if (day < first || day > last) continue;
        for (int k = 0; k < data.n_participants(); ++k) {
            Eigen::VectorXd row(p);
            bool complete = true;
            for (int j = 0; j < p && complete; ++j) {
                auto v = data.value(d, j, k);
                if (v)
                    row[j] = *v;
                else
                    complete = false;
            }
            if (complete) rows.push_back(std::move(row));
        }
    }
    if (int(rows.size()) < p + 2)
        throw InsufficientDataError("insufficient Phase I data: " +
                        std::to_string(rows.size()) + " complete cases for " +
                        std::to_string(p) + " signs");
    Eigen::MatrixXd m(rows.size(), p);
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(i) = rows[i].transpose();
    return m;
}

std::pair<Date, Date> phase1_range(const StudyDataset& data, int count) {
    if (count < 1 || count > data.n_days())
        throw DataError("phase-1 day count out of range");
    return {data.days().front(), data.days()[count - 1]};
}

void save_estimates(const std::string& path, const RobustEstimates& est) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "t2qc-estimates v1\n";
    out << "signs:";
    for (const auto& s : est.signs) out << ' ' << s;
    out << '\n';
    out << "n_used: " << est.n_used << '\n';
    out << "scale: " << est.scale_estimator << '\n';
    out << "iterations: " << est.iterations << '\n';
    out << "reweighted: " << (est.reweighted ? 1 : 0) << '\n';
    char buf[40];
    out << "mu:";
    for (int j = 0; j < est.p(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", est.mu[j]);
        out << ' ' << buf;
    }
    out << '\n';
    out << "sigma:\n";
    for (int r = 0; r < est.p(); ++r) {
        for (int c = 0; c < est.p(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", est.sigma(r, c));
            out << (c ? " " : "") << buf;
        }
        out << '\n';
    }
}

RobustEstimates load_estimates(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "t2qc-estimates v1")
        throw ParseError(path + ": not a t2qc estimates file");

    RobustEstimates est;
    auto expect_key = [&](const std::string& key) {
        if (!std::getline(in, line) || line.rfind(key, 0) != 0)
            throw ParseError(path + ": expected '" + key + "'");
        return line.substr(key.size());
    };
    {
        std::istringstream ss(expect_key("signs:"));
        std::string s;
        while (ss >> s) est.signs.push_back(s);
        if (est.signs.empty()) throw ParseError(path + ": no signs");
    }
    est.n_used = std::stoi(expect_key("n_used:"));
    est.scale_estimator = expect_key("scale: ");
    est.iterations = std::stoi(expect_key("iterations:"));
    est.reweighted = std::stoi(expect_key("reweighted:")) != 0;

    const int p = int(est.signs.size());
    {
        std::istringstream ss(expect_key("mu:"));
        est.mu.resize(p);
        for (int j = 0; j < p; ++j)
            if (!(ss >> est.mu[j])) throw ParseError(path + ": bad mu line");
    }
    if (!std::getline(in, line) || line != "sigma:")
        throw ParseError(path + ": expected 'sigma:'");
    est.sigma.resize(p, p);
    for (int r = 0; r < p; ++r) {
        if (!std::getline(in, line)) throw ParseError(path + ": truncated sigma");
        std::istringstream ss(line);
        for (int c = 0; c < p; ++c)
            if (!(ss >> est.sigma(r, c)))
                throw ParseError(path + ": bad sigma row " + std::to_string(r));
    }
    return est;
}

}  // namespace t2qc
