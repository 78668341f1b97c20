#include "t2qc/weighting.hpp"

#include "t2qc/errors.hpp"
#include "t2qc/linalg.hpp"

namespace t2qc {

WeightMatrix weight_matrix(const DaySummary& summary) {
    const int p = int(summary.counts.size());
    WeightMatrix w;
    w.day = summary.day;
    w.entries = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j)
        if (summary.counts[j] >= 1) w.defined |= SignSubset{1} << j;

    for (int j = 0; j < p; ++j) {
        if (summary.counts[j] < 1) continue;
        w.entries(j, j) = 1.0 / double(summary.counts[j]);
        for (int k = j + 1; k < p; ++k) {
            if (summary.counts[k] < 1) continue;
            const double v = double(summary.overlaps(j, k)) /
                             (double(summary.counts[j]) * double(summary.counts[k]));
            w.entries(j, k) = w.entries(k, j) = v;
        }
    }
    return w;
}

ScaledCovariance scaled_covariance(const WeightMatrix& w,
                                   const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != w.p() || sigma.cols() != w.p())
        throw DataError("scaled_covariance: dimension mismatch");

    const auto idx = subset_indices(w.defined);
    ScaledCovariance out;
    out.active = w.defined;
    out.sigma_xbar.resize(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        out.sigma_xbar(r, r) = w.entries(idx[r], idx[r]) * sigma(idx[r], idx[r]);
        for (std::size_t c = r + 1; c < idx.size(); ++c) {
            const double v = w.entries(idx[r], idx[c]) * sigma(idx[r], idx[c]);
            out.sigma_xbar(r, c) = out.sigma_xbar(c, r) = v;
        }
    }
    return out;
}

}  // namespace t2qc
