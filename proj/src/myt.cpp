#include "t2qc/myt.hpp"

#include "t2qc/linalg.hpp"
#include "t2qc/weighting.hpp"

namespace t2qc {

MytReport myt_decompose(const DaySummary& summary, const RobustEstimates& est,
                        const UclTable& ucls) {
    const WeightMatrix w = weight_matrix(summary);
    if (w.defined == 0) throw DataError("myt_decompose: no active signs");
    const ScaledCovariance sc = scaled_covariance(w, est.sigma);
    const auto active_idx = subset_indices(sc.active);
    const int pa = int(active_idx.size());

    MytReport report;
    report.day = summary.day;

    // Subsets are expressed in full sign indices; positions map into the
    // reduced (active-only) system.
    for (SignSubset local : all_nonempty_subsets(pa)) {
        SignSubset global = 0;
        for (int pos = 0; pos < pa; ++pos)
            if (subset_contains(local, pos))
                global |= SignSubset{1} << active_idx[pos];

        MytEntry e;
        e.subset = global;
        e.ucl = ucls.lookup(global).ucl;
        const auto pos_idx = subset_indices(local);
        Eigen::VectorXd d(pos_idx.size());
        for (std::size_t i = 0; i < pos_idx.size(); ++i) {
            const int full = active_idx[pos_idx[i]];
            d[i] = summary.means[full] - est.mu[full];
        }
        try {
            const SpdSolver solver(submatrix(sc.sigma_xbar, local));
            e.t2 = solver.quad_form(d);
            e.exceeds = e.t2 > e.ucl;
        } catch (const NumericError&) {
            e.indeterminate = true;
        }
        report.entries.push_back(e);
    }

    // minimal exceeding subsets: no exceeding proper subset
    std::vector<SignSubset> exceeding;
    for (const auto& e : report.entries)
        if (!e.indeterminate && e.exceeds) exceeding.push_back(e.subset);
    for (SignSubset s : exceeding) {
        bool minimal = true;
        for (SignSubset t : exceeding)
            if (t != s && (t & s) == t) {
                minimal = false;
                break;
            }
        if (minimal) report.implicated.push_back(s);
    }
    return report;
}

}  // namespace t2qc
