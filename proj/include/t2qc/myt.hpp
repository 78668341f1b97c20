#pragma once

#include <vector>

#include "t2qc/dataset.hpp"
#include "t2qc/robust.hpp"
#include "t2qc/subset.hpp"
#include "t2qc/ucl.hpp"

namespace t2qc {

struct MytEntry {
    SignSubset subset = 0;
    double t2 = 0.0;
    double ucl = 0.0;
    bool exceeds = false;
    bool indeterminate = false;  // restricted covariance was singular
};

/// All-subset decomposition of a day's signal: the T-squared statistic of
/// every nonempty subset of the day's active signs against that subset's
/// control limit. `implicated` holds the minimal exceeding subsets by
/// inclusion (the smallest sign groups that explain the signal on their own).
struct MytReport {
    Date day;
    std::vector<MytEntry> entries;  // ordered by (size, ascending mask)
    std::vector<SignSubset> implicated;

    bool implicates(int sign_idx) const {
        for (SignSubset s : implicated)
            if (subset_contains(s, sign_idx)) return true;
        return false;
    }
};

MytReport myt_decompose(const DaySummary& summary, const RobustEstimates& est,
                        const UclTable& ucls);

}  // namespace t2qc
