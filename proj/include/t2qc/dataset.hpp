#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "t2qc/date.hpp"
#include "t2qc/errors.hpp"

namespace t2qc {

struct MeasurementRecord {
    Date day;
    std::string participant;
    std::string sign;
    double value = 0.0;
};

/// Per-sign closed interval of admissible values.
struct PlausibilityRanges {
    struct Interval {
        double lo, hi;
    };
    std::map<std::string, Interval> by_sign;

    /// Conservative physiologic defaults for the standard five-sign panel.
    static PlausibilityRanges defaults();

    bool covers(const std::vector<std::string>& signs) const;
};

/// Long-format panel indexed by (day, sign, participant). Missing data is
/// represented by key absence only; no sentinel values exist anywhere.
class StudyDataset {
  public:
    /// Build from records; days are the sorted distinct record dates unless
    /// an explicit calendar is supplied (which must cover the record dates).
    /// Likewise the participant roster defaults to the ids seen in records
    /// but can be fixed explicitly (e.g. to survive cleaning).
    static StudyDataset create(std::vector<std::string> signs,
                               const std::vector<MeasurementRecord>& records,
                               std::optional<std::vector<Date>> calendar = {},
                               std::optional<std::vector<std::string>> roster = {});

    int p() const { return int(signs_.size()); }
    int n_participants() const { return int(participants_.size()); }
    int n_days() const { return int(days_.size()); }

    const std::vector<std::string>& signs() const { return signs_; }
    const std::vector<std::string>& participants() const { return participants_; }
    const std::vector<Date>& days() const { return days_; }

    int sign_index(const std::string& name) const;  // throws DataError
    int day_index(const Date& d) const;             // throws DataError

    /// Observed (participant index, value) pairs, sorted by participant.
    const std::vector<std::pair<int, double>>& cells(int day_idx,
                                                     int sign_idx) const {
        return cells_[day_idx][sign_idx];
    }

    std::optional<double> value(int day_idx, int sign_idx,
                                int participant_idx) const;

    std::size_t cell_count() const;

    std::vector<MeasurementRecord> to_records() const;

  private:
    std::vector<std::string> signs_;
    std::vector<std::string> participants_;
    std::vector<Date> days_;
    // cells_[day][sign] = sorted (participant index, value)
    std::vector<std::vector<std::vector<std::pair<int, double>>>> cells_;
};

struct Removal {
    Date day;
    std::string participant;
    std::string sign;
    double value;
    std::string reason;
};

/// Remove every cell outside its sign's plausible range. Never fails; the
/// report lists each removed cell.
std::pair<StudyDataset, std::vector<Removal>> clean(const StudyDataset& data,
                                                    const PlausibilityRanges& ranges);

/// Per-day summary: means over the participants present per sign, counts
/// n_ij, and pairwise overlap counts |U_ij n U_ij'|.
struct DaySummary {
    Date day;
    std::vector<double> means;  // meaningful only where counts[j] >= 1
    std::vector<int> counts;
    Eigen::MatrixXi overlaps;

    bool has_mean(int j) const { return counts[j] >= 1; }
};

DaySummary daily_summary(const StudyDataset& data, int day_idx);
DaySummary daily_summary(const StudyDataset& data, const Date& day);

}  // namespace t2qc
