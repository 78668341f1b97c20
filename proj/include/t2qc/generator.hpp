#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "t2qc/dataset.hpp"

namespace t2qc {

struct FaultSpec {
    enum class Kind { cap, fix, shift };
    Kind kind = Kind::cap;
    std::string sign;
    double value = 0.0;
    Date start, end;  // inclusive window
};

struct ParticipantWindow {
    std::string id;
    std::optional<Date> join;  // absent = from study start
    std::optional<Date> drop;  // absent = to study end
};

/// Synthetic study: per day and participant, skip with probability q_day (or
/// when outside the join window), otherwise draw the p-vector from
/// N(mu, sigma), drop each sign independently with q_sign, then apply the
/// faults active on that day in list order.
struct ScenarioConfig {
    std::vector<std::string> signs;
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    int n_participants = 0;
    std::vector<ParticipantWindow> windows;  // optional per-id overrides
    std::vector<Date> calendar;
    double q_day = 0.0;
    double q_sign = 0.0;
    std::vector<FaultSpec> faults;
    std::uint64_t seed = 0;

    void validate() const;

    /// Weekday calendar helper: `count` measurement days from `start`,
    /// skipping Saturdays and Sundays.
    static std::vector<Date> weekday_calendar(const Date& start, int count);
};

StudyDataset generate_study(const ScenarioConfig& cfg);

struct MissingFractions {
    std::vector<double> per_sign;
    double overall = 0.0;
};

/// 1 - observed/(participants * days) per sign; overall is their mean.
MissingFractions missing_fraction(const StudyDataset& data);

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig scenario_from_json_text(const std::string& text);
void save_scenario(const std::string& path, const ScenarioConfig& cfg);

}  // namespace t2qc
