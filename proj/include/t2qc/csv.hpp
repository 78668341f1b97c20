#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "t2qc/dataset.hpp"

namespace t2qc {

/// Parse long-format CSV with header `date,participant,sign,value`.
/// Errors carry line numbers; duplicate cells name both offending lines.
StudyDataset parse_long_csv(std::istream& in,
                            const std::vector<std::string>& signs,
                            std::optional<std::vector<Date>> calendar = {});

StudyDataset parse_long_csv_file(const std::string& path,
                                 const std::vector<std::string>& signs,
                                 std::optional<std::vector<Date>> calendar = {});

/// Serialize day-major, then sign, then participant id; full precision.
void write_long_csv(std::ostream& out, const StudyDataset& data);
void write_long_csv_file(const std::string& path, const StudyDataset& data);

/// Removal report: `date,participant,sign,value,reason`.
void write_removals_csv(std::ostream& out, const std::vector<Removal>& removals);
void write_removals_csv_file(const std::string& path,
                             const std::vector<Removal>& removals);

/// One ISO date per line; blank lines ignored.
std::vector<Date> parse_calendar_file(const std::string& path);

}  // namespace t2qc
