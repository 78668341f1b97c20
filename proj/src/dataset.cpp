#include "t2qc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace t2qc {

PlausibilityRanges PlausibilityRanges::defaults() {
    PlausibilityRanges r;
    r.by_sign = {
        {"BT", {30.0, 45.0}},  {"SBP", {50.0, 260.0}}, {"DBP", {30.0, 160.0}},
        {"HR", {20.0, 250.0}}, {"SpO2", {50.0, 100.0}},
    };
    return r;
}

bool PlausibilityRanges::covers(const std::vector<std::string>& signs) const {
    for (const auto& s : signs)
        if (!by_sign.count(s)) return false;
    return true;
}

StudyDataset StudyDataset::create(std::vector<std::string> signs,
                                  const std::vector<MeasurementRecord>& records,
                                  std::optional<std::vector<Date>> calendar,
                                  std::optional<std::vector<std::string>> roster) {
    if (signs.empty()) throw DataError("sign list is empty");
    {
        std::set<std::string> uniq(signs.begin(), signs.end());
        if (uniq.size() != signs.size()) throw DataError("duplicate sign names");
    }

    StudyDataset ds;
    ds.signs_ = std::move(signs);

    std::set<std::string> pset;
    std::set<Date> dset;
    for (const auto& r : records) {
        pset.insert(r.participant);
        dset.insert(r.day);
    }
    if (roster) {
        std::set<std::string> fixed(roster->begin(), roster->end());
        for (const auto& id : pset)
            if (!fixed.count(id))
                throw DataError("participant '" + id +
                                "' not in the supplied roster");
        ds.participants_.assign(fixed.begin(), fixed.end());
    } else {
        ds.participants_.assign(pset.begin(), pset.end());
    }

    if (calendar) {
        std::set<Date> cal(calendar->begin(), calendar->end());
        for (const auto& d : dset)
            if (!cal.count(d))
                throw DataError("record date " + d.to_string() +
                                " not in the supplied calendar");
        ds.days_.assign(cal.begin(), cal.end());
    } else {
        ds.days_.assign(dset.begin(), dset.end());
    }

    const int p = ds.p();
    ds.cells_.assign(ds.days_.size(),
                     std::vector<std::vector<std::pair<int, double>>>(p));

    std::map<std::string, int> pidx;
    for (int i = 0; i < ds.n_participants(); ++i) pidx[ds.participants_[i]] = i;
    std::map<Date, int> didx;
    for (int i = 0; i < ds.n_days(); ++i) didx[ds.days_[i]] = i;

    for (const auto& r : records) {
        if (!std::isfinite(r.value))
            throw DataError("non-finite value for " + r.sign + " on " +
                            r.day.to_string());
        int j = ds.sign_index(r.sign);
        ds.cells_[didx[r.day]][j].emplace_back(pidx[r.participant], r.value);
    }
    for (int d = 0; d < ds.n_days(); ++d) {
        for (int j = 0; j < p; ++j) {
            auto& cell = ds.cells_[d][j];
            std::sort(cell.begin(), cell.end());
            for (std::size_t i = 1; i < cell.size(); ++i)
                if (cell[i].first == cell[i - 1].first)
                    throw DataError("duplicate cell (" +
                                    ds.days_[d].to_string() + ", " +
                                    ds.signs_[j] + ", '" +
                                    ds.participants_[cell[i].first] + "')");
        }
    }
    return ds;
}

int StudyDataset::sign_index(const std::string& name) const {
    for (int j = 0; j < p(); ++j)
        if (signs_[j] == name) return j;
    throw DataError("unknown sign name '" + name + "'");
}

int StudyDataset::day_index(const Date& d) const {
    auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end() || *it != d)
        throw DataError("day " + d.to_string() + " not in dataset");
    return int(it - days_.begin());
}

std::optional<double> StudyDataset::value(int day_idx, int sign_idx,
                                          int participant_idx) const {
    const auto& cell = cells_[day_idx][sign_idx];
    auto it = std::lower_bound(
        cell.begin(), cell.end(), participant_idx,
        [](const std::pair<int, double>& a, int b) { return a.first < b; });
    if (it == cell.end() || it->first != participant_idx) return std::nullopt;
    return it->second;
}

std::size_t StudyDataset::cell_count() const {
    std::size_t n = 0;
    for (const auto& day : cells_)
        for (const auto& cell : day) n += cell.size();
    return n;
}

std::vector<MeasurementRecord> StudyDataset::to_records() const {
    std::vector<MeasurementRecord> out;
    out.reserve(cell_count());
    for (int d = 0; d < n_days(); ++d)
        for (int j = 0; j < p(); ++j)
            for (const auto& [k, v] : cells_[d][j])
                out.push_back({days_[d], participants_[k], signs_[j], v});
    return out;
}

std::pair<StudyDataset, std::vector<Removal>> clean(
    const StudyDataset& data, const PlausibilityRanges& ranges) {
    if (!ranges.covers(data.signs()))
        throw DataError("plausibility ranges do not cover every sign");
    for (const auto& [name, iv] : ranges.by_sign)
        if (!(iv.lo < iv.hi))
            throw DataError("invalid range for sign '" + name + "'");

    std::vector<Removal> removed;
    std::vector<MeasurementRecord> kept;
    for (const auto& r : data.to_records()) {
        const auto& iv = ranges.by_sign.at(r.sign);
        if (r.value < iv.lo || r.value > iv.hi) {
            std::ostringstream reason;
            reason << "outside [" << iv.lo << "," << iv.hi << "]";
            removed.push_back({r.day, r.participant, r.sign, r.value, reason.str()});
        } else {
            kept.push_back(r);
        }
    }
    // Preserve the original calendar and participant roster: cleaning changes
    // cell contents, never the panel's shape.
    auto cleaned = StudyDataset::create(data.signs(), kept, data.days(),
                                        data.participants());
    return {std::move(cleaned), std::move(removed)};
}

DaySummary daily_summary(const StudyDataset& data, int day_idx) {
    const int p = data.p();
    DaySummary s;
    s.day = data.days()[day_idx];
    s.means.assign(p, 0.0);
    s.counts.assign(p, 0);
    s.overlaps = Eigen::MatrixXi::Zero(p, p);

    for (int j = 0; j < p; ++j) {
        const auto& cell = data.cells(day_idx, j);
        s.counts[j] = int(cell.size());
        if (!cell.empty()) {
            double sum = 0.0;
            for (const auto& [k, v] : cell) sum += v;
            s.means[j] = sum / double(cell.size());
        }
        s.overlaps(j, j) = s.counts[j];
    }
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            const auto& a = data.cells(day_idx, j);
            const auto& b = data.cells(day_idx, k);
            std::size_t ia = 0, ib = 0;
            int common = 0;
            while (ia < a.size() && ib < b.size()) {
                if (a[ia].first < b[ib].first)
                    ++ia;
                else if (b[ib].first < a[ia].first)
                    ++ib;
                else
                    ++common, ++ia, ++ib;
            }
            s.overlaps(j, k) = s.overlaps(k, j) = common;
        }
    }
    return s;
}

DaySummary daily_summary(const StudyDataset& data, const Date& day) {
    return daily_summary(data, data.day_index(day));
}

}  // namespace t2qc
