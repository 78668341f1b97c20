#include "t2qc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace t2qc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

StudyDataset parse_long_csv(std::istream& in,
                            const std::vector<std::string>& signs,
                            std::optional<std::vector<Date>> calendar) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty input");
    {
        auto hdr = split_csv_line(line);
        if (hdr != std::vector<std::string>{"date", "participant", "sign", "value"})
            throw ParseError("line 1: expected header 'date,participant,sign,value'");
    }

    std::vector<MeasurementRecord> records;
    // duplicate detection with line attribution
    std::map<std::tuple<Date, std::string, std::string>, long> seen;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != 4)
            throw ParseError("line " + std::to_string(lineno) +
                             ": expected 4 fields, got " + std::to_string(f.size()));
        MeasurementRecord r;
        try {
            r.day = Date::parse(f[0]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        r.participant = f[1];
        if (r.participant.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty participant id");
        r.sign = f[2];
        bool known = false;
        for (const auto& s : signs) known = known || s == r.sign;
        if (!known)
            throw ParseError("line " + std::to_string(lineno) + ": unknown sign '" +
                             r.sign + "'");
        std::size_t pos = 0;
        try {
            r.value = std::stod(f[3], &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != f[3].size() || f[3].empty() || !std::isfinite(r.value))
            throw ParseError("line " + std::to_string(lineno) +
                             ": invalid value '" + f[3] + "'");
        auto key = std::make_tuple(r.day, r.participant, r.sign);
        auto [it, fresh] = seen.emplace(key, lineno);
        if (!fresh)
            throw ParseError("duplicate cell (" + f[0] + ", " + r.sign + ", '" +
                             r.participant + "') on lines " +
                             std::to_string(it->second) + " and " +
                             std::to_string(lineno));
        records.push_back(std::move(r));
    }
    if (records.empty()) throw ParseError("no data rows");
    return StudyDataset::create(signs, records, std::move(calendar));
}

StudyDataset parse_long_csv_file(const std::string& path,
                                 const std::vector<std::string>& signs,
                                 std::optional<std::vector<Date>> calendar) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return parse_long_csv(in, signs, std::move(calendar));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_long_csv(std::ostream& out, const StudyDataset& data) {
    out << "date,participant,sign,value\n";
    for (const auto& r : data.to_records())
        out << r.day.to_string() << ',' << r.participant << ',' << r.sign << ','
            << fmt_full(r.value) << '\n';
}

void write_long_csv_file(const std::string& path, const StudyDataset& data) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_long_csv(out, data);
}

void write_removals_csv(std::ostream& out, const std::vector<Removal>& removals) {
    out << "date,participant,sign,value,reason\n";
    for (const auto& r : removals)
        out << r.day.to_string() << ',' << r.participant << ',' << r.sign << ','
            << fmt_full(r.value) << ',' << r.reason << '\n';
}

void write_removals_csv_file(const std::string& path,
                             const std::vector<Removal>& removals) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_removals_csv(out, removals);
}

std::vector<Date> parse_calendar_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::vector<Date> days;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            days.push_back(Date::parse(line));
        } catch (const ParseError& e) {
            throw ParseError(path + " line " + std::to_string(lineno) + ": " +
                             e.what());
        }
    }
    if (days.empty()) throw ParseError(path + ": empty calendar");
    return days;
}

}  // namespace t2qc
