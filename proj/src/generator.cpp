#include "t2qc/generator.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "json.hpp"
#include "t2qc/linalg.hpp"
#include "t2qc/mvn.hpp"
#include "t2qc/rng.hpp"

namespace t2qc {

void ScenarioConfig::validate() const {
    const int p = int(signs.size());
    if (p < 1) throw DataError("scenario: empty sign list");
    if (mu.size() != p || sigma.rows() != p || sigma.cols() != p)
        throw DataError("scenario: mu/sigma dimensions do not match signs");
    if (n_participants < 1) throw DataError("scenario: need participants");
    if (calendar.empty()) throw DataError("scenario: empty calendar");
    if (!(q_day >= 0.0 && q_day < 1.0 && q_sign >= 0.0 && q_sign < 1.0))
        throw DataError("scenario: probabilities must lie in [0,1)");
    if (min_eigen_ratio(sigma) <= 0.0)
        throw NumericError("scenario: sigma not positive definite");
    const Date lo = *std::min_element(calendar.begin(), calendar.end());
    const Date hi = *std::max_element(calendar.begin(), calendar.end());
    for (const auto& f : faults) {
        bool known = false;
        for (const auto& s : signs) known = known || s == f.sign;
        if (!known) throw DataError("fault names unknown sign '" + f.sign + "'");
        if (f.end < f.start || f.end < lo || f.start > hi)
            throw DataError("fault window outside the calendar");
    }
}

std::vector<Date> ScenarioConfig::weekday_calendar(const Date& start, int count) {
    std::vector<Date> days;
    Date d = start;
    while (int(days.size()) < count) {
        if (d.iso_weekday() <= 5) days.push_back(d);
        d = d + 1;
    }
    return days;
}

StudyDataset generate_study(const ScenarioConfig& cfg) {
    cfg.validate();
    const int p = int(cfg.signs.size());

    std::vector<std::string> roster;
    for (int k = 0; k < cfg.n_participants; ++k) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "P%03d", k + 1);
        roster.emplace_back(buf);
    }
    std::map<std::string, ParticipantWindow> windows;
    for (const auto& w : cfg.windows) windows[w.id] = w;

    std::vector<Date> calendar = cfg.calendar;
    std::sort(calendar.begin(), calendar.end());

    const MvnSampler sampler(cfg.mu, cfg.sigma);
    std::vector<MeasurementRecord> records;

    for (std::size_t d = 0; d < calendar.size(); ++d) {
        const Date day = calendar[d];
        for (int k = 0; k < cfg.n_participants; ++k) {
            if (auto it = windows.find(roster[k]); it != windows.end()) {
                if (it->second.join && day < *it->second.join) continue;
                if (it->second.drop && day > *it->second.drop) continue;
            }
            // one substream per (day, participant): draw order is fixed, so
            // cells outside a fault's window are bit-identical across
            // scenarios sharing a seed
            Philox2x64 rng = make_stream(cfg.seed, stream::generator, d, k);
            if (rng.uniform01() < cfg.q_day) continue;
            Eigen::VectorXd x = sampler.draw(rng);
            for (int j = 0; j < p; ++j) {
                if (rng.uniform01() < cfg.q_sign) continue;
                double v = x[j];
                for (const auto& f : cfg.faults) {
                    if (f.sign != cfg.signs[j] || day < f.start || day > f.end)
                        continue;
                    switch (f.kind) {
                        case FaultSpec::Kind::cap: v = std::min(v, f.value); break;
                        case FaultSpec::Kind::fix: v = f.value; break;
                        case FaultSpec::Kind::shift: v += f.value; break;
                    }
                }
                records.push_back({day, roster[k], cfg.signs[j], v});
            }
        }
    }
    return StudyDataset::create(cfg.signs, records, calendar, roster);
}

MissingFractions missing_fraction(const StudyDataset& data) {
    if (data.n_days() < 1 || data.n_participants() < 1)
        throw DataError("missing_fraction: empty dataset");
    const double denom = double(data.n_days()) * double(data.n_participants());
    MissingFractions out;
    out.per_sign.resize(data.p());
    for (int j = 0; j < data.p(); ++j) {
        long observed = 0;
        for (int d = 0; d < data.n_days(); ++d)
            observed += long(data.cells(d, j).size());
        out.per_sign[j] = 1.0 - double(observed) / denom;
        out.overall += out.per_sign[j];
    }
    out.overall /= double(data.p());
    return out;
}

namespace {

FaultSpec::Kind fault_kind_from(const std::string& s) {
    if (s == "cap") return FaultSpec::Kind::cap;
    if (s == "fix") return FaultSpec::Kind::fix;
    if (s == "shift") return FaultSpec::Kind::shift;
    throw ParseError("unknown fault kind '" + s + "' (expected cap|fix|shift)");
}

std::string fault_kind_name(FaultSpec::Kind k) {
    switch (k) {
        case FaultSpec::Kind::cap: return "cap";
        case FaultSpec::Kind::fix: return "fix";
        case FaultSpec::Kind::shift: return "shift";
    }
    return "?";
}

}  // namespace

namespace {

ScenarioConfig scenario_from_json(const nlohmann::json& j,
                                  const std::string& path) {
    try {
        ScenarioConfig cfg;
        cfg.signs = j.at("signs").get<std::vector<std::string>>();
        const int p = int(cfg.signs.size());
        auto mu = j.at("mu").get<std::vector<double>>();
        if (int(mu.size()) != p) throw ParseError(path + ": mu size mismatch");
        cfg.mu = Eigen::Map<Eigen::VectorXd>(mu.data(), p);
        cfg.sigma.resize(p, p);
        const auto& rows = j.at("sigma");
        if (int(rows.size()) != p) throw ParseError(path + ": sigma size mismatch");
        for (int r = 0; r < p; ++r) {
            auto row = rows[r].get<std::vector<double>>();
            if (int(row.size()) != p)
                throw ParseError(path + ": sigma row size mismatch");
            for (int c = 0; c < p; ++c) cfg.sigma(r, c) = row[c];
        }
        cfg.n_participants = j.at("participants");
        if (j.contains("windows")) {
            for (const auto& jw : j.at("windows")) {
                ParticipantWindow w;
                w.id = jw.at("id");
                if (jw.contains("join")) w.join = Date::parse(jw.at("join"));
                if (jw.contains("drop")) w.drop = Date::parse(jw.at("drop"));
                cfg.windows.push_back(std::move(w));
            }
        }
        const auto& jc = j.at("calendar");
        if (jc.is_array()) {
            for (const auto& s : jc) cfg.calendar.push_back(Date::parse(s));
        } else {
            const Date start = Date::parse(jc.at("start"));
            const int count = jc.at("days");
            const bool weekdays = jc.value("weekdays_only", true);
            if (weekdays) {
                cfg.calendar = ScenarioConfig::weekday_calendar(start, count);
            } else {
                for (int i = 0; i < count; ++i) cfg.calendar.push_back(start + i);
            }
        }
        cfg.q_day = j.value("q_day", 0.0);
        cfg.q_sign = j.value("q_sign", 0.0);
        if (j.contains("faults")) {
            for (const auto& jf : j.at("faults")) {
                FaultSpec f;
                f.kind = fault_kind_from(jf.at("kind"));
                f.sign = jf.at("sign");
                f.value = jf.at("value");
                f.start = Date::parse(jf.at("start"));
                f.end = Date::parse(jf.at("end"));
                cfg.faults.push_back(std::move(f));
            }
        }
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return scenario_from_json(j, path);
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    return scenario_from_json(j, "scenario");
}

void save_scenario(const std::string& path, const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["signs"] = cfg.signs;
    j["mu"] = std::vector<double>(cfg.mu.data(), cfg.mu.data() + cfg.mu.size());
    auto& rows = j["sigma"] = nlohmann::json::array();
    for (int r = 0; r < cfg.sigma.rows(); ++r) {
        std::vector<double> row(cfg.sigma.cols());
        for (int c = 0; c < cfg.sigma.cols(); ++c) row[c] = cfg.sigma(r, c);
        rows.push_back(row);
    }
    j["participants"] = cfg.n_participants;
    if (!cfg.windows.empty()) {
        auto& jw = j["windows"] = nlohmann::json::array();
        for (const auto& w : cfg.windows) {
            nlohmann::json e{{"id", w.id}};
            if (w.join) e["join"] = w.join->to_string();
            if (w.drop) e["drop"] = w.drop->to_string();
            jw.push_back(std::move(e));
        }
    }
    auto& jc = j["calendar"] = nlohmann::json::array();
    for (const auto& d : cfg.calendar) jc.push_back(d.to_string());
    j["q_day"] = cfg.q_day;
    j["q_sign"] = cfg.q_sign;
    if (!cfg.faults.empty()) {
        auto& jf = j["faults"] = nlohmann::json::array();
        for (const auto& f : cfg.faults)
            jf.push_back({{"kind", fault_kind_name(f.kind)},
                          {"sign", f.sign},
                          {"value", f.value},
                          {"start", f.start.to_string()},
                          {"end", f.end.to_string()}});
    }
    j["seed"] = cfg.seed;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace t2qc
