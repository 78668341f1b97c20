#include <sstream>

#include "doctest.h"
#include "t2qc/csv.hpp"
#include "t2qc/dataset.hpp"
#include "t2qc/generator.hpp"

using namespace t2qc;

namespace {

const std::vector<std::string> kTwo = {"SBP", "DBP"};

StudyDataset parse(const std::string& text,
                   const std::vector<std::string>& signs) {
    std::istringstream in(text);
    return parse_long_csv(in, signs);
}

}  // namespace

TEST_CASE("parse builds a dataset with a missing cell left absent") {
    auto ds = parse(
        "date,participant,sign,value\n"
        "2018-01-02,alice,SBP,120\n"
        "2018-01-02,alice,DBP,80\n"
        "2018-01-02,bob,SBP,135\n",
        kTwo);
    CHECK(ds.cell_count() == 3);
    CHECK(ds.n_days() == 1);
    CHECK(ds.n_participants() == 2);
    CHECK(ds.value(0, ds.sign_index("SBP"), 1).has_value());
    CHECK_FALSE(ds.value(0, ds.sign_index("DBP"), 1).has_value());  // bob DBP
}

TEST_CASE("duplicate cells are an error naming both lines") {
    try {
        parse(
            "date,participant,sign,value\n"
            "2018-01-02,alice,SBP,120\n"
            "2018-01-03,alice,SBP,121\n"
            "2018-01-02,alice,SBP,119\n",
            kTwo);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("lines 2 and 4") != std::string::npos);
    }
}

TEST_CASE("unknown sign and malformed rows are rejected with line numbers") {
    CHECK_THROWS_WITH_AS(parse("date,participant,sign,value\n"
                               "2018-01-02,alice,XYZ,1\n",
                               kTwo),
                         doctest::Contains("unknown sign 'XYZ'"), ParseError);
    CHECK_THROWS_WITH_AS(parse("date,participant,sign,value\n"
                               "2018-1-02,alice,SBP,120\n",
                               kTwo),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_WITH_AS(parse("date,participant,sign,value\n"
                               "2018-01-02,alice,SBP,abc\n",
                               kTwo),
                         doctest::Contains("invalid value"), ParseError);
    CHECK_THROWS_AS(parse("", kTwo), ParseError);
    CHECK_THROWS_AS(parse("date,participant,sign,value\n", kTwo), ParseError);
}

TEST_CASE("clean removes implausible values and reports them") {
    const std::vector<std::string> signs = {"HR", "SpO2"};
    auto ds = parse(
        "date,participant,sign,value\n"
        "2018-01-02,alice,HR,0\n"
        "2018-01-02,bob,HR,72\n"
        "2018-01-02,alice,SpO2,101\n"
        "2018-01-02,bob,SpO2,98\n",
        signs);
    PlausibilityRanges ranges;
    ranges.by_sign = {{"HR", {30, 220}}, {"SpO2", {70, 100}}};

    auto [cleaned, report] = clean(ds, ranges);
    CHECK(report.size() == 2);
    CHECK(cleaned.cell_count() == 2);
    CHECK(report[0].sign == "HR");
    CHECK(report[0].value == 0.0);
    // roster and calendar survive even though alice lost a cell
    CHECK(cleaned.n_participants() == 2);
    CHECK(cleaned.n_days() == 1);

    auto [again, report2] = clean(cleaned, ranges);
    CHECK(report2.empty());  // idempotent
    CHECK(again.cell_count() == cleaned.cell_count());
}

TEST_CASE("clean keeps in-range boundary values") {
    const std::vector<std::string> signs = {"SpO2"};
    auto ds = parse(
        "date,participant,sign,value\n"
        "2018-01-02,a,SpO2,100\n"
        "2018-01-02,b,SpO2,70\n",
        signs);
    PlausibilityRanges ranges;
    ranges.by_sign = {{"SpO2", {70, 100}}};
    auto [cleaned, report] = clean(ds, ranges);
    CHECK(report.empty());
    CHECK(cleaned.cell_count() == 2);
}

TEST_CASE("daily summary reproduces the grouped-day bookkeeping") {
    // one participant absent entirely, another missing the first sign
    const std::vector<std::string> signs = {"BT", "SBP", "DBP"};
    std::vector<MeasurementRecord> recs;
    const Date day = Date::parse("2018-01-05");
    const int n = 6;
    for (int k = 0; k < n; ++k) {
        std::string id = "p" + std::to_string(k);
        if (k == 1) continue;  // participant #2 did not show up
        for (int j = (k == 0 ? 1 : 0); j < 3; ++j)
            recs.push_back({day, id, signs[std::size_t(j)], 100.0 + k + j});
    }
    auto ds = StudyDataset::create(signs, recs);
    DaySummary s = daily_summary(ds, day);
    CHECK(s.counts[0] == n - 2);
    CHECK(s.counts[1] == n - 1);
    CHECK(s.counts[2] == n - 1);
    CHECK(s.overlaps(0, 1) == n - 2);
    CHECK(s.overlaps(1, 2) == n - 1);
    CHECK(s.overlaps(0, 0) == s.counts[0]);
}

TEST_CASE("daily summary on a complete day") {
    const std::vector<std::string> signs = {"A", "B"};
    std::vector<MeasurementRecord> recs;
    const Date day = Date::parse("2020-06-01");
    for (int k = 0; k < 4; ++k)
        for (const auto& s : signs)
            recs.push_back({day, "p" + std::to_string(k), s, double(k)});
    auto ds = StudyDataset::create(signs, recs);
    DaySummary sum = daily_summary(ds, 0);
    CHECK(sum.counts[0] == 4);
    CHECK(sum.counts[1] == 4);
    CHECK(sum.overlaps(0, 1) == 4);
    CHECK(sum.means[0] == doctest::Approx(1.5));
}

TEST_CASE("overlap counts follow from the participant sets") {
    const std::vector<std::string> signs = {"S1", "S2"};
    const Date day = Date::parse("2020-06-01");
    std::vector<MeasurementRecord> recs = {
        {day, "a", "S1", 1.0}, {day, "b", "S1", 2.0},
        {day, "b", "S2", 3.0}, {day, "c", "S2", 4.0},
    };
    auto ds = StudyDataset::create(signs, recs);
    DaySummary s = daily_summary(ds, 0);
    CHECK(s.overlaps(0, 1) == 1);
    CHECK(s.counts[0] == 2);
    CHECK(s.counts[1] == 2);
}

TEST_CASE("csv round trip preserves the cell map") {
    // a generated study with messy missingness survives a write/parse cycle
    ScenarioConfig cfg;
    cfg.signs = {"BT", "SBP", "DBP"};
    cfg.mu = Eigen::Vector3d(36.5, 130.0, 70.0);
    cfg.sigma = Eigen::Vector3d(0.1, 200.0, 80.0).asDiagonal();
    cfg.n_participants = 5;
    cfg.calendar = ScenarioConfig::weekday_calendar(Date::parse("2021-03-01"), 8);
    cfg.q_day = 0.2;
    cfg.q_sign = 0.1;
    cfg.seed = 303;
    StudyDataset ds = generate_study(cfg);

    std::ostringstream out;
    write_long_csv(out, ds);
    std::istringstream in(out.str());
    StudyDataset back = parse_long_csv(in, cfg.signs);

    CHECK(back.cell_count() == ds.cell_count());
    for (int d = 0; d < ds.n_days(); ++d) {
        // re-parsed days may collapse empty calendar days; map by date
        if (ds.cells(d, 0).empty() && ds.cells(d, 1).empty() &&
            ds.cells(d, 2).empty())
            continue;
        int bd = back.day_index(ds.days()[d]);
        for (int j = 0; j < ds.p(); ++j) {
            const auto& cell = ds.cells(d, j);
            for (const auto& [k, v] : cell) {
                int bk = -1;
                for (int q = 0; q < back.n_participants(); ++q)
                    if (back.participants()[q] == ds.participants()[k]) bk = q;
                REQUIRE(bk >= 0);
                auto bv = back.value(bd, j, bk);
                REQUIRE(bv.has_value());
                CHECK(*bv == v);  // full-precision serialization is exact
            }
        }
    }
}

TEST_CASE("count and overlap invariants hold on generated data") {
    ScenarioConfig cfg;
    cfg.signs = {"A", "B", "C", "D"};
    cfg.mu = Eigen::VectorXd::Zero(4);
    cfg.sigma = Eigen::MatrixXd::Identity(4, 4);
    cfg.n_participants = 7;
    cfg.calendar = ScenarioConfig::weekday_calendar(Date::parse("2022-01-03"), 15);
    cfg.q_day = 0.25;
    cfg.q_sign = 0.15;
    cfg.seed = 17;
    StudyDataset ds = generate_study(cfg);
    for (int d = 0; d < ds.n_days(); ++d) {
        DaySummary s = daily_summary(ds, d);
        for (int j = 0; j < 4; ++j) {
            CHECK(s.counts[j] >= 0);
            CHECK(s.counts[j] <= 7);
            for (int k = 0; k < 4; ++k)
                CHECK(s.overlaps(j, k) <= std::min(s.counts[j], s.counts[k]));
        }
    }
}

TEST_CASE("explicit calendar keeps zero-record days") {
    const std::vector<std::string> signs = {"A"};
    const Date d1 = Date::parse("2020-01-01");
    const Date d2 = Date::parse("2020-01-02");
    std::vector<MeasurementRecord> recs = {{d1, "p", "A", 1.0}};
    auto ds = StudyDataset::create(signs, recs, std::vector<Date>{d1, d2});
    CHECK(ds.n_days() == 2);
    CHECK(daily_summary(ds, d2).counts[0] == 0);

    CHECK_THROWS_AS(StudyDataset::create(signs, recs, std::vector<Date>{d2}),
                    DataError);
}
