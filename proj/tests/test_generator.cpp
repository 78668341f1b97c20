#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "reference_data.hpp"
#include "t2qc/generator.hpp"

using namespace t2qc;

namespace {

ScenarioConfig base_config() {
    ScenarioConfig cfg;
    cfg.signs = refdata::kSigns;
    cfg.mu = refdata::mu_a();
    cfg.sigma = refdata::sigma_a();
    cfg.n_participants = 24;
    cfg.calendar = ScenarioConfig::weekday_calendar(Date::parse("2021-01-04"), 50);
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("complete generation fills every cell") {
    ScenarioConfig cfg = base_config();
    StudyDataset ds = generate_study(cfg);
    CHECK(ds.cell_count() == std::size_t(24) * 50 * 5);
    MissingFractions mf = missing_fraction(ds);
    CHECK(mf.overall == 0.0);
    for (double f : mf.per_sign) CHECK(f == 0.0);
}

TEST_CASE("weekday calendar skips weekends") {
    auto cal = ScenarioConfig::weekday_calendar(Date::parse("2021-01-01"), 10);
    CHECK(cal.size() == 10);
    for (const Date& d : cal) CHECK(d.iso_weekday() <= 5);
    // 2021-01-01 is a Friday; the next measurement day is Monday the 4th
    CHECK(cal[0].to_string() == "2021-01-01");
    CHECK(cal[1].to_string() == "2021-01-04");
}

TEST_CASE("cap fault clips values only inside its window") {
    ScenarioConfig cfg = base_config();
    const Date cut = cfg.calendar[30];
    cfg.faults.push_back({FaultSpec::Kind::cap, "SBP", 136.0, cut,
                          cfg.calendar.back()});
    StudyDataset with_fault = generate_study(cfg);

    ScenarioConfig clean_cfg = base_config();
    StudyDataset no_fault = generate_study(clean_cfg);

    const int sbp = with_fault.sign_index("SBP");
    bool saw_capped = false;
    for (int d = 0; d < with_fault.n_days(); ++d) {
        const bool in_window = with_fault.days()[d] >= cut;
        for (const auto& [k, v] : with_fault.cells(d, sbp)) {
            if (in_window) {
                CHECK(v <= 136.0);
                saw_capped = true;
            }
        }
        // fault locality: every cell outside the window (and every other
        // sign) is bit-identical to the fault-free run
        for (int j = 0; j < 5; ++j) {
            if (j == sbp && in_window) continue;
            const auto& a = with_fault.cells(d, j);
            const auto& b = no_fault.cells(d, j);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].first == b[i].first);
                CHECK(a[i].second == b[i].second);
            }
        }
    }
    CHECK(saw_capped);
}

TEST_CASE("fix and shift faults transform the affected cells") {
    ScenarioConfig cfg = base_config();
    cfg.n_participants = 6;
    cfg.calendar.resize(4);
    const Date day2 = cfg.calendar[1];
    cfg.faults.push_back({FaultSpec::Kind::fix, "DBP", 95.0, day2, day2});
    cfg.faults.push_back(
        {FaultSpec::Kind::shift, "HR", 10.0, cfg.calendar[2], cfg.calendar[2]});
    StudyDataset ds = generate_study(cfg);

    ScenarioConfig plain = cfg;
    plain.faults.clear();
    StudyDataset base = generate_study(plain);

    const int dbp = ds.sign_index("DBP");
    for (const auto& [k, v] : ds.cells(1, dbp)) CHECK(v == 95.0);
    const int hr = ds.sign_index("HR");
    const auto& shifted = ds.cells(2, hr);
    const auto& orig = base.cells(2, hr);
    REQUIRE(shifted.size() == orig.size());
    for (std::size_t i = 0; i < shifted.size(); ++i)
        CHECK(shifted[i].second == orig[i].second + 10.0);
}

TEST_CASE("faults compose in list order") {
    ScenarioConfig cfg = base_config();
    cfg.n_participants = 4;
    cfg.calendar.resize(2);
    const Date day = cfg.calendar[0];
    cfg.faults.push_back({FaultSpec::Kind::shift, "SBP", 50.0, day, day});
    cfg.faults.push_back({FaultSpec::Kind::cap, "SBP", 140.0, day, day});
    StudyDataset ds = generate_study(cfg);
    for (const auto& [k, v] : ds.cells(0, ds.sign_index("SBP")))
        CHECK(v <= 140.0);  // cap applied after the shift
}

TEST_CASE("day-level missingness hits the target rate") {
    ScenarioConfig cfg = base_config();
    cfg.q_day = 0.15;
    cfg.seed = 404;
    StudyDataset ds = generate_study(cfg);
    MissingFractions mf = missing_fraction(ds);
    CHECK(mf.overall > 0.10);
    CHECK(mf.overall < 0.20);

    cfg.q_day = 0.103;
    cfg.seed = 405;
    MissingFractions mf2 = missing_fraction(generate_study(cfg));
    CHECK(std::fabs(mf2.overall - 0.103) < 0.03);
}

TEST_CASE("one sign fully absent has fraction one") {
    ScenarioConfig cfg = base_config();
    cfg.n_participants = 5;
    cfg.calendar.resize(6);
    cfg.faults.clear();
    StudyDataset full = generate_study(cfg);
    // drop every SpO2 cell
    std::vector<MeasurementRecord> recs;
    for (const auto& r : full.to_records())
        if (r.sign != "SpO2") recs.push_back(r);
    StudyDataset ds = StudyDataset::create(cfg.signs, recs, full.days(),
                                           full.participants());
    MissingFractions mf = missing_fraction(ds);
    CHECK(mf.per_sign[4] == 1.0);
    CHECK(mf.per_sign[0] == 0.0);
}

TEST_CASE("generation is deterministic and seed-sensitive") {
    ScenarioConfig cfg = base_config();
    cfg.q_day = 0.1;
    cfg.q_sign = 0.05;
    StudyDataset a = generate_study(cfg);
    StudyDataset b = generate_study(cfg);
    CHECK(a.cell_count() == b.cell_count());
    auto ra = a.to_records();
    auto rb = b.to_records();
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].value == rb[i].value);
        CHECK(ra[i].participant == rb[i].participant);
    }
    cfg.seed += 1;
    StudyDataset c = generate_study(cfg);
    CHECK(c.to_records()[0].value != ra[0].value);
}

TEST_CASE("join and drop windows silence participants outside them") {
    ScenarioConfig cfg = base_config();
    cfg.n_participants = 3;
    cfg.calendar.resize(10);
    cfg.windows.push_back({"P002", cfg.calendar[5], std::nullopt});
    cfg.windows.push_back({"P003", std::nullopt, cfg.calendar[3]});
    StudyDataset ds = generate_study(cfg);
    for (int d = 0; d < ds.n_days(); ++d) {
        for (int j = 0; j < ds.p(); ++j) {
            for (const auto& [k, v] : ds.cells(d, j)) {
                const std::string& id = ds.participants()[k];
                if (id == "P002") CHECK(ds.days()[d] >= cfg.calendar[5]);
                if (id == "P003") CHECK(ds.days()[d] <= cfg.calendar[3]);
            }
        }
    }
}

TEST_CASE("scenario json round trip") {
    ScenarioConfig cfg = base_config();
    cfg.q_day = 0.12;
    cfg.q_sign = 0.02;
    cfg.faults.push_back({FaultSpec::Kind::cap, "SBP", 136.0, cfg.calendar[20],
                          cfg.calendar.back()});
    cfg.windows.push_back({"P001", cfg.calendar[2], std::nullopt});
    const std::string path = "test_scenario_roundtrip.json";
    save_scenario(path, cfg);
    ScenarioConfig back = load_scenario(path);
    CHECK(back.signs == cfg.signs);
    CHECK(back.n_participants == cfg.n_participants);
    CHECK(back.calendar.size() == cfg.calendar.size());
    CHECK(back.q_day == cfg.q_day);
    CHECK(back.q_sign == cfg.q_sign);
    CHECK(back.seed == cfg.seed);
    CHECK(back.faults.size() == 1);
    CHECK(back.faults[0].sign == "SBP");
    CHECK(back.faults[0].value == 136.0);
    CHECK(back.windows.size() == 1);
    REQUIRE(back.windows[0].join.has_value());
    CHECK(*back.windows[0].join == cfg.calendar[2]);
    CHECK((back.mu - cfg.mu).norm() == 0.0);
    CHECK((back.sigma - cfg.sigma).norm() == 0.0);
    // identical datasets from the reloaded scenario
    CHECK(generate_study(back).cell_count() == generate_study(cfg).cell_count());
    std::remove(path.c_str());
}

TEST_CASE("scenario validation rejects bad configs") {
    ScenarioConfig cfg = base_config();
    cfg.q_day = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = base_config();
    cfg.sigma(0, 1) = 99.0;  // asymmetric and indefinite
    cfg.sigma(1, 0) = 99.0;
    CHECK_THROWS_AS(generate_study(cfg), NumericError);
    cfg = base_config();
    cfg.faults.push_back({FaultSpec::Kind::cap, "XX", 1.0, cfg.calendar[0],
                          cfg.calendar[1]});
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = base_config();
    cfg.faults.push_back({FaultSpec::Kind::cap, "SBP", 1.0, cfg.calendar[5],
                          cfg.calendar[1]});
    CHECK_THROWS_AS(cfg.validate(), DataError);
}
