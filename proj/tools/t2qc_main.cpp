// t2qc: Hotelling T-squared data-quality chart for panel data with missing
// observations. Subcommands cover the full pipeline: generate synthetic
// studies, fit robust phase-1 estimates, simulate control limits, monitor,
// decompose signals, and check model assumptions.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"
#include "t2qc/chart.hpp"
#include "t2qc/csv.hpp"
#include "t2qc/dataset.hpp"
#include "t2qc/diagnostics.hpp"
#include "t2qc/generator.hpp"
#include "t2qc/manifest.hpp"
#include "t2qc/myt.hpp"
#include "t2qc/robust.hpp"
#include "t2qc/ucl.hpp"

using namespace t2qc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGate = 1;    // diagnostic gate failed or chart alerted
constexpr int kExitInput = 2;   // parse/contract errors
constexpr int kExitNumeric = 3; // numerical failure
constexpr const char* kVersion = "0.1.0";

PlausibilityRanges load_ranges(const std::string& path) {
    if (path.empty()) return PlausibilityRanges::defaults();
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
        PlausibilityRanges r;
        for (auto it = j.begin(); it != j.end(); ++it) {
            auto iv = it.value().get<std::vector<double>>();
            if (iv.size() != 2)
                throw ParseError(path + ": range for '" + it.key() +
                                 "' must be [lo, hi]");
            r.by_sign[it.key()] = {iv[0], iv[1]};
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<std::string> split_signs(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

StudyDataset load_study(const std::string& csv_path, const std::string& signs_csv,
                        const std::string& calendar_path) {
    std::optional<std::vector<Date>> cal;
    if (!calendar_path.empty()) cal = parse_calendar_file(calendar_path);
    return parse_long_csv_file(csv_path, split_signs(signs_csv), std::move(cal));
}

void print_test(const TestResult& t) {
    std::printf("%-22s n=%-5d ", t.name.c_str(), t.n_used);
    for (const auto& [k, v] : t.statistics) std::printf("%s=%.4g ", k.c_str(), v);
    for (const auto& [k, v] : t.p_values)
        std::printf("p[%s]=%.4g ", k.c_str(), v);
    std::printf("-> %s\n", t.pass ? "pass" : "FAIL");
}

struct CommonOpts {
    std::string signs = "BT,SBP,DBP,HR,SpO2";
    std::string calendar;
};

int cmd_generate(const std::string& config_path, const std::string& out_csv,
                 const std::string& calendar_out, std::optional<std::uint64_t> seed) {
    ScenarioConfig cfg = load_scenario(config_path);
    if (seed) cfg.seed = *seed;
    StudyDataset ds = generate_study(cfg);
    write_long_csv_file(out_csv, ds);
    if (!calendar_out.empty()) {
        std::ofstream out(calendar_out);
        if (!out) throw ParseError("cannot write '" + calendar_out + "'");
        for (const Date& d : ds.days()) out << d.to_string() << '\n';
    }
    MissingFractions mf = missing_fraction(ds);
    std::fprintf(stderr, "generated %zu cells over %d days, %.1f%% missing\n",
                 ds.cell_count(), ds.n_days(), 100.0 * mf.overall);
    RunManifest m;
    m.command = "generate";
    m.add_input(config_path);
    m.seed = cfg.seed;
    m.version = kVersion;
    m.write_for(out_csv);
    return kExitOk;
}

int cmd_estimate(const std::string& csv_path, const CommonOpts& common,
                 int phase1_days, const std::string& ranges_path,
                 const std::string& out_path, const std::string& removals_out) {
    StudyDataset raw = load_study(csv_path, common.signs, common.calendar);
    auto [ds, removals] = clean(raw, load_ranges(ranges_path));
    if (!removals_out.empty()) write_removals_csv_file(removals_out, removals);
    if (phase1_days > ds.n_days())
        throw DataError("phase-1 window of " + std::to_string(phase1_days) +
                        " days exceeds the " + std::to_string(ds.n_days()) +
                        "-day study");
    auto [first, last] = phase1_range(ds, phase1_days);
    Eigen::MatrixXd rows = complete_case_matrix(ds, first, last);
    RobustEstimates est = ogk_estimate(rows, {}, ds.signs());
    save_estimates(out_path, est);
    std::fprintf(stderr, "estimated from %d complete cases (%lld rows drawn)\n",
                 est.n_used, (long long)rows.rows());
    RunManifest m;
    m.command = "estimate";
    m.add_input(csv_path);
    if (!ranges_path.empty()) m.add_input(ranges_path);
    m.version = kVersion;
    m.write_for(out_path);
    return kExitOk;
}

int cmd_ucl(const std::string& estimates_path, const std::string& out_path,
            const std::string& csv_path, const CommonOpts& common, int m_days,
            int n_bar_flag, int phase1_days, double alpha, int inner, int outer,
            std::uint64_t seed, int threads, bool known_params) {
    RobustEstimates est = load_estimates(estimates_path);
    UclConfig cfg;
    cfg.m = m_days;
    cfg.alpha = alpha;
    cfg.inner_reps = inner;
    cfg.outer_reps = outer;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.use_estimation = !known_params;
    if (n_bar_flag > 0) {
        cfg.n_bar = n_bar_flag;
    } else {
        if (csv_path.empty())
            throw DataError("supply --n-bar or --csv to derive it");
        StudyDataset ds = load_study(csv_path, common.signs, common.calendar);
        auto [first, last] = phase1_range(ds, std::min(phase1_days, ds.n_days()));
        cfg.n_bar = n_bar(ds, first, last);
        std::fprintf(stderr, "n_bar derived from data: %d\n", cfg.n_bar);
    }
    UclTable table = ucl_table(est.mu, est.sigma, est.signs, cfg);
    save_ucl_table(out_path, table);
    std::fprintf(stderr, "simulated %zu subset limits (full set %.4f)\n",
                 table.entries.size(),
                 table.lookup(full_set(int(est.signs.size()))).ucl);
    RunManifest m;
    m.command = "ucl";
    m.add_input(estimates_path);
    if (!csv_path.empty()) m.add_input(csv_path);
    m.seed = seed;
    m.version = kVersion;
    m.write_for(out_path);
    return kExitOk;
}

int run_monitor_fixed(const StudyDataset& ds, const RobustEstimates& est,
                      const UclTable& table, const ChartOptions& opts,
                      ChartSeries& series) {
    series = run_chart(ds, est, table, opts);
    return series.any_signal() ? kExitGate : kExitOk;
}

// Iterative prospective mode: refit on all days seen so far until the
// threshold is reached, then freeze. Limits are simulated on demand per
// (estimates version, subset).
int run_monitor_reestimate(const StudyDataset& ds, int reestimate_until,
                           int warmup_days, const UclConfig& sim_base,
                           bool decompose, ChartSeries& series) {
    series.signs = ds.signs();
    RobustEstimates est;
    UclTable table;
    int fitted_days = -1;
    for (int d = 0; d < ds.n_days(); ++d) {
        DaySummary summary = daily_summary(ds, d);
        ChartPoint pt;
        pt.day = summary.day;
        pt.counts = summary.counts;
        pt.phase1 = d < warmup_days;
        if (pt.phase1) {
            pt.status = PointStatus::no_data;
            series.points.push_back(std::move(pt));
            continue;
        }
        const int want = std::min(d, reestimate_until);
        if (want != fitted_days) {
            auto [first, last] = phase1_range(ds, want);
            est = ogk_estimate(complete_case_matrix(ds, first, last), {},
                               ds.signs());
            UclConfig cfg = sim_base;
            cfg.m = want;
            cfg.n_bar = n_bar(ds, first, last);
            table = ucl_table(est.mu, est.sigma, ds.signs(), cfg);
            fitted_days = want;
        }
        auto reduced = reduce_dimensions(summary, est);
        if (!reduced) {
            pt.status = PointStatus::no_data;
            series.points.push_back(std::move(pt));
            continue;
        }
        pt.active = reduced->active;
        try {
            pt.ucl = table.lookup(pt.active).ucl;
            pt.t2 = t_squared(reduced->mean, reduced->mu, reduced->sigma_xbar);
            pt.signal = pt.t2 > pt.ucl;
        } catch (const NumericError& e) {
            pt.status = PointStatus::numeric_error;
            pt.error = e.what();
            series.points.push_back(std::move(pt));
            continue;
        }
        if (pt.signal && decompose) pt.myt = myt_decompose(summary, est, table);
        series.points.push_back(std::move(pt));
    }
    return series.any_signal() ? kExitGate : kExitOk;
}

int cmd_monitor(const std::string& csv_path, const CommonOpts& common,
                const std::string& estimates_path, const std::string& ucl_path,
                const std::string& mode, int phase1_days, bool no_decompose,
                const std::string& out_csv, const std::string& out_json,
                const std::string& ranges_path, int reestimate_until,
                double alpha, int inner, int outer, std::uint64_t seed) {
    StudyDataset raw = load_study(csv_path, common.signs, common.calendar);
    auto [ds, removals] = clean(raw, load_ranges(ranges_path));

    ChartSeries series;
    int rc;
    RunManifest m;
    m.command = "monitor";
    m.add_input(csv_path);

    if (mode == "prospective" && reestimate_until > 0) {
        UclConfig sim;
        sim.alpha = alpha;
        sim.inner_reps = inner;
        sim.outer_reps = outer;
        sim.seed = seed;
        rc = run_monitor_reestimate(ds, reestimate_until,
                                    std::min(7, reestimate_until), sim,
                                    !no_decompose, series);
        m.seed = seed;
    } else {
        RobustEstimates est = load_estimates(estimates_path);
        UclTable table = load_ucl_table(ucl_path);
        ChartOptions opts;
        opts.phase1_days = phase1_days;
        opts.include_phase1 = mode != "prospective";
        opts.decompose_signals = !no_decompose;
        rc = run_monitor_fixed(ds, est, table, opts, series);
        m.add_input(estimates_path);
        m.add_input(ucl_path);
    }

    if (!out_csv.empty()) write_chart_csv_file(out_csv, series);
    if (!out_json.empty()) write_chart_json_file(out_json, series);
    if (out_csv.empty() && out_json.empty()) write_chart_csv(std::cout, series);

    int signals = 0;
    for (const auto& pt : series.points) signals += pt.signal && !pt.phase1;
    std::fprintf(stderr, "%d signal day(s) outside the estimation window\n",
                 signals);
    m.version = kVersion;
    if (!out_csv.empty()) m.write_for(out_csv);
    return rc;
}

int cmd_decompose(const std::string& csv_path, const CommonOpts& common,
                  const std::string& estimates_path, const std::string& ucl_path,
                  const std::string& date_str, const std::string& ranges_path) {
    StudyDataset raw = load_study(csv_path, common.signs, common.calendar);
    auto [ds, removals] = clean(raw, load_ranges(ranges_path));
    RobustEstimates est = load_estimates(estimates_path);
    UclTable table = load_ucl_table(ucl_path);
    DaySummary summary = daily_summary(ds, Date::parse(date_str));
    MytReport rep = myt_decompose(summary, est, table);

    std::printf("decomposition for %s\n", date_str.c_str());
    std::printf("%-28s %10s %10s  %s\n", "subset", "t2", "ucl", "flag");
    for (const auto& e : rep.entries) {
        const std::string name = subset_name(e.subset, ds.signs());
        if (e.indeterminate) {
            std::printf("%-28s %10s %10.4f  indeterminate\n", name.c_str(), "-",
                        e.ucl);
            continue;
        }
        std::printf("%-28s %10.4f %10.4f  %s\n", name.c_str(), e.t2, e.ucl,
                    e.exceeds ? "exceeds" : "");
    }
    std::printf("implicated:");
    for (SignSubset s : rep.implicated)
        std::printf(" {%s}", subset_name(s, ds.signs()).c_str());
    std::printf("%s\n", rep.implicated.empty() ? " none" : "");
    return kExitOk;
}

int cmd_diagnose(const std::string& csv_path, const CommonOpts& common,
                 int phase1_days, double level, int max_lag,
                 const std::string& ranges_path) {
    StudyDataset raw = load_study(csv_path, common.signs, common.calendar);
    auto [ds, removals] = clean(raw, load_ranges(ranges_path));
    const int p = ds.p();

    // daily mean vectors for days with every sign observed
    std::vector<Eigen::VectorXd> means;
    std::vector<DaySummary> summaries;
    for (int d = 0; d < ds.n_days(); ++d) {
        summaries.push_back(daily_summary(ds, d));
        const DaySummary& s = summaries.back();
        bool complete = true;
        for (int j = 0; j < p; ++j) complete = complete && s.counts[j] >= 1;
        if (complete)
            means.push_back(
                Eigen::Map<const Eigen::VectorXd>(s.means.data(), p));
    }
    if (int(means.size()) < p + 2)
        throw DataError("not enough complete days for the normality test");
    Eigen::MatrixXd rows(means.size(), p);
    for (std::size_t i = 0; i < means.size(); ++i)
        rows.row(int(i)) = means[i].transpose();

    bool all_pass = true;
    TestResult mardia = mardia_test(rows, level);
    print_test(mardia);
    all_pass = all_pass && mardia.pass;

    // correlation gate from the phase-1 robust fit
    auto [first, last] = phase1_range(ds, std::min(phase1_days, ds.n_days()));
    RobustEstimates est =
        ogk_estimate(complete_case_matrix(ds, first, last), {}, ds.signs());
    Eigen::VectorXd dinv = est.sigma.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd corr = dinv.asDiagonal() * est.sigma * dinv.asDiagonal();
    for (int j = 0; j < p; ++j) corr(j, j) = 1.0;
    TestResult bartlett = bartlett_sphericity(corr, est.n_used, level);
    print_test(bartlett);
    all_pass = all_pass && bartlett.pass;

    // autocorrelation of each sign's daily-mean series (gaps skipped)
    for (int j = 0; j < p; ++j) {
        std::vector<std::optional<double>> series;
        for (const auto& s : summaries)
            series.push_back(s.counts[j] >= 1
                                 ? std::optional<double>(s.means[j])
                                 : std::nullopt);
        AcfResult a = acf(series, max_lag);
        int outside = 0;
        for (int h = 1; h <= max_lag; ++h) outside += std::fabs(a.r[h]) >= a.band;
        const bool pass = outside <= max_lag / 10;
        std::printf("acf %-18s n=%-5d band=%.3f lags outside: %d/%d -> %s\n",
                    ds.signs()[j].c_str(), a.n_used, a.band, outside, max_lag,
                    pass ? "pass" : "FAIL");
        all_pass = all_pass && pass;
    }
    return all_pass ? kExitOk : kExitGate;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hotelling T-squared data-quality monitoring for panel data "
                 "with missing observations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOpts common;
    app.add_option("--signs", common.signs,
                   "comma-separated ordered sign list")
        ->capture_default_str();
    app.add_option("--calendar", common.calendar,
                   "calendar file (one ISO date per line) fixing the study days");

    // generate
    auto* gen = app.add_subcommand("generate", "synthesize a study from a scenario");
    std::string gen_config, gen_out = "study.csv", gen_calendar_out;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--config", gen_config, "scenario JSON")->required();
    gen->add_option("--out", gen_out, "output CSV")->capture_default_str();
    gen->add_option("--calendar-out", gen_calendar_out,
                    "also write the full calendar");
    gen->add_option("--seed", gen_seed, "override the scenario seed");

    // estimate
    auto* estc = app.add_subcommand("estimate", "fit robust phase-1 estimates");
    std::string est_csv, est_out = "estimates.txt", est_ranges, est_removals;
    int est_phase1 = 19;
    estc->add_option("--csv", est_csv, "long-format study CSV")->required();
    estc->add_option("--out", est_out, "estimates file")->capture_default_str();
    estc->add_option("--phase1-days", est_phase1, "estimation window length")
        ->capture_default_str();
    estc->add_option("--ranges", est_ranges, "plausibility ranges JSON");
    estc->add_option("--removals-out", est_removals, "cleaning report CSV");

    // ucl
    auto* uclc = app.add_subcommand("ucl", "simulate control limits");
    std::string ucl_est, ucl_out = "ucl.json", ucl_csv;
    int ucl_m = 19, ucl_nbar = 0, ucl_phase1 = 19, ucl_inner = 10000,
        ucl_outer = 100, ucl_threads = 0;
    double ucl_alpha = 0.02;
    std::uint64_t ucl_seed = 1;
    bool ucl_known = false;
    uclc->add_option("--estimates", ucl_est, "estimates file")->required();
    uclc->add_option("--out", ucl_out, "UCL table JSON")->capture_default_str();
    uclc->add_option("--csv", ucl_csv, "study CSV (derives n_bar)");
    uclc->add_option("--m", ucl_m, "phase-1 day count")->capture_default_str();
    uclc->add_option("--n-bar", ucl_nbar, "average per-day sample size");
    uclc->add_option("--phase1-days", ucl_phase1,
                     "window for the n_bar derivation")
        ->capture_default_str();
    uclc->add_option("--alpha", ucl_alpha, "false-alarm rate")
        ->capture_default_str();
    uclc->add_option("--inner", ucl_inner, "statistic draws per replicate")
        ->capture_default_str();
    uclc->add_option("--outer", ucl_outer, "estimation replicates")
        ->capture_default_str();
    uclc->add_option("--seed", ucl_seed, "simulation seed")->capture_default_str();
    uclc->add_option("--threads", ucl_threads, "worker threads (0 = auto)");
    uclc->add_flag("--known-params", ucl_known,
                   "score against the true parameters (no estimation step)");

    // monitor
    auto* mon = app.add_subcommand("monitor", "run the control chart");
    std::string mon_csv, mon_est, mon_ucl, mon_mode = "retro", mon_out_csv,
                mon_out_json, mon_ranges;
    int mon_phase1 = 19, mon_reest = 0, mon_inner = 10000, mon_outer = 100;
    double mon_alpha = 0.02;
    std::uint64_t mon_seed = 1;
    bool mon_no_decompose = false;
    mon->add_option("--csv", mon_csv, "study CSV")->required();
    mon->add_option("--estimates", mon_est, "estimates file");
    mon->add_option("--ucl", mon_ucl, "UCL table JSON");
    mon->add_option("--mode", mon_mode, "retro | prospective")
        ->check(CLI::IsMember({"retro", "prospective"}))
        ->capture_default_str();
    mon->add_option("--phase1-days", mon_phase1, "estimation window length")
        ->capture_default_str();
    mon->add_option("--out-csv", mon_out_csv, "chart CSV output");
    mon->add_option("--out-json", mon_out_json, "chart JSON output");
    mon->add_option("--ranges", mon_ranges, "plausibility ranges JSON");
    mon->add_flag("--no-decompose", mon_no_decompose,
                  "skip decomposition on signal days");
    mon->add_option("--reestimate-until", mon_reest,
                    "prospective: refit daily until this many days, then freeze");
    mon->add_option("--alpha", mon_alpha, "false-alarm rate (re-estimation)")
        ->capture_default_str();
    mon->add_option("--inner", mon_inner, "statistic draws (re-estimation)")
        ->capture_default_str();
    mon->add_option("--outer", mon_outer, "replicates (re-estimation)")
        ->capture_default_str();
    mon->add_option("--seed", mon_seed, "seed (re-estimation)")
        ->capture_default_str();

    // decompose
    auto* dec = app.add_subcommand("decompose", "subset breakdown of one day");
    std::string dec_csv, dec_est, dec_ucl, dec_date, dec_ranges;
    dec->add_option("--csv", dec_csv, "study CSV")->required();
    dec->add_option("--estimates", dec_est, "estimates file")->required();
    dec->add_option("--ucl", dec_ucl, "UCL table JSON")->required();
    dec->add_option("--date", dec_date, "day to decompose (YYYY-MM-DD)")
        ->required();
    dec->add_option("--ranges", dec_ranges, "plausibility ranges JSON");

    // diagnose
    auto* dia = app.add_subcommand("diagnose", "assumption checks");
    std::string dia_csv, dia_ranges;
    int dia_phase1 = 19, dia_maxlag = 20;
    double dia_level = 0.05;
    dia->add_option("--csv", dia_csv, "study CSV")->required();
    dia->add_option("--phase1-days", dia_phase1, "window for the correlation gate")
        ->capture_default_str();
    dia->add_option("--level", dia_level, "test level")->capture_default_str();
    dia->add_option("--max-lag", dia_maxlag, "autocorrelation lags")
        ->capture_default_str();
    dia->add_option("--ranges", dia_ranges, "plausibility ranges JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitInput;
    }

    try {
        if (gen->parsed())
            return cmd_generate(gen_config, gen_out, gen_calendar_out, gen_seed);
        if (estc->parsed())
            return cmd_estimate(est_csv, common, est_phase1, est_ranges, est_out,
                                est_removals);
        if (uclc->parsed())
            return cmd_ucl(ucl_est, ucl_out, ucl_csv, common, ucl_m, ucl_nbar,
                           ucl_phase1, ucl_alpha, ucl_inner, ucl_outer, ucl_seed,
                           ucl_threads, ucl_known);
        if (mon->parsed()) {
            if (mon_reest == 0 && (mon_est.empty() || mon_ucl.empty()))
                throw DataError(
                    "monitor needs --estimates and --ucl (or --reestimate-until "
                    "in prospective mode)");
            return cmd_monitor(mon_csv, common, mon_est, mon_ucl, mon_mode,
                               mon_phase1, mon_no_decompose, mon_out_csv,
                               mon_out_json, mon_ranges, mon_reest, mon_alpha,
                               mon_inner, mon_outer, mon_seed);
        }
        if (dec->parsed())
            return cmd_decompose(dec_csv, common, dec_est, dec_ucl, dec_date,
                                 dec_ranges);
        if (dia->parsed())
            return cmd_diagnose(dia_csv, common, dia_phase1, dia_level,
                                dia_maxlag, dia_ranges);
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const InsufficientDataError& e) {
        // data shortage blocks estimation; distinct from malformed input
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
