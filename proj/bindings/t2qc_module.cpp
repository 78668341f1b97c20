#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "t2qc/chart.hpp"
#include "t2qc/csv.hpp"
#include "t2qc/dataset.hpp"
#include "t2qc/diagnostics.hpp"
#include "t2qc/generator.hpp"
#include "t2qc/myt.hpp"
#include "t2qc/robust.hpp"
#include "t2qc/statfun.hpp"
#include "t2qc/ucl.hpp"
#include "t2qc/weighting.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace t2qc;

namespace {

std::vector<std::string> mask_names(SignSubset mask,
                                    const std::vector<std::string>& signs) {
    std::vector<std::string> out;
    for (int idx : subset_indices(mask)) out.push_back(signs[std::size_t(idx)]);
    return out;
}

SignSubset names_mask(const std::vector<std::string>& names,
                      const std::vector<std::string>& signs) {
    SignSubset mask = 0;
    for (const auto& n : names) {
        auto it = std::find(signs.begin(), signs.end(), n);
        if (it == signs.end()) throw DataError("unknown sign '" + n + "'");
        mask |= SignSubset{1} << (it - signs.begin());
    }
    return mask;
}

PlausibilityRanges ranges_from_dict(const py::dict& d) {
    PlausibilityRanges r;
    for (auto item : d) {
        auto iv = item.second.cast<std::pair<double, double>>();
        r.by_sign[item.first.cast<std::string>()] = {iv.first, iv.second};
    }
    return r;
}

}  // namespace

PYBIND11_MODULE(_t2qc, m) {
    m.doc() = "Hotelling T-squared data-quality chart for panel data with "
              "missing observations";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<StudyDataset>(m, "StudyDataset")
        .def_property_readonly("signs", &StudyDataset::signs)
        .def_property_readonly("participants", &StudyDataset::participants)
        .def_property_readonly("days",
                               [](const StudyDataset& ds) {
                                   std::vector<std::string> out;
                                   for (const Date& d : ds.days())
                                       out.push_back(d.to_string());
                                   return out;
                               })
        .def_property_readonly("cell_count", &StudyDataset::cell_count)
        .def("value",
             [](const StudyDataset& ds, const std::string& day,
                const std::string& sign, const std::string& participant)
                 -> std::optional<double> {
                 int d = ds.day_index(Date::parse(day));
                 int j = ds.sign_index(sign);
                 for (int k = 0; k < ds.n_participants(); ++k)
                     if (ds.participants()[std::size_t(k)] == participant)
                         return ds.value(d, j, k);
                 return std::nullopt;
             },
             "day"_a, "sign"_a, "participant"_a)
        .def("to_csv",
             [](const StudyDataset& ds) {
                 std::ostringstream out;
                 write_long_csv(out, ds);
                 return out.str();
             })
        .def("__repr__", [](const StudyDataset& ds) {
            std::ostringstream os;
            os << "StudyDataset(" << ds.p() << " signs, "
               << ds.n_participants() << " participants, " << ds.n_days()
               << " days, " << ds.cell_count() << " cells)";
            return os.str();
        });

    m.def(
        "parse_csv",
        [](const std::string& text, const std::vector<std::string>& signs) {
            std::istringstream in(text);
            return parse_long_csv(in, signs);
        },
        "text"_a, "signs"_a, "Parse long-format CSV text into a StudyDataset");
    m.def("read_csv", &parse_long_csv_file, "path"_a, "signs"_a,
          "calendar"_a = std::nullopt);
    m.def("write_csv", &write_long_csv_file, "path"_a, "dataset"_a);

    m.def(
        "clean",
        [](const StudyDataset& ds, const py::dict& ranges) {
            auto [cleaned, removals] = clean(ds, ranges_from_dict(ranges));
            py::list report;
            for (const auto& r : removals)
                report.append(py::dict(
                    "date"_a = r.day.to_string(), "participant"_a = r.participant,
                    "sign"_a = r.sign, "value"_a = r.value,
                    "reason"_a = r.reason));
            return py::make_tuple(cleaned, report);
        },
        "dataset"_a, "ranges"_a,
        "Remove cells outside per-sign [lo, hi] ranges; returns (dataset, report)");
    m.def("default_ranges", [] {
        py::dict d;
        for (const auto& [k, iv] : PlausibilityRanges::defaults().by_sign)
            d[py::str(k)] = py::make_tuple(iv.lo, iv.hi);
        return d;
    });

    py::class_<DaySummary>(m, "DaySummary")
        .def_property_readonly("day",
                               [](const DaySummary& s) { return s.day.to_string(); })
        .def_readonly("means", &DaySummary::means)
        .def_readonly("counts", &DaySummary::counts)
        .def_readonly("overlaps", &DaySummary::overlaps);
    m.def(
        "daily_summary",
        [](const StudyDataset& ds, const std::string& day) {
            return daily_summary(ds, Date::parse(day));
        },
        "dataset"_a, "day"_a);

    py::class_<WeightMatrix>(m, "WeightMatrix")
        .def_readonly("entries", &WeightMatrix::entries)
        .def_property_readonly("defined_signs", [](const WeightMatrix& w) {
            std::vector<int> out = subset_indices(w.defined);
            return out;
        });
    m.def("weight_matrix", &weight_matrix, "summary"_a);
    m.def(
        "scaled_covariance",
        [](const WeightMatrix& w, const Eigen::MatrixXd& sigma) {
            ScaledCovariance sc = scaled_covariance(w, sigma);
            return py::make_tuple(sc.sigma_xbar, subset_indices(sc.active));
        },
        "weights"_a, "sigma"_a,
        "Hadamard product restricted to measured signs; returns (matrix, indices)");

    m.def("robust_scale",
          [](const std::vector<double>& x) { return robust_scale(x); }, "x"_a);
    m.def(
        "tau_location_scale",
        [](const std::vector<double>& x) {
            TauEstimate t = tau_location_scale(x);
            return py::make_tuple(t.location, t.scale);
        },
        "x"_a);

    py::class_<RobustEstimates>(m, "RobustEstimates")
        .def_readonly("signs", &RobustEstimates::signs)
        .def_readonly("mu", &RobustEstimates::mu)
        .def_readonly("sigma", &RobustEstimates::sigma)
        .def_readonly("n_used", &RobustEstimates::n_used)
        .def_readonly("scale_estimator", &RobustEstimates::scale_estimator)
        .def_readonly("iterations", &RobustEstimates::iterations)
        .def_readonly("reweighted", &RobustEstimates::reweighted);
    m.def(
        "ogk_estimate",
        [](const Eigen::MatrixXd& rows, int iterations, bool reweight,
           double beta, const std::vector<std::string>& names) {
            return ogk_estimate(rows, {iterations, reweight, beta}, names);
        },
        "rows"_a, "iterations"_a = 2, "reweight"_a = true, "beta"_a = 0.9,
        "names"_a = std::vector<std::string>{});
    m.def(
        "complete_case_matrix",
        [](const StudyDataset& ds, const std::string& first,
           const std::string& last) {
            return complete_case_matrix(ds, Date::parse(first), Date::parse(last));
        },
        "dataset"_a, "first"_a, "last"_a);
    m.def("save_estimates", &save_estimates, "path"_a, "estimates"_a);
    m.def("load_estimates", &load_estimates, "path"_a);

    py::class_<UclConfig>(m, "UclConfig")
        .def(py::init([](int m_, int n_bar_, double alpha, int inner, int outer,
                         std::uint64_t seed, bool use_estimation, int threads) {
                 UclConfig c;
                 c.m = m_;
                 c.n_bar = n_bar_;
                 c.alpha = alpha;
                 c.inner_reps = inner;
                 c.outer_reps = outer;
                 c.seed = seed;
                 c.use_estimation = use_estimation;
                 c.threads = threads;
                 c.validate();
                 return c;
             }),
             "m"_a = 19, "n_bar"_a = 1, "alpha"_a = 0.02, "inner"_a = 10000,
             "outer"_a = 100, "seed"_a = 0, "use_estimation"_a = true,
             "threads"_a = 0)
        .def_readonly("m", &UclConfig::m)
        .def_readonly("n_bar", &UclConfig::n_bar)
        .def_readonly("alpha", &UclConfig::alpha)
        .def_readonly("inner", &UclConfig::inner_reps)
        .def_readonly("outer", &UclConfig::outer_reps)
        .def_readonly("seed", &UclConfig::seed);

    py::class_<UclTable>(m, "UclTable")
        .def_readonly("signs", &UclTable::signs)
        .def_readonly("config", &UclTable::config)
        .def("lookup",
             [](const UclTable& t, const std::vector<std::string>& subset) {
                 const UclEntry& e = t.lookup(names_mask(subset, t.signs));
                 return py::dict("ucl"_a = e.ucl, "se"_a = e.se,
                                 "retries"_a = e.retries);
             },
             "subset"_a)
        .def("entries", [](const UclTable& t) {
            py::list out;
            for (const auto& [mask, e] : t.entries)
                out.append(py::dict("subset"_a = mask_names(mask, t.signs),
                                    "ucl"_a = e.ucl, "se"_a = e.se,
                                    "retries"_a = e.retries));
            return out;
        });

    m.def(
        "n_bar",
        [](const StudyDataset& ds, const std::string& first,
           const std::string& last) {
            return n_bar(ds, Date::parse(first), Date::parse(last));
        },
        "dataset"_a, "first"_a, "last"_a);
    m.def(
        "simulate_ucl",
        [](const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
           const std::vector<std::string>& subset,
           const std::vector<std::string>& signs, const UclConfig& cfg) {
            UclEntry e = simulate_ucl(mu, sigma, names_mask(subset, signs), cfg);
            return py::make_tuple(e.ucl, e.se);
        },
        "mu"_a, "sigma"_a, "subset"_a, "signs"_a, "config"_a);
    m.def("ucl_table", &ucl_table, "mu"_a, "sigma"_a, "signs"_a, "config"_a);
    m.def("save_ucl_table", &save_ucl_table, "path"_a, "table"_a);
    m.def("load_ucl_table", &load_ucl_table, "path"_a);

    m.def("t_squared", &t_squared, "mean"_a, "mu"_a, "sigma_xbar"_a);

    py::class_<MytReport>(m, "MytReport")
        .def_property_readonly("day",
                               [](const MytReport& r) { return r.day.to_string(); })
        .def("entries",
             [](const MytReport& r, const std::vector<std::string>& signs) {
                 py::list out;
                 for (const auto& e : r.entries) {
                     py::dict d("subset"_a = mask_names(e.subset, signs),
                                "indeterminate"_a = e.indeterminate);
                     if (!e.indeterminate) {
                         d["t2"] = e.t2;
                         d["ucl"] = e.ucl;
                         d["exceeds"] = e.exceeds;
                     }
                     out.append(std::move(d));
                 }
                 return out;
             },
             "signs"_a)
        .def("implicated", [](const MytReport& r,
                              const std::vector<std::string>& signs) {
            py::list out;
            for (SignSubset s : r.implicated) out.append(mask_names(s, signs));
            return out;
        },
        "signs"_a);
    m.def("myt_decompose", &myt_decompose, "summary"_a, "estimates"_a,
          "ucl_table"_a);

    py::enum_<PointStatus>(m, "PointStatus")
        .value("ok", PointStatus::ok)
        .value("no_data", PointStatus::no_data)
        .value("numeric_error", PointStatus::numeric_error);

    py::class_<ChartPoint>(m, "ChartPoint")
        .def_property_readonly("day",
                               [](const ChartPoint& p) { return p.day.to_string(); })
        .def_readonly("t2", &ChartPoint::t2)
        .def_readonly("ucl", &ChartPoint::ucl)
        .def_readonly("signal", &ChartPoint::signal)
        .def_readonly("phase1", &ChartPoint::phase1)
        .def_readonly("status", &ChartPoint::status)
        .def_readonly("counts", &ChartPoint::counts)
        .def_readonly("myt", &ChartPoint::myt)
        .def_property_readonly("active", [](const ChartPoint& p) {
            return subset_indices(p.active);
        });

    py::class_<ChartSeries>(m, "ChartSeries")
        .def_readonly("signs", &ChartSeries::signs)
        .def_readonly("points", &ChartSeries::points)
        .def("any_signal", &ChartSeries::any_signal,
             "prospective_only"_a = true)
        .def("to_csv", [](const ChartSeries& s) {
            std::ostringstream out;
            write_chart_csv(out, s);
            return out.str();
        });

    m.def(
        "run_chart",
        [](const StudyDataset& ds, const RobustEstimates& est,
           const UclTable& ucls, int phase1_days, bool include_phase1,
           bool decompose_signals) {
            ChartOptions opts;
            opts.phase1_days = phase1_days;
            opts.include_phase1 = include_phase1;
            opts.decompose_signals = decompose_signals;
            return run_chart(ds, est, ucls, opts);
        },
        "dataset"_a, "estimates"_a, "ucl_table"_a, "phase1_days"_a = 19,
        "include_phase1"_a = true, "decompose_signals"_a = false);

    py::class_<TestResult>(m, "TestResult")
        .def_readonly("name", &TestResult::name)
        .def_readonly("statistics", &TestResult::statistics)
        .def_readonly("p_values", &TestResult::p_values)
        .def_readonly("level", &TestResult::level)
        .def_readonly("passed", &TestResult::pass)
        .def_readonly("n_used", &TestResult::n_used)
        .def("p_value", &TestResult::p_value, "name"_a);
    m.def("mardia_test", &mardia_test, "rows"_a, "level"_a = 0.05);
    m.def("bartlett_sphericity", &bartlett_sphericity, "corr"_a, "n"_a,
          "level"_a = 0.05);
    m.def(
        "acf",
        [](const std::vector<std::optional<double>>& series, int max_lag) {
            AcfResult r = acf(series, max_lag);
            return py::dict("r"_a = r.r, "band"_a = r.band,
                            "n_used"_a = r.n_used);
        },
        "series"_a, "max_lag"_a);

    m.def("scenario_from_json", &scenario_from_json_text, "text"_a);
    m.def("load_scenario", &load_scenario, "path"_a);
    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readonly("signs", &ScenarioConfig::signs)
        .def_readonly("n_participants", &ScenarioConfig::n_participants)
        .def_readonly("q_day", &ScenarioConfig::q_day)
        .def_readonly("q_sign", &ScenarioConfig::q_sign)
        .def_readonly("seed", &ScenarioConfig::seed);
    m.def("generate_study", &generate_study, "scenario"_a);
    m.def(
        "missing_fraction",
        [](const StudyDataset& ds) {
            MissingFractions f = missing_fraction(ds);
            return py::dict("per_sign"_a = f.per_sign, "overall"_a = f.overall);
        },
        "dataset"_a);

    m.def("chi2_quantile", &chi2_quantile, "prob"_a, "df"_a);
    m.def("chi2_cdf", &chi2_cdf, "x"_a, "df"_a);

    m.attr("__version__") = "0.1.0";
}
