#include "t2qc/chart.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "t2qc/linalg.hpp"
#include "t2qc/weighting.hpp"

namespace t2qc {

double t_squared(const Eigen::VectorXd& mean_vec, const Eigen::VectorXd& mu,
                 const Eigen::MatrixXd& sigma_xbar) {
    if (mean_vec.size() != mu.size() || sigma_xbar.rows() != mean_vec.size() ||
        sigma_xbar.cols() != mean_vec.size())
        throw DataError("t_squared: dimension mismatch");
    const SpdSolver solver(sigma_xbar);
    return solver.quad_form(mean_vec - mu);
}

std::optional<ReducedSystem> reduce_dimensions(const DaySummary& summary,
                                               const RobustEstimates& est) {
    if (int(summary.counts.size()) != est.p())
        throw DataError("reduce_dimensions: dimension mismatch");
    const WeightMatrix w = weight_matrix(summary);
    if (w.defined == 0) return std::nullopt;
    ScaledCovariance sc = scaled_covariance(w, est.sigma);

    const auto idx = subset_indices(sc.active);
    ReducedSystem rs;
    rs.active = sc.active;
    rs.sigma_xbar = std::move(sc.sigma_xbar);
    rs.mean.resize(idx.size());
    rs.mu.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        rs.mean[i] = summary.means[idx[i]];
        rs.mu[i] = est.mu[idx[i]];
    }
    return rs;
}

ChartSeries run_chart(const StudyDataset& data, const RobustEstimates& est,
                      const UclTable& ucls, const ChartOptions& options) {
    if (est.signs != data.signs() || ucls.signs != data.signs())
        throw DataError("run_chart: estimates/limits built from a different "
                        "sign list");
    ChartSeries series;
    series.signs = data.signs();

    for (int d = 0; d < data.n_days(); ++d) {
        const bool phase1 = d < options.phase1_days;
        if (phase1 && !options.include_phase1) continue;

        const DaySummary summary = daily_summary(data, d);
        ChartPoint pt;
        pt.day = summary.day;
        pt.phase1 = phase1;
        pt.counts = summary.counts;

        auto reduced = reduce_dimensions(summary, est);
        if (!reduced) {
            pt.status = PointStatus::no_data;
            series.points.push_back(std::move(pt));
            continue;
        }
        pt.active = reduced->active;
        try {
            pt.ucl = ucls.lookup(pt.active).ucl;
            pt.t2 = t_squared(reduced->mean, reduced->mu, reduced->sigma_xbar);
            pt.signal = pt.t2 > pt.ucl;
        } catch (const NumericError& e) {
            pt.status = PointStatus::numeric_error;
            pt.error = e.what();
            series.points.push_back(std::move(pt));
            continue;
        }
        if (pt.signal && options.decompose_signals)
            pt.myt = myt_decompose(summary, est, ucls);
        series.points.push_back(std::move(pt));
    }
    return series;
}

namespace {

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* status_name(PointStatus s) {
    switch (s) {
        case PointStatus::ok: return "ok";
        case PointStatus::no_data: return "no_data";
        case PointStatus::numeric_error: return "numeric_error";
    }
    return "?";
}

}  // namespace

void write_chart_csv(std::ostream& out, const ChartSeries& series) {
    out << "date,t2,ucl,signal,phase1,status,active_signs";
    for (const auto& s : series.signs) out << ",n_" << s;
    out << '\n';
    for (const auto& pt : series.points) {
        out << pt.day.to_string() << ',';
        if (pt.status == PointStatus::ok)
            out << fmt_full(pt.t2) << ',' << fmt_full(pt.ucl);
        else
            out << ',';
        out << ',' << (pt.signal ? 1 : 0) << ',' << (pt.phase1 ? 1 : 0) << ','
            << status_name(pt.status) << ','
            << subset_name(pt.active, series.signs);
        for (int c : pt.counts) out << ',' << c;
        out << '\n';
    }
}

void write_chart_csv_file(const std::string& path, const ChartSeries& series) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_chart_csv(out, series);
}

void write_chart_json_file(const std::string& path, const ChartSeries& series) {
    nlohmann::json j;
    j["format"] = "t2qc-chart v1";
    j["signs"] = series.signs;
    auto& pts = j["points"] = nlohmann::json::array();
    for (const auto& pt : series.points) {
        nlohmann::json jp;
        jp["date"] = pt.day.to_string();
        jp["status"] = status_name(pt.status);
        jp["phase1"] = pt.phase1;
        jp["signal"] = pt.signal;
        jp["counts"] = pt.counts;
        jp["active_signs"] = [&] {
            std::vector<std::string> names;
            for (int idx : subset_indices(pt.active)) names.push_back(series.signs[idx]);
            return names;
        }();
        if (pt.status == PointStatus::ok) {
            jp["t2"] = pt.t2;
            jp["ucl"] = pt.ucl;
        }
        if (pt.status == PointStatus::numeric_error) jp["error"] = pt.error;
        if (pt.myt) {
            nlohmann::json jm;
            auto subset_names = [&](SignSubset mask) {
                std::vector<std::string> names;
                for (int idx : subset_indices(mask)) names.push_back(series.signs[idx]);
                return names;
            };
            auto& entries = jm["entries"] = nlohmann::json::array();
            for (const auto& e : pt.myt->entries) {
                nlohmann::json je;
                je["subset"] = subset_names(e.subset);
                if (e.indeterminate) {
                    je["indeterminate"] = true;
                } else {
                    je["t2"] = e.t2;
                    je["ucl"] = e.ucl;
                    je["exceeds"] = e.exceeds;
                }
                entries.push_back(std::move(je));
            }
            auto& imp = jm["implicated"] = nlohmann::json::array();
            for (SignSubset s : pt.myt->implicated) imp.push_back(subset_names(s));
            jp["myt"] = std::move(jm);
        }
        pts.push_back(std::move(jp));
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace t2qc
