#include "t2qc/ucl.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "t2qc/errors.hpp"
#include "t2qc/linalg.hpp"
#include "t2qc/mvn.hpp"
#include "t2qc/robust.hpp"
#include "t2qc/rng.hpp"
#include "t2qc/statfun.hpp"

namespace t2qc {

void UclConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must lie in (0,1)");
    if (m < 2) throw DataError("m must be at least 2");
    if (n_bar < 1) throw DataError("n_bar must be at least 1");
    if (inner_reps < 1000) throw DataError("inner_reps must be at least 1000");
    if (outer_reps < 1) throw DataError("outer_reps must be at least 1");
}

const UclEntry& UclTable::lookup(SignSubset subset) const {
    auto it = entries.find(subset);
    if (it == entries.end())
        throw DataError("no UCL for subset " + subset_name(subset, signs));
    return it->second;
}

int n_bar(const StudyDataset& data, const Date& first, const Date& last) {
    long total = 0;
    long terms = 0;
    for (int d = 0; d < data.n_days(); ++d) {
        const Date day = data.days()[d];
        if (day < first || day > last) continue;
        for (int j = 0; j < data.p(); ++j) {
            total += long(data.cells(d, j).size());
            ++terms;
        }
    }
    if (terms == 0) throw DataError("phase-1 window contains no study days");
    if (total == 0) throw DataError("phase-1 window contains no measurements");
    return int(std::llround(double(total) / double(terms)));
}

UclEntry simulate_ucl(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                      SignSubset subset, const UclConfig& cfg) {
    cfg.validate();
    if (subset == 0) throw DataError("simulate_ucl: empty subset");

    const Eigen::VectorXd mu_s = subvector(mu, subset);
    const Eigen::MatrixXd sigma_s = submatrix(sigma, subset);
    const int ps = int(mu_s.size());

    const MvnSampler obs_sampler(mu_s, sigma_s);
    const MvnSampler mean_sampler(mu_s, sigma_s / double(cfg.n_bar));

    std::vector<double> quantiles(cfg.outer_reps);
    int retries = 0;

    std::vector<double> t2(cfg.inner_reps);
    Eigen::MatrixXd rows(cfg.m * cfg.n_bar, ps);
    for (int rep = 0; rep < cfg.outer_reps; ++rep) {
        Eigen::VectorXd mu_fit = mu_s;
        Eigen::MatrixXd sigma_fit = sigma_s;
        if (cfg.use_estimation) {
            int attempt = 0;
            for (;; ++attempt) {
                if (attempt >= 5)
                    throw NumericError("simulate_ucl: 5 consecutive estimation "
                                       "failures in replicate " +
                                       std::to_string(rep));
                Philox2x64 rng = make_stream(cfg.seed, stream::ucl_phase1,
                                             (std::uint64_t(subset) << 8) | attempt,
                                             rep);
                for (int i = 0; i < rows.rows(); ++i)
                    rows.row(i) = obs_sampler.draw(rng).transpose();
                try {
                    RobustEstimates est = ogk_estimate(rows);
                    mu_fit = est.mu;
                    sigma_fit = est.sigma;
                    break;
                } catch (const Error&) {
                    ++retries;
                }
            }
        }
        const SpdSolver solver(sigma_fit / double(cfg.n_bar));
        Philox2x64 rng = make_stream(cfg.seed, stream::ucl_means,
                                     std::uint64_t(subset), rep);
        for (int i = 0; i < cfg.inner_reps; ++i)
            t2[i] = solver.quad_form(mean_sampler.draw(rng) - mu_fit);
        quantiles[rep] = empirical_quantile_ceil(t2, 1.0 - cfg.alpha);
    }

    double mean = 0.0;
    for (double q : quantiles) mean += q;
    mean /= double(cfg.outer_reps);
    double var = 0.0;
    for (double q : quantiles) var += (q - mean) * (q - mean);
    const double se = cfg.outer_reps > 1
                          ? std::sqrt(var / double(cfg.outer_reps - 1) /
                                      double(cfg.outer_reps))
                          : 0.0;
    return {subset, mean, se, retries};
}

namespace {

UclTable table_for_subsets(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                           const std::vector<std::string>& signs,
                           const std::vector<SignSubset>& subsets,
                           const UclConfig& cfg) {
    cfg.validate();
    UclTable table;
    table.signs = signs;
    table.config = cfg;

    std::vector<UclEntry> slots(subsets.size());
    std::exception_ptr failure;
    std::mutex failure_mx;

    unsigned hw = cfg.threads > 0 ? unsigned(cfg.threads)
                                  : std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = std::min<unsigned>(hw, unsigned(subsets.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= subsets.size()) return;
            try {
                slots[i] = simulate_ucl(mu, sigma, subsets[i], cfg);
            } catch (...) {
                std::lock_guard<std::mutex> lk(failure_mx);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& e : slots) table.entries[e.subset] = e;
    return table;
}

}  // namespace

UclTable ucl_table(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                   const std::vector<std::string>& signs, const UclConfig& cfg) {
    const int p = int(mu.size());
    if (p > 12)
        throw DataError("ucl_table covers all 2^p-1 subsets; p > 12 is "
                        "unsupported, restrict the sign set");
    if (int(signs.size()) != p || sigma.rows() != p || sigma.cols() != p)
        throw DataError("ucl_table: dimension mismatch");
    return table_for_subsets(mu, sigma, signs, all_nonempty_subsets(p), cfg);
}

UclTable ucl_table_for(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                       const std::vector<std::string>& signs,
                       const std::vector<SignSubset>& subsets,
                       const UclConfig& cfg) {
    return table_for_subsets(mu, sigma, signs, subsets, cfg);
}

void save_ucl_table(const std::string& path, const UclTable& table) {
    nlohmann::json j;
    j["format"] = "t2qc-ucl-table v1";
    j["signs"] = table.signs;
    j["config"] = {{"m", table.config.m},
                   {"n_bar", table.config.n_bar},
                   {"alpha", table.config.alpha},
                   {"inner_reps", table.config.inner_reps},
                   {"outer_reps", table.config.outer_reps},
                   {"seed", table.config.seed},
                   {"use_estimation", table.config.use_estimation}};
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& [mask, e] : table.entries) {
        nlohmann::json je;
        je["subset"] = [&] {
            std::vector<std::string> names;
            for (int idx : subset_indices(mask)) names.push_back(table.signs[idx]);
            return names;
        }();
        je["ucl"] = e.ucl;
        je["se"] = e.se;
        je["retries"] = e.retries;
        arr.push_back(std::move(je));
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

UclTable load_ucl_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        if (j.at("format") != "t2qc-ucl-table v1")
            throw ParseError(path + ": not a t2qc UCL table");
        UclTable table;
        table.signs = j.at("signs").get<std::vector<std::string>>();
        const auto& c = j.at("config");
        table.config.m = c.at("m");
        table.config.n_bar = c.at("n_bar");
        table.config.alpha = c.at("alpha");
        table.config.inner_reps = c.at("inner_reps");
        table.config.outer_reps = c.at("outer_reps");
        table.config.seed = c.at("seed");
        table.config.use_estimation = c.at("use_estimation");
        for (const auto& je : j.at("entries")) {
            UclEntry e;
            SignSubset mask = 0;
            for (const auto& name : je.at("subset")) {
                auto it = std::find(table.signs.begin(), table.signs.end(),
                                    name.get<std::string>());
                if (it == table.signs.end())
                    throw ParseError(path + ": subset names unknown sign");
                mask |= SignSubset{1} << (it - table.signs.begin());
            }
            e.subset = mask;
            e.ucl = je.at("ucl");
            e.se = je.at("se");
            e.retries = je.at("retries");
            table.entries[mask] = e;
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace t2qc
