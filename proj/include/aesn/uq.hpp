#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "aesn/data.hpp"
#include "aesn/errors.hpp"
#include "aesn/metrics.hpp"
#include "aesn/model.hpp"
#include "aesn/parallel.hpp"
#include "aesn/rng.hpp"

namespace aesn {

/// Calibrated bounds for one (location, horizon step) cell.
struct PredictionInterval {
    double lower = 0.0;
    double upper = 0.0;
    double alpha_sig = 0.0;
};

/**
 * Shortest interval covering at least ceil((1 - alpha) * n) of the samples:
 * the unimodal highest density region of the empirical ensemble. The
 * coverage constraint uses the ceiling because an exact equality is
 * unattainable when (1 - alpha) * n is not an integer; ties between
 * equal-width windows go to the smallest lower bound.
 */
inline PredictionInterval hdr_interval(std::vector<double> samples, double alpha_sig) {
    if (samples.size() < 2) {
        throw std::invalid_argument("hdr_interval: need at least 2 samples");
    }
    if (!(alpha_sig > 0.0) || !(alpha_sig < 1.0)) {
        throw std::invalid_argument("hdr_interval: alpha must be in (0, 1)");
    }
    const int n = static_cast<int>(samples.size());
    int m = static_cast<int>(std::ceil((1.0 - alpha_sig) * n));
    m = std::max(1, std::min(m, n));
    std::sort(samples.begin(), samples.end());
    int best = 0;
    double best_width = samples[static_cast<std::size_t>(m - 1)] - samples[0];
    for (int i = 1; i + m <= n; ++i) {
        const double width =
            samples[static_cast<std::size_t>(i + m - 1)] - samples[static_cast<std::size_t>(i)];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    PredictionInterval pi;
    pi.lower = samples[static_cast<std::size_t>(best)];
    pi.upper = samples[static_cast<std::size_t>(best + m - 1)];
    pi.alpha_sig = alpha_sig;
    return pi;
}

/// Ensemble mean.
inline double point_forecast(const std::vector<double>& samples) {
    if (samples.empty()) {
        throw std::invalid_argument("point_forecast: empty sample set");
    }
    return std::accumulate(samples.begin(), samples.end(), 0.0) /
           static_cast<double>(samples.size());
}

/// Optional per-member scaling of nu, tau and a_u by log-uniform factors in
/// [1/factor, factor].
struct JitterSpec {
    bool enabled = false;
    double factor = 1.5;
};

/**
 * Forecasts from n_ens independently refit members, original scale.
 * members[k] is n_s x horizon; member k draws its weights from
 * derive_seed(base_seed, k), so the tensor is reproducible and
 * member-order independent of scheduling.
 */
struct EnsembleForecasts {
    std::vector<Eigen::MatrixXd> members;
    std::vector<std::uint64_t> member_seeds;
    std::vector<HyperParams> member_hyper;
    int n_s = 0;
    int horizon = 0;

    std::vector<double> cell_samples(int location, int step) const {
        std::vector<double> s;
        s.reserve(members.size());
        for (const auto& m : members) {
            s.push_back(m(location, step));
        }
        return s;
    }

    Eigen::MatrixXd mean() const {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_s, horizon);
        for (const auto& m : members) {
            acc += m;
        }
        return acc / static_cast<double>(members.size());
    }
};

namespace detail {

inline HyperParams jitter_hyper(const HyperParams& base, const JitterSpec& jitter,
                                std::uint64_t member_seed) {
    if (!jitter.enabled) {
        return base;
    }
    HyperParams h = base;
    Rng rng(derive_seed(member_seed, 97));
    const double lo = 1.0 / jitter.factor;
    const double hi = jitter.factor;
    h.nu *= rng.log_uniform(lo, hi);
    h.tau *= rng.log_uniform(lo, hi);
    h.a_u *= rng.log_uniform(lo, hi);
    return h;
}

template <typename MemberFn>
EnsembleForecasts run_members(const ModelSpec& spec, int n_s, int horizon, int n_ens,
                              std::uint64_t base_seed, const JitterSpec& jitter, int jobs,
                              const MemberFn& member_fn) {
    if (n_ens < 1) {
        throw std::invalid_argument("ensemble: n_ens must be >= 1");
    }
    std::vector<Eigen::MatrixXd> results(static_cast<std::size_t>(n_ens));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_ens));
    std::vector<HyperParams> hypers(static_cast<std::size_t>(n_ens));
    std::vector<std::string> failures(static_cast<std::size_t>(n_ens));
    for (int k = 0; k < n_ens; ++k) {
        seeds[static_cast<std::size_t>(k)] = derive_seed(base_seed, static_cast<std::uint64_t>(k));
        hypers[static_cast<std::size_t>(k)] =
            jitter_hyper(spec.hyper, jitter, seeds[static_cast<std::size_t>(k)]);
    }
    parallel_for_indexed(n_ens, jobs, [&](int k) {
        try {
            ModelSpec member_spec = spec;
            member_spec.hyper = hypers[static_cast<std::size_t>(k)];
            results[static_cast<std::size_t>(k)] =
                member_fn(member_spec, seeds[static_cast<std::size_t>(k)]);
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(k)] = e.what();
        }
    });

    EnsembleForecasts out;
    out.n_s = n_s;
    out.horizon = horizon;
    int failed = 0;
    for (int k = 0; k < n_ens; ++k) {
        if (!failures[static_cast<std::size_t>(k)].empty()) {
            ++failed;
            log_warning("ensemble member " + std::to_string(k) +
                        " failed: " + failures[static_cast<std::size_t>(k)]);
            continue;
        }
        out.members.push_back(std::move(results[static_cast<std::size_t>(k)]));
        out.member_seeds.push_back(seeds[static_cast<std::size_t>(k)]);
        out.member_hyper.push_back(hypers[static_cast<std::size_t>(k)]);
    }
    if (failed > 0 && static_cast<int>(out.members.size()) < 2) {
        throw NumericError("ensemble: fewer than 2 members survived (" +
                           std::to_string(failed) + " failed)");
    }
    if (out.members.empty()) {
        throw NumericError("ensemble: no successful members");
    }
    return out;
}

} // namespace detail

/// Out-of-sample continuation forecasts for the horizon months after the
/// training panel, one refit per member.
inline EnsembleForecasts ensemble_forecast(const ModelSpec& spec, const Panel& train_panel,
                                           const Graph& graph, int horizon, int n_ens,
                                           std::uint64_t base_seed,
                                           const JitterSpec& jitter = {}, int jobs = 0) {
    return detail::run_members(
        spec, train_panel.n_locations(), horizon, n_ens, base_seed, jitter, jobs,
        [&](const ModelSpec& member_spec, std::uint64_t seed) {
            const FittedModel mf = fit(member_spec, train_panel, graph, seed);
            return forecast(mf, train_panel, horizon);
        });
}

/**
 * Rolling in-panel evaluation: members are fit once on rows [0, t_fit_end)
 * and then predict targets [t_begin, t_end) of the full panel at stride
 * `lead`, so no prediction reads anything newer than its own lead allows.
 * Original scale.
 */
inline EnsembleForecasts ensemble_backtest(const ModelSpec& spec, const Panel& full_panel,
                                           const Graph& graph, int t_fit_end, int t_begin,
                                           int t_end, int n_ens, std::uint64_t base_seed,
                                           const JitterSpec& jitter = {}, int jobs = 0) {
    if (t_fit_end < 1 || t_fit_end > full_panel.n_times() || t_begin < 0 ||
        t_end <= t_begin || t_end > full_panel.n_times()) {
        throw std::invalid_argument("ensemble_backtest: invalid split indices");
    }
    const Panel train = full_panel.rows(0, t_fit_end);
    return detail::run_members(
        spec, full_panel.n_locations(), t_end - t_begin, n_ens, base_seed, jitter, jobs,
        [&](const ModelSpec& member_spec, std::uint64_t seed) {
            const FittedModel mf = fit(member_spec, train, graph, seed);
            return predict_range_original(mf, full_panel, t_begin, t_end);
        });
}

/// Score an ensemble against original-scale truth: RMSE of the ensemble
/// mean, CRPS from the raw members, and the interval score of the HDR
/// bounds, each averaged over all (location, step) cells.
inline ScoreReport score_ensemble(const EnsembleForecasts& ens, const Eigen::MatrixXd& truth,
                                  double alpha_sig,
                                  CrpsVariant variant = CrpsVariant::Biased) {
    if (truth.rows() != ens.n_s || truth.cols() != ens.horizon) {
        throw std::invalid_argument("score_ensemble: truth shape mismatch");
    }
    const Eigen::MatrixXd mean = ens.mean();
    Eigen::MatrixXd se(ens.n_s, ens.horizon);
    Eigen::MatrixXd crps_cells(ens.n_s, ens.horizon);
    Eigen::MatrixXd is_cells(ens.n_s, ens.horizon);
    for (int s = 0; s < ens.n_s; ++s) {
        for (int t = 0; t < ens.horizon; ++t) {
            const auto samples = ens.cell_samples(s, t);
            const double err = mean(s, t) - truth(s, t);
            se(s, t) = err * err;
            crps_cells(s, t) = crps_ensemble(samples, truth(s, t), variant);
            if (samples.size() >= 2) {
                const PredictionInterval pi = hdr_interval(samples, alpha_sig);
                is_cells(s, t) = interval_score(pi.lower, pi.upper, truth(s, t), alpha_sig);
            } else {
                is_cells(s, t) = interval_score(samples[0], samples[0], truth(s, t), alpha_sig);
            }
        }
    }
    ScoreReport r;
    const Aggregate se_agg = aggregate(se);
    r.rmse = std::sqrt(se_agg.mean);
    r.rmse_per_location = se_agg.per_location.array().sqrt();
    r.rmse_per_time = se_agg.per_time.array().sqrt();
    const Aggregate crps_agg = aggregate(crps_cells);
    r.crps = crps_agg.mean;
    r.crps_per_location = crps_agg.per_location;
    r.crps_per_time = crps_agg.per_time;
    const Aggregate is_agg = aggregate(is_cells);
    r.interval_score = is_agg.mean;
    r.is_per_location = is_agg.per_location;
    r.is_per_time = is_agg.per_time;
    return r;
}

/// Forecast export: one row per (region, month) with the ensemble mean and
/// HDR bounds. `first_month` is the month of horizon step 0.
inline void write_forecast_csv(const EnsembleForecasts& ens,
                               const std::vector<std::string>& region_ids,
                               YearMonth first_month, double alpha_sig,
                               const std::string& path) {
    if (static_cast<int>(region_ids.size()) != ens.n_s) {
        throw std::invalid_argument("write_forecast_csv: region list size mismatch");
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write forecast CSV: " + path);
    }
    out << "region_id,time,mean,lower,upper,alpha\n";
    for (int s = 0; s < ens.n_s; ++s) {
        YearMonth ym = first_month;
        for (int t = 0; t < ens.horizon; ++t) {
            const auto samples = ens.cell_samples(s, t);
            const double mean = point_forecast(samples);
            PredictionInterval pi;
            if (samples.size() >= 2) {
                pi = hdr_interval(samples, alpha_sig);
            } else {
                pi.lower = pi.upper = samples[0];
                pi.alpha_sig = alpha_sig;
            }
            out << region_ids[static_cast<std::size_t>(s)] << ',' << ym.str() << ','
                << detail::format_double(mean) << ',' << detail::format_double(pi.lower) << ','
                << detail::format_double(pi.upper) << ',' << detail::format_double(alpha_sig)
                << '\n';
            ym = ym.next();
        }
    }
}

/// Raw member export: one row per (region, month, member).
inline void write_members_csv(const EnsembleForecasts& ens,
                              const std::vector<std::string>& region_ids,
                              YearMonth first_month, const std::string& path) {
    if (static_cast<int>(region_ids.size()) != ens.n_s) {
        throw std::invalid_argument("write_members_csv: region list size mismatch");
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write members CSV: " + path);
    }
    out << "region_id,time,member,value\n";
    for (int s = 0; s < ens.n_s; ++s) {
        YearMonth ym = first_month;
        for (int t = 0; t < ens.horizon; ++t) {
            for (std::size_t k = 0; k < ens.members.size(); ++k) {
                out << region_ids[static_cast<std::size_t>(s)] << ',' << ym.str() << ',' << k
                    << ',' << detail::format_double(ens.members[k](s, t)) << '\n';
            }
            ym = ym.next();
        }
    }
}

} // namespace aesn
