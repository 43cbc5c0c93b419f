#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "aesn/config.hpp"
#include "aesn/data.hpp"
#include "aesn/errors.hpp"
#include "aesn/hyperparams.hpp"
#include "aesn/metrics.hpp"
#include "aesn/model.hpp"
#include "aesn/parallel.hpp"
#include "aesn/rng.hpp"

namespace aesn {

enum class ParamScale { LogUniform, Uniform, IntegerUniform };

inline const char* to_string(ParamScale s) {
    switch (s) {
        case ParamScale::LogUniform: return "log";
        case ParamScale::Uniform: return "linear";
        default: return "integer";
    }
}

inline ParamScale parse_param_scale(const std::string& s) {
    if (s == "log") return ParamScale::LogUniform;
    if (s == "linear") return ParamScale::Uniform;
    if (s == "integer") return ParamScale::IntegerUniform;
    throw ConfigError("unknown parameter scale: " + s + " (want log|linear|integer)");
}

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
    ParamScale scale = ParamScale::Uniform;

    void validate(const std::string& name) const {
        if (hi < lo) {
            throw ConfigError("search space " + name + ": hi < lo");
        }
        if (scale == ParamScale::LogUniform && !(lo > 0.0)) {
            throw ConfigError("search space " + name + ": log scale needs lo > 0");
        }
    }
};

/**
 * Per-parameter search brackets. The defaults span the hyperparameter
 * ranges typical for leaky reservoirs at this data size; everything is
 * overridable from a config file.
 */
struct SearchSpace {
    ParamRange a_u{1e-3, 1.0, ParamScale::LogUniform};
    ParamRange a_in{1e-3, 1.0, ParamScale::LogUniform};
    ParamRange nu{0.1, 1.0, ParamScale::LogUniform};
    ParamRange tau{1e-6, 1e2, ParamScale::LogUniform};
    ParamRange alpha{0.1, 1.0, ParamScale::Uniform};
    ParamRange n_h{50, 1000, ParamScale::IntegerUniform};
    ParamRange K_embed{2, 50, ParamScale::IntegerUniform};
    ParamRange lags{1, 6, ParamScale::IntegerUniform};

    void validate() const {
        a_u.validate("a_u");
        a_in.validate("a_in");
        nu.validate("nu");
        tau.validate("tau");
        alpha.validate("alpha");
        n_h.validate("n_h");
        K_embed.validate("K_embed");
        lags.validate("lags");
    }
};

/// Read bracket overrides from a config file: one `[parameter]` section per
/// entry with keys lo, hi, scale.
inline SearchSpace load_search_space(const std::string& path) {
    const ConfigFile cfg = ConfigFile::parse_file(path);
    SearchSpace space;
    auto apply = [&](const std::string& name, ParamRange& range) {
        if (!cfg.has_section(name)) {
            return;
        }
        range.lo = cfg.get_double(name, "lo", range.lo);
        range.hi = cfg.get_double(name, "hi", range.hi);
        if (cfg.has(name, "scale")) {
            range.scale = parse_param_scale(cfg.get_string(name, "scale"));
        }
    };
    apply("a_u", space.a_u);
    apply("a_in", space.a_in);
    apply("nu", space.nu);
    apply("tau", space.tau);
    apply("alpha", space.alpha);
    apply("n_h", space.n_h);
    apply("K_embed", space.K_embed);
    apply("lags", space.lags);
    for (const auto& [name, kv] : cfg.sections()) {
        static const std::vector<std::string> known = {"a_u", "a_in",    "nu",  "tau",
                                                       "alpha", "n_h", "K_embed", "lags"};
        if (!name.empty() && std::find(known.begin(), known.end(), name) == known.end()) {
            throw ConfigError("search space: unknown parameter section [" + name + "]");
        }
    }
    space.validate();
    return space;
}

/// Chronological, contiguous, non-overlapping train/validation split.
inline std::pair<Panel, Panel> split(const Panel& panel, int train_len, int val_len) {
    if (train_len < 1 || val_len < 1) {
        throw std::invalid_argument("split: lengths must be >= 1");
    }
    if (train_len + val_len > panel.n_times()) {
        throw std::invalid_argument("split: lengths exceed panel");
    }
    return {panel.rows(0, train_len), panel.rows(train_len, val_len)};
}

namespace detail {

inline double draw_param(Rng& rng, const ParamRange& r) {
    if (r.lo == r.hi) {
        return r.lo;
    }
    switch (r.scale) {
        case ParamScale::LogUniform:
            return rng.log_uniform(r.lo, r.hi);
        case ParamScale::Uniform:
            return rng.uniform(r.lo, r.hi);
        default:
            return static_cast<double>(
                rng.uniform_int(static_cast<long>(r.lo), static_cast<long>(r.hi)));
    }
}

} // namespace detail

/// One deterministic draw from the space. Draw order is fixed, so a seed
/// pins the whole parameter vector.
inline HyperParams sample_hyperparams(const SearchSpace& space, std::uint64_t seed) {
    space.validate();
    Rng rng(seed);
    HyperParams h;
    h.a_u = detail::draw_param(rng, space.a_u);
    h.a_in = detail::draw_param(rng, space.a_in);
    h.nu = detail::draw_param(rng, space.nu);
    h.tau = detail::draw_param(rng, space.tau);
    h.alpha = detail::draw_param(rng, space.alpha);
    h.n_h = static_cast<int>(detail::draw_param(rng, space.n_h));
    h.K_embed = static_cast<int>(detail::draw_param(rng, space.K_embed));
    h.lags = static_cast<int>(detail::draw_param(rng, space.lags));
    return h;
}

struct TrialRecord {
    int index = 0;
    HyperParams hyper;
    double val_rmse = std::numeric_limits<double>::infinity();
    bool ok = false;
    std::string error;
};

struct SearchResult {
    HyperParams best;
    int best_trial = -1;
    double best_rmse = std::numeric_limits<double>::infinity();
    std::vector<TrialRecord> trials;
};

/**
 * Random search: each trial draws hyperparameters from derive_seed(seed,
 * trial), fits on the chronological training slice only, and is scored by
 * validation RMSE on the model (transformed) scale at the target lead.
 * The minimum wins; ties break to the smaller reservoir, then the earlier
 * trial. Failed trials are logged and never win. Callers refit on the full
 * training window with the returned parameters.
 */
inline SearchResult random_search(ModelKind kind, const Panel& panel, const Graph& graph,
                                  const SearchSpace& space, int n_trials, int lead,
                                  int train_len, int val_len, std::uint64_t seed,
                                  int jobs = 0) {
    if (n_trials < 1) {
        throw std::invalid_argument("random_search: n_trials must be >= 1");
    }
    space.validate();
    const auto [train, val] = split(panel, train_len, val_len);
    (void)val;

    SearchResult result;
    result.trials.resize(static_cast<std::size_t>(n_trials));
    parallel_for_indexed(n_trials, jobs, [&](int i) {
        TrialRecord& rec = result.trials[static_cast<std::size_t>(i)];
        rec.index = i;
        const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
        rec.hyper = sample_hyperparams(space, trial_seed);
        try {
            const ModelSpec spec = make_spec(kind, rec.hyper, lead);
            const FittedModel mf = fit(spec, train, graph, trial_seed);
            const Eigen::MatrixXd pred =
                predict_transformed(mf, panel.rows(0, train_len + val_len), train_len,
                                    train_len + val_len);
            const Eigen::MatrixXd truth =
                panel.values.middleRows(train_len, val_len).transpose();
            rec.val_rmse = std::sqrt((pred - truth).squaredNorm() /
                                     static_cast<double>(pred.size()));
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        }
    });

    for (const TrialRecord& rec : result.trials) {
        if (!rec.ok) {
            continue;
        }
        const bool better =
            rec.val_rmse < result.best_rmse ||
            (rec.val_rmse == result.best_rmse && result.best_trial >= 0 &&
             rec.hyper.n_h < result.best.n_h);
        if (result.best_trial < 0 || better) {
            result.best = rec.hyper;
            result.best_trial = rec.index;
            result.best_rmse = rec.val_rmse;
        }
    }
    if (result.best_trial < 0) {
        throw NumericError("random_search: every trial failed");
    }
    return result;
}

inline void write_trial_log_csv(const std::vector<TrialRecord>& trials,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write trial log: " + path);
    }
    out << "trial,val_rmse,ok,a_u,a_in,nu,tau,alpha,n_h,K_embed,lags,error\n";
    for (const auto& t : trials) {
        out << t.index << ',' << detail::format_double(t.val_rmse) << ',' << (t.ok ? 1 : 0)
            << ',' << detail::format_double(t.hyper.a_u) << ','
            << detail::format_double(t.hyper.a_in) << ',' << detail::format_double(t.hyper.nu)
            << ',' << detail::format_double(t.hyper.tau) << ','
            << detail::format_double(t.hyper.alpha) << ',' << t.hyper.n_h << ','
            << t.hyper.K_embed << ',' << t.hyper.lags << ',';
        std::string err = t.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << err << '\n';
    }
}

} // namespace aesn
