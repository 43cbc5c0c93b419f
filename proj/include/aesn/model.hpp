#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aesn/data.hpp"
#include "aesn/embedding.hpp"
#include "aesn/eof.hpp"
#include "aesn/errors.hpp"
#include "aesn/graph.hpp"
#include "aesn/hyperparams.hpp"
#include "aesn/readout.hpp"
#include "aesn/reservoir.hpp"
#include "aesn/rng.hpp"

namespace aesn {

enum class ModelKind { Aesn, Esn, EsnEof };

inline ModelKind parse_model_kind(const std::string& s) {
    if (s == "aesn") return ModelKind::Aesn;
    if (s == "esn") return ModelKind::Esn;
    if (s == "esn-eof") return ModelKind::EsnEof;
    throw ConfigError("unknown model kind: " + s + " (want aesn|esn|esn-eof)");
}

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Aesn: return "aesn";
        case ModelKind::Esn: return "esn";
        default: return "esn-eof";
    }
}

/**
 * What to fit: the model family, its hyperparameters, the forecast lead in
 * months, and the number of lagged frames per input. Inputs are built at
 * stride `lead`, so a lead-h model only ever sees observations at least h
 * months older than its target.
 */
struct ModelSpec {
    ModelKind kind = ModelKind::Aesn;
    HyperParams hyper;
    int lead = 1;
    int lags = 3;
    int washout = 3;
    double pi_res = 0.1;
    Activation activation = Activation::Tanh;

    void validate() const {
        hyper.validate();
        if (lead < 1) throw std::invalid_argument("ModelSpec: lead must be >= 1");
        if (lags < 1) throw std::invalid_argument("ModelSpec: lags must be >= 1");
        if (washout < 0) throw std::invalid_argument("ModelSpec: washout must be >= 0");
        if (!(pi_res > 0.0) || pi_res > 1.0)
            throw std::invalid_argument("ModelSpec: pi_res must be in (0, 1]");
    }
};

inline ModelSpec make_spec(ModelKind kind, const HyperParams& hyper, int lead) {
    ModelSpec s;
    s.kind = kind;
    s.hyper = hyper;
    s.lead = lead;
    s.lags = hyper.lags;
    return s;
}

/// One supervised pair: the lagged frame x_t (n_s x lags, newest lag first)
/// and the target row y_t.
struct InputPair {
    int t = 0;
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

namespace detail {

/// Lagged frame for target index t over a value matrix: column j holds the
/// values at t - (j+1)*lead. Frames may be requested for targets beyond the
/// matrix as long as every referenced row is observed.
inline Eigen::MatrixXd lag_frame(const Eigen::MatrixXd& values, int t, int lags, int lead) {
    Eigen::MatrixXd x(values.cols(), lags);
    for (int j = 0; j < lags; ++j) {
        const int src = t - (j + 1) * lead;
        if (src < 0 || src >= values.rows()) {
            throw DataError("insufficient history for lagged frame at t=" + std::to_string(t));
        }
        x.col(j) = values.row(src).transpose();
    }
    return x;
}

} // namespace detail

/// All training pairs of a panel at the given lag count and lead.
inline std::vector<InputPair> build_inputs(const Panel& panel, int lags, int lead) {
    if (lags < 1 || lead < 1) {
        throw std::invalid_argument("build_inputs: lags and lead must be >= 1");
    }
    const int t_first = lags * lead;
    if (panel.n_times() < t_first + 1) {
        throw DataError("build_inputs: panel too short for lags*lead history");
    }
    std::vector<InputPair> pairs;
    pairs.reserve(static_cast<std::size_t>(panel.n_times() - t_first));
    for (int t = t_first; t < panel.n_times(); ++t) {
        InputPair p;
        p.t = t;
        p.x = detail::lag_frame(panel.values, t, lags, lead);
        p.y = panel.values.row(t).transpose();
        pairs.push_back(std::move(p));
    }
    return pairs;
}

/**
 * A fitted forecasting model. Besides the trained readout this carries
 * every random component and the data-transform record, so forecasts can
 * be reproduced exactly and inverted to the original scale.
 */
struct FittedModel {
    ModelSpec spec;
    std::optional<ArealEmbedding> embedding; // AESN
    std::optional<EofBasis> eof_basis;       // ESN with EOF
    NormalizedAdjacency S;                   // AESN
    Reservoir reservoir;
    Readout readout;
    Eigen::VectorXd h_last;
    TransformState transform = TransformState::Raw;
    std::uint64_t seed = 0;
    int n_s = 0;

    int first_input_index() const { return spec.lags * spec.lead; }
};

namespace detail {

/// Series the reservoir actually consumes: panel values for AESN/ESN,
/// EOF coefficients for the EOF baseline.
inline Eigen::MatrixXd model_series(const FittedModel& mf, const Eigen::MatrixXd& values) {
    if (mf.spec.kind == ModelKind::EsnEof) {
        return (values.rowwise() - mf.eof_basis->mean.transpose()) * mf.eof_basis->basis;
    }
    return values;
}

inline Eigen::VectorXd input_column(const FittedModel& mf, const Eigen::MatrixXd& series,
                                    int t) {
    const Eigen::MatrixXd frame = lag_frame(series, t, mf.spec.lags, mf.spec.lead);
    if (mf.spec.kind == ModelKind::Aesn) {
        return embed(*mf.embedding, mf.S, frame).z_vec;
    }
    return vectorize(frame);
}

/// Hidden states at targets [t_begin, t_end), feeding inputs from the first
/// valid index so the recursion matches the one used in training.
inline Eigen::MatrixXd states_at(const FittedModel& mf, const Eigen::MatrixXd& series,
                                 int t_begin, int t_end) {
    const int t0 = mf.first_input_index();
    if (t_begin < t0 || t_end <= t_begin) {
        throw std::invalid_argument("states_at: invalid target range");
    }
    Eigen::MatrixXd inputs(mf.reservoir.n_in(), t_end - t0);
    for (int t = t0; t < t_end; ++t) {
        inputs.col(t - t0) = input_column(mf, series, t);
    }
    const HiddenStates hs = run(mf.reservoir, mf.spec.hyper.nu, mf.spec.hyper.alpha, inputs,
                                t_begin - t0);
    return hs.H;
}

inline Eigen::MatrixXd augment_ones(const Eigen::MatrixXd& h) {
    Eigen::MatrixXd a(h.rows() + 1, h.cols());
    a.topRows(h.rows()) = h;
    a.row(h.rows()).setOnes();
    return a;
}

} // namespace detail

/**
 * Fit with pre-sampled random components. `fit` delegates here; tests and
 * the permutation harness inject their own embedding or reservoir weights.
 * The reservoir must match the model's input dimension.
 */
inline FittedModel fit_with(const ModelSpec& spec, const Panel& panel, const Graph& graph,
                            std::optional<ArealEmbedding> embedding, Reservoir reservoir,
                            std::uint64_t seed) {
    spec.validate();
    panel.validate();
    const int n_s = panel.n_locations();
    const int t_train = panel.n_times();
    const int t0 = spec.lags * spec.lead;
    if (t_train < t0 + spec.washout + 1) {
        throw DataError("fit: panel too short for lags*lead history plus washout");
    }

    FittedModel mf;
    mf.spec = spec;
    mf.transform = panel.transform_state;
    mf.seed = seed;
    mf.n_s = n_s;
    mf.reservoir = std::move(reservoir);

    if (spec.kind == ModelKind::Aesn) {
        if (graph.num_nodes() != n_s) {
            throw std::invalid_argument("fit: graph size does not match panel");
        }
        if (!embedding.has_value()) {
            throw std::invalid_argument("fit: AESN requires an embedding");
        }
        if (embedding->n_s != n_s || embedding->n_x != spec.lags) {
            throw std::invalid_argument("fit: embedding shape does not match panel/lags");
        }
        mf.embedding = std::move(embedding);
        mf.S = normalized_adjacency(graph);
    } else if (spec.kind == ModelKind::EsnEof) {
        int n_eof = spec.hyper.n_eof;
        if (n_eof == 0) {
            n_eof = choose_n_eof(panel.values, 0.9);
        }
        if (n_eof > std::min(t_train, n_s)) {
            throw std::invalid_argument("fit: n_eof exceeds min(T, n_s)");
        }
        mf.eof_basis = compute_eofs(panel.values, n_eof);
    }

    const Eigen::MatrixXd series = detail::model_series(mf, panel.values);
    const int expected_in = static_cast<int>(
        spec.kind == ModelKind::Aesn ? static_cast<Eigen::Index>(n_s) * spec.hyper.K_embed
                                     : series.cols() * spec.lags);
    if (mf.reservoir.n_in() != expected_in) {
        throw std::invalid_argument("fit: reservoir input dimension mismatch");
    }

    const int t_fit_begin = t0 + spec.washout;
    Eigen::MatrixXd h = detail::states_at(mf, series, t_fit_begin, t_train);
    const Eigen::MatrixXd h_aug = detail::augment_ones(h);
    const Eigen::MatrixXd y =
        series.middleRows(t_fit_begin, t_train - t_fit_begin).transpose();
    mf.readout = fit_ridge(h_aug, y, spec.hyper.tau);
    mf.h_last = h.col(h.cols() - 1);
    return mf;
}

/// Sample all random components from `seed` and fit. Component streams are
/// derive_seed(seed, 1) for the embedding and derive_seed(seed, 2) for the
/// reservoir.
inline FittedModel fit(const ModelSpec& spec, const Panel& panel, const Graph& graph,
                       std::uint64_t seed) {
    spec.validate();
    const int n_s = panel.n_locations();

    std::optional<ArealEmbedding> embedding;
    int n_in = 0;
    if (spec.kind == ModelKind::Aesn) {
        embedding = sample_embedding(n_s, spec.lags, spec.hyper.K_embed, spec.hyper.a_u,
                                     derive_seed(seed, 1));
        n_in = n_s * spec.hyper.K_embed;
    } else if (spec.kind == ModelKind::Esn) {
        n_in = n_s * spec.lags;
    } else {
        int n_eof = spec.hyper.n_eof;
        if (n_eof == 0) {
            n_eof = choose_n_eof(panel.values, 0.9);
        }
        n_in = n_eof * spec.lags;
    }

    ReservoirConfig cfg;
    cfg.n_h = spec.hyper.n_h;
    cfg.n_in = n_in;
    cfg.nu = spec.hyper.nu;
    cfg.alpha = spec.hyper.alpha;
    cfg.a_in = spec.hyper.a_in;
    cfg.pi_res = spec.pi_res;
    cfg.activation = spec.activation;
    Reservoir reservoir = sample_reservoir(cfg, derive_seed(seed, 2));

    return fit_with(spec, panel, graph, std::move(embedding), std::move(reservoir), seed);
}

/**
 * Model-scale predictions for target indices [t_begin, t_end) of an
 * observed panel. Inputs are rebuilt at stride `lead`, so a target at t
 * only ever reads observations up to t - lead, even when later rows exist
 * in the panel; this is what makes rolling-origin evaluation honest.
 */
inline Eigen::MatrixXd predict_transformed(const FittedModel& mf, const Panel& observed,
                                           int t_begin, int t_end) {
    observed.validate();
    if (observed.transform_state != mf.transform) {
        throw std::invalid_argument("predict: panel transform does not match training");
    }
    if (observed.n_locations() != mf.n_s) {
        throw std::invalid_argument("predict: panel width does not match model");
    }
    const Eigen::MatrixXd series = detail::model_series(mf, observed.values);
    const Eigen::MatrixXd h = detail::states_at(mf, series, t_begin, t_end);
    Eigen::MatrixXd pred = mf.readout.W_out * detail::augment_ones(h);
    if (mf.spec.kind == ModelKind::EsnEof) {
        // Coefficients back to locations.
        pred = (mf.eof_basis->basis * pred).colwise() + mf.eof_basis->mean;
    }
    return pred;
}

/// Original-scale forecasts for the `horizon` months following the panel.
/// Requires horizon <= lead: the newest frame of the last target must still
/// be an observed row.
inline Eigen::MatrixXd forecast(const FittedModel& mf, const Panel& observed, int horizon) {
    if (horizon < 1) {
        throw std::invalid_argument("forecast: horizon must be >= 1");
    }
    if (horizon > mf.spec.lead) {
        throw DataError("forecast: horizon exceeds lead; no observed frame for step " +
                        std::to_string(mf.spec.lead + 1));
    }
    const int t_obs = observed.n_times();
    const Eigen::MatrixXd pred =
        predict_transformed(mf, observed, t_obs, t_obs + horizon);
    return inverse_transform_values(pred, mf.transform);
}

/// Original-scale predictions at in-panel targets (rolling evaluation).
inline Eigen::MatrixXd predict_range_original(const FittedModel& mf, const Panel& observed,
                                              int t_begin, int t_end) {
    return inverse_transform_values(predict_transformed(mf, observed, t_begin, t_end),
                                    mf.transform);
}

} // namespace aesn
