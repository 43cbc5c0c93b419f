#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aesn/errors.hpp"
#include "aesn/graph.hpp"
#include "aesn/rng.hpp"

namespace aesn {

enum class Activation { Tanh, Identity };

inline Activation parse_activation(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    throw ConfigError("unknown activation: " + name);
}

inline const char* to_string(Activation a) {
    return a == Activation::Tanh ? "tanh" : "identity";
}

/**
 * Dimensions and sampling parameters of the fixed recurrent layer.
 *
 * Reservoir weights come from the sparse mixture
 * w = gamma * Uniform(-a_res, a_res) with gamma ~ Bernoulli(pi_res);
 * input weights are dense (pi_in is kept as a field but frozen at 1).
 */
struct ReservoirConfig {
    int n_h = 0;
    int n_in = 0;
    double nu = 0.8;
    double alpha = 0.8;
    double a_res = 0.1;
    double a_in = 0.1;
    double pi_res = 0.1;
    double pi_in = 1.0;
    Activation activation = Activation::Tanh;

    void validate() const {
        if (n_h < 1) throw std::invalid_argument("ReservoirConfig: n_h must be >= 1");
        if (n_in < 1) throw std::invalid_argument("ReservoirConfig: n_in must be >= 1");
        if (!(nu > 0.0)) throw std::invalid_argument("ReservoirConfig: nu must be > 0");
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("ReservoirConfig: alpha must be in (0, 1]");
        if (!(a_res > 0.0)) throw std::invalid_argument("ReservoirConfig: a_res must be > 0");
        if (!(a_in > 0.0)) throw std::invalid_argument("ReservoirConfig: a_in must be > 0");
        if (!(pi_res > 0.0) || pi_res > 1.0)
            throw std::invalid_argument("ReservoirConfig: pi_res must be in (0, 1]");
        if (!(pi_in > 0.0) || pi_in > 1.0)
            throw std::invalid_argument("ReservoirConfig: pi_in must be in (0, 1]");
    }
};

/**
 * A sampled reservoir. W_res is stored unscaled together with its spectral
 * radius lambda_w; the effective radius nu is applied at advance time, so
 * the same draw can be re-scaled during tuning without resampling.
 */
struct Reservoir {
    Eigen::SparseMatrix<double> W_res;
    Eigen::MatrixXd W_in;
    double lambda_w = 0.0;
    std::uint64_t seed = 0;
    Activation activation = Activation::Tanh;

    int n_h() const { return static_cast<int>(W_res.rows()); }
    int n_in() const { return static_cast<int>(W_in.cols()); }
};

/// Hidden trajectories after washout, columns ordered by time.
struct HiddenStates {
    Eigen::MatrixXd H;
    Eigen::VectorXd h_last;
};

namespace detail {

inline double reservoir_lambda(const Eigen::SparseMatrix<double>& w) {
    try {
        return spectral_radius(w);
    } catch (const NumericError&) {
        if (w.rows() <= 4096) {
            return spectral_radius_dense(Eigen::MatrixXd(w));
        }
        throw;
    }
}

} // namespace detail

inline Reservoir sample_reservoir(const ReservoirConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    constexpr int kMaxResample = 8;
    // Zero spectral radius leaves nu/lambda_w undefined; redraw with offset seeds.
    for (int attempt = 0; attempt <= kMaxResample; ++attempt) {
        const std::uint64_t attempt_seed = seed + static_cast<std::uint64_t>(attempt);
        Rng rng(attempt_seed);

        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(
            cfg.pi_res * static_cast<double>(cfg.n_h) * static_cast<double>(cfg.n_h) * 1.2 + 16));
        for (int l = 0; l < cfg.n_h; ++l) {
            for (int i = 0; i < cfg.n_h; ++i) {
                if (cfg.pi_res >= 1.0 || rng.bernoulli(cfg.pi_res)) {
                    triplets.emplace_back(i, l, rng.uniform_open_sym(cfg.a_res));
                }
            }
        }
        Eigen::SparseMatrix<double> w_res(cfg.n_h, cfg.n_h);
        w_res.setFromTriplets(triplets.begin(), triplets.end());

        Eigen::MatrixXd w_in(cfg.n_h, cfg.n_in);
        for (int j = 0; j < cfg.n_in; ++j) {
            for (int i = 0; i < cfg.n_h; ++i) {
                if (cfg.pi_in >= 1.0 || rng.bernoulli(cfg.pi_in)) {
                    w_in(i, j) = rng.uniform_open_sym(cfg.a_in);
                } else {
                    w_in(i, j) = 0.0;
                }
            }
        }

        const double lambda = detail::reservoir_lambda(w_res);
        if (lambda > 1e-12) {
            Reservoir r;
            r.W_res = std::move(w_res);
            r.W_in = std::move(w_in);
            r.lambda_w = lambda;
            r.seed = attempt_seed;
            r.activation = cfg.activation;
            return r;
        }
    }
    throw NumericError("sample_reservoir: spectral radius stayed zero after retries");
}

/// One step of the leaky update
/// h_next = (1 - alpha) h_prev + alpha g((nu / lambda_w) W_res h_prev + W_in z).
inline Eigen::VectorXd advance(const Reservoir& r, double nu, double alpha,
                               const Eigen::VectorXd& h_prev, const Eigen::VectorXd& z) {
    if (h_prev.size() != r.n_h()) {
        throw std::invalid_argument("advance: hidden state dimension mismatch");
    }
    if (z.size() != r.n_in()) {
        throw std::invalid_argument("advance: input dimension mismatch");
    }
    if (!h_prev.allFinite() || !z.allFinite()) {
        throw std::invalid_argument("advance: non-finite entries in state or input");
    }
    if (!(r.lambda_w > 0.0)) {
        throw std::invalid_argument("advance: reservoir has nonpositive lambda_w");
    }
    Eigen::VectorXd pre = (nu / r.lambda_w) * (r.W_res * h_prev) + r.W_in * z;
    if (r.activation == Activation::Tanh) {
        pre = pre.array().tanh();
    }
    return (1.0 - alpha) * h_prev + alpha * pre;
}

/// Evolve from h_0 = 0 over the input columns; the first `washout` states
/// warm the state but are not reported.
inline HiddenStates run(const Reservoir& r, double nu, double alpha,
                        const Eigen::MatrixXd& inputs, int washout) {
    const int t_total = static_cast<int>(inputs.cols());
    if (washout < 0 || washout >= t_total) {
        throw std::invalid_argument("run: washout must be in [0, T_total)");
    }
    if (inputs.rows() != r.n_in()) {
        throw std::invalid_argument("run: input dimension mismatch");
    }
    HiddenStates out;
    out.H.resize(r.n_h(), t_total - washout);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(r.n_h());
    for (int t = 0; t < t_total; ++t) {
        h = advance(r, nu, alpha, h, inputs.col(t));
        if (t >= washout) {
            out.H.col(t - washout) = h;
        }
    }
    out.h_last = h;
    return out;
}

} // namespace aesn
