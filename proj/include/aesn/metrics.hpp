#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "aesn/errors.hpp"

namespace aesn {

inline double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& obs) {
    if (pred.size() != obs.size() || pred.size() == 0) {
        throw std::invalid_argument("rmse: length mismatch or empty");
    }
    return std::sqrt((pred - obs).squaredNorm() / static_cast<double>(pred.size()));
}

enum class CrpsVariant {
    Biased, // divide the pairwise term by 2K^2 (default)
    Fair    // divide by 2K(K-1)
};

/// Empirical CRPS of an ensemble against one observation:
/// (1/K) sum |x_k - y| - c * sum_ij |x_i - x_j|, exact double sum.
inline double crps_ensemble(const std::vector<double>& samples, double obs,
                            CrpsVariant variant = CrpsVariant::Biased) {
    const std::size_t k = samples.size();
    if (k == 0) {
        throw std::invalid_argument("crps_ensemble: empty sample set");
    }
    double mad = 0.0;
    for (double x : samples) {
        mad += std::abs(x - obs);
    }
    mad /= static_cast<double>(k);
    if (k == 1) {
        return mad;
    }
    double pair = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            pair += std::abs(samples[i] - samples[j]);
        }
    }
    const double denom = variant == CrpsVariant::Biased
                             ? 2.0 * static_cast<double>(k) * static_cast<double>(k)
                             : 2.0 * static_cast<double>(k) * static_cast<double>(k - 1);
    return mad - pair / denom;
}

/// Interval score at significance alpha:
/// (u - l) + (2/alpha)(l - y) if y < l, + (2/alpha)(y - u) if y > u.
inline double interval_score(double l, double u, double obs, double alpha_sig) {
    if (l > u) {
        throw std::invalid_argument("interval_score: l > u");
    }
    if (!(alpha_sig > 0.0) || !(alpha_sig < 1.0)) {
        throw std::invalid_argument("interval_score: alpha must be in (0, 1)");
    }
    double score = u - l;
    if (obs < l) {
        score += 2.0 / alpha_sig * (l - obs);
    } else if (obs > u) {
        score += 2.0 / alpha_sig * (obs - u);
    }
    return score;
}

/// Unweighted mean over a (location x time) grid of per-cell scores, with
/// the per-location and per-time breakdowns kept alongside.
struct Aggregate {
    double mean = 0.0;
    Eigen::VectorXd per_location; // row means
    Eigen::VectorXd per_time;     // column means
};

inline Aggregate aggregate(const Eigen::MatrixXd& cells) {
    if (cells.size() == 0) {
        throw std::invalid_argument("aggregate: empty score grid");
    }
    Aggregate a;
    a.mean = cells.mean();
    a.per_location = cells.rowwise().mean();
    a.per_time = cells.colwise().mean().transpose();
    return a;
}

/// Scores of one model at one lead, aggregated over locations and horizon.
struct ScoreReport {
    double rmse = 0.0;
    double crps = 0.0;
    double interval_score = 0.0;
    Eigen::VectorXd rmse_per_location, rmse_per_time;
    Eigen::VectorXd crps_per_location, crps_per_time;
    Eigen::VectorXd is_per_location, is_per_time;
};

} // namespace aesn
