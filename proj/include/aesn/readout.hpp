#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "aesn/errors.hpp"

namespace aesn {

/// Trained linear readout. sigma2 is the mean squared training residual,
/// kept as a diagnostic only.
struct Readout {
    Eigen::MatrixXd W_out;
    double tau = 0.0;
    double sigma2 = 0.0;
};

inline double residual_variance(const Eigen::MatrixXd& h, const Eigen::MatrixXd& y,
                                const Readout& r) {
    if (h.cols() != y.cols() || r.W_out.cols() != h.rows() || r.W_out.rows() != y.rows()) {
        throw std::invalid_argument("residual_variance: dimension mismatch");
    }
    const Eigen::MatrixXd resid = y - r.W_out * h;
    return resid.squaredNorm() / static_cast<double>(resid.size());
}

/**
 * Ridge estimate of the output weights,
 * W_out = Y H' (H H' + tau I)^{-1},
 * solved through a Cholesky factorization of the Gram matrix rather than an
 * explicit inverse. tau = 0 is accepted only while H H' is nonsingular.
 *
 * Intercepts are not handled here; callers append a constant row to H
 * beforehand, and that row is penalized like any other.
 */
inline Readout fit_ridge(const Eigen::MatrixXd& h, const Eigen::MatrixXd& y, double tau) {
    if (h.cols() != y.cols()) {
        throw std::invalid_argument("fit_ridge: H and Y must share the time dimension");
    }
    if (h.cols() < 1) {
        throw std::invalid_argument("fit_ridge: need at least one sample");
    }
    if (tau < 0.0) {
        throw std::invalid_argument("fit_ridge: tau must be >= 0");
    }
    if (!h.allFinite() || !y.allFinite()) {
        throw std::invalid_argument("fit_ridge: non-finite inputs");
    }
    const Eigen::Index n = h.rows();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(h);
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += tau;

    const Eigen::MatrixXd rhs = h * y.transpose(); // n_h x n_y

    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        if (tau == 0.0) {
            throw NumericError("fit_ridge: singular system with tau = 0");
        }
        const double jitter = 1e-12 * gram.trace() / static_cast<double>(n);
        log_warning("fit_ridge: Cholesky failed, retrying with jitter");
        gram.diagonal().array() += jitter;
        llt.compute(gram);
        if (llt.info() != Eigen::Success) {
            throw NumericError("fit_ridge: Cholesky failed even with jitter");
        }
    }

    Readout r;
    r.W_out = llt.solve(rhs).transpose();
    r.tau = tau;
    r.sigma2 = residual_variance(h, y, r);
    return r;
}

/// Noiseless point prediction W_out h.
inline Eigen::VectorXd predict(const Readout& r, const Eigen::VectorXd& h) {
    if (h.size() != r.W_out.cols()) {
        throw std::invalid_argument("predict: hidden state dimension mismatch");
    }
    return r.W_out * h;
}

} // namespace aesn
