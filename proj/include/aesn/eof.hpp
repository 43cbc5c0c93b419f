#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "aesn/errors.hpp"

namespace aesn {

/**
 * Empirical orthogonal function basis of a (time x location) field.
 *
 * Columns of `basis` are orthonormal spatial patterns ordered by
 * nonincreasing singular value; `mean` is the per-location temporal mean
 * removed before the decomposition. The sign of each column is fixed by
 * making its largest-magnitude entry positive, since the raw SVD sign is
 * arbitrary and would break reproducibility.
 */
struct EofBasis {
    Eigen::VectorXd mean;            // n_s
    Eigen::MatrixXd basis;           // n_s x n_eof
    Eigen::VectorXd singular_values; // n_eof, nonincreasing

    int n_locations() const { return static_cast<int>(mean.size()); }
    int n_eof() const { return static_cast<int>(basis.cols()); }
};

inline EofBasis compute_eofs(const Eigen::MatrixXd& panel, int n_eof) {
    const Eigen::Index t = panel.rows();
    const Eigen::Index n_s = panel.cols();
    if (n_eof < 1 || n_eof > std::min(t, n_s)) {
        throw std::invalid_argument("compute_eofs: n_eof must be in [1, min(T, n_s)]");
    }
    EofBasis b;
    b.mean = panel.colwise().mean();
    const Eigen::MatrixXd centered = panel.rowwise() - b.mean.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    b.basis = svd.matrixV().leftCols(n_eof);
    b.singular_values = svd.singularValues().head(n_eof);
    for (int k = 0; k < n_eof; ++k) {
        Eigen::Index imax;
        b.basis.col(k).cwiseAbs().maxCoeff(&imax);
        if (b.basis(imax, k) < 0.0) {
            b.basis.col(k) = -b.basis.col(k);
        }
    }
    return b;
}

/// Coefficient series of the panel in the basis (T x n_eof).
inline Eigen::MatrixXd project(const EofBasis& b, const Eigen::MatrixXd& panel) {
    if (panel.cols() != b.n_locations()) {
        throw std::invalid_argument("project: location dimension mismatch");
    }
    return (panel.rowwise() - b.mean.transpose()) * b.basis;
}

/// Panel reconstructed from coefficients, mean added back (T x n_s).
inline Eigen::MatrixXd reconstruct(const EofBasis& b, const Eigen::MatrixXd& coeffs) {
    if (coeffs.cols() != b.n_eof()) {
        throw std::invalid_argument("reconstruct: coefficient dimension mismatch");
    }
    return (coeffs * b.basis.transpose()).rowwise() + b.mean.transpose();
}

/// Smallest basis size explaining at least `variance_fraction` of the
/// centered variance.
inline int choose_n_eof(const Eigen::MatrixXd& panel, double variance_fraction) {
    if (!(variance_fraction > 0.0) || variance_fraction > 1.0) {
        throw std::invalid_argument("choose_n_eof: fraction must be in (0, 1]");
    }
    const int full = static_cast<int>(std::min(panel.rows(), panel.cols()));
    const EofBasis b = compute_eofs(panel, full);
    const Eigen::VectorXd sq = b.singular_values.array().square();
    const double total = sq.sum();
    if (total <= 0.0) {
        return 1; // constant field: one EOF carries everything there is
    }
    double cum = 0.0;
    for (int k = 0; k < full; ++k) {
        cum += sq(k);
        if (cum >= variance_fraction * total) {
            return k + 1;
        }
    }
    return full;
}

} // namespace aesn
