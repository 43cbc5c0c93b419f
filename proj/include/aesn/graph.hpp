#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <utility>
#include <vector>

#include "aesn/errors.hpp"

namespace aesn {

/**
 * Undirected areal proximity structure over n_s units.
 *
 * The adjacency is binary with a zero diagonal; self-loops are introduced
 * only later, inside the normalized operator. Immutable after construction.
 */
class Graph {
public:
    Graph() = default;

    /// Build from an edge list. Edges are symmetrized and deduplicated;
    /// out-of-range indices and explicit self-loops are rejected.
    static Graph from_edge_list(const std::vector<std::pair<int, int>>& edges, int n_s) {
        if (n_s < 0) {
            throw std::invalid_argument("Graph: n_s must be nonnegative");
        }
        std::set<std::pair<int, int>> dedup;
        for (const auto& [i, j] : edges) {
            if (i < 0 || j < 0 || i >= n_s || j >= n_s) {
                throw std::out_of_range("Graph: edge index out of range");
            }
            if (i == j) {
                throw std::invalid_argument("Graph: self-loops are not accepted in edge lists");
            }
            dedup.emplace(std::min(i, j), std::max(i, j));
        }
        Graph g;
        g.n_s_ = n_s;
        g.edges_.assign(dedup.begin(), dedup.end());
        g.neighbors_.resize(static_cast<std::size_t>(n_s));
        for (const auto& [i, j] : g.edges_) {
            g.neighbors_[static_cast<std::size_t>(i)].push_back(j);
            g.neighbors_[static_cast<std::size_t>(j)].push_back(i);
        }
        for (auto& nbrs : g.neighbors_) {
            std::sort(nbrs.begin(), nbrs.end());
        }
        return g;
    }

    int num_nodes() const { return n_s_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    /// Deduplicated edges with i < j.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    const std::vector<int>& neighbors(int i) const {
        return neighbors_.at(static_cast<std::size_t>(i));
    }

    /// Dense binary adjacency A (zero diagonal).
    Eigen::MatrixXd adjacency_dense() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_s_, n_s_);
        for (const auto& [i, j] : edges_) {
            a(i, j) = 1.0;
            a(j, i) = 1.0;
        }
        return a;
    }

private:
    int n_s_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> neighbors_;
};

/**
 * The symmetric normalized adjacency with self-loops,
 * S = D~^{-1/2} (A + I) D~^{-1/2}, where D~ is the degree matrix of A + I.
 *
 * Rows of an isolated unit reduce to the identity row, so its signal is
 * passed through untouched. Stored dense up to kDenseCutoff nodes and
 * sparse above, since the operator sits inside a per-time-step matvec.
 */
class NormalizedAdjacency {
public:
    static constexpr int kDenseCutoff = 64;

    NormalizedAdjacency() = default;

    explicit NormalizedAdjacency(const Eigen::SparseMatrix<double>& s) : sparse_(s) {
        if (s.rows() != s.cols()) {
            throw std::invalid_argument("NormalizedAdjacency: matrix must be square");
        }
        if (s.rows() <= kDenseCutoff) {
            dense_ = Eigen::MatrixXd(s);
        }
    }

    int size() const { return static_cast<int>(sparse_.rows()); }
    bool dense_storage() const { return dense_.size() > 0; }

    /// S * x
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        if (x.size() != sparse_.rows()) {
            throw std::invalid_argument("NormalizedAdjacency: dimension mismatch");
        }
        if (dense_storage()) {
            return dense_ * x;
        }
        return sparse_ * x;
    }

    /// S * X, column-wise.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
        if (x.rows() != sparse_.rows()) {
            throw std::invalid_argument("NormalizedAdjacency: dimension mismatch");
        }
        if (dense_storage()) {
            return dense_ * x;
        }
        return sparse_ * x;
    }

    Eigen::MatrixXd dense() const {
        return dense_storage() ? dense_ : Eigen::MatrixXd(sparse_);
    }

    const Eigen::SparseMatrix<double>& sparse() const { return sparse_; }

private:
    Eigen::SparseMatrix<double> sparse_;
    Eigen::MatrixXd dense_;
};

inline NormalizedAdjacency normalized_adjacency(const Graph& g) {
    const int n = g.num_nodes();
    Eigen::VectorXd degree = Eigen::VectorXd::Ones(n); // self-loop contributes 1
    for (const auto& [i, j] : g.edges()) {
        degree(i) += 1.0;
        degree(j) += 1.0;
    }
    const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) + 2 * g.edges().size());
    for (int i = 0; i < n; ++i) {
        triplets.emplace_back(i, i, inv_sqrt(i) * inv_sqrt(i));
    }
    for (const auto& [i, j] : g.edges()) {
        const double v = inv_sqrt(i) * inv_sqrt(j);
        triplets.emplace_back(i, j, v);
        triplets.emplace_back(j, i, v);
    }
    Eigen::SparseMatrix<double> s(n, n);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return NormalizedAdjacency(s);
}

namespace detail {

/**
 * Restarted Arnoldi estimate of |lambda_max|.
 *
 * Plain power iteration stalls whenever the dominant eigenvalues form a
 * complex-conjugate pair, which random reservoir draws produce routinely,
 * so the power sweeps are run through a small Krylov basis instead: same
 * all-ones start vector, same matvec budget, but the dominant Ritz pair is
 * read off a Hessenberg projection and the iteration restarts from it.
 * The Arnoldi identity ||M x - theta x|| = h(m, m-1) |e_m' y| gives the
 * residual used for the stopping test; for the symmetric operators used
 * here it bounds the eigenvalue error directly.
 */
template <typename Mat>
double spectral_radius_impl(const Mat& m, double tol, int max_iter) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("spectral_radius: matrix must be square");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("spectral_radius: max_iter must be >= 1");
    }
    const Eigen::Index n = m.rows();
    if (n == 0) {
        return 0.0;
    }
    if (n == 1) {
        return std::abs(m.coeff(0, 0));
    }

    // Work on M / ||M||_F so the whole iteration, thresholds included, is
    // invariant under rescaling of M. Rescaling a reservoir must commute
    // with this estimate exactly, not just approximately.
    const double sigma = m.norm();
    if (sigma == 0.0 || !std::isfinite(sigma)) {
        if (!std::isfinite(sigma)) {
            throw std::invalid_argument("spectral_radius: non-finite matrix entries");
        }
        return 0.0;
    }
    Mat scaled = m;
    scaled *= 1.0 / sigma;

    const int dim = static_cast<int>(std::min<Eigen::Index>(30, n));
    Eigen::VectorXd start = Eigen::VectorXd::Ones(n);
    start /= start.norm();

    Eigen::MatrixXd v(n, dim + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim + 1, dim);
    int matvecs = 0;
    while (true) {
        v.col(0) = start;
        h.setZero();
        int built = 0;
        bool breakdown = false;
        for (int j = 0; j < dim; ++j) {
            if (matvecs >= max_iter) {
                break;
            }
            Eigen::VectorXd w = scaled * v.col(j);
            ++matvecs;
            // Modified Gram-Schmidt with one reorthogonalization pass.
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const double c = v.col(i).dot(w);
                    if (pass == 0) {
                        h(i, j) = c;
                    } else {
                        h(i, j) += c;
                    }
                    w -= c * v.col(i);
                }
            }
            h(j + 1, j) = w.norm();
            built = j + 1;
            if (h(j + 1, j) <= 1e-14 * std::max(1.0, h.topLeftCorner(j + 1, j + 1).norm())) {
                breakdown = true; // exact invariant subspace
                break;
            }
            v.col(j + 1) = w / h(j + 1, j);
        }
        if (built == 0) {
            throw NumericError("spectral_radius: matvec budget exhausted before convergence");
        }

        const Eigen::MatrixXd hm = h.topLeftCorner(built, built);
        Eigen::EigenSolver<Eigen::MatrixXd> es(hm);
        if (es.info() != Eigen::Success) {
            throw NumericError("spectral_radius: Hessenberg eigensolver failed");
        }
        Eigen::Index top;
        es.eigenvalues().cwiseAbs().maxCoeff(&top);
        const std::complex<double> theta = es.eigenvalues()(top);
        const Eigen::VectorXcd y = es.eigenvectors().col(top);
        const double rho = std::abs(theta);

        const double residual = breakdown ? 0.0 : h(built, built - 1) * std::abs(y(built - 1));
        if (residual <= tol * std::max(1.0, rho)) {
            return sigma * rho;
        }
        if (matvecs >= max_iter) {
            throw NumericError("spectral_radius: power iteration did not converge within max_iter");
        }

        // Restart from the dominant Ritz vector (real part, or imaginary
        // when the real part degenerates).
        const Eigen::MatrixXd vm = v.leftCols(built);
        Eigen::VectorXd real_part = vm * y.real();
        if (real_part.norm() <= 1e-12) {
            real_part = vm * y.imag();
        }
        start = real_part / real_part.norm();
    }
}

} // namespace detail

/// |largest eigenvalue| via deterministic restarted power (Arnoldi)
/// iteration from the normalized all-ones vector; max_iter caps the total
/// number of matrix-vector products. Throws NumericError on
/// non-convergence; small systems can then be retried with
/// spectral_radius_dense.
inline double spectral_radius(const Eigen::MatrixXd& m, double tol = 1e-10,
                              int max_iter = 10000) {
    return detail::spectral_radius_impl(m, tol, max_iter);
}

inline double spectral_radius(const Eigen::SparseMatrix<double>& m, double tol = 1e-10,
                              int max_iter = 10000) {
    return detail::spectral_radius_impl(m, tol, max_iter);
}

/// Dense eigensolver fallback / test oracle.
inline double spectral_radius_dense(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("spectral_radius_dense: matrix must be square");
    }
    if (m.rows() == 0) {
        return 0.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw NumericError("spectral_radius_dense: eigensolver failed");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace aesn
