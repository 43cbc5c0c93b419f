#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "aesn/errors.hpp"
#include "aesn/graph.hpp"
#include "aesn/rng.hpp"

namespace aesn {

/**
 * Areal random representation weights: K fixed random matrices U^(k) of
 * shape n_s x n_x with entries drawn i.i.d. from Uniform(-a_u, a_u).
 *
 * Entries are never shared across locations or features and never trained.
 * Sampling order is fixed (k, then column, then row), so a seed pins the
 * whole embedding bit for bit.
 */
struct ArealEmbedding {
    int n_s = 0;
    int n_x = 0;
    int K = 0;
    double a_u = 0.0;
    std::uint64_t seed = 0;
    std::vector<Eigen::MatrixXd> U;
};

/// One embedded time step: the n_s x K matrix of locally averaged random
/// features and its column-major vectorization (feature k contiguous).
struct EmbeddedSignal {
    Eigen::MatrixXd Z;
    Eigen::VectorXd z_vec;
};

inline ArealEmbedding sample_embedding(int n_s, int n_x, int K, double a_u,
                                       std::uint64_t seed) {
    if (n_s < 1 || n_x < 1) {
        throw std::invalid_argument("sample_embedding: n_s and n_x must be >= 1");
    }
    if (K < 1) {
        throw std::invalid_argument("sample_embedding: K must be >= 1");
    }
    if (!(a_u > 0.0)) {
        throw std::invalid_argument("sample_embedding: a_u must be positive");
    }
    ArealEmbedding e;
    e.n_s = n_s;
    e.n_x = n_x;
    e.K = K;
    e.a_u = a_u;
    e.seed = seed;
    e.U.reserve(static_cast<std::size_t>(K));
    Rng rng(seed);
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXd u(n_s, n_x);
        for (int j = 0; j < n_x; ++j) {
            for (int i = 0; i < n_s; ++i) {
                u(i, j) = rng.uniform_open_sym(a_u);
            }
        }
        e.U.push_back(std::move(u));
    }
    return e;
}

/// Column-major flattening of Z (all locations of feature k contiguous).
inline Eigen::VectorXd vectorize(const Eigen::MatrixXd& z) {
    return Eigen::Map<const Eigen::VectorXd>(z.data(), z.size());
}

/// Inverse of vectorize.
inline Eigen::MatrixXd devectorize(const Eigen::VectorXd& v, int n_s, int k) {
    if (v.size() != static_cast<Eigen::Index>(n_s) * k) {
        throw std::invalid_argument("devectorize: length mismatch");
    }
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), n_s, k);
}

/**
 * Expand one time step's input matrix x (n_s x n_x) into the n_s x K
 * embedding: column k is S * ((U^(k) .* x) 1), i.e. a per-location random
 * weighting of the features followed by one hop of local averaging.
 * Linear by construction, so perturbations stay within one graph hop.
 */
inline EmbeddedSignal embed(const ArealEmbedding& e, const NormalizedAdjacency& s,
                            const Eigen::MatrixXd& x) {
    if (x.rows() != e.n_s || x.cols() != e.n_x) {
        throw std::invalid_argument("embed: input shape does not match embedding");
    }
    if (s.size() != e.n_s) {
        throw std::invalid_argument("embed: operator size does not match embedding");
    }
    EmbeddedSignal out;
    out.Z.resize(e.n_s, e.K);
    for (int k = 0; k < e.K; ++k) {
        const Eigen::VectorXd weighted = (e.U[static_cast<std::size_t>(k)].cwiseProduct(x))
                                             .rowwise()
                                             .sum();
        out.Z.col(k) = s.apply(weighted);
    }
    out.z_vec = vectorize(out.Z);
    return out;
}

} // namespace aesn
