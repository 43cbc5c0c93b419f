#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "aesn/data.hpp"
#include "aesn/graph.hpp"
#include "aesn/rng.hpp"

namespace aesn::testing {

/// Random connected graph: a random spanning tree plus extra edges.
inline Graph random_connected_graph(int n, Rng& rng, int extra_edges = -1) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) {
        edges.emplace_back(i, static_cast<int>(rng.uniform_int(0, i - 1)));
    }
    if (extra_edges < 0) {
        extra_edges = n / 2;
    }
    for (int e = 0; e < extra_edges && n >= 2; ++e) {
        const int i = static_cast<int>(rng.uniform_int(0, n - 1));
        const int j = static_cast<int>(rng.uniform_int(0, n - 1));
        if (i != j) {
            edges.emplace_back(i, j);
        }
    }
    return Graph::from_edge_list(edges, n);
}

/// Arbitrary graph, possibly disconnected, possibly with isolated nodes.
inline Graph random_graph(int n, double edge_prob, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.bernoulli(edge_prob)) {
                edges.emplace_back(i, j);
            }
        }
    }
    return Graph::from_edge_list(edges, n);
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng,
                                     double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = scale * (2.0 * rng.uniform() - 1.0);
        }
    }
    return m;
}

inline Eigen::PermutationMatrix<Eigen::Dynamic> random_permutation(int n, Rng& rng) {
    Eigen::VectorXi idx(n);
    for (int i = 0; i < n; ++i) {
        idx(i) = i;
    }
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(0, i));
        std::swap(idx(i), idx(j));
    }
    return Eigen::PermutationMatrix<Eigen::Dynamic>(idx);
}

/// Small positive panel with trend and seasonality, for transform and model
/// fixtures.
inline Panel small_panel(int t_total, int n_s, Rng& rng) {
    Panel p;
    for (int i = 0; i < n_s; ++i) {
        p.region_ids.push_back("L" + std::to_string(100 + i));
    }
    YearMonth ym{2020, 1};
    for (int t = 0; t < t_total; ++t) {
        p.times.push_back(ym);
        ym = ym.next();
    }
    p.values.resize(t_total, n_s);
    for (int i = 0; i < n_s; ++i) {
        const double level = 1.0 + rng.uniform();
        const double phase = rng.uniform(0.0, 12.0);
        for (int t = 0; t < t_total; ++t) {
            const double s = level + 0.01 * t + 0.3 * std::sin(2.0 * M_PI * (t + phase) / 12.0) +
                             0.05 * (2.0 * rng.uniform() - 1.0);
            p.values(t, i) = 1000.0 * std::exp(s);
        }
    }
    p.transform_state = TransformState::Raw;
    return p;
}

} // namespace aesn::testing
