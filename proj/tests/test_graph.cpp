#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "aesn/graph.hpp"
#include "test_helpers.hpp"

using namespace aesn;

TEST_CASE("from_edge_list basics", "[graph]") {
    SECTION("edgeless graph has a zero adjacency") {
        const Graph g = Graph::from_edge_list({}, 2);
        REQUIRE(g.num_nodes() == 2);
        REQUIRE(g.num_edges() == 0);
        REQUIRE(g.adjacency_dense().isZero(0.0));
    }
    SECTION("mirrored pairs collapse to one undirected edge") {
        const Graph g = Graph::from_edge_list({{0, 1}, {1, 0}}, 2);
        REQUIRE(g.num_edges() == 1);
        const Eigen::MatrixXd a = g.adjacency_dense();
        REQUIRE(a(0, 1) == 1.0);
        REQUIRE(a(1, 0) == 1.0);
        REQUIRE(a(0, 0) == 0.0);
        REQUIRE(a(1, 1) == 0.0);
    }
    SECTION("out-of-range index is rejected") {
        REQUIRE_THROWS_AS(Graph::from_edge_list({{0, 3}}, 2), std::out_of_range);
    }
    SECTION("explicit self-loop is rejected") {
        REQUIRE_THROWS_AS(Graph::from_edge_list({{1, 1}}, 2), std::invalid_argument);
    }
}

TEST_CASE("normalized adjacency hand cases", "[graph]") {
    SECTION("edgeless graph gives the identity") {
        const auto s = normalized_adjacency(Graph::from_edge_list({}, 4));
        REQUIRE((s.dense() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("two nodes, one edge") {
        const auto s = normalized_adjacency(Graph::from_edge_list({{0, 1}}, 2));
        Eigen::MatrixXd expect(2, 2);
        expect << 0.5, 0.5, 0.5, 0.5;
        REQUIRE((s.dense() - expect).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("three-node path") {
        const auto s = normalized_adjacency(Graph::from_edge_list({{0, 1}, {1, 2}}, 3));
        const Eigen::MatrixXd d = s.dense();
        REQUIRE(d(0, 0) == Catch::Approx(0.5).margin(1e-15));
        REQUIRE(d(0, 1) == Catch::Approx(1.0 / std::sqrt(6.0)).margin(1e-15));
        REQUIRE(d(1, 1) == Catch::Approx(1.0 / 3.0).margin(1e-15));
        REQUIRE(d(0, 2) == 0.0);
        REQUIRE(spectral_radius_dense(d) == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("isolated node keeps an identity row") {
        const auto s = normalized_adjacency(Graph::from_edge_list({{0, 1}}, 3));
        const Eigen::MatrixXd d = s.dense();
        REQUIRE(d(2, 2) == 1.0);
        REQUIRE(d(2, 0) == 0.0);
        REQUIRE(d(2, 1) == 0.0);
    }
}

TEST_CASE("normalized adjacency properties", "[graph]") {
    Rng rng(42);
    SECTION("symmetric to 1e-12 and sparsity pattern matches neighborhoods") {
        for (int rep = 0; rep < 25; ++rep) {
            const int n = 2 + static_cast<int>(rng.uniform_int(0, 28));
            const Graph g = testing::random_graph(n, 0.2, rng);
            const Eigen::MatrixXd d = normalized_adjacency(g).dense();
            REQUIRE((d - d.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            for (int i = 0; i < n; ++i) {
                REQUIRE(d(i, i) > 0.0);
                for (int j = 0; j < n; ++j) {
                    const bool neighbor =
                        std::find(g.neighbors(i).begin(), g.neighbors(i).end(), j) !=
                        g.neighbors(i).end();
                    if (i != j) {
                        REQUIRE((d(i, j) != 0.0) == neighbor);
                    }
                }
            }
        }
    }
    SECTION("node relabeling commutes with the operator") {
        for (int rep = 0; rep < 10; ++rep) {
            const int n = 3 + static_cast<int>(rng.uniform_int(0, 12));
            const Graph g = testing::random_graph(n, 0.3, rng);
            const auto perm = testing::random_permutation(n, rng);
            std::vector<std::pair<int, int>> relabeled;
            for (const auto& [i, j] : g.edges()) {
                relabeled.emplace_back(perm.indices()(i), perm.indices()(j));
            }
            const Graph gp = Graph::from_edge_list(relabeled, n);
            const Eigen::MatrixXd lhs =
                perm * normalized_adjacency(g).dense() * perm.transpose();
            const Eigen::MatrixXd rhs = normalized_adjacency(gp).dense();
            REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    SECTION("storage switches from dense to sparse above the cutoff") {
        Rng local(7);
        const Graph small = testing::random_connected_graph(64, local);
        const Graph large = testing::random_connected_graph(65, local);
        REQUIRE(normalized_adjacency(small).dense_storage());
        REQUIRE_FALSE(normalized_adjacency(large).dense_storage());
        const Eigen::VectorXd x = testing::random_matrix(65, 1, local);
        const auto s = normalized_adjacency(large);
        REQUIRE((s.apply(x) - s.dense() * x).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("spectral radius basics", "[graph]") {
    SECTION("identity") {
        REQUIRE(spectral_radius(Eigen::MatrixXd::Identity(5, 5)) == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("diagonal spectrum with a dominant negative eigenvalue") {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
        m(0, 0) = 2.0;
        m(1, 1) = -3.0;
        REQUIRE(spectral_radius(m) == Catch::Approx(3.0).margin(1e-9));
    }
    SECTION("connected path operator has radius 1") {
        const auto s = normalized_adjacency(Graph::from_edge_list({{0, 1}, {1, 2}}, 3));
        REQUIRE(spectral_radius(s.dense()) == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("rotation matrix: complex dominant pair") {
        Eigen::MatrixXd m(2, 2);
        const double c = std::cos(0.7), sn = std::sin(0.7);
        m << c, -sn, sn, c;
        const double r = spectral_radius(1.7 * m);
        REQUIRE(r == Catch::Approx(1.7).margin(1e-8));
    }
    SECTION("max_iter of zero is rejected") {
        REQUIRE_THROWS_AS(spectral_radius(Eigen::MatrixXd::Identity(2, 2), 1e-10, 0),
                          std::invalid_argument);
    }
}

TEST_CASE("spectral radius of S equals 1 on connected graphs (dense oracle)", "[graph]") {
    Rng rng(777);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(0, 48));
        const Graph g = testing::random_connected_graph(n, rng);
        const auto s = normalized_adjacency(g);
        const double power = s.dense_storage() ? spectral_radius(s.dense())
                                               : spectral_radius(s.sparse());
        const double oracle = spectral_radius_dense(s.dense());
        REQUIRE(power == Catch::Approx(oracle).margin(1e-8));
        REQUIRE(power == Catch::Approx(1.0).margin(1e-8));
    }
}
