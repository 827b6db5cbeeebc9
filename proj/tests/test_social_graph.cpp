#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "popaware/simulator.hpp"
#include "popaware/social_graph.hpp"

using namespace popaware;

namespace {

// Brute-force adjacency matrix oracle for within-group degree.
struct DenseGraph {
    std::size_t n;
    std::vector<GroupId> group;
    std::vector<std::vector<bool>> adj;

    explicit DenseGraph(std::size_t n_)
        : n(n_), group(n_, 0), adj(n_, std::vector<bool>(n_, false)) {}

    std::size_t degree_in_group(std::size_t a) const {
        std::size_t d = 0;
        for (std::size_t b = 0; b < n; ++b) {
            if (adj[a][b] && group[b] == group[a]) d += 1;
        }
        return d;
    }

    std::size_t members(GroupId g) const {
        return static_cast<std::size_t>(
            std::count(group.begin(), group.end(), g));
    }
};

}  // namespace

TEST_CASE("three-group fixture reproduces the expected degree sequences") {
    const Scenario s = build_canonical_scenario();
    // Groups of 10, 7 and 6 senders plus the relay node in its own group.
    REQUIRE(s.graph.node_count() == 24);
    CHECK(s.graph.edge_count() == 17 + 11 + 8 + 3);

    const std::size_t expected_degree[] = {8, 2, 3, 3, 3, 3, 4, 2, 4, 2,
                                           5, 2, 4, 2, 4, 3, 2,
                                           4, 2, 3, 2, 4, 1};
    const std::size_t group_size[] = {10, 10, 10, 10, 10, 10, 10, 10, 10, 10,
                                      7, 7, 7, 7, 7, 7, 7,
                                      6, 6, 6, 6, 6, 6};
    for (NodeId a = 0; a < 23; ++a) {
        CAPTURE(a);
        CHECK(s.graph.raw_degree(a) == expected_degree[a]);
        CHECK(s.graph.degree_centrality(a) ==
              doctest::Approx(static_cast<double>(expected_degree[a]) /
                              static_cast<double>(group_size[a] - 1))
                  .epsilon(1e-12));
    }
    CHECK(s.graph.degree_centrality(0) == doctest::Approx(8.0 / 9.0));
    CHECK(s.graph.degree_centrality(10) == doctest::Approx(5.0 / 6.0));
    CHECK(s.graph.degree_centrality(17) == doctest::Approx(0.8));
}

TEST_CASE("links to other groups never count toward popularity") {
    const Scenario s = build_canonical_scenario();
    // The three senders each also connect to the relay node.
    CHECK(s.graph.neighbors(0).size() == 9);
    CHECK(s.graph.raw_degree(0) == 8);
    CHECK(s.graph.neighbors(23).size() == 3);
    CHECK(s.graph.raw_degree(23) == 0);

    SocialGraph g;
    const NodeId a = g.add_node(0);
    const NodeId b = g.add_node(0);
    const NodeId c = g.add_node(1);
    g.add_node(1);
    const std::size_t before = g.raw_degree(a);
    g.add_edge(a, c);
    CHECK(g.raw_degree(a) == before);  // cross-group edge
    g.add_edge(a, b);
    CHECK(g.raw_degree(a) == before + 1);
    CHECK(g.raw_degree(b) == 1);
}

TEST_CASE("complete group matches a dense-matrix count and maxes centrality") {
    SocialGraph g;
    DenseGraph oracle(5);
    for (int i = 0; i < 5; ++i) g.add_node(0);
    for (NodeId a = 0; a < 5; ++a) {
        for (NodeId b = a + 1; b < 5; ++b) {
            g.add_edge(a, b);
            oracle.adj[a][b] = oracle.adj[b][a] = true;
        }
    }
    for (NodeId a = 0; a < 5; ++a) {
        CHECK(g.raw_degree(a) == oracle.degree_in_group(a));
        CHECK(g.raw_degree(a) == 4);
        CHECK(g.degree_centrality(a) == 1.0);
    }
}

TEST_CASE("random graphs agree with the dense oracle and stay in range") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng() % 10;
        const std::size_t n_groups = 1 + rng() % 3;
        SocialGraph g;
        DenseGraph oracle(n);
        for (std::size_t i = 0; i < n; ++i) {
            oracle.group[i] = static_cast<GroupId>(rng() % n_groups);
            g.add_node(oracle.group[i]);
        }
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (rng() % 100 < 40) {
                    g.add_edge(static_cast<NodeId>(a), static_cast<NodeId>(b));
                    oracle.adj[a][b] = oracle.adj[b][a] = true;
                }
            }
        }
        for (std::size_t a = 0; a < n; ++a) {
            CAPTURE(trial);
            CAPTURE(a);
            const std::size_t d = g.raw_degree(static_cast<NodeId>(a));
            CHECK(d == oracle.degree_in_group(a));
            const std::size_t m = oracle.members(oracle.group[a]);
            if (m >= 2) {
                const double c = g.degree_centrality(static_cast<NodeId>(a));
                CHECK(c >= 0.0);
                CHECK(c <= 1.0);
                CHECK((c == 1.0) == (d == m - 1));
                CHECK(c == doctest::Approx(static_cast<double>(d) /
                                           static_cast<double>(m - 1))
                               .epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("relabeling nodes leaves centralities unchanged") {
    std::mt19937 rng(21);
    const std::size_t n = 12;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<GroupId> group(n);
    for (std::size_t i = 0; i < n; ++i) group[i] = static_cast<GroupId>(i % 2);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (rng() % 100 < 45) edges.emplace_back(a, b);

    SocialGraph g1;
    for (std::size_t i = 0; i < n; ++i) g1.add_node(group[i]);
    for (const auto& [a, b] : edges)
        g1.add_edge(static_cast<NodeId>(a), static_cast<NodeId>(b));

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    // perm[i] is the new id of old node i.
    std::vector<GroupId> group2(n);
    for (std::size_t i = 0; i < n; ++i) group2[perm[i]] = group[i];
    SocialGraph g2;
    for (std::size_t i = 0; i < n; ++i) g2.add_node(group2[i]);
    for (const auto& [a, b] : edges)
        g2.add_edge(static_cast<NodeId>(perm[a]), static_cast<NodeId>(perm[b]));

    for (std::size_t i = 0; i < n; ++i) {
        CHECK(g1.degree_centrality(static_cast<NodeId>(i)) ==
              g2.degree_centrality(static_cast<NodeId>(perm[i])));
    }
}

TEST_CASE("an unconnected member has zero centrality, not an error") {
    SocialGraph g;
    g.add_node(0);
    g.add_node(0);
    const NodeId loner = g.add_node(0);
    g.add_edge(0, 1);
    CHECK(g.degree_centrality(loner) == 0.0);
}

TEST_CASE("degenerate and invalid inputs are rejected") {
    SocialGraph g;
    const NodeId only = g.add_node(0);
    CHECK_THROWS_AS(g.degree_centrality(only), std::domain_error);
    CHECK_THROWS_AS(g.raw_degree(99), std::out_of_range);
    CHECK_THROWS_AS(g.group_of(99), std::out_of_range);
    CHECK_THROWS_AS(g.group_size(5), std::out_of_range);
    CHECK_THROWS_AS(g.add_edge(only, only), std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge(only, 42), std::out_of_range);
    const NodeId other = g.add_node(0);
    g.add_edge(only, other);
    CHECK_THROWS_AS(g.add_edge(only, other), std::invalid_argument);
    CHECK_THROWS_AS(g.add_edge(other, only), std::invalid_argument);
    CHECK(g.degree_centrality(only) == 1.0);
}
