#include <doctest.h>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "contagion/graph.hpp"

using namespace contagion;

namespace {

void check_consistent(const Graph& g) {
    std::size_t ends = 0;
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto nb = g.neighbors(i);
        CHECK(std::is_sorted(nb.begin(), nb.end()));
        CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
        std::size_t bits = 0;
        for (auto w : g.row(i)) {
            bits += std::popcount(w);
        }
        CHECK(bits == nb.size());
        CHECK_FALSE(g.has_link(i, i));
        for (NodeId j : nb) {
            CHECK(g.has_link(j, i));
            CHECK(i != j);
        }
        ends += nb.size();
    }
    CHECK(ends == 2 * g.link_count());
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("add and remove") {
    Graph g(5);
    g.add_link(0, 3);
    CHECK(g.degree(0) == 1);
    CHECK(g.degree(3) == 1);
    CHECK(g.has_link(3, 0));
    g.remove_link(3, 0);
    CHECK(g == Graph(5));
    CHECK_THROWS_AS(g.remove_link(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(g.add_link(2, 2), std::invalid_argument);
    CHECK_THROWS_AS(g.add_link(2, 5), std::invalid_argument);
    g.add_link(1, 2);
    CHECK_THROWS_AS(g.add_link(2, 1), std::invalid_argument);
}

TEST_CASE("random operation sequences keep the graph consistent") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.index(130);
        Graph g(n);
        for (int op = 0; op < 400; ++op) {
            const auto i = static_cast<NodeId>(rng.index(n));
            const auto j = static_cast<NodeId>(rng.index(n));
            if (i == j) {
                CHECK_THROWS(g.add_link(i, j));
            } else if (g.has_link(i, j)) {
                g.remove_link(i, j);
            } else {
                g.add_link(i, j);
            }
        }
        check_consistent(g);
    }
}

TEST_CASE("density and degrees") {
    CHECK(density(Graph(10)) == 0.0);
    CHECK(density(Graph(1)) == 0.0);
    Graph star(6);
    for (NodeId j = 1; j < 6; ++j) {
        star.add_link(0, j);
    }
    CHECK(degrees(star) == std::vector<std::size_t>{5, 1, 1, 1, 1, 1});
    CHECK(density(star) == doctest::Approx(5.0 / 15.0));
}

TEST_CASE("ER extremes and mean degree") {
    Rng rng(1);
    CHECK(er_random(30, 0.0, rng).link_count() == 0);
    const Graph full = er_random(30, 1.0, rng);
    for (NodeId i = 0; i < 30; ++i) {
        CHECK(full.degree(i) == 29);
    }
    double mean_degree = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto d = degrees(er_random(100, 0.5, rng));
        mean_degree += std::accumulate(d.begin(), d.end(), 0.0) / 100.0;
    }
    CHECK(std::abs(mean_degree / 100.0 - 49.5) < 1.5);
    CHECK_THROWS_AS(er_random(10, 1.5, rng), std::invalid_argument);
}

TEST_CASE("ER link count is binomial (chi-square)") {
    const std::size_t n = 20;
    const double rho = 0.3;
    const std::size_t pairs = n * (n - 1) / 2;
    const int draws = 1000;
    const boost::math::binomial_distribution<double> model(double(pairs), rho);

    // Pool the tails so each class expects at least 5 draws.
    std::vector<std::pair<std::size_t, std::size_t>> classes;  // [lo, hi]
    std::size_t lo = 0;
    double acc = 0.0;
    for (std::size_t m = 0; m <= pairs; ++m) {
        acc += boost::math::pdf(model, double(m)) * draws;
        if (acc >= 5.0) {
            classes.push_back({lo, m});
            lo = m + 1;
            acc = 0.0;
        }
    }
    classes.back().second = pairs;

    std::vector<double> observed(classes.size(), 0.0);
    Rng rng(2024);
    for (int k = 0; k < draws; ++k) {
        const std::size_t m = er_random(n, rho, rng).link_count();
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (m >= classes[c].first && m <= classes[c].second) {
                observed[c] += 1.0;
            }
        }
    }
    double chi2 = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        double expected = 0.0;
        for (std::size_t m = classes[c].first; m <= classes[c].second; ++m) {
            expected += boost::math::pdf(model, double(m)) * draws;
        }
        chi2 += (observed[c] - expected) * (observed[c] - expected) / expected;
    }
    const boost::math::chi_squared_distribution<double> ref(double(classes.size() - 1));
    CHECK(chi2 < boost::math::quantile(ref, 0.99));
}

TEST_CASE("degree histogram over an ensemble and a subset") {
    Graph a(3);
    a.add_link(0, 1);
    Graph b(3);
    b.add_link(0, 1);
    b.add_link(0, 2);
    const std::vector<Graph> ens{a, b};
    CHECK(degree_histogram(ens) == std::vector<std::size_t>{1, 4, 1});
    const std::vector<NodeId> first{0};
    CHECK(degree_histogram(ens, first) == std::vector<std::size_t>{0, 1, 1});
}

TEST_CASE("pairwise stability audit") {
    // Utility = number of neighbours times a per-node value.
    auto linear = [](double per_link) {
        return NeighborhoodUtility(
            [per_link](NodeId, std::span<const NodeId> hood) { return per_link * double(hood.size()); });
    };
    const std::vector<double> costs{1.0, 1.0};

    SUBCASE("empty graph, links not worth their cost") {
        CHECK(is_pairwise_stable(Graph(2), linear(0.5), costs).stable());
    }
    SUBCASE("two nodes that both gain from a link") {
        const auto report = is_pairwise_stable(Graph(2), linear(2.0), costs);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == StabilityViolationKind::addition);
        CHECK(report.count(StabilityViolationKind::addition) == 1);
    }
    SUBCASE("existing link that does not pay") {
        Graph g(2);
        g.add_link(0, 1);
        const auto report = is_pairwise_stable(g, linear(0.5), costs);
        CHECK(report.count(StabilityViolationKind::deletion) == 1);
        CHECK(report.violations[0].gain == doctest::Approx(0.5));
    }
    SUBCASE("exactly break-even links are stable both ways") {
        Graph g(3);
        g.add_link(0, 1);
        CHECK(is_pairwise_stable(g, linear(1.0), std::vector<double>{1, 1, 1}).stable());
    }
    SUBCASE("one-sided gain is not an addition violation") {
        const std::vector<double> uneven{1.0, 3.0};
        CHECK(is_pairwise_stable(Graph(2), linear(2.0), uneven).stable());
    }
}

TEST_CASE("edge list round trip and validation") {
    Rng rng(5);
    const Graph g = er_random(40, 0.2, rng);
    std::stringstream ss;
    write_edge_list(ss, g);
    CHECK(ss.str().rfind("# n=40 rho=", 0) == 0);
    CHECK(read_edge_list(ss) == g);

    std::istringstream bad_node("# n=3 rho=0\n0 5\n");
    CHECK_THROWS_AS(read_edge_list(bad_node), std::runtime_error);
    std::istringstream dup("# n=3 rho=0\n0 1\n1 0\n");
    CHECK_THROWS_AS(read_edge_list(dup), std::runtime_error);
    std::istringstream junk("# n=3 rho=0\nzero one\n");
    CHECK_THROWS_AS(read_edge_list(junk), std::runtime_error);
    std::istringstream no_header("0 1\n");
    CHECK_THROWS_AS(read_edge_list(no_header), std::runtime_error);
}

}  // TEST_SUITE
