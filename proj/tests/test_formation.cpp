#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "contagion/formation.hpp"
#include "oracles.hpp"

using namespace contagion;

namespace {

const auto informed_sig = SignalStructure::from_variance(0.3, 0.7, 0.1);
const auto uninformed_sig = SignalStructure::from_variance(0.4, 0.6, 0.1);

std::vector<AgentProfile> table_profiles() {
    std::vector<AgentProfile> out(4, AgentProfile(informed_sig, 0.0, true));
    out.insert(out.end(), 26, AgentProfile(uninformed_sig, 0.1, false));
    return out;
}

double binomial(int n, int k) {
    return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
}

}  // namespace

TEST_SUITE("formation") {

TEST_CASE("neighbour match probabilities") {
    CHECK(neighbor_match_prob(AgentProfile(informed_sig), 0.5) ==
          doctest::Approx(oracle::Phi(0.2 / std::sqrt(0.1))).epsilon(1e-12));
    CHECK(neighbor_match_prob(AgentProfile(informed_sig), 0.5) == doctest::Approx(0.736).epsilon(1e-3));
    CHECK(neighbor_match_prob(AgentProfile(uninformed_sig), 0.5) == doctest::Approx(0.624).epsilon(1e-3));
    CHECK(neighbor_match_prob(AgentProfile(uninformed_sig), 1.0) == 0.0);
}

TEST_CASE("social belief distribution examples") {
    const double z = 0.37;
    const std::vector<double> pair{z, z};
    const auto d = social_belief_distribution(pair);
    CHECK(d.neighbors() == 2);
    CHECK(d.support(1) == 0.5);
    CHECK(d.mass[1] == doctest::Approx(2 * z * (1 - z)).epsilon(1e-14));

    const std::vector<double> sure{1.0, 1.0, 1.0};
    const auto s = social_belief_distribution(sure);
    CHECK(s.mass[0] == 1.0);
    CHECK(s.mass[1] + s.mass[2] + s.mass[3] == 0.0);

    const std::vector<double> mixed{0.9, 0.6, 0.3};
    const auto dp = social_belief_distribution(mixed);
    const auto brute = oracle::enumerate_mismatch(mixed);
    for (std::size_t n = 0; n <= 3; ++n) {
        CHECK(std::abs(dp.mass[n] - brute[n]) < 1e-12);
    }

    CHECK_THROWS_AS(social_belief_distribution(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(social_belief_distribution(std::vector<double>{0.5, 1.2}), std::invalid_argument);
}

TEST_CASE("social belief distribution matches enumeration for k <= 12") {
    Rng rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 1 + rng.index(12);
        std::vector<double> z(k);
        for (auto& v : z) {
            v = rng.uniform();
        }
        const auto dp = social_belief_distribution(z);
        const auto brute = oracle::enumerate_mismatch(z);
        for (std::size_t n = 0; n <= k; ++n) {
            worst = std::max(worst, std::abs(dp.mass[n] - brute[n]));
        }
        CHECK(std::accumulate(dp.mass.begin(), dp.mass.end(), 0.0) == doctest::Approx(1.0));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("expected utility") {
    CHECK(expected_utility(uninformed_sig, {}) == doctest::Approx(0.624).epsilon(1e-3));
    CHECK(expected_utility(SignalStructure::from_variance(0.49, 0.51, 0.1), {}) ==
          doctest::Approx(oracle::Phi(0.01 / std::sqrt(0.1))).epsilon(1e-12));
    CHECK(expected_utility(uninformed_sig, std::vector<double>(5, 1.0)) == 1.0);

    // Equal z: a binomial mixture of match probabilities.
    for (int k = 1; k <= 5; ++k) {
        for (double z : {0.2, 0.55, 0.9}) {
            double mix = 0.0;
            for (int n = 0; n <= k; ++n) {
                mix += binomial(k, n) * std::pow(1 - z, n) * std::pow(z, k - n) *
                       oracle::match_prob(0.4, 0.6, 0.1, double(n) / k);
            }
            CHECK(expected_utility(uninformed_sig, std::vector<double>(k, z)) ==
                  doctest::Approx(mix).epsilon(1e-12));
        }
    }

    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> z(1 + rng.index(15));
        for (auto& v : z) {
            v = rng.uniform();
        }
        const double u = expected_utility(informed_sig, z);
        CHECK(u >= 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("marginal utility") {
    const auto profiles = table_profiles();
    const UtilityEvaluator eval(profiles, UtilityModel{});
    const std::vector<NodeId> none;
    // First informed neighbour of an uninformed agent helps.
    CHECK(eval.marginal(10, none, 0) > 0.0);
    CHECK(eval.marginal(10, none, 0) ==
          doctest::Approx(marginal_utility(profiles, 10, none, 0, UtilityModel{})));
    // A single neighbour leaves an informed agent exactly at autarky.
    CHECK(std::abs(eval.marginal(0, none, 1)) < 1e-15);
    const std::vector<NodeId> hood{0, 3};
    CHECK_THROWS_AS(eval.marginal(10, hood, 3), std::invalid_argument);
    CHECK_THROWS_AS(eval.marginal(10, hood, 10), std::invalid_argument);
    CHECK(eval.swap_gain(10, hood, 5, 3) ==
          doctest::Approx(eval.utility(10, std::vector<NodeId>{0, 5}) - eval.utility(10, hood)));
}

TEST_CASE("selection weights") {
    const AgentProfile strong(informed_sig);
    const AgentProfile weak(uninformed_sig);
    const std::vector<AgentProfile> two{strong, weak};
    const auto w = selection_weights(two, 30.0);
    CHECK(w[0] / w[1] == doctest::Approx(std::exp(3.0)).epsilon(1e-10));
    CHECK(w[0] + w[1] == doctest::Approx(1.0));

    const auto flat = selection_weights(two, 0.0);
    CHECK(flat[0] == doctest::Approx(0.5));
    CHECK(flat[1] == doctest::Approx(0.5));

    const std::vector<AgentProfile> one{weak};
    CHECK(selection_weights(one, 30.0)[0] == 1.0);
    CHECK_THROWS_AS(selection_weights(std::vector<AgentProfile>{}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(selection_weights(two, -1.0), std::invalid_argument);
}

TEST_CASE("selection weights are shift invariant") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const double shift = 0.05 * rng.uniform();
        std::vector<AgentProfile> base;
        std::vector<AgentProfile> shifted;
        for (std::size_t c = 0; c < 1 + rng.index(10); ++c) {
            const double mu0 = 0.1 + 0.35 * rng.uniform();
            base.emplace_back(SignalStructure::from_variance(mu0, 1 - mu0, 0.1));
            // Lower mu0 by `shift`: strength grows by exactly `shift`.
            shifted.emplace_back(SignalStructure::from_variance(mu0 - shift, 1 - mu0 + shift, 0.1));
        }
        const double beta = 50.0 * rng.uniform();
        const auto a = selection_weights(base, beta);
        const auto b = selection_weights(shifted, beta);
        for (std::size_t c = 0; c < a.size(); ++c) {
            CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-9));
        }
    }
}

TEST_CASE("least informative neighbour") {
    const auto profiles = table_profiles();
    CHECK(least_informative(std::vector<NodeId>{0, 7}, profiles) == 7);
    CHECK(least_informative(std::vector<NodeId>{9, 7, 12}, profiles) == 7);
    CHECK(least_informative(std::vector<NodeId>{2}, profiles) == 2);
    CHECK_THROWS_AS(least_informative(std::vector<NodeId>{}, profiles), std::invalid_argument);
}

TEST_CASE("prohibitive costs give the empty network") {
    std::vector<AgentProfile> profiles(12, AgentProfile(uninformed_sig, 1e9));
    Rng rng(1);
    FormationOptions opt;
    opt.iterations = 200;
    const auto result = form_network(profiles, opt, rng);
    CHECK(result.graph.link_count() == 0);
    CHECK(result.events.size() == 200);
}

TEST_CASE("free homogeneous links with uniform choice") {
    std::vector<AgentProfile> profiles(20, AgentProfile(uninformed_sig, 0.0));
    FormationOptions opt;
    opt.beta = 0.0;
    opt.iterations = 300;
    Rng rng(2);
    const auto result = form_network(profiles, opt, rng);
    CHECK(result.graph.link_count() > 0);
    const auto replay = replay_formation(profiles, result.events, opt);
    CHECK(replay.failures.empty());
    CHECK(replay.graph == result.graph);
}

TEST_CASE("core-periphery structure from the informed/uninformed population") {
    const auto profiles = table_profiles();
    const FormationOptions opt;
    double informed = 0.0;
    double uninformed = 0.0;
    double rho = 0.0;
    const int networks = 40;
    for (int k = 0; k < networks; ++k) {
        Rng rng(1000 + k);
        const auto result = form_network(profiles, opt, rng);
        CHECK(result.events.size() == opt.iterations);
        const auto replay = replay_formation(profiles, result.events, opt);
        CHECK(replay.failures.empty());
        CHECK(replay.graph == result.graph);
        for (NodeId i = 0; i < 30; ++i) {
            (i < 4 ? informed : uninformed) += double(result.graph.degree(i));
        }
        rho += density(result.graph);
    }
    CHECK(informed / (4.0 * networks) > uninformed / (26.0 * networks));
    CHECK(rho / networks > 0.04);
    CHECK(rho / networks < 0.12);
}

TEST_CASE("strict acceptance never forms a link from the empty start") {
    FormationOptions opt;
    opt.accept_ties = false;
    for (int k = 0; k < 10; ++k) {
        Rng rng(k);
        CHECK(form_network(table_profiles(), opt, rng).graph.link_count() == 0);
    }
}

TEST_CASE("pruning leaves no profitable deletion") {
    const auto profiles = table_profiles();
    FormationOptions opt;
    opt.prune_unprofitable = true;
    const UtilityEvaluator eval(profiles, opt.model);
    std::vector<double> costs;
    for (const auto& p : profiles) {
        costs.push_back(p.cost);
    }
    for (int k = 0; k < 10; ++k) {
        Rng rng(500 + k);
        const auto result = form_network(profiles, opt, rng);
        const auto report = is_pairwise_stable(result.graph, eval.as_function(), costs);
        CHECK(report.count(StabilityViolationKind::deletion) == 0);
        const auto replay = replay_formation(profiles, result.events, opt);
        CHECK(replay.failures.empty());
        CHECK(replay.graph == result.graph);
    }
}

TEST_CASE("formation is deterministic for a seed") {
    Rng a(42);
    Rng b(42);
    const FormationOptions opt;
    CHECK(form_network(table_profiles(), opt, a).events ==
          form_network(table_profiles(), opt, b).events);
}

TEST_CASE("replay catches a tampered log") {
    const auto profiles = table_profiles();
    const FormationOptions opt;
    Rng rng(6);
    auto result = form_network(profiles, opt, rng);
    auto formed = std::find_if(result.events.begin(), result.events.end(), [](const auto& e) {
        return e.decision == FormationDecision::formed;
    });
    REQUIRE(formed != result.events.end());
    formed->gain_i += 1e-6;
    CHECK_FALSE(replay_formation(profiles, result.events, opt).failures.empty());
}

TEST_CASE("formation log round trip") {
    const auto profiles = table_profiles();
    FormationOptions opt;
    opt.prune_unprofitable = true;
    std::stringstream ss;
    write_formation_log_header(ss);
    std::vector<std::vector<FormationEvent>> logs;
    for (int k = 0; k < 3; ++k) {
        Rng rng(70 + k);
        logs.push_back(form_network(profiles, opt, rng).events);
        write_formation_log(ss, logs.back(), k);
    }
    CHECK(read_formation_log(ss) == logs);

    std::istringstream bad("network\titeration\ti\tj\tgain_i\tgain_j\tdrop_i\tdrop_j\tswap_gain_i\tswap_gain_j\tdecision\n0\t0\t1\t2\tx\t0\t-\t-\t0\t0\tformed\n");
    CHECK_THROWS_AS(read_formation_log(bad), std::runtime_error);
}

}  // TEST_SUITE
