#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "contagion/signal_model.hpp"
#include "oracles.hpp"

using namespace contagion;

namespace {

double integrate(const auto& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

SignalStructure config_i() { return SignalStructure::from_variance(0.4, 0.6, 0.1); }

}  // namespace

TEST_SUITE("signal_model") {

TEST_CASE("structure validation") {
    CHECK_THROWS_AS(SignalStructure(0.4, 0.6, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SignalStructure(0.4, 0.6, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(SignalStructure(NAN, 0.6, 1.0), std::invalid_argument);
    CHECK_FALSE(SignalStructure(0.5, 0.5, 0.3).informative());
    CHECK(config_i().sigma() == doctest::Approx(std::sqrt(0.1)));
    CHECK(config_i().strength() == doctest::Approx(0.1));
}

TEST_CASE("sample means") {
    Rng rng(7);
    const auto u = SignalStructure::from_variance(0.49, 0.51, 0.1);
    double s0 = 0.0;
    double s1 = 0.0;
    const int n = 1'000'000;
    for (int k = 0; k < n; ++k) {
        s0 += sample_signal(config_i(), WorldState::zero, rng);
        s1 += sample_signal(u, WorldState::one, rng);
    }
    CHECK(std::abs(s0 / n - 0.4) < 1e-3);
    CHECK(std::abs(s1 / n - 0.51) < 1e-3);

    const SignalStructure tight(0.4, 0.6, 1e-9);
    CHECK(sample_signal(tight, WorldState::zero, rng) == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("private belief values") {
    const auto sig = config_i();
    CHECK(private_belief(sig, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(private_belief(sig, 1.0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));
    CHECK(private_belief(sig, 1.0) == doctest::Approx(0.7311).epsilon(1e-4));
    CHECK(private_belief(SignalStructure(0.5, 0.5, 0.3), -3.0) == 0.5);
    CHECK(private_belief(SignalStructure(0.5, 0.5 + 1e-12, 0.3), 4.0) == doctest::Approx(0.5));
}

TEST_CASE("belief inverse") {
    const auto sig = config_i();
    CHECK(belief_inverse(sig, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(belief_inverse(sig, 0.7311) == doctest::Approx(1.0).epsilon(1e-3));
    for (double s = -2.0; s <= 3.0; s += 0.05) {
        CHECK(std::abs(belief_inverse(sig, private_belief(sig, s)) - s) < 1e-10);
    }
    CHECK_THROWS_AS(belief_inverse(sig, 0.0), std::domain_error);
    CHECK_THROWS_AS(belief_inverse(sig, 1.0), std::domain_error);
    CHECK_THROWS_AS(belief_inverse(SignalStructure(0.5, 0.5, 1.0), 0.3), std::domain_error);
}

TEST_CASE("belief is increasing in the signal") {
    const auto sig = config_i();
    double prev = private_belief(sig, -3.0);
    for (double s = -2.99; s < 4.0; s += 0.01) {
        const double p = private_belief(sig, s);
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("pdf normalisation and mass left of one half") {
    for (double mu0 : {0.3, 0.4, 0.48, 0.1}) {
        const auto sig = SignalStructure::from_variance(mu0, 1.0 - mu0, 0.1);
        for (auto theta : {WorldState::zero, WorldState::one}) {
            const double total =
                integrate([&](double p) { return belief_pdf(sig, p, theta); }, 0.0, 1.0);
            CHECK(std::abs(total - 1.0) < 1e-6);
        }
        const double left =
            integrate([&](double p) { return belief_pdf(sig, p, WorldState::zero); }, 0.0, 0.5);
        CHECK(left > 0.5);
    }
    // Asymmetric structure.
    const auto asym = SignalStructure::from_variance(0.4, 0.7, 0.05);
    CHECK(std::abs(integrate([&](double p) { return belief_pdf(asym, p, WorldState::zero); },
                             0.0, 1.0) -
                   1.0) < 1e-6);
    CHECK(belief_pdf(asym, 0.0, WorldState::zero) == 0.0);
    CHECK(belief_pdf(asym, 1.0, WorldState::one) == 0.0);
    CHECK_THROWS_AS(belief_pdf(SignalStructure(0.5, 0.5, 1.0), 0.3, WorldState::zero),
                    std::domain_error);
}

TEST_CASE("pdf matches Monte Carlo histogram") {
    const int bins = 100;
    const int draws = 1'000'000;
    for (double mu0 : {0.3, 0.4, 0.48}) {
        const auto sig = SignalStructure::from_variance(mu0, 1.0 - mu0, 0.1);
        Rng rng(11);
        std::vector<double> hist(bins, 0.0);
        for (int k = 0; k < draws; ++k) {
            const double p = private_belief(sig, sample_signal(sig, WorldState::zero, rng));
            hist[std::min(bins - 1, static_cast<int>(p * bins))] += 1.0;
        }
        double l1 = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double lo = double(b) / bins;
            const double hi = double(b + 1) / bins;
            const double expected =
                integrate([&](double p) { return belief_pdf(sig, p, WorldState::zero); }, lo, hi);
            l1 += std::abs(hist[b] / draws - expected);
        }
        CAPTURE(mu0);
        CHECK(l1 < 0.02);
    }
}

TEST_CASE("Bayes plausibility for symmetric structures") {
    for (double mu0 : {0.3, 0.4, 0.45}) {
        const auto sig = SignalStructure::from_variance(mu0, 1.0 - mu0, 0.1);
        const double e0 = integrate([&](double p) { return p * belief_pdf(sig, p, WorldState::zero); }, 0.0, 1.0);
        const double e1 = integrate([&](double p) { return p * belief_pdf(sig, p, WorldState::one); }, 0.0, 1.0);
        CHECK(std::abs(e0 + e1 - 1.0) < 1e-4);
    }
}

TEST_CASE("state match probability") {
    const auto sig = config_i();
    CHECK(state_match_prob(sig, 0.0) == 1.0);
    CHECK(state_match_prob(sig, 1.0) == 0.0);
    CHECK(state_match_prob(sig, 0.5) == doctest::Approx(oracle::Phi(0.1 / std::sqrt(0.1))).epsilon(1e-12));
    CHECK(state_match_prob(sig, 0.5) == doctest::Approx(0.624).epsilon(1e-3));
    for (double q = 0.05; q < 1.0; q += 0.05) {
        CHECK(state_match_prob(sig, q) ==
              doctest::Approx(oracle::match_prob(0.4, 0.6, 0.1, q)).epsilon(1e-12));
        const double integral =
            integrate([&](double p) { return belief_pdf(sig, p, WorldState::zero); }, 0.0, 1.0 - q);
        CHECK(std::abs(state_match_prob(sig, q) - integral) < 1e-8);
    }
    // Uninformative limit: majority rule.
    const SignalStructure flat(0.5, 0.5, 0.3);
    CHECK(state_match_prob(flat, 0.4) == 1.0);
    CHECK(state_match_prob(flat, 0.5) == 0.5);
    CHECK(state_match_prob(flat, 0.6) == 0.0);
}

TEST_CASE("state match probability is nonincreasing in q") {
    for (double mu0 : {0.3, 0.4, 0.49}) {
        const auto sig = SignalStructure::from_variance(mu0, 1.0 - mu0, 0.1);
        double prev = 1.0;
        for (int k = 0; k <= 1000; ++k) {
            const double v = state_match_prob(sig, k / 1000.0);
            CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("dual integral identity") {
    // With q the fraction of neighbours on the non-matching action in either
    // state, matching under θ = 0 needs p < 1 - q and under θ = 1 needs p > q.
    for (double mu0 : {0.3, 0.4, 0.48}) {
        const auto sig = SignalStructure::from_variance(mu0, 1.0 - mu0, 0.1);
        for (int k = 1; k <= 20; ++k) {
            const double q = k / 21.0;
            const double zero =
                integrate([&](double p) { return belief_pdf(sig, p, WorldState::zero); }, 0.0, 1.0 - q);
            const double one =
                integrate([&](double p) { return belief_pdf(sig, p, WorldState::one); }, q, 1.0);
            CHECK(std::abs(zero - one) < 1e-6);
        }
    }
}

}  // TEST_SUITE
