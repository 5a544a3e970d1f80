#pragma once

// Gaussian private signals and the beliefs they induce.
//
// Under state θ an agent observes s ~ Normal(mu_θ, sigma). The private belief
// is the Bayes posterior Pr(θ = 1 | s); for equal variances it is a logistic
// function of s, so the signal-to-belief map is invertible whenever the two
// means differ. All functions here are pure.

#include <cstdint>

#include "contagion/rng.hpp"

namespace contagion {

enum class WorldState : std::uint8_t { zero = 0, one = 1 };

/// Probability in [0, 1].
using Belief = double;

class SignalStructure {
public:
    /// Throws std::invalid_argument unless sigma > 0 and all values are finite.
    /// Equal means are accepted: such a structure is uninformative (every
    /// private belief is exactly 1/2). Operations that need an invertible
    /// belief map reject it.
    SignalStructure(double mu0, double mu1, double sigma);

    static SignalStructure from_variance(double mu0, double mu1, double sigma2);

    double mu0() const noexcept { return mu0_; }
    double mu1() const noexcept { return mu1_; }
    double sigma() const noexcept { return sigma_; }
    double mean(WorldState theta) const noexcept {
        return theta == WorldState::zero ? mu0_ : mu1_;
    }
    bool informative() const noexcept { return mu0_ != mu1_; }

    /// |1/2 - mu0|, the signal-strength proxy used to rank agents.
    double strength() const noexcept;

    friend bool operator==(const SignalStructure&, const SignalStructure&) = default;

private:
    double mu0_;
    double mu1_;
    double sigma_;
};

double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

double sample_signal(const SignalStructure& sig, WorldState theta, Rng& rng);

/// log f1(s)/f0(s).
double log_likelihood_ratio(const SignalStructure& sig, double s) noexcept;

/// Pr(θ = 1 | s) = (1 + f0(s)/f1(s))^-1.
Belief private_belief(const SignalStructure& sig, double s) noexcept;

/// Signal s with private_belief(sig, s) == p. Throws std::domain_error for
/// p outside (0, 1) (the signal would be infinite) or an uninformative sig.
double belief_inverse(const SignalStructure& sig, Belief p);

/// Density of the private belief under state θ, obtained from the signal
/// density by the change of variables p -> s(p):
///   f_p(p | θ) = |ds/dp| f_s(s(p) | θ),  ds/dp = sigma^2 / ((mu1 - mu0) p (1 - p)).
/// Returns 0 for p <= 0 or p >= 1. Throws std::domain_error for an
/// uninformative sig (the belief is a point mass).
double belief_pdf(const SignalStructure& sig, Belief p, WorldState theta);

/// Probability of choosing the state-matching action under equal weighting
/// when a fraction q of neighbours takes the non-matching action:
///   Pr(p < 1 - q | θ = 0) = Φ((s(1 - q) - mu0) / sigma)   (mu1 > mu0).
/// q is clamped to [0, 1]; q = 0 gives 1 and q = 1 gives 0. For an
/// uninformative structure the result is the step 1[q < 1/2] with the
/// limiting value 1/2 at q = 1/2.
double state_match_prob(const SignalStructure& sig, Belief q) noexcept;

}  // namespace contagion
