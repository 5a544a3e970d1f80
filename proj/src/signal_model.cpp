#include "contagion/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace contagion {

SignalStructure::SignalStructure(double mu0, double mu1, double sigma)
    : mu0_(mu0), mu1_(mu1), sigma_(sigma) {
    if (!std::isfinite(mu0) || !std::isfinite(mu1)) {
        throw std::invalid_argument("SignalStructure: means must be finite");
    }
    if (!std::isfinite(sigma) || !(sigma > 0.0)) {
        throw std::invalid_argument("SignalStructure: sigma must be positive and finite");
    }
}

SignalStructure SignalStructure::from_variance(double mu0, double mu1, double sigma2) {
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("SignalStructure: variance must be positive");
    }
    return SignalStructure(mu0, mu1, std::sqrt(sigma2));
}

double SignalStructure::strength() const noexcept { return std::abs(0.5 - mu0_); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double sample_signal(const SignalStructure& sig, WorldState theta, Rng& rng) {
    return rng.normal(sig.mean(theta), sig.sigma());
}

double log_likelihood_ratio(const SignalStructure& sig, double s) noexcept {
    const double var = sig.sigma() * sig.sigma();
    return (sig.mu1() - sig.mu0()) * (2.0 * s - sig.mu0() - sig.mu1()) / (2.0 * var);
}

Belief private_belief(const SignalStructure& sig, double s) noexcept {
    return 1.0 / (1.0 + std::exp(-log_likelihood_ratio(sig, s)));
}

double belief_inverse(const SignalStructure& sig, Belief p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("belief_inverse: belief must lie strictly inside (0, 1)");
    }
    if (!sig.informative()) {
        throw std::domain_error("belief_inverse: uninformative signal structure");
    }
    const double mu0 = sig.mu0();
    const double mu1 = sig.mu1();
    const double var = sig.sigma() * sig.sigma();
    return (mu0 * mu0 - mu1 * mu1 + 2.0 * var * std::log((1.0 - p) / p)) / (2.0 * (mu0 - mu1));
}

double belief_pdf(const SignalStructure& sig, Belief p, WorldState theta) {
    if (!sig.informative()) {
        throw std::domain_error("belief_pdf: uninformative signal structure has no density");
    }
    if (!(p > 0.0 && p < 1.0)) {
        return 0.0;
    }
    const double var = sig.sigma() * sig.sigma();
    const double jacobian = var / (std::abs(sig.mu1() - sig.mu0()) * p * (1.0 - p));
    const double z = (belief_inverse(sig, p) - sig.mean(theta)) / sig.sigma();
    return jacobian * normal_pdf(z) / sig.sigma();
}

double state_match_prob(const SignalStructure& sig, Belief q) noexcept {
    if (!(q > 0.0)) {
        return 1.0;
    }
    if (!(q < 1.0)) {
        return 0.0;
    }
    if (!sig.informative()) {
        if (q == 0.5) {
            return 0.5;
        }
        return q < 0.5 ? 1.0 : 0.0;
    }
    // p(s) is monotone, so {p < 1 - q} is a half-line in signal space.
    const double z = (belief_inverse(sig, 1.0 - q) - sig.mu0()) / sig.sigma();
    return sig.mu1() > sig.mu0() ? normal_cdf(z) : normal_cdf(-z);
}

}  // namespace contagion
