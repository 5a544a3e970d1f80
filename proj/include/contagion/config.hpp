#pragma once

// Experiment configuration and its flat `key = value` text form.
//
// Precedence, lowest to highest: preset selected by `config`, other keys in
// the file (in any order), command-line overrides. The `config` key is
// always applied first regardless of where it appears.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "contagion/agent.hpp"
#include "contagion/learning.hpp"

namespace contagion {

/// A configuration problem tied to one key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct SimulationConfig {
    /// I, U, H, ENDO or custom.
    std::string id = "custom";
    std::uint64_t seed = 0;

    std::size_t agents = 100;
    std::size_t steps = 100;
    /// S: simulations per grid point (sweeps) or per bias level (ENDO).
    std::size_t replicas = 1000;
    WeightingScenario scenario = WeightingScenario::equal;

    double rho_min = 0.0;
    double rho_max = 0.95;
    std::size_t rho_steps = 20;

    /// Signal of the base (uninformed) class.
    double mu0 = 0.4;
    double mu1 = 0.6;
    double sigma2 = 0.1;
    /// Signal of the informed class.
    double informed_mu0 = 0.3;
    double informed_mu1 = 0.7;
    double informed_sigma2 = 0.1;

    /// Probability that an agent is informed, swept over a grid. Zero steps
    /// means every agent uses the base class.
    double p_informed_min = 0.0;
    double p_informed_max = 0.0;
    std::size_t p_informed_steps = 0;

    /// Initialisation bias for sweeps; nullopt means autarky initialisation.
    std::optional<double> bias;

    double contagion_fraction = 0.8;
    std::size_t conv_window = 15;
    double conv_tol = 0.05;
    std::size_t fvi_bins = 20;

    // Endogenous networks.
    std::size_t informed_agents = 4;
    std::size_t uninformed_agents = 26;
    double informed_cost = 0.0;
    double uninformed_cost = 0.1;
    std::size_t formation_iters = 400;
    double q_prime = 0.5;
    double beta = 30.0;
    std::size_t networks = 1000;
    /// ER comparator density; nullopt = measured mean density of the
    /// formed ensemble.
    std::optional<double> er_density;
    std::vector<double> bias_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    bool accept_ties = true;
    bool prune_unprofitable = false;

    std::vector<double> rho_grid() const;
    /// Empty when p_informed_steps == 0.
    std::vector<double> p_informed_grid() const;
    SignalStructure base_signal() const;
    SignalStructure informed_signal() const;

    /// Throws ConfigError naming the first offending key.
    void validate() const;
};

/// Presets: "I", "U", "H", "ENDO", or "custom" (defaults).
SimulationConfig preset(std::string_view id);

/// Sets one key from its text value. Throws ConfigError for unknown keys
/// and malformed values.
void apply_setting(SimulationConfig& cfg, std::string_view key, std::string_view value);

/// Parses the file form; see the header comment for precedence. Throws
/// ConfigError.
SimulationConfig parse_config(std::istream& in);

/// Applies "key=value" overrides in order.
void apply_overrides(SimulationConfig& cfg, const std::vector<std::string>& overrides);

/// Canonical text form: every key, one per line, in a fixed order.
std::string to_text(const SimulationConfig& cfg);

/// FNV-1a 64 of to_text(cfg).
std::uint64_t config_hash(const SimulationConfig& cfg);

/// Endogenous-network population: informed agents first, then uninformed.
std::vector<AgentProfile> endo_profiles(const SimulationConfig& cfg);

}  // namespace contagion
