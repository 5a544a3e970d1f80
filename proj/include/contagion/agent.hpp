#pragma once

#include "contagion/signal_model.hpp"

namespace contagion {

/// Static description of a bank: its signal structure, the cost it pays per
/// link, and whether it belongs to the informed class.
struct AgentProfile {
    /// Throws std::invalid_argument for a negative or NaN cost.
    explicit AgentProfile(SignalStructure signal, double cost = 0.0, bool informed = false);

    SignalStructure signal;
    double cost;
    bool informed;

    /// |1/2 - mu0|.
    double strength() const noexcept { return signal.strength(); }

    friend bool operator==(const AgentProfile&, const AgentProfile&) = default;
};

}  // namespace contagion
