#pragma once

// Synchronous social-learning dynamics on a fixed network.
//
// At t = 0 every agent acts on its private belief alone. At each later step
// every agent draws a fresh signal, forms its private belief p and a social
// belief q (mean of its neighbours' previous actions), combines them with a
// weighting function t(p, q) and plays 1 iff t > 1/2. All agents update
// against the same pre-step snapshot of actions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "contagion/agent.hpp"
#include "contagion/graph.hpp"
#include "contagion/rng.hpp"
#include "contagion/signal_model.hpp"

namespace contagion {

enum class Action : std::uint8_t { zero = 0, one = 1 };

constexpr Action to_action(bool one) noexcept { return one ? Action::one : Action::zero; }
constexpr int value(Action a) noexcept { return static_cast<int>(a); }

enum class WeightingScenario { equal, neighborhood_size, relative_neighborhood };

std::string_view to_string(WeightingScenario scenario) noexcept;
/// Accepts "equal", "neighborhood_size", "relative_neighborhood".
/// Throws std::invalid_argument otherwise.
WeightingScenario parse_scenario(std::string_view text);

/// Mean of the neighbours' actions; nullopt when there are no neighbours.
std::optional<Belief> social_belief(std::span<const Action> neighbor_actions) noexcept;

/// Decision statistic t(p, q) for an agent with k neighbours in a population
/// of n agents. With k = 0 the result is p in every scenario.
///
/// Computed as 1/2 + (weighted deviation from 1/2) so that a statistic sitting
/// exactly on the threshold compares equal to 1/2 regardless of the weights.
///
/// Throws std::invalid_argument if q is present with k = 0, absent with
/// k > 0, or if k > n - 1.
double weight(WeightingScenario scenario, Belief p, std::optional<Belief> q, std::size_t k,
              std::size_t n);

/// 1 above 1/2, 0 below; an exact tie keeps the previous action.
constexpr Action decide(double t, Action previous) noexcept {
    if (t > 0.5) {
        return Action::one;
    }
    if (t < 0.5) {
        return Action::zero;
    }
    return previous;
}

/// Smallest neighbour count playing 1 that must be strictly exceeded for an
/// agent with likelihood ratio m = f0/f1 >= 1 to play 1.
double majority_threshold(WeightingScenario scenario, std::size_t k, double m, std::size_t n);

/// True iff the fraction of agents playing the non-matching action strictly
/// exceeds `fraction`.
bool contagion_flag(std::span<const Action> final_actions, WorldState theta,
                    double fraction = 0.8);

struct Agent {
    NodeId id;
    AgentProfile profile;
    Action action = Action::zero;
    Belief last_private_belief = 0.5;
    std::optional<Belief> last_social_belief;
};

/// Agents, their fixed network, the step counter and the true state.
class Population {
public:
    /// Throws std::invalid_argument if the graph size differs from the
    /// number of profiles.
    Population(std::vector<AgentProfile> profiles, Graph graph,
               WorldState theta = WorldState::zero);

    std::size_t size() const noexcept { return agents_.size(); }
    const Graph& graph() const noexcept { return graph_; }
    WorldState theta() const noexcept { return theta_; }
    std::size_t time() const noexcept { return time_; }

    std::span<const Agent> agents() const noexcept { return agents_; }
    const Agent& agent(NodeId i) const { return agents_.at(i); }
    Action action(NodeId i) const { return agents_.at(i).action; }
    std::vector<Action> actions() const;
    /// Fraction of agents playing 1.
    double average_action() const noexcept;

    /// Number of i's neighbours currently playing 1.
    std::size_t active_neighbors(NodeId i) const;

    void set_action(NodeId i, Action a);

private:
    friend void init_actions(Population&, Rng&, std::optional<double>);
    friend void step_with_signals(Population&, WeightingScenario, std::span<const double>,
                                  std::span<const NodeId>);

    std::vector<Agent> agents_;
    Graph graph_;
    WorldState theta_;
    std::size_t time_ = 0;
    std::vector<std::uint64_t> active_;  // bit i set iff agent i plays 1
};

/// Autarky initialisation: each agent draws a signal and acts on its private
/// belief (an exact tie at 1/2, possible only for uninformative signals, is
/// settled by a fair coin). With `bias` set, beliefs are still drawn and
/// recorded but each action is overridden to 1 with probability `bias`.
/// Throws std::logic_error if time != 0 and std::invalid_argument for a bias
/// outside [0, 1].
void init_actions(Population& pop, Rng& rng, std::optional<double> bias = std::nullopt);

/// One synchronous update. Signals are drawn in agent-index order.
void step(Population& pop, WeightingScenario scenario, Rng& rng);

/// One synchronous update with pre-drawn signals (signals[i] for agent i),
/// visiting agents in `order`. The result does not depend on `order`.
void step_with_signals(Population& pop, WeightingScenario scenario,
                       std::span<const double> signals, std::span<const NodeId> order);

struct Trajectory {
    /// actions[t][i] for t = 0..T.
    std::vector<std::vector<Action>> actions;
    /// Fraction playing 1 at each recorded step.
    std::vector<double> average;

    std::size_t length() const noexcept { return actions.size(); }
    double initial_average() const { return average.front(); }
    double final_average() const { return average.back(); }
};

/// Records the current state and then applies `steps` updates.
Trajectory run(Population& pop, WeightingScenario scenario, std::size_t steps, Rng& rng);

/// First t with sum_i |x_i(t) - x_i(t + window)| / N < tol, or nullopt if no
/// t <= length - 1 - window qualifies. Throws std::invalid_argument when the
/// trajectory is not longer than the window.
std::optional<std::size_t> convergence_time(const Trajectory& traj, std::size_t window = 15,
                                            double tol = 0.05);

}  // namespace contagion
