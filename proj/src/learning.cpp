#include "contagion/learning.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

namespace contagion {

std::string_view to_string(WeightingScenario scenario) noexcept {
    switch (scenario) {
        case WeightingScenario::equal:
            return "equal";
        case WeightingScenario::neighborhood_size:
            return "neighborhood_size";
        case WeightingScenario::relative_neighborhood:
            return "relative_neighborhood";
    }
    return "unknown";
}

WeightingScenario parse_scenario(std::string_view text) {
    for (auto s : {WeightingScenario::equal, WeightingScenario::neighborhood_size,
                   WeightingScenario::relative_neighborhood}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw std::invalid_argument("unknown weighting scenario '" + std::string(text) + "'");
}

std::optional<Belief> social_belief(std::span<const Action> neighbor_actions) noexcept {
    if (neighbor_actions.empty()) {
        return std::nullopt;
    }
    std::size_t ones = 0;
    for (Action a : neighbor_actions) {
        ones += static_cast<std::size_t>(value(a));
    }
    return static_cast<double>(ones) / static_cast<double>(neighbor_actions.size());
}

namespace {

// Unchecked core of weight(); k > 0 implies a social belief.
double combine(WeightingScenario scenario, Belief p, Belief q, std::size_t k,
               std::size_t n) noexcept {
    if (k == 0) {
        return p;
    }
    const double dp = p - 0.5;
    const double dq = q - 0.5;
    const double kk = static_cast<double>(k);
    switch (scenario) {
        case WeightingScenario::equal:
            return 0.5 + 0.5 * (dp + dq);
        case WeightingScenario::neighborhood_size:
            return 0.5 + dp / (kk + 1.0) + dq * (kk / (kk + 1.0));
        case WeightingScenario::relative_neighborhood: {
            const double w = kk / static_cast<double>(n - 1);
            return 0.5 + (1.0 - w) * dp + w * dq;
        }
    }
    return p;
}

}  // namespace

double weight(WeightingScenario scenario, Belief p, std::optional<Belief> q, std::size_t k,
              std::size_t n) {
    if (q.has_value() != (k > 0)) {
        throw std::invalid_argument("weight: social belief must be present iff k > 0");
    }
    if (k > 0 && k + 1 > n) {
        throw std::invalid_argument("weight: more neighbours than other agents");
    }
    return combine(scenario, p, q.value_or(0.0), k, n);
}

double majority_threshold(WeightingScenario scenario, std::size_t k, double m, std::size_t n) {
    if (k == 0 || !(m >= 1.0)) {
        throw std::invalid_argument("majority_threshold: requires k >= 1 and m >= 1");
    }
    const double kk = static_cast<double>(k);
    const double inv = 1.0 / (1.0 + m);
    switch (scenario) {
        case WeightingScenario::equal:
            return kk * (1.0 - inv);
        case WeightingScenario::neighborhood_size:
            return kk / 2.0 + (0.5 - inv);
        case WeightingScenario::relative_neighborhood:
            return static_cast<double>(n - 1) * (0.5 - inv) + kk * inv;
    }
    return kk / 2.0;
}

bool contagion_flag(std::span<const Action> final_actions, WorldState theta, double fraction) {
    if (final_actions.empty()) {
        throw std::invalid_argument("contagion_flag: empty action vector");
    }
    const Action matching = to_action(theta == WorldState::one);
    std::size_t wrong = 0;
    for (Action a : final_actions) {
        wrong += a != matching ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(final_actions.size()) > fraction;
}

Population::Population(std::vector<AgentProfile> profiles, Graph graph, WorldState theta)
    : graph_(std::move(graph)), theta_(theta), active_((profiles.size() + 63) / 64, 0) {
    if (graph_.size() != profiles.size()) {
        throw std::invalid_argument("Population: graph size must equal the number of agents");
    }
    agents_.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        agents_.push_back(Agent{static_cast<NodeId>(i), profiles[i], Action::zero, 0.5, std::nullopt});
    }
}

std::vector<Action> Population::actions() const {
    std::vector<Action> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = agents_[i].action;
    }
    return out;
}

double Population::average_action() const noexcept {
    if (agents_.empty()) {
        return 0.0;
    }
    std::size_t ones = 0;
    for (auto w : active_) {
        ones += static_cast<std::size_t>(std::popcount(w));
    }
    return static_cast<double>(ones) / static_cast<double>(size());
}

std::size_t Population::active_neighbors(NodeId i) const {
    const auto row = graph_.row(i);
    std::size_t ones = 0;
    for (std::size_t w = 0; w < row.size(); ++w) {
        ones += static_cast<std::size_t>(std::popcount(row[w] & active_[w]));
    }
    return ones;
}

void Population::set_action(NodeId i, Action a) {
    agents_.at(i).action = a;
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    auto& word = active_[i / 64];
    word = a == Action::one ? (word | mask) : (word & ~mask);
}

void init_actions(Population& pop, Rng& rng, std::optional<double> bias) {
    if (pop.time_ != 0) {
        throw std::logic_error("init_actions: population already advanced past t = 0");
    }
    if (bias && !(*bias >= 0.0 && *bias <= 1.0)) {
        throw std::invalid_argument("init_actions: bias must lie in [0, 1]");
    }
    for (NodeId i = 0; i < pop.size(); ++i) {
        auto& agent = pop.agents_[i];
        const double s = sample_signal(agent.profile.signal, pop.theta_, rng);
        const Belief p = private_belief(agent.profile.signal, s);
        agent.last_private_belief = p;
        agent.last_social_belief.reset();
        Action a;
        if (bias) {
            a = to_action(rng.bernoulli(*bias));
        } else if (p == 0.5) {
            a = to_action(rng.bernoulli(0.5));
        } else {
            a = to_action(p > 0.5);
        }
        pop.set_action(i, a);
    }
}

void step_with_signals(Population& pop, WeightingScenario scenario,
                       std::span<const double> signals, std::span<const NodeId> order) {
    const std::size_t n = pop.size();
    if (signals.size() != n || order.size() != n) {
        throw std::invalid_argument("step_with_signals: one signal and one slot per agent");
    }
    const std::vector<std::uint64_t> snapshot = pop.active_;
    std::vector<std::uint64_t> next(snapshot.size(), 0);
    const Graph& g = pop.graph_;
    for (NodeId i : order) {
        auto& agent = pop.agents_.at(i);
        const Belief p = private_belief(agent.profile.signal, signals[i]);
        const std::size_t k = g.degree(i);
        double q = 0.0;
        if (k > 0) {
            const auto row = g.row(i);
            std::size_t ones = 0;
            for (std::size_t w = 0; w < row.size(); ++w) {
                ones += static_cast<std::size_t>(std::popcount(row[w] & snapshot[w]));
            }
            q = static_cast<double>(ones) / static_cast<double>(k);
        }
        const Action prev = to_action((snapshot[i / 64] >> (i % 64)) & 1U);
        const Action a = decide(combine(scenario, p, q, k, n), prev);
        agent.last_private_belief = p;
        agent.last_social_belief = k > 0 ? std::optional<Belief>(q) : std::nullopt;
        agent.action = a;
        if (a == Action::one) {
            next[i / 64] |= std::uint64_t{1} << (i % 64);
        }
    }
    pop.active_ = std::move(next);
    ++pop.time_;
}

void step(Population& pop, WeightingScenario scenario, Rng& rng) {
    std::vector<double> signals(pop.size());
    for (NodeId i = 0; i < pop.size(); ++i) {
        signals[i] = sample_signal(pop.agent(i).profile.signal, pop.theta(), rng);
    }
    std::vector<NodeId> order(pop.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    step_with_signals(pop, scenario, signals, order);
}

Trajectory run(Population& pop, WeightingScenario scenario, std::size_t steps, Rng& rng) {
    Trajectory traj;
    traj.actions.reserve(steps + 1);
    traj.average.reserve(steps + 1);
    traj.actions.push_back(pop.actions());
    traj.average.push_back(pop.average_action());
    for (std::size_t t = 0; t < steps; ++t) {
        step(pop, scenario, rng);
        traj.actions.push_back(pop.actions());
        traj.average.push_back(pop.average_action());
    }
    return traj;
}

std::optional<std::size_t> convergence_time(const Trajectory& traj, std::size_t window,
                                            double tol) {
    if (traj.length() <= window) {
        throw std::invalid_argument("convergence_time: trajectory not longer than the window");
    }
    for (std::size_t t = 0; t + window < traj.length(); ++t) {
        const auto& a = traj.actions[t];
        const auto& b = traj.actions[t + window];
        std::size_t changed = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            changed += a[i] != b[i] ? 1 : 0;
        }
        if (static_cast<double>(changed) / static_cast<double>(a.size()) < tol) {
            return t;
        }
    }
    return std::nullopt;
}

}  // namespace contagion
