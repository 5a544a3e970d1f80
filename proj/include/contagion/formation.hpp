#pragma once

// Expected utility of a neighbourhood and the endogenous link-formation
// process.
//
// An agent values a neighbourhood by its probability of matching the state
// under equal weighting, averaging over the social beliefs the neighbourhood
// can produce. Neighbours are assumed to act independently, each matching the
// state with probability z_j = state_match_prob(sig_j, q') for a fixed belief
// q' about their own social beliefs.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "contagion/agent.hpp"
#include "contagion/graph.hpp"
#include "contagion/rng.hpp"

namespace contagion {

struct UtilityModel {
    /// Assumed social belief of every neighbour.
    Belief q_prime = 0.5;
};

/// z_j for a neighbour with the given profile.
double neighbor_match_prob(const AgentProfile& neighbor, Belief q_prime);

/// Distribution of q = (number of non-matching neighbours) / k.
struct SocialBeliefDistribution {
    /// mass[n] = Pr(q = n / k), n = 0..k.
    std::vector<double> mass;

    std::size_t neighbors() const noexcept { return mass.size() - 1; }
    Belief support(std::size_t n) const noexcept {
        return static_cast<double>(n) / static_cast<double>(neighbors());
    }
};

/// Poisson-binomial convolution over neighbours; neighbour j is non-matching
/// with probability 1 - z[j]. O(k^2). Throws std::invalid_argument for an
/// empty vector or z outside [0, 1].
SocialBeliefDistribution social_belief_distribution(std::span<const double> z);

/// Expected utility given the neighbours' match probabilities. With no
/// neighbours this is the autarky match probability Pr(p < 1/2 | θ = 0).
double expected_utility(const SignalStructure& self, std::span<const double> z);

double expected_utility(const AgentProfile& self, std::span<const AgentProfile> neighbors,
                        const UtilityModel& model);

/// Utilities of neighbourhoods within a fixed population. The neighbour
/// match probabilities are computed once at construction.
class UtilityEvaluator {
public:
    UtilityEvaluator(std::vector<AgentProfile> profiles, UtilityModel model);

    std::size_t size() const noexcept { return profiles_.size(); }
    const std::vector<AgentProfile>& profiles() const noexcept { return profiles_; }
    const UtilityModel& model() const noexcept { return model_; }
    double match_prob(NodeId j) const { return z_.at(j); }

    /// Expected utility of agent i with neighbourhood `hood` (i must not be
    /// in it).
    double utility(NodeId i, std::span<const NodeId> hood) const;

    /// utility(i, hood + j) - utility(i, hood). Throws std::invalid_argument if
    /// j is i or already in `hood`.
    double marginal(NodeId i, std::span<const NodeId> hood, NodeId j) const;

    /// utility(i, hood + add - drop) - utility(i, hood).
    double swap_gain(NodeId i, std::span<const NodeId> hood, NodeId add, NodeId drop) const;

    NeighborhoodUtility as_function() const;

private:
    std::vector<AgentProfile> profiles_;
    UtilityModel model_;
    std::vector<double> z_;
};

double marginal_utility(std::span<const AgentProfile> profiles, NodeId i,
                        std::span<const NodeId> hood, NodeId j, const UtilityModel& model);

/// Softmax of beta * strength over the candidates. Throws
/// std::invalid_argument for an empty list or negative beta.
std::vector<double> selection_weights(std::span<const AgentProfile> candidates, double beta);

/// Neighbour with the smallest strength; ties go to the lowest id. Throws
/// std::invalid_argument for an empty neighbourhood.
NodeId least_informative(std::span<const NodeId> hood, std::span<const AgentProfile> profiles);

struct FormationOptions {
    std::size_t iterations = 400;
    double beta = 30.0;
    UtilityModel model{};
    /// A side accepts a link when its gain reaches its cost (gain >= cost -
    /// tol). When false the gain must exceed the cost (gain > cost + tol).
    bool accept_ties = true;
    double tol = 1e-12;
    /// After every formed link, let each agent whose neighbourhood changed
    /// cut links whose utility no longer covers their cost, cascading until
    /// no agent gains more than tol from a deletion.
    bool prune_unprofitable = false;

    bool clears(double gain, double cost) const noexcept {
        return accept_ties ? gain >= cost - tol : gain > cost + tol;
    }
};

enum class FormationDecision { formed, rejected, skipped, deleted };

/// One iteration of the formation process. For a side whose plain gain did
/// not clear its cost, `drop_*` names the least-informative neighbour whose
/// replacement was evaluated and `swap_gain_*` the resulting gain. In a
/// formed event a set `drop_*` means that link was removed. A deleted event
/// records agent i cutting its link to j with net gain `gain_i` (cost saved
/// minus utility lost).
struct FormationEvent {
    std::size_t iteration = 0;
    NodeId i = 0;
    std::optional<NodeId> j;
    double gain_i = 0.0;
    double gain_j = 0.0;
    std::optional<NodeId> drop_i;
    std::optional<NodeId> drop_j;
    double swap_gain_i = 0.0;
    double swap_gain_j = 0.0;
    FormationDecision decision = FormationDecision::skipped;

    friend bool operator==(const FormationEvent&, const FormationEvent&) = default;
};

struct FormationResult {
    Graph graph;
    std::vector<FormationEvent> events;
};

/// Runs `iterations` rounds starting from the empty graph. Each round picks
/// i uniformly, then j among non-neighbours by selection_weights, and forms
/// the link iff both sides accept it, either outright or after replacing
/// their least-informative neighbour (one attempt per side). Rounds where i
/// is linked to everyone are skipped but still counted. With
/// prune_unprofitable, each formed link is followed by the deletion cascade;
/// its deleted events share the round's iteration number.
FormationResult form_network(std::span<const AgentProfile> profiles,
                             const FormationOptions& options, Rng& rng);

struct ReplayReport {
    Graph graph;
    std::size_t formed = 0;
    std::size_t deleted = 0;
    /// Indices of formed events that were not mutually acceptable when
    /// replayed, deleted events that were not profitable for the deleting
    /// agent, and events whose logged gains disagree with recomputation.
    std::vector<std::size_t> failures;
};

/// Rebuilds the graph from a formation log and re-checks every formed link
/// against the acceptance rule.
ReplayReport replay_formation(std::span<const AgentProfile> profiles,
                              std::span<const FormationEvent> events,
                              const FormationOptions& options);

/// Tab-separated log, one event per line:
///   network iteration i j gain_i gain_j drop_i drop_j swap_gain_i swap_gain_j decision
/// Absent values are written as "-".
void write_formation_log_header(std::ostream& out);
void write_formation_log(std::ostream& out, std::span<const FormationEvent> events,
                         std::size_t network);
/// Events grouped by network id, in file order. Throws std::runtime_error on
/// malformed lines.
std::vector<std::vector<FormationEvent>> read_formation_log(std::istream& in);

}  // namespace contagion
