#include "contagion/formation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "contagion/format.hpp"

namespace contagion {

double neighbor_match_prob(const AgentProfile& neighbor, Belief q_prime) {
    if (!(q_prime >= 0.0 && q_prime <= 1.0)) {
        throw std::invalid_argument("neighbor_match_prob: q' must lie in [0, 1]");
    }
    return state_match_prob(neighbor.signal, q_prime);
}

SocialBeliefDistribution social_belief_distribution(std::span<const double> z) {
    if (z.empty()) {
        throw std::invalid_argument("social_belief_distribution: no neighbours");
    }
    SocialBeliefDistribution dist;
    dist.mass.assign(z.size() + 1, 0.0);
    dist.mass[0] = 1.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double match = z[j];
        if (!(match >= 0.0 && match <= 1.0)) {
            throw std::invalid_argument("social_belief_distribution: z outside [0, 1]");
        }
        const double miss = 1.0 - match;
        for (std::size_t n = j + 1; n > 0; --n) {
            dist.mass[n] = dist.mass[n] * match + dist.mass[n - 1] * miss;
        }
        dist.mass[0] *= match;
    }
    return dist;
}

double expected_utility(const SignalStructure& self, std::span<const double> z) {
    if (z.empty()) {
        return state_match_prob(self, 0.5);
    }
    const auto dist = social_belief_distribution(z);
    double u = 0.0;
    for (std::size_t n = 0; n < dist.mass.size(); ++n) {
        u += dist.mass[n] * state_match_prob(self, dist.support(n));
    }
    return u;
}

double expected_utility(const AgentProfile& self, std::span<const AgentProfile> neighbors,
                        const UtilityModel& model) {
    std::vector<double> z;
    z.reserve(neighbors.size());
    for (const auto& nb : neighbors) {
        z.push_back(neighbor_match_prob(nb, model.q_prime));
    }
    return expected_utility(self.signal, z);
}

UtilityEvaluator::UtilityEvaluator(std::vector<AgentProfile> profiles, UtilityModel model)
    : profiles_(std::move(profiles)), model_(model) {
    z_.reserve(profiles_.size());
    for (const auto& p : profiles_) {
        z_.push_back(neighbor_match_prob(p, model_.q_prime));
    }
}

double UtilityEvaluator::utility(NodeId i, std::span<const NodeId> hood) const {
    std::vector<double> z;
    z.reserve(hood.size());
    for (NodeId m : hood) {
        z.push_back(z_.at(m));
    }
    return expected_utility(profiles_.at(i).signal, z);
}

double UtilityEvaluator::marginal(NodeId i, std::span<const NodeId> hood, NodeId j) const {
    if (i == j || std::find(hood.begin(), hood.end(), j) != hood.end()) {
        throw std::invalid_argument("marginal: candidate already in the neighbourhood");
    }
    std::vector<NodeId> grown(hood.begin(), hood.end());
    grown.insert(std::lower_bound(grown.begin(), grown.end(), j), j);
    return utility(i, grown) - utility(i, hood);
}

double UtilityEvaluator::swap_gain(NodeId i, std::span<const NodeId> hood, NodeId add,
                                   NodeId drop) const {
    std::vector<NodeId> swapped;
    swapped.reserve(hood.size());
    for (NodeId m : hood) {
        if (m != drop) {
            swapped.push_back(m);
        }
    }
    swapped.insert(std::lower_bound(swapped.begin(), swapped.end(), add), add);
    return utility(i, swapped) - utility(i, hood);
}

NeighborhoodUtility UtilityEvaluator::as_function() const {
    return [this](NodeId i, std::span<const NodeId> hood) { return utility(i, hood); };
}

double marginal_utility(std::span<const AgentProfile> profiles, NodeId i,
                        std::span<const NodeId> hood, NodeId j, const UtilityModel& model) {
    const UtilityEvaluator eval({profiles.begin(), profiles.end()}, model);
    return eval.marginal(i, hood, j);
}

std::vector<double> selection_weights(std::span<const AgentProfile> candidates, double beta) {
    if (candidates.empty()) {
        throw std::invalid_argument("selection_weights: no candidates");
    }
    if (!(beta >= 0.0)) {
        throw std::invalid_argument("selection_weights: beta must be non-negative");
    }
    double top = candidates.front().strength();
    for (const auto& c : candidates) {
        top = std::max(top, c.strength());
    }
    std::vector<double> w;
    w.reserve(candidates.size());
    double total = 0.0;
    for (const auto& c : candidates) {
        w.push_back(std::exp(beta * (c.strength() - top)));
        total += w.back();
    }
    for (auto& x : w) {
        x /= total;
    }
    return w;
}

NodeId least_informative(std::span<const NodeId> hood, std::span<const AgentProfile> profiles) {
    if (hood.empty()) {
        throw std::invalid_argument("least_informative: empty neighbourhood");
    }
    NodeId best = hood.front();
    for (NodeId m : hood) {
        const double e = profiles[m].strength();
        const double e_best = profiles[best].strength();
        if (e < e_best || (e == e_best && m < best)) {
            best = m;
        }
    }
    return best;
}

namespace {

struct SideVerdict {
    bool accept = false;
    double gain = 0.0;
    std::optional<NodeId> drop;
    double swap_gain = 0.0;
};

SideVerdict evaluate_side(const UtilityEvaluator& eval, const Graph& g, NodeId self,
                          NodeId other, const FormationOptions& opt) {
    SideVerdict v;
    const auto hood = g.neighbors(self);
    const double cost = eval.profiles()[self].cost;
    v.gain = eval.marginal(self, hood, other);
    if (opt.clears(v.gain, cost)) {
        v.accept = true;
        return v;
    }
    if (hood.empty()) {
        return v;
    }
    v.drop = least_informative(hood, eval.profiles());
    v.swap_gain = eval.swap_gain(self, hood, other, *v.drop);
    v.accept = opt.clears(v.swap_gain, cost);
    return v;
}

NodeId pick_candidate(const Graph& g, NodeId i, std::span<const AgentProfile> profiles,
                      double beta, Rng& rng, bool& none) {
    std::vector<NodeId> pool;
    std::vector<AgentProfile> pool_profiles;
    for (NodeId m = 0; m < g.size(); ++m) {
        if (m != i && !g.has_link(i, m)) {
            pool.push_back(m);
            pool_profiles.push_back(profiles[m]);
        }
    }
    none = pool.empty();
    if (none) {
        return 0;
    }
    const auto w = selection_weights(pool_profiles, beta);
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        acc += w[k];
        if (u < acc) {
            return pool[k];
        }
    }
    return pool.back();
}

// Net gain to `self` from cutting its link to `drop`.
double deletion_gain(const UtilityEvaluator& eval, const Graph& g, NodeId self, NodeId drop) {
    const auto hood = g.neighbors(self);
    std::vector<NodeId> reduced;
    reduced.reserve(hood.size());
    for (NodeId m : hood) {
        if (m != drop) {
            reduced.push_back(m);
        }
    }
    return eval.profiles()[self].cost - (eval.utility(self, hood) - eval.utility(self, reduced));
}

// Cuts the most profitable unprofitable link of each queued agent until no
// agent gains more than tol from a deletion. Every cut re-queues both ends.
void prune(const UtilityEvaluator& eval, Graph& g, std::set<NodeId> queue, std::size_t iteration,
           double tol, std::vector<FormationEvent>& events) {
    while (!queue.empty()) {
        const NodeId x = *queue.begin();
        queue.erase(queue.begin());
        double best_gain = tol;
        std::optional<NodeId> best;
        for (NodeId y : g.neighbors(x)) {
            const double gain = deletion_gain(eval, g, x, y);
            if (gain > best_gain) {
                best_gain = gain;
                best = y;
            }
        }
        if (!best) {
            continue;
        }
        g.remove_link(x, *best);
        FormationEvent ev;
        ev.iteration = iteration;
        ev.i = x;
        ev.j = *best;
        ev.gain_i = best_gain;
        ev.decision = FormationDecision::deleted;
        events.push_back(ev);
        queue.insert(x);
        queue.insert(*best);
    }
}

}  // namespace

FormationResult form_network(std::span<const AgentProfile> profiles,
                             const FormationOptions& options, Rng& rng) {
    if (options.iterations == 0) {
        throw std::invalid_argument("form_network: need at least one iteration");
    }
    const UtilityEvaluator eval({profiles.begin(), profiles.end()}, options.model);
    FormationResult result{Graph(profiles.size()), {}};
    result.events.reserve(options.iterations);
    Graph& g = result.graph;

    for (std::size_t it = 0; it < options.iterations; ++it) {
        FormationEvent ev;
        ev.iteration = it;
        ev.i = static_cast<NodeId>(rng.index(profiles.size()));
        bool none = false;
        const NodeId j = pick_candidate(g, ev.i, profiles, options.beta, rng, none);
        if (none) {
            result.events.push_back(ev);
            continue;
        }
        ev.j = j;
        const auto side_i = evaluate_side(eval, g, ev.i, j, options);
        const auto side_j = evaluate_side(eval, g, j, ev.i, options);
        ev.gain_i = side_i.gain;
        ev.gain_j = side_j.gain;
        ev.drop_i = side_i.drop;
        ev.drop_j = side_j.drop;
        ev.swap_gain_i = side_i.swap_gain;
        ev.swap_gain_j = side_j.swap_gain;
        if (side_i.accept && side_j.accept) {
            if (side_i.drop) {
                g.remove_link(ev.i, *side_i.drop);
            }
            if (side_j.drop) {
                g.remove_link(j, *side_j.drop);
            }
            g.add_link(ev.i, j);
            ev.decision = FormationDecision::formed;
            result.events.push_back(ev);
            if (options.prune_unprofitable) {
                std::set<NodeId> touched{ev.i, j};
                if (side_i.drop) {
                    touched.insert(*side_i.drop);
                }
                if (side_j.drop) {
                    touched.insert(*side_j.drop);
                }
                prune(eval, g, std::move(touched), it, options.tol, result.events);
            }
            continue;
        }
        ev.decision = FormationDecision::rejected;
        result.events.push_back(ev);
    }
    return result;
}

ReplayReport replay_formation(std::span<const AgentProfile> profiles,
                              std::span<const FormationEvent> events,
                              const FormationOptions& options) {
    const UtilityEvaluator eval({profiles.begin(), profiles.end()}, options.model);
    ReplayReport report{Graph(profiles.size()), 0, 0, {}};
    Graph& g = report.graph;
    constexpr double agree = 1e-12;

    const auto side_ok = [&](NodeId self, NodeId other, double logged_gain,
                             std::optional<NodeId> drop, double logged_swap) {
        const auto hood = g.neighbors(self);
        const double cost = profiles[self].cost;
        const double gain = eval.marginal(self, hood, other);
        if (std::abs(gain - logged_gain) > agree) {
            return false;
        }
        if (!drop) {
            return options.clears(gain, cost);
        }
        if (!g.has_link(self, *drop) || least_informative(hood, profiles) != *drop) {
            return false;
        }
        const double swapped = eval.swap_gain(self, hood, other, *drop);
        return std::abs(swapped - logged_swap) <= agree && options.clears(swapped, cost);
    };

    for (std::size_t e = 0; e < events.size(); ++e) {
        const auto& ev = events[e];
        if (ev.decision == FormationDecision::deleted) {
            ++report.deleted;
            if (!ev.j || ev.i >= g.size() || *ev.j >= g.size() || !g.has_link(ev.i, *ev.j)) {
                report.failures.push_back(e);
                continue;
            }
            const double gain = deletion_gain(eval, g, ev.i, *ev.j);
            if (!(gain > options.tol) || std::abs(gain - ev.gain_i) > agree) {
                report.failures.push_back(e);
                continue;
            }
            g.remove_link(ev.i, *ev.j);
            continue;
        }
        if (ev.decision != FormationDecision::formed) {
            continue;
        }
        ++report.formed;
        if (!ev.j || *ev.j >= g.size() || ev.i >= g.size() || ev.i == *ev.j ||
            g.has_link(ev.i, *ev.j)) {
            report.failures.push_back(e);
            continue;
        }
        const NodeId j = *ev.j;
        const bool ok = side_ok(ev.i, j, ev.gain_i, ev.drop_i, ev.swap_gain_i) &&
                        side_ok(j, ev.i, ev.gain_j, ev.drop_j, ev.swap_gain_j);
        if (!ok) {
            report.failures.push_back(e);
            continue;
        }
        if (ev.drop_i) {
            g.remove_link(ev.i, *ev.drop_i);
        }
        if (ev.drop_j) {
            g.remove_link(j, *ev.drop_j);
        }
        g.add_link(ev.i, j);
    }
    return report;
}

namespace {

std::string_view decision_name(FormationDecision d) {
    switch (d) {
        case FormationDecision::formed:
            return "formed";
        case FormationDecision::rejected:
            return "rejected";
        case FormationDecision::skipped:
            return "skipped";
        case FormationDecision::deleted:
            return "deleted";
    }
    return "?";
}

std::string opt_id(const std::optional<NodeId>& id) {
    return id ? std::to_string(*id) : std::string("-");
}

std::optional<NodeId> parse_opt_id(const std::string& text) {
    if (text == "-") {
        return std::nullopt;
    }
    std::size_t used = 0;
    const unsigned long v = std::stoul(text, &used);
    if (used != text.size()) {
        throw std::invalid_argument(text);
    }
    return static_cast<NodeId>(v);
}

}  // namespace

void write_formation_log_header(std::ostream& out) {
    out << "network\titeration\ti\tj\tgain_i\tgain_j\tdrop_i\tdrop_j\tswap_gain_i\tswap_gain_j"
           "\tdecision\n";
}

void write_formation_log(std::ostream& out, std::span<const FormationEvent> events,
                         std::size_t network) {
    for (const auto& ev : events) {
        out << network << '\t' << ev.iteration << '\t' << ev.i << '\t' << opt_id(ev.j) << '\t'
            << format_double(ev.gain_i) << '\t' << format_double(ev.gain_j) << '\t'
            << opt_id(ev.drop_i) << '\t' << opt_id(ev.drop_j) << '\t'
            << format_double(ev.swap_gain_i) << '\t' << format_double(ev.swap_gain_j) << '\t'
            << decision_name(ev.decision) << '\n';
    }
}

std::vector<std::vector<FormationEvent>> read_formation_log(std::istream& in) {
    std::vector<std::vector<FormationEvent>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.rfind("network\t", 0) == 0) {
            continue;
        }
        std::vector<std::string> f;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, '\t')) {
            f.push_back(cell);
        }
        try {
            if (f.size() != 11) {
                throw std::invalid_argument("field count");
            }
            FormationEvent ev;
            const std::size_t net = std::stoul(f[0]);
            ev.iteration = std::stoul(f[1]);
            ev.i = static_cast<NodeId>(std::stoul(f[2]));
            ev.j = parse_opt_id(f[3]);
            ev.gain_i = parse_double(f[4]);
            ev.gain_j = parse_double(f[5]);
            ev.drop_i = parse_opt_id(f[6]);
            ev.drop_j = parse_opt_id(f[7]);
            ev.swap_gain_i = parse_double(f[8]);
            ev.swap_gain_j = parse_double(f[9]);
            if (f[10] == "formed") {
                ev.decision = FormationDecision::formed;
            } else if (f[10] == "rejected") {
                ev.decision = FormationDecision::rejected;
            } else if (f[10] == "skipped") {
                ev.decision = FormationDecision::skipped;
            } else if (f[10] == "deleted") {
                ev.decision = FormationDecision::deleted;
            } else {
                throw std::invalid_argument("decision");
            }
            if (out.size() <= net) {
                out.resize(net + 1);
            }
            out[net].push_back(ev);
        } catch (const std::exception&) {
            throw std::runtime_error("formation log: malformed line " + std::to_string(line_no));
        }
    }
    return out;
}

}  // namespace contagion
