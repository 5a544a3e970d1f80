#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

using NodeId = std::uint32_t;

/// Simple undirected graph over nodes 0..n-1.
///
/// Adjacency is kept twice: as one bit row per node (for popcount-based
/// neighbourhood sums in the learning loop) and as sorted neighbour lists
/// (for iteration in a canonical order). Both views are updated together and
/// are always symmetric with an empty diagonal.
class Graph {
public:
    explicit Graph(std::size_t n = 0);

    std::size_t size() const noexcept { return neighbors_.size(); }
    std::size_t link_count() const noexcept { return links_; }
    std::size_t degree(NodeId i) const { return neighbors_.at(i).size(); }
    bool has_link(NodeId i, NodeId j) const;

    /// Throws std::invalid_argument for a self-loop, an out-of-range node or
    /// an existing link.
    void add_link(NodeId i, NodeId j);
    /// Throws std::invalid_argument if the link is absent.
    void remove_link(NodeId i, NodeId j);

    std::span<const NodeId> neighbors(NodeId i) const { return neighbors_.at(i); }

    std::size_t words_per_row() const noexcept { return words_; }
    /// Bit j of row(i) is set iff i and j are linked.
    std::span<const std::uint64_t> row(NodeId i) const {
        return {bits_.data() + static_cast<std::size_t>(i) * words_, words_};
    }

    /// 2|L| / (n(n-1)); 0 for graphs with fewer than two nodes.
    double density() const noexcept;

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.neighbors_ == b.neighbors_;
    }

private:
    void check_pair(NodeId i, NodeId j) const;
    void set_bit(NodeId i, NodeId j, bool on);

    std::size_t words_ = 0;
    std::size_t links_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::vector<NodeId>> neighbors_;
};

/// Each unordered pair is linked independently with probability rho.
Graph er_random(std::size_t n, double rho, Rng& rng);

std::vector<std::size_t> degrees(const Graph& g);
double density(const Graph& g);

/// Degree counts pooled over an ensemble; index = degree.
std::vector<std::size_t> degree_histogram(std::span<const Graph> ensemble);
/// Degree counts over a selected subset of nodes in every graph.
std::vector<std::size_t> degree_histogram(std::span<const Graph> ensemble,
                                          std::span<const NodeId> nodes);

enum class StabilityViolationKind { deletion, addition };

struct StabilityViolation {
    StabilityViolationKind kind;
    NodeId i;
    NodeId j;
    /// Deletion: net gain of the endpoint that wants to cut. Addition: the
    /// smaller of the two endpoints' net gains.
    double gain;
};

struct StabilityReport {
    std::vector<StabilityViolation> violations;

    bool stable() const noexcept { return violations.empty(); }
    std::size_t count(StabilityViolationKind kind) const noexcept;
};

/// Utility of a node given a candidate neighbourhood (sorted node ids).
using NeighborhoodUtility = std::function<double(NodeId, std::span<const NodeId>)>;

/// Pairwise-stability audit with per-node link costs.
///  (i) linked i-j: violation if either endpoint's utility loss from dropping
///      the link is below its cost by more than tol;
/// (ii) unlinked i-j: violation if both endpoints' utility gain from adding
///      the link exceeds their cost by more than tol.
StabilityReport is_pairwise_stable(const Graph& g, const NeighborhoodUtility& utility,
                                   std::span<const double> costs, double tol = 1e-12);

/// Edge-list text format:
///   # n=<nodes> rho=<density>
///   i j        (one line per link, 0-indexed, i < j)
void write_edge_list(std::ostream& out, const Graph& g);
/// Throws std::runtime_error on malformed input.
Graph read_edge_list(std::istream& in);

}  // namespace contagion
