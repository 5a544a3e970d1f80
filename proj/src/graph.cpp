#include "contagion/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "contagion/format.hpp"

namespace contagion {

Graph::Graph(std::size_t n)
    : words_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0), neighbors_(n) {}

void Graph::check_pair(NodeId i, NodeId j) const {
    if (i >= size() || j >= size()) {
        throw std::invalid_argument("Graph: node index out of range");
    }
    if (i == j) {
        throw std::invalid_argument("Graph: self-loops are not allowed");
    }
}

bool Graph::has_link(NodeId i, NodeId j) const {
    if (i >= size() || j >= size() || i == j) {
        return false;
    }
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U;
}

void Graph::set_bit(NodeId i, NodeId j, bool on) {
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    auto& word = bits_[i * words_ + j / 64];
    word = on ? (word | mask) : (word & ~mask);
}

void Graph::add_link(NodeId i, NodeId j) {
    check_pair(i, j);
    if (has_link(i, j)) {
        throw std::invalid_argument("Graph: link already present");
    }
    set_bit(i, j, true);
    set_bit(j, i, true);
    auto& ni = neighbors_[i];
    ni.insert(std::lower_bound(ni.begin(), ni.end(), j), j);
    auto& nj = neighbors_[j];
    nj.insert(std::lower_bound(nj.begin(), nj.end(), i), i);
    ++links_;
}

void Graph::remove_link(NodeId i, NodeId j) {
    check_pair(i, j);
    if (!has_link(i, j)) {
        throw std::invalid_argument("Graph: link not present");
    }
    set_bit(i, j, false);
    set_bit(j, i, false);
    auto& ni = neighbors_[i];
    ni.erase(std::lower_bound(ni.begin(), ni.end(), j));
    auto& nj = neighbors_[j];
    nj.erase(std::lower_bound(nj.begin(), nj.end(), i));
    --links_;
}

double Graph::density() const noexcept {
    const double n = static_cast<double>(size());
    if (size() < 2) {
        return 0.0;
    }
    return 2.0 * static_cast<double>(links_) / (n * (n - 1.0));
}

Graph er_random(std::size_t n, double rho, Rng& rng) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::invalid_argument("er_random: rho must lie in [0, 1]");
    }
    Graph g(n);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            if (rng.bernoulli(rho)) {
                g.add_link(i, j);
            }
        }
    }
    return g;
}

std::vector<std::size_t> degrees(const Graph& g) {
    std::vector<std::size_t> out(g.size());
    for (NodeId i = 0; i < g.size(); ++i) {
        out[i] = g.degree(i);
    }
    return out;
}

double density(const Graph& g) { return g.density(); }

std::vector<std::size_t> degree_histogram(std::span<const Graph> ensemble) {
    std::vector<std::size_t> hist;
    for (const auto& g : ensemble) {
        for (NodeId i = 0; i < g.size(); ++i) {
            const auto k = g.degree(i);
            if (hist.size() <= k) {
                hist.resize(k + 1, 0);
            }
            ++hist[k];
        }
    }
    return hist;
}

std::vector<std::size_t> degree_histogram(std::span<const Graph> ensemble,
                                          std::span<const NodeId> nodes) {
    std::vector<std::size_t> hist;
    for (const auto& g : ensemble) {
        for (NodeId i : nodes) {
            const auto k = g.degree(i);
            if (hist.size() <= k) {
                hist.resize(k + 1, 0);
            }
            ++hist[k];
        }
    }
    return hist;
}

std::size_t StabilityReport::count(StabilityViolationKind kind) const noexcept {
    return static_cast<std::size_t>(std::count_if(
        violations.begin(), violations.end(), [kind](const auto& v) { return v.kind == kind; }));
}

namespace {

std::vector<NodeId> without(std::span<const NodeId> hood, NodeId drop) {
    std::vector<NodeId> out;
    out.reserve(hood.size());
    for (NodeId m : hood) {
        if (m != drop) {
            out.push_back(m);
        }
    }
    return out;
}

std::vector<NodeId> with(std::span<const NodeId> hood, NodeId add) {
    std::vector<NodeId> out(hood.begin(), hood.end());
    out.insert(std::lower_bound(out.begin(), out.end(), add), add);
    return out;
}

}  // namespace

StabilityReport is_pairwise_stable(const Graph& g, const NeighborhoodUtility& utility,
                                   std::span<const double> costs, double tol) {
    if (costs.size() != g.size()) {
        throw std::invalid_argument("is_pairwise_stable: one cost per node required");
    }
    StabilityReport report;
    std::vector<double> current(g.size());
    for (NodeId i = 0; i < g.size(); ++i) {
        current[i] = utility(i, g.neighbors(i));
    }
    for (NodeId i = 0; i < g.size(); ++i) {
        for (NodeId j = i + 1; j < g.size(); ++j) {
            if (g.has_link(i, j)) {
                // Net gain from cutting = cost saved - utility lost.
                const double gain_i =
                    costs[i] - (current[i] - utility(i, without(g.neighbors(i), j)));
                const double gain_j =
                    costs[j] - (current[j] - utility(j, without(g.neighbors(j), i)));
                const double gain = std::max(gain_i, gain_j);
                if (gain > tol) {
                    report.violations.push_back({StabilityViolationKind::deletion, i, j, gain});
                }
            } else {
                const double gain_i = utility(i, with(g.neighbors(i), j)) - current[i] - costs[i];
                if (!(gain_i > tol)) {
                    continue;
                }
                const double gain_j = utility(j, with(g.neighbors(j), i)) - current[j] - costs[j];
                if (gain_j > tol) {
                    report.violations.push_back(
                        {StabilityViolationKind::addition, i, j, std::min(gain_i, gain_j)});
                }
            }
        }
    }
    return report;
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << "# n=" << g.size() << " rho=" << format_double(g.density()) << '\n';
    for (NodeId i = 0; i < g.size(); ++i) {
        for (NodeId j : g.neighbors(i)) {
            if (i < j) {
                out << i << ' ' << j << '\n';
            }
        }
    }
}

Graph read_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("edge list: missing header");
    }
    std::size_t n = 0;
    {
        std::istringstream header(line);
        std::string hash, nfield;
        header >> hash >> nfield;
        if (hash != "#" || nfield.rfind("n=", 0) != 0) {
            throw std::runtime_error("edge list: header must start with '# n=<nodes>'");
        }
        const char* first = nfield.data() + 2;
        const char* last = nfield.data() + nfield.size();
        auto [ptr, ec] = std::from_chars(first, last, n);
        if (ec != std::errc{} || ptr != last) {
            throw std::runtime_error("edge list: bad node count '" + nfield + "'");
        }
    }
    Graph g(n);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream fields(line);
        long long i = -1;
        long long j = -1;
        std::string rest;
        if (!(fields >> i >> j) || (fields >> rest) || i < 0 || j < 0 ||
            static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n || i == j) {
            throw std::runtime_error("edge list: bad link on line " + std::to_string(line_no));
        }
        const auto a = static_cast<NodeId>(i);
        const auto b = static_cast<NodeId>(j);
        if (g.has_link(a, b)) {
            throw std::runtime_error("edge list: duplicate link on line " +
                                     std::to_string(line_no));
        }
        g.add_link(a, b);
    }
    return g;
}

}  // namespace contagion
