#pragma once

// Experiment orchestration: density sweeps on ER graphs, contagion
// statistics, and the endogenous-vs-ER comparison.
//
// Every run draws from its own Rng seeded by derive_seed(master, ...) with
// the run's coordinates, so results do not depend on the number of worker
// threads or on the order in which runs finish.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contagion/config.hpp"
#include "contagion/formation.hpp"
#include "contagion/graph.hpp"

namespace contagion {

/// Calls fn(0) .. fn(n - 1) on up to `jobs` threads (0 = hardware
/// concurrency). The first exception thrown by any call is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct RunRecord {
    /// Experiment label: the config id, "H:p=<p>" for informed-mix sweeps,
    /// "ENDO"/"ER" for the comparison and "ENDO:b=<b>"/"ER:b=<b>" for its
    /// biased runs.
    std::string config;
    std::uint64_t seed = 0;
    /// Grid density for sweeps, realised graph density for comparison runs.
    double rho = 0.0;
    double x_init = 0.0;
    double x_final = 0.0;
    bool contagion = false;
    std::optional<std::size_t> conv_time;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Initialises and runs learning on one graph; θ = 0.
RunRecord simulate(const SimulationConfig& cfg, std::string label, std::uint64_t seed, double rho,
                   std::vector<AgentProfile> profiles, Graph graph, std::optional<double> bias,
                   Rng& rng);

std::string sweep_label(const SimulationConfig& cfg, std::optional<double> p_informed);

/// One sweep run: agents (each informed with probability p_informed when
/// given), an ER graph with density rho, then learning. Everything is drawn
/// from Rng(seed).
RunRecord sweep_run(const SimulationConfig& cfg, std::optional<double> p_informed, double rho,
                    std::uint64_t seed);

/// All (p, rho, replicate) runs in that order. The run at grid point g =
/// p_index * rho_steps + rho_index, replicate s, uses derive_seed(seed, g, s).
std::vector<RunRecord> run_sweep(const SimulationConfig& cfg, std::size_t jobs = 0);

/// Regenerates a sweep record from its label, rho and seed.
RunRecord replay_sweep_record(const SimulationConfig& cfg, const RunRecord& record);

enum class Conditioning { all, matching_start, non_matching_start };

std::string_view to_string(Conditioning c) noexcept;

struct ContagionEstimate {
    std::string config;
    double rho = 0.0;
    Conditioning conditioning = Conditioning::all;
    std::size_t runs = 0;
    std::size_t contagious = 0;
    /// Missing when no run falls in the cell.
    std::optional<double> probability;

    friend bool operator==(const ContagionEstimate&, const ContagionEstimate&) = default;
};

/// Fraction of contagious runs per (config, rho) under the given
/// conditioning on the initial average action (matching start: x_init <=
/// 1/2). Cells are ordered by first appearance of (config, rho).
std::vector<ContagionEstimate> estimate_contagion_prob(std::span<const RunRecord> records,
                                                       Conditioning conditioning);

/// All three conditionings, interleaved per (config, rho).
std::vector<ContagionEstimate> estimate_contagion_prob(std::span<const RunRecord> records);

struct SweepSummary {
    std::string config;
    double rho = 0.0;
    std::size_t runs = 0;
    double mean_x_init = 0.0;
    double mean_x_final = 0.0;
    std::size_t converged = 0;
};

std::vector<SweepSummary> summarize_sweep(std::span<const RunRecord> records);

/// Joint frequency of (x_init, x_final) on a bins x bins grid over [0, 1]^2;
/// 1 falls in the last bin.
struct FrequencyGrid {
    std::size_t bins = 0;
    std::size_t total = 0;
    /// count[a * bins + b]: x_init in bin a, x_final in bin b.
    std::vector<std::size_t> count;

    std::size_t at(std::size_t a, std::size_t b) const { return count.at(a * bins + b); }
    double frequency(std::size_t a, std::size_t b) const;
};

FrequencyGrid final_vs_initial(std::span<const RunRecord> records, std::size_t bins);

/// Fraction of records with x_init < 1/2 and x_final > 1/2.
double contagious_start_mass(std::span<const RunRecord> records);

/// Convergence time with non-converged runs censored at the last admissible
/// time plus one.
double censored_conv_time(const RunRecord& r, const SimulationConfig& cfg);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Percentile bootstrap interval for mean(a) - mean(b), resampling each
/// sample independently. Throws std::invalid_argument for an empty sample.
Interval bootstrap_mean_difference(std::span<const double> a, std::span<const double> b,
                                   std::size_t resamples, std::uint64_t seed,
                                   double level = 0.95);

/// True iff some degree b has a count below half of the smaller of the
/// largest counts on either side of it, where both of those counts hold at
/// least 1% of the total.
bool is_bimodal(std::span<const std::size_t> histogram);

FormationOptions formation_options(const SimulationConfig& cfg);

/// n networks; network k is formed from Rng(derive_seed(seed, 0, k)).
std::vector<FormationResult> form_ensemble(const SimulationConfig& cfg, std::size_t jobs = 0);

struct NetworkSummary {
    std::size_t network = 0;
    std::size_t links = 0;
    double density = 0.0;
    double informed_mean_degree = 0.0;
    double uninformed_mean_degree = 0.0;
    std::size_t deletion_violations = 0;
    std::size_t addition_violations = 0;
    std::size_t replay_failures = 0;
};

/// Degree statistics, pairwise-stability audit under the configured utility
/// model, and log replay for each network.
std::vector<NetworkSummary> summarize_ensemble(const SimulationConfig& cfg,
                                               std::span<const FormationResult> ensemble,
                                               std::size_t jobs = 0);

struct DegreeRow {
    std::string source;
    std::size_t degree = 0;
    std::size_t count = 0;
};

/// Rows for ENDO, ENDO:informed, ENDO:uninformed and, when er is non-empty,
/// ER. Informed agents are the first informed_agents nodes.
std::vector<DegreeRow> degree_table(const SimulationConfig& cfg, std::span<const Graph> endo,
                                    std::span<const Graph> er);

std::vector<std::size_t> histogram_of(std::span<const DegreeRow> rows, std::string_view source);

struct MeanComparison {
    std::string metric;
    std::size_t endo_runs = 0;
    std::size_t er_runs = 0;
    double endo_mean = 0.0;
    double er_mean = 0.0;
    /// Bootstrap interval for endo_mean - er_mean.
    Interval difference;
};

struct BiasPoint {
    double bias = 0.0;
    std::size_t endo_runs = 0;
    std::size_t endo_contagious = 0;
    std::size_t er_runs = 0;
    std::size_t er_contagious = 0;
    /// Bootstrap interval for the difference in contagion probability.
    Interval difference;

    double endo_probability() const { return double(endo_contagious) / double(endo_runs); }
    double er_probability() const { return double(er_contagious) / double(er_runs); }
};

struct EnsembleComparison {
    double endo_density = 0.0;
    double er_density = 0.0;
    std::vector<Graph> er_graphs;
    std::vector<RunRecord> runs;
    std::vector<DegreeRow> degrees;
    MeanComparison final_action;
    MeanComparison convergence_time;
    std::vector<BiasPoint> bias;
};

inline constexpr std::size_t bootstrap_resamples = 2000;

/// Learning (config scenario, normally equal weighting) on every formed
/// network and on as many ER graphs with matched density: one unbiased run
/// per graph, then `replicas` runs per bias level, replicate s using network
/// s mod n.
EnsembleComparison compare_ensembles(const SimulationConfig& cfg,
                                     std::span<const FormationResult> ensemble,
                                     std::size_t jobs = 0);

/// Forms the ensemble first.
EnsembleComparison compare_ensembles(const SimulationConfig& cfg, std::size_t jobs = 0);

// CSV files. Doubles use the shortest round-trip representation; missing
// values are empty fields. Readers throw std::runtime_error on a header
// mismatch or malformed row.
void write_runs_csv(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_runs_csv(std::istream& in);
void write_contagion_csv(std::ostream& out, std::span<const ContagionEstimate> rows);
std::vector<ContagionEstimate> read_contagion_csv(std::istream& in);
void write_summary_csv(std::ostream& out, std::span<const SweepSummary> rows);
/// One grid per config label, in order of first appearance.
void write_fvi_csv(std::ostream& out, std::span<const RunRecord> records, std::size_t bins);
void write_degrees_csv(std::ostream& out, std::span<const DegreeRow> rows);
void write_meanfield_csv(std::ostream& out, const SignalStructure& sig, std::size_t samples);
void write_fixed_points_csv(std::ostream& out, const SignalStructure& sig);
void write_network_summary_csv(std::ostream& out, std::span<const NetworkSummary> rows);
void write_comparison_csv(std::ostream& out, const EnsembleComparison& cmp);
void write_bias_csv(std::ostream& out, std::span<const BiasPoint> rows);

}  // namespace contagion
