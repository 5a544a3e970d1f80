#include "contagion/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <istream>
#include <stdexcept>
#include <thread>

#include "contagion/format.hpp"
#include "contagion/learning.hpp"
#include "contagion/meanfield.hpp"

namespace contagion {

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = std::min(jobs, n);
    if (jobs <= 1) {
        for (std::size_t k = 0; k < n; ++k) {
            fn(k);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < n && !failed; k = next++) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

RunRecord simulate(const SimulationConfig& cfg, std::string label, std::uint64_t seed, double rho,
                   std::vector<AgentProfile> profiles, Graph graph, std::optional<double> bias,
                   Rng& rng) {
    Population pop(std::move(profiles), std::move(graph), WorldState::zero);
    init_actions(pop, rng, bias);
    const Trajectory traj = run(pop, cfg.scenario, cfg.steps, rng);

    RunRecord r;
    r.config = std::move(label);
    r.seed = seed;
    r.rho = rho;
    r.x_init = traj.initial_average();
    r.x_final = traj.final_average();
    r.contagion = contagion_flag(traj.actions.back(), WorldState::zero, cfg.contagion_fraction);
    if (traj.length() > cfg.conv_window) {
        r.conv_time = convergence_time(traj, cfg.conv_window, cfg.conv_tol);
    }
    return r;
}

std::string sweep_label(const SimulationConfig& cfg, std::optional<double> p_informed) {
    return p_informed ? cfg.id + ":p=" + format_double(*p_informed) : cfg.id;
}

RunRecord sweep_run(const SimulationConfig& cfg, std::optional<double> p_informed, double rho,
                    std::uint64_t seed) {
    Rng rng(seed);
    const SignalStructure base = cfg.base_signal();
    const SignalStructure informed = cfg.informed_signal();
    std::vector<AgentProfile> profiles;
    profiles.reserve(cfg.agents);
    for (std::size_t i = 0; i < cfg.agents; ++i) {
        if (p_informed && rng.bernoulli(*p_informed)) {
            profiles.emplace_back(informed, cfg.informed_cost, true);
        } else {
            profiles.emplace_back(base, cfg.uninformed_cost, false);
        }
    }
    Graph g = er_random(cfg.agents, rho, rng);
    return simulate(cfg, sweep_label(cfg, p_informed), seed, rho, std::move(profiles),
                    std::move(g), cfg.bias, rng);
}

std::vector<RunRecord> run_sweep(const SimulationConfig& cfg, std::size_t jobs) {
    cfg.validate();
    const auto rhos = cfg.rho_grid();
    std::vector<std::optional<double>> ps;
    for (double p : cfg.p_informed_grid()) {
        ps.emplace_back(p);
    }
    if (ps.empty()) {
        ps.emplace_back(std::nullopt);
    }
    const std::size_t per_point = cfg.replicas;
    std::vector<RunRecord> records(ps.size() * rhos.size() * per_point);
    parallel_for(records.size(), jobs, [&](std::size_t k) {
        const std::size_t g = k / per_point;
        const std::size_t s = k % per_point;
        const auto& p = ps[g / rhos.size()];
        const double rho = rhos[g % rhos.size()];
        records[k] = sweep_run(cfg, p, rho, derive_seed(cfg.seed, g, s));
    });
    return records;
}

RunRecord replay_sweep_record(const SimulationConfig& cfg, const RunRecord& record) {
    std::optional<double> p;
    if (record.config != cfg.id) {
        const std::string prefix = cfg.id + ":p=";
        if (record.config.rfind(prefix, 0) != 0) {
            throw std::invalid_argument("record '" + record.config + "' is not from config " +
                                        cfg.id);
        }
        p = parse_double(std::string_view(record.config).substr(prefix.size()));
    }
    return sweep_run(cfg, p, record.rho, record.seed);
}

std::string_view to_string(Conditioning c) noexcept {
    switch (c) {
        case Conditioning::all:
            return "all";
        case Conditioning::matching_start:
            return "x_init<=0.5";
        case Conditioning::non_matching_start:
            return "x_init>0.5";
    }
    return "all";
}

namespace {

// Groups record indices by (config, rho) in order of first appearance.
std::vector<std::vector<std::size_t>> group_by_cell(std::span<const RunRecord> records) {
    std::map<std::pair<std::string, double>, std::size_t> slot;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < records.size(); ++k) {
        auto [it, fresh] = slot.try_emplace({records[k].config, records[k].rho}, groups.size());
        if (fresh) {
            groups.emplace_back();
        }
        groups[it->second].push_back(k);
    }
    return groups;
}

bool admits(Conditioning c, double x_init) {
    switch (c) {
        case Conditioning::all:
            return true;
        case Conditioning::matching_start:
            return x_init <= 0.5;
        case Conditioning::non_matching_start:
            return x_init > 0.5;
    }
    return true;
}

ContagionEstimate estimate_cell(std::span<const RunRecord> records,
                                const std::vector<std::size_t>& cell, Conditioning c) {
    ContagionEstimate e;
    e.config = records[cell.front()].config;
    e.rho = records[cell.front()].rho;
    e.conditioning = c;
    for (std::size_t k : cell) {
        if (admits(c, records[k].x_init)) {
            ++e.runs;
            e.contagious += records[k].contagion ? 1 : 0;
        }
    }
    if (e.runs > 0) {
        e.probability = static_cast<double>(e.contagious) / static_cast<double>(e.runs);
    }
    return e;
}

double mean(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

std::vector<ContagionEstimate> estimate_contagion_prob(std::span<const RunRecord> records,
                                                       Conditioning conditioning) {
    std::vector<ContagionEstimate> out;
    for (const auto& cell : group_by_cell(records)) {
        out.push_back(estimate_cell(records, cell, conditioning));
    }
    return out;
}

std::vector<ContagionEstimate> estimate_contagion_prob(std::span<const RunRecord> records) {
    std::vector<ContagionEstimate> out;
    for (const auto& cell : group_by_cell(records)) {
        for (auto c : {Conditioning::all, Conditioning::matching_start,
                       Conditioning::non_matching_start}) {
            out.push_back(estimate_cell(records, cell, c));
        }
    }
    return out;
}

std::vector<SweepSummary> summarize_sweep(std::span<const RunRecord> records) {
    std::vector<SweepSummary> out;
    for (const auto& cell : group_by_cell(records)) {
        SweepSummary s;
        s.config = records[cell.front()].config;
        s.rho = records[cell.front()].rho;
        s.runs = cell.size();
        for (std::size_t k : cell) {
            s.mean_x_init += records[k].x_init;
            s.mean_x_final += records[k].x_final;
            s.converged += records[k].conv_time ? 1 : 0;
        }
        s.mean_x_init /= static_cast<double>(s.runs);
        s.mean_x_final /= static_cast<double>(s.runs);
        out.push_back(std::move(s));
    }
    return out;
}

double FrequencyGrid::frequency(std::size_t a, std::size_t b) const {
    return total == 0 ? 0.0 : static_cast<double>(at(a, b)) / static_cast<double>(total);
}

FrequencyGrid final_vs_initial(std::span<const RunRecord> records, std::size_t bins) {
    if (bins == 0) {
        throw std::invalid_argument("final_vs_initial: bins must be positive");
    }
    FrequencyGrid grid{bins, records.size(), std::vector<std::size_t>(bins * bins, 0)};
    auto bin = [bins](double x) {
        return std::min(static_cast<std::size_t>(std::max(x, 0.0) * static_cast<double>(bins)),
                        bins - 1);
    };
    for (const auto& r : records) {
        ++grid.count[bin(r.x_init) * bins + bin(r.x_final)];
    }
    return grid;
}

double contagious_start_mass(std::span<const RunRecord> records) {
    if (records.empty()) {
        return 0.0;
    }
    const auto hits = std::count_if(records.begin(), records.end(), [](const RunRecord& r) {
        return r.x_init < 0.5 && r.x_final > 0.5;
    });
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double censored_conv_time(const RunRecord& r, const SimulationConfig& cfg) {
    if (r.conv_time) {
        return static_cast<double>(*r.conv_time);
    }
    return cfg.steps >= cfg.conv_window ? static_cast<double>(cfg.steps - cfg.conv_window + 1)
                                        : 0.0;
}

Interval bootstrap_mean_difference(std::span<const double> a, std::span<const double> b,
                                   std::size_t resamples, std::uint64_t seed, double level) {
    if (a.empty() || b.empty() || resamples == 0) {
        throw std::invalid_argument("bootstrap_mean_difference: empty sample");
    }
    Rng rng(seed);
    auto resample_mean = [&rng](std::span<const double> xs) {
        double sum = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sum += xs[rng.index(xs.size())];
        }
        return sum / static_cast<double>(xs.size());
    };
    std::vector<double> diffs(resamples);
    for (auto& d : diffs) {
        d = resample_mean(a) - resample_mean(b);
    }
    std::sort(diffs.begin(), diffs.end());
    const double tail = (1.0 - level) / 2.0;
    const auto last = static_cast<double>(resamples - 1);
    return {diffs[static_cast<std::size_t>(std::floor(tail * last))],
            diffs[static_cast<std::size_t>(std::ceil((1.0 - tail) * last))]};
}

bool is_bimodal(std::span<const std::size_t> histogram) {
    const std::size_t total = std::accumulate(histogram.begin(), histogram.end(), std::size_t{0});
    if (total == 0) {
        return false;
    }
    const double floor = 0.01 * static_cast<double>(total);
    for (std::size_t b = 1; b + 1 < histogram.size(); ++b) {
        const double left = static_cast<double>(
            *std::max_element(histogram.begin(), histogram.begin() + static_cast<long>(b)));
        const double right = static_cast<double>(
            *std::max_element(histogram.begin() + static_cast<long>(b) + 1, histogram.end()));
        const double peak = std::min(left, right);
        if (peak >= floor && static_cast<double>(histogram[b]) < 0.5 * peak) {
            return true;
        }
    }
    return false;
}

FormationOptions formation_options(const SimulationConfig& cfg) {
    FormationOptions o;
    o.iterations = cfg.formation_iters;
    o.beta = cfg.beta;
    o.model.q_prime = cfg.q_prime;
    o.accept_ties = cfg.accept_ties;
    o.prune_unprofitable = cfg.prune_unprofitable;
    return o;
}

std::vector<FormationResult> form_ensemble(const SimulationConfig& cfg, std::size_t jobs) {
    cfg.validate();
    const auto profiles = endo_profiles(cfg);
    const auto options = formation_options(cfg);
    std::vector<std::optional<FormationResult>> slots(cfg.networks);
    parallel_for(cfg.networks, jobs, [&](std::size_t k) {
        Rng rng(derive_seed(cfg.seed, 0, k));
        slots[k] = form_network(profiles, options, rng);
    });
    std::vector<FormationResult> out;
    out.reserve(slots.size());
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

std::vector<NetworkSummary> summarize_ensemble(const SimulationConfig& cfg,
                                               std::span<const FormationResult> ensemble,
                                               std::size_t jobs) {
    const auto profiles = endo_profiles(cfg);
    const auto options = formation_options(cfg);
    const UtilityEvaluator eval(profiles, options.model);
    const auto utility = eval.as_function();
    std::vector<double> costs;
    for (const auto& p : profiles) {
        costs.push_back(p.cost);
    }
    std::vector<NetworkSummary> out(ensemble.size());
    parallel_for(ensemble.size(), jobs, [&](std::size_t k) {
        const Graph& g = ensemble[k].graph;
        if (g.size() != profiles.size()) {
            throw std::invalid_argument("summarize_ensemble: network size does not match config");
        }
        NetworkSummary& s = out[k];
        s.network = k;
        s.links = g.link_count();
        s.density = density(g);
        double informed = 0.0;
        double uninformed = 0.0;
        for (NodeId i = 0; i < g.size(); ++i) {
            (profiles[i].informed ? informed : uninformed) += static_cast<double>(g.degree(i));
        }
        if (cfg.informed_agents > 0) {
            s.informed_mean_degree = informed / static_cast<double>(cfg.informed_agents);
        }
        if (cfg.uninformed_agents > 0) {
            s.uninformed_mean_degree = uninformed / static_cast<double>(cfg.uninformed_agents);
        }
        const auto report = is_pairwise_stable(g, utility, costs, options.tol);
        s.deletion_violations = report.count(StabilityViolationKind::deletion);
        s.addition_violations = report.count(StabilityViolationKind::addition);
        s.replay_failures = replay_formation(profiles, ensemble[k].events, options).failures.size();
    });
    return out;
}

std::vector<DegreeRow> degree_table(const SimulationConfig& cfg, std::span<const Graph> endo,
                                    std::span<const Graph> er) {
    std::vector<DegreeRow> rows;
    auto add = [&rows](const std::string& source, const std::vector<std::size_t>& hist) {
        for (std::size_t d = 0; d < hist.size(); ++d) {
            rows.push_back({source, d, hist[d]});
        }
    };
    std::vector<NodeId> informed;
    std::vector<NodeId> uninformed;
    for (std::size_t i = 0; i < cfg.informed_agents + cfg.uninformed_agents; ++i) {
        (i < cfg.informed_agents ? informed : uninformed).push_back(static_cast<NodeId>(i));
    }
    add("ENDO", degree_histogram(endo));
    add("ENDO:informed", degree_histogram(endo, informed));
    add("ENDO:uninformed", degree_histogram(endo, uninformed));
    if (!er.empty()) {
        add("ER", degree_histogram(er));
    }
    return rows;
}

std::vector<std::size_t> histogram_of(std::span<const DegreeRow> rows, std::string_view source) {
    std::vector<std::size_t> hist;
    for (const auto& r : rows) {
        if (r.source == source) {
            if (hist.size() <= r.degree) {
                hist.resize(r.degree + 1, 0);
            }
            hist[r.degree] = r.count;
        }
    }
    return hist;
}

EnsembleComparison compare_ensembles(const SimulationConfig& cfg,
                                     std::span<const FormationResult> ensemble,
                                     std::size_t jobs) {
    cfg.validate();
    if (ensemble.empty()) {
        throw std::invalid_argument("compare_ensembles: empty ensemble");
    }
    const auto profiles = endo_profiles(cfg);
    const std::size_t n = ensemble.size();
    const std::size_t nodes = profiles.size();

    std::vector<Graph> endo;
    endo.reserve(n);
    for (const auto& f : ensemble) {
        endo.push_back(f.graph);
    }

    EnsembleComparison cmp;
    for (const auto& g : endo) {
        cmp.endo_density += density(g);
    }
    cmp.endo_density /= static_cast<double>(n);
    cmp.er_density = cfg.er_density.value_or(cmp.endo_density);
    for (std::size_t k = 0; k < n; ++k) {
        Rng rng(derive_seed(cfg.seed, 1, k));
        cmp.er_graphs.push_back(er_random(nodes, cmp.er_density, rng));
    }

    // Task layout: [endo unbiased | er unbiased | per bias level: endo S, er S].
    const std::size_t levels = cfg.bias_grid.size();
    const std::size_t S = cfg.replicas;
    cmp.runs.resize(2 * n + 2 * levels * S);
    parallel_for(cmp.runs.size(), jobs, [&](std::size_t k) {
        const bool biased = k >= 2 * n;
        const std::size_t rest = biased ? k - 2 * n : k;
        std::size_t level = 0;
        std::size_t index = rest;
        bool on_er = false;
        if (biased) {
            level = rest / (2 * S);
            on_er = rest % (2 * S) >= S;
            index = rest % S;
        } else {
            on_er = rest >= n;
            index = rest % n;
        }
        const std::size_t net = index % n;
        const Graph& g = on_er ? cmp.er_graphs[net] : endo[net];
        const std::uint64_t stream = (biased ? 4 : 2) + (on_er ? 1 : 0);
        const std::uint64_t seed = derive_seed(cfg.seed, stream, level, index);
        std::string label = on_er ? "ER" : "ENDO";
        std::optional<double> bias;
        if (biased) {
            bias = cfg.bias_grid[level];
            label += ":b=" + format_double(*bias);
        }
        Rng rng(seed);
        cmp.runs[k] = simulate(cfg, std::move(label), seed, density(g), profiles, g, bias, rng);
    });

    std::vector<double> endo_x;
    std::vector<double> er_x;
    std::vector<double> endo_t;
    std::vector<double> er_t;
    for (std::size_t k = 0; k < 2 * n; ++k) {
        const auto& r = cmp.runs[k];
        (k < n ? endo_x : er_x).push_back(r.x_final);
        (k < n ? endo_t : er_t).push_back(censored_conv_time(r, cfg));
    }
    auto compare = [&](std::string metric, const std::vector<double>& a,
                       const std::vector<double>& b, std::uint64_t tag) {
        MeanComparison m;
        m.metric = std::move(metric);
        m.endo_runs = a.size();
        m.er_runs = b.size();
        m.endo_mean = mean(a);
        m.er_mean = mean(b);
        m.difference = bootstrap_mean_difference(a, b, bootstrap_resamples,
                                                 derive_seed(cfg.seed, 6, tag));
        return m;
    };
    cmp.final_action = compare("x_final", endo_x, er_x, 0);
    cmp.convergence_time = compare("conv_time", endo_t, er_t, 1);

    for (std::size_t level = 0; level < levels; ++level) {
        BiasPoint p;
        p.bias = cfg.bias_grid[level];
        std::vector<double> a;
        std::vector<double> b;
        const std::size_t base = 2 * n + level * 2 * S;
        for (std::size_t s = 0; s < S; ++s) {
            a.push_back(cmp.runs[base + s].contagion ? 1.0 : 0.0);
            b.push_back(cmp.runs[base + S + s].contagion ? 1.0 : 0.0);
        }
        p.endo_runs = p.er_runs = S;
        p.endo_contagious = static_cast<std::size_t>(std::accumulate(a.begin(), a.end(), 0.0));
        p.er_contagious = static_cast<std::size_t>(std::accumulate(b.begin(), b.end(), 0.0));
        p.difference =
            bootstrap_mean_difference(a, b, bootstrap_resamples, derive_seed(cfg.seed, 7, level));
        cmp.bias.push_back(p);
    }

    cmp.degrees = degree_table(cfg, endo, cmp.er_graphs);
    return cmp;
}

EnsembleComparison compare_ensembles(const SimulationConfig& cfg, std::size_t jobs) {
    const auto ensemble = form_ensemble(cfg, jobs);
    return compare_ensembles(cfg, ensemble, jobs);
}

// ---- CSV ----

namespace {

constexpr std::string_view runs_header = "config,seed,rho,x_init,x_final,contagion,conv_time";
constexpr std::string_view contagion_header =
    "config,rho,conditioning,runs,contagious,probability";

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            return fields;
        }
        start = comma + 1;
    }
}

template <class T>
T parse_uint(std::string_view text) {
    T x{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::runtime_error("csv: bad integer '" + std::string(text) + "'");
    }
    return x;
}

double parse_real(std::string_view text) {
    try {
        return parse_double(text);
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("csv: bad number '" + std::string(text) + "'");
    }
}

void check_label(const std::string& label) {
    if (label.find_first_of(",\n\"") != std::string::npos) {
        throw std::invalid_argument("csv: label '" + label + "' cannot be written unquoted");
    }
}

// Reads the header and returns the remaining non-empty lines split on commas.
std::vector<std::vector<std::string>> read_table(std::istream& in, std::string_view header,
                                                 std::size_t columns) {
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw std::runtime_error("csv: expected header '" + std::string(header) + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != columns) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(columns));
        }
        rows.emplace_back(fields.begin(), fields.end());
    }
    return rows;
}

Conditioning parse_conditioning(std::string_view text) {
    for (auto c : {Conditioning::all, Conditioning::matching_start,
                   Conditioning::non_matching_start}) {
        if (to_string(c) == text) {
            return c;
        }
    }
    throw std::runtime_error("csv: unknown conditioning '" + std::string(text) + "'");
}

}  // namespace

void write_runs_csv(std::ostream& out, std::span<const RunRecord> records) {
    out << runs_header << '\n';
    for (const auto& r : records) {
        check_label(r.config);
        out << r.config << ',' << r.seed << ',' << format_double(r.rho) << ','
            << format_double(r.x_init) << ',' << format_double(r.x_final) << ','
            << (r.contagion ? 1 : 0) << ',';
        if (r.conv_time) {
            out << *r.conv_time;
        }
        out << '\n';
    }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
    std::vector<RunRecord> out;
    for (const auto& f : read_table(in, runs_header, 7)) {
        RunRecord r;
        r.config = f[0];
        r.seed = parse_uint<std::uint64_t>(f[1]);
        r.rho = parse_real(f[2]);
        r.x_init = parse_real(f[3]);
        r.x_final = parse_real(f[4]);
        if (f[5] != "0" && f[5] != "1") {
            throw std::runtime_error("csv: contagion must be 0 or 1");
        }
        r.contagion = f[5] == "1";
        if (!f[6].empty()) {
            r.conv_time = parse_uint<std::size_t>(f[6]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_contagion_csv(std::ostream& out, std::span<const ContagionEstimate> rows) {
    out << contagion_header << '\n';
    for (const auto& e : rows) {
        check_label(e.config);
        out << e.config << ',' << format_double(e.rho) << ',' << to_string(e.conditioning) << ','
            << e.runs << ',' << e.contagious << ',';
        if (e.probability) {
            out << format_double(*e.probability);
        }
        out << '\n';
    }
}

std::vector<ContagionEstimate> read_contagion_csv(std::istream& in) {
    std::vector<ContagionEstimate> out;
    for (const auto& f : read_table(in, contagion_header, 6)) {
        ContagionEstimate e;
        e.config = f[0];
        e.rho = parse_real(f[1]);
        e.conditioning = parse_conditioning(f[2]);
        e.runs = parse_uint<std::size_t>(f[3]);
        e.contagious = parse_uint<std::size_t>(f[4]);
        if (!f[5].empty()) {
            e.probability = parse_real(f[5]);
        }
        out.push_back(std::move(e));
    }
    return out;
}

void write_summary_csv(std::ostream& out, std::span<const SweepSummary> rows) {
    out << "config,rho,runs,mean_x_init,mean_x_final,converged\n";
    for (const auto& s : rows) {
        out << s.config << ',' << format_double(s.rho) << ',' << s.runs << ','
            << format_double(s.mean_x_init) << ',' << format_double(s.mean_x_final) << ','
            << s.converged << '\n';
    }
}

void write_fvi_csv(std::ostream& out, std::span<const RunRecord> records, std::size_t bins) {
    out << "config,x_init_bin,x_final_bin,x_init_lo,x_init_hi,x_final_lo,x_final_hi,count,"
           "frequency\n";
    std::vector<std::string> labels;
    for (const auto& r : records) {
        if (std::find(labels.begin(), labels.end(), r.config) == labels.end()) {
            labels.push_back(r.config);
        }
    }
    const double w = 1.0 / static_cast<double>(bins);
    for (const auto& label : labels) {
        std::vector<RunRecord> subset;
        std::copy_if(records.begin(), records.end(), std::back_inserter(subset),
                     [&](const RunRecord& r) { return r.config == label; });
        const auto grid = final_vs_initial(subset, bins);
        for (std::size_t a = 0; a < bins; ++a) {
            for (std::size_t b = 0; b < bins; ++b) {
                out << label << ',' << a << ',' << b << ',' << format_double(a * w) << ','
                    << format_double((a + 1) * w) << ',' << format_double(b * w) << ','
                    << format_double((b + 1) * w) << ',' << grid.at(a, b) << ','
                    << format_double(grid.frequency(a, b)) << '\n';
            }
        }
    }
}

void write_degrees_csv(std::ostream& out, std::span<const DegreeRow> rows) {
    out << "source,degree,count\n";
    for (const auto& r : rows) {
        out << r.source << ',' << r.degree << ',' << r.count << '\n';
    }
}

void write_meanfield_csv(std::ostream& out, const SignalStructure& sig, std::size_t samples) {
    out << "q,action_probability\n";
    for (const auto& s : meanfield_curve(sig, samples)) {
        out << format_double(s.q) << ',' << format_double(s.action_probability) << '\n';
    }
}

void write_fixed_points_csv(std::ostream& out, const SignalStructure& sig) {
    out << "q,stability\n";
    for (const auto& fp : fixed_points(sig)) {
        out << format_double(fp.q) << ','
            << (fp.stability == Stability::stable ? "stable" : "unstable") << '\n';
    }
}

void write_network_summary_csv(std::ostream& out, std::span<const NetworkSummary> rows) {
    out << "network,links,density,informed_mean_degree,uninformed_mean_degree,"
           "deletion_violations,addition_violations,replay_failures\n";
    for (const auto& s : rows) {
        out << s.network << ',' << s.links << ',' << format_double(s.density) << ','
            << format_double(s.informed_mean_degree) << ','
            << format_double(s.uninformed_mean_degree) << ',' << s.deletion_violations << ','
            << s.addition_violations << ',' << s.replay_failures << '\n';
    }
}

void write_comparison_csv(std::ostream& out, const EnsembleComparison& cmp) {
    out << "metric,endo_runs,er_runs,endo_mean,er_mean,diff_lo,diff_hi\n";
    out << "density,,," << format_double(cmp.endo_density) << ','
        << format_double(cmp.er_density) << ",,\n";
    for (const auto* m : {&cmp.final_action, &cmp.convergence_time}) {
        out << m->metric << ',' << m->endo_runs << ',' << m->er_runs << ','
            << format_double(m->endo_mean) << ',' << format_double(m->er_mean) << ','
            << format_double(m->difference.lo) << ',' << format_double(m->difference.hi)
            << '\n';
    }
}

void write_bias_csv(std::ostream& out, std::span<const BiasPoint> rows) {
    out << "bias,endo_runs,endo_contagious,endo_probability,er_runs,er_contagious,"
           "er_probability,diff_lo,diff_hi\n";
    for (const auto& p : rows) {
        out << format_double(p.bias) << ',' << p.endo_runs << ',' << p.endo_contagious << ','
            << format_double(p.endo_probability()) << ',' << p.er_runs << ','
            << p.er_contagious << ',' << format_double(p.er_probability()) << ','
            << format_double(p.difference.lo) << ',' << format_double(p.difference.hi) << '\n';
    }
}

}  // namespace contagion
