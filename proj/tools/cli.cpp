#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "contagion/config.hpp"
#include "contagion/format.hpp"
#include "contagion/harness.hpp"
#include "contagion/meanfield.hpp"

namespace contagion::cli {

namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::size_t jobs = 0;
};

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& a) {
    cmd->add_option("--config", a.config_path, "config file (key = value lines)")->required();
    cmd->add_option("--seed", a.seed, "master seed")->required();
    cmd->add_option("--out", a.out_dir, "output directory")->required();
    cmd->add_option("--set", a.overrides, "key=value override, applied after the file")
        ->take_all();
    cmd->add_option("--jobs", a.jobs, "worker threads (0 = all cores); does not change results");
}

SimulationConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file '" + path + "'");
    }
    SimulationConfig cfg = parse_config(in);
    apply_overrides(cfg, overrides);
    return cfg;
}

SimulationConfig load_experiment(const ExperimentArgs& a) {
    SimulationConfig cfg = load_config(a.config_path, a.overrides);
    cfg.seed = a.seed;
    cfg.validate();
    return cfg;
}

fs::path prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
    return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    body(out);
    out.flush();
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

void write_config(const fs::path& dir, const SimulationConfig& cfg) {
    write_file(dir / "config.txt", [&](std::ostream& o) {
        o << "# hash=" << std::hex << std::setw(16) << std::setfill('0') << config_hash(cfg)
          << std::dec << '\n'
          << to_text(cfg);
    });
}

void write_meanfield(const fs::path& dir, const SignalStructure& sig) {
    write_file(dir / "meanfield_curve.csv", [&](std::ostream& o) { write_meanfield_csv(o, sig, 201); });
    write_file(dir / "fixed_points.csv", [&](std::ostream& o) { write_fixed_points_csv(o, sig); });
}

int do_sweep(const ExperimentArgs& a, std::ostream& out) {
    const SimulationConfig cfg = load_experiment(a);
    const fs::path dir = prepare_dir(a.out_dir);
    const auto records = run_sweep(cfg, a.jobs);
    write_config(dir, cfg);
    write_file(dir / "runs.csv", [&](std::ostream& o) { write_runs_csv(o, records); });
    write_file(dir / "contagion.csv",
               [&](std::ostream& o) { write_contagion_csv(o, estimate_contagion_prob(records)); });
    write_file(dir / "sweep_summary.csv",
               [&](std::ostream& o) { write_summary_csv(o, summarize_sweep(records)); });
    write_file(dir / "fvi_grid.csv",
               [&](std::ostream& o) { write_fvi_csv(o, records, cfg.fvi_bins); });
    if (cfg.base_signal().informative()) {
        write_meanfield(dir, cfg.base_signal());
    }
    out << "runs " << records.size() << " -> " << dir.string() << '\n';
    return ok;
}

void write_ensemble(const fs::path& dir, std::span<const FormationResult> ensemble,
                    std::span<const NetworkSummary> summary) {
    const fs::path nets = prepare_dir(dir / "networks");
    const int width = static_cast<int>(std::to_string(ensemble.size() - 1).size());
    for (std::size_t k = 0; k < ensemble.size(); ++k) {
        std::ostringstream name;
        name << "network_" << std::setw(width) << std::setfill('0') << k << ".edges";
        write_file(nets / name.str(), [&](std::ostream& o) { write_edge_list(o, ensemble[k].graph); });
    }
    write_file(dir / "formation_log.tsv", [&](std::ostream& o) {
        write_formation_log_header(o);
        for (std::size_t k = 0; k < ensemble.size(); ++k) {
            write_formation_log(o, ensemble[k].events, k);
        }
    });
    write_file(dir / "formation_summary.csv",
               [&](std::ostream& o) { write_network_summary_csv(o, summary); });
}

void print_ensemble(std::ostream& out, std::span<const NetworkSummary> summary) {
    double rho = 0.0;
    double informed = 0.0;
    double uninformed = 0.0;
    std::size_t deletion = 0;
    std::size_t addition = 0;
    std::size_t replay = 0;
    for (const auto& s : summary) {
        rho += s.density;
        informed += s.informed_mean_degree;
        uninformed += s.uninformed_mean_degree;
        deletion += s.deletion_violations;
        addition += s.addition_violations;
        replay += s.replay_failures;
    }
    const double n = static_cast<double>(summary.size());
    out << "networks " << summary.size() << "\nmean_density " << format_double(rho / n)
        << "\ninformed_mean_degree " << format_double(informed / n)
        << "\nuninformed_mean_degree " << format_double(uninformed / n)
        << "\ndeletion_violations " << deletion << "\naddition_violations " << addition
        << "\nreplay_failures " << replay << '\n';
}

int do_form(const ExperimentArgs& a, std::ostream& out) {
    const SimulationConfig cfg = load_experiment(a);
    const fs::path dir = prepare_dir(a.out_dir);
    const auto ensemble = form_ensemble(cfg, a.jobs);
    const auto summary = summarize_ensemble(cfg, ensemble, a.jobs);
    std::vector<Graph> graphs;
    for (const auto& f : ensemble) {
        graphs.push_back(f.graph);
    }
    write_config(dir, cfg);
    write_ensemble(dir, ensemble, summary);
    write_file(dir / "degrees.csv",
               [&](std::ostream& o) { write_degrees_csv(o, degree_table(cfg, graphs, {})); });
    print_ensemble(out, summary);
    return ok;
}

int do_compare(const ExperimentArgs& a, std::ostream& out) {
    const SimulationConfig cfg = load_experiment(a);
    const fs::path dir = prepare_dir(a.out_dir);
    const auto ensemble = form_ensemble(cfg, a.jobs);
    const auto summary = summarize_ensemble(cfg, ensemble, a.jobs);
    const auto cmp = compare_ensembles(cfg, ensemble, a.jobs);
    write_config(dir, cfg);
    write_ensemble(dir, ensemble, summary);
    write_file(dir / "degrees.csv", [&](std::ostream& o) { write_degrees_csv(o, cmp.degrees); });
    write_file(dir / "runs.csv", [&](std::ostream& o) { write_runs_csv(o, cmp.runs); });
    write_file(dir / "compare_summary.csv", [&](std::ostream& o) { write_comparison_csv(o, cmp); });
    write_file(dir / "contagion_bias.csv", [&](std::ostream& o) { write_bias_csv(o, cmp.bias); });
    print_ensemble(out, summary);
    out << "er_density " << format_double(cmp.er_density) << '\n';
    for (const auto* m : {&cmp.final_action, &cmp.convergence_time}) {
        out << m->metric << " endo " << format_double(m->endo_mean) << " er "
            << format_double(m->er_mean) << " diff_ci [" << format_double(m->difference.lo)
            << ", " << format_double(m->difference.hi) << "]\n";
    }
    return ok;
}

struct MeanfieldArgs {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double sigma2 = 0.0;
    std::string out_dir;
};

int do_meanfield(const MeanfieldArgs& a, std::ostream& out) {
    if (!(a.sigma2 > 0.0)) {
        throw ConfigError("sigma2", "must be positive");
    }
    if (a.mu0 == a.mu1) {
        throw ConfigError("mu1", "must differ from mu0 for the mean-field map to have isolated "
                                 "fixed points");
    }
    const auto sig = SignalStructure::from_variance(a.mu0, a.mu1, a.sigma2);
    for (const auto& fp : fixed_points(sig)) {
        out << "q=" << format_double(fp.q) << ' '
            << (fp.stability == Stability::stable ? "stable" : "unstable") << '\n';
    }
    if (!a.out_dir.empty()) {
        write_meanfield(prepare_dir(a.out_dir), sig);
    }
    return ok;
}

struct AuditArgs {
    std::string graph_path;
    std::string config_path;
    std::vector<std::string> overrides;
};

int do_audit(const AuditArgs& a, std::ostream& out) {
    SimulationConfig cfg = load_config(a.config_path, a.overrides);
    cfg.validate();
    std::ifstream in(a.graph_path);
    if (!in) {
        throw IoError("cannot read graph file '" + a.graph_path + "'");
    }
    Graph g = [&] {
        try {
            return read_edge_list(in);
        } catch (const std::runtime_error& e) {
            throw IoError("'" + a.graph_path + "': " + e.what());
        }
    }();
    const auto profiles = endo_profiles(cfg);
    if (profiles.size() != g.size()) {
        throw ConfigError("informed_agents", "informed_agents + uninformed_agents = " +
                                                 std::to_string(profiles.size()) +
                                                 " but the graph has " +
                                                 std::to_string(g.size()) + " nodes");
    }
    const UtilityEvaluator eval(profiles, UtilityModel{cfg.q_prime});
    std::vector<double> costs;
    for (const auto& p : profiles) {
        costs.push_back(p.cost);
    }
    const auto report = is_pairwise_stable(g, eval.as_function(), costs);
    out << "deletion_violations " << report.count(StabilityViolationKind::deletion)
        << "\naddition_violations " << report.count(StabilityViolationKind::addition) << '\n';
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Social learning and contagion on networks"};
    app.name("contagion");
    app.require_subcommand(1);

    ExperimentArgs sweep_args;
    ExperimentArgs form_args;
    ExperimentArgs compare_args;
    MeanfieldArgs mf_args;
    AuditArgs audit_args;

    add_experiment_flags(app.add_subcommand("sweep", "density sweep on ER graphs"), sweep_args);
    add_experiment_flags(app.add_subcommand("form", "form an ensemble of endogenous networks"),
                         form_args);
    add_experiment_flags(app.add_subcommand("compare", "endogenous vs ER learning dynamics"),
                         compare_args);
    auto* mf = app.add_subcommand("meanfield", "fixed points of the mean-field map");
    mf->add_option("--mu0", mf_args.mu0)->required();
    mf->add_option("--mu1", mf_args.mu1)->required();
    mf->add_option("--sigma2", mf_args.sigma2)->required();
    mf->add_option("--out", mf_args.out_dir, "also write the curve and fixed points here");
    auto* audit = app.add_subcommand("audit", "pairwise-stability audit of a graph");
    audit->add_option("--graph", audit_args.graph_path)->required();
    audit->add_option("--config", audit_args.config_path)->required();
    audit->add_option("--set", audit_args.overrides)->take_all();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "contagion: " << e.what() << '\n';
        return config_error;
    }

    try {
        if (app.got_subcommand("sweep")) {
            return do_sweep(sweep_args, out);
        }
        if (app.got_subcommand("form")) {
            return do_form(form_args, out);
        }
        if (app.got_subcommand("compare")) {
            return do_compare(compare_args, out);
        }
        if (app.got_subcommand("meanfield")) {
            return do_meanfield(mf_args, out);
        }
        return do_audit(audit_args, out);
    } catch (const ConfigError& e) {
        err << "contagion: " << e.what() << '\n';
        return config_error;
    } catch (const IoError& e) {
        err << "contagion: " << e.what() << '\n';
        return io_error;
    } catch (const std::exception& e) {
        err << "contagion: " << e.what() << '\n';
        return config_error;
    }
}

}  // namespace contagion::cli
