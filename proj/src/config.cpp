#include "contagion/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <sstream>

#include "contagion/format.hpp"

namespace contagion {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_real(std::string_view key, std::string_view v) {
    try {
        const double x = parse_double(v);
        if (!std::isfinite(x)) {
            throw std::invalid_argument("non-finite");
        }
        return x;
    } catch (const std::invalid_argument&) {
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(v) + "'");
    }
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(std::string(key),
                          "expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return x;
}

std::size_t to_count(std::string_view key, std::string_view v) {
    return static_cast<std::size_t>(to_u64(key, v));
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw ConfigError(std::string(key), "expected true or false, got '" + std::string(v) + "'");
}

std::optional<double> to_opt_real(std::string_view key, std::string_view v) {
    if (v == "none" || v == "auto") {
        return std::nullopt;
    }
    return to_real(key, v);
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const auto comma = v.find(',', start);
        const auto item = trim(v.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start));
        out.push_back(to_real(key, item));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::string opt_text(const std::optional<double>& x, const char* absent) {
    return x ? format_double(*x) : std::string(absent);
}

std::string list_text(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out += (k ? "," : "") + format_double(xs[k]);
    }
    return out;
}

struct Key {
    std::string_view name;
    std::function<void(SimulationConfig&, std::string_view)> set;
    std::function<std::string(const SimulationConfig&)> get;
};

#define REAL_KEY(field)                                                                 \
    Key {                                                                               \
        #field, [](SimulationConfig& c, std::string_view v) { c.field = to_real(#field, v); }, \
            [](const SimulationConfig& c) { return format_double(c.field); }             \
    }
#define COUNT_KEY(field)                                                                 \
    Key {                                                                                \
        #field, [](SimulationConfig& c, std::string_view v) { c.field = to_count(#field, v); }, \
            [](const SimulationConfig& c) { return std::to_string(c.field); }             \
    }
#define BOOL_KEY(field)                                                                 \
    Key {                                                                               \
        #field, [](SimulationConfig& c, std::string_view v) { c.field = to_bool(#field, v); }, \
            [](const SimulationConfig& c) { return std::string(c.field ? "true" : "false"); } \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        Key{"config", [](SimulationConfig&, std::string_view) {},
            [](const SimulationConfig& c) { return c.id; }},
        Key{"seed", [](SimulationConfig& c, std::string_view v) { c.seed = to_u64("seed", v); },
            [](const SimulationConfig& c) { return std::to_string(c.seed); }},
        COUNT_KEY(agents),
        COUNT_KEY(steps),
        COUNT_KEY(replicas),
        Key{"scenario",
            [](SimulationConfig& c, std::string_view v) {
                try {
                    c.scenario = parse_scenario(v);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("scenario", e.what());
                }
            },
            [](const SimulationConfig& c) { return std::string(to_string(c.scenario)); }},
        REAL_KEY(rho_min),
        REAL_KEY(rho_max),
        COUNT_KEY(rho_steps),
        REAL_KEY(mu0),
        REAL_KEY(mu1),
        REAL_KEY(sigma2),
        REAL_KEY(informed_mu0),
        REAL_KEY(informed_mu1),
        REAL_KEY(informed_sigma2),
        REAL_KEY(p_informed_min),
        REAL_KEY(p_informed_max),
        COUNT_KEY(p_informed_steps),
        Key{"bias", [](SimulationConfig& c, std::string_view v) { c.bias = to_opt_real("bias", v); },
            [](const SimulationConfig& c) { return opt_text(c.bias, "none"); }},
        REAL_KEY(contagion_fraction),
        COUNT_KEY(conv_window),
        REAL_KEY(conv_tol),
        COUNT_KEY(fvi_bins),
        COUNT_KEY(informed_agents),
        COUNT_KEY(uninformed_agents),
        REAL_KEY(informed_cost),
        REAL_KEY(uninformed_cost),
        COUNT_KEY(formation_iters),
        REAL_KEY(q_prime),
        REAL_KEY(beta),
        COUNT_KEY(networks),
        Key{"er_density",
            [](SimulationConfig& c, std::string_view v) { c.er_density = to_opt_real("er_density", v); },
            [](const SimulationConfig& c) { return opt_text(c.er_density, "auto"); }},
        Key{"bias_grid",
            [](SimulationConfig& c, std::string_view v) { c.bias_grid = to_list("bias_grid", v); },
            [](const SimulationConfig& c) { return list_text(c.bias_grid); }},
        BOOL_KEY(accept_ties),
        BOOL_KEY(prune_unprofitable),
    };
    return table;
}

#undef REAL_KEY
#undef COUNT_KEY
#undef BOOL_KEY

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x =
            n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
        // Keep grid values free of representation noise (0.15, not 0.15000000000000002).
        out.push_back(std::round(x * 1e12) / 1e12);
    }
    return out;
}

void require(bool ok, const char* key, const char* message) {
    if (!ok) {
        throw ConfigError(key, message);
    }
}

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::vector<double> SimulationConfig::rho_grid() const { return linspace(rho_min, rho_max, rho_steps); }

std::vector<double> SimulationConfig::p_informed_grid() const {
    return linspace(p_informed_min, p_informed_max, p_informed_steps);
}

SignalStructure SimulationConfig::base_signal() const {
    return SignalStructure::from_variance(mu0, mu1, sigma2);
}

SignalStructure SimulationConfig::informed_signal() const {
    return SignalStructure::from_variance(informed_mu0, informed_mu1, informed_sigma2);
}

void SimulationConfig::validate() const {
    require(agents >= 1, "agents", "must be at least 1");
    require(replicas >= 1, "replicas", "must be at least 1");
    require(rho_steps >= 1, "rho_steps", "must be at least 1");
    require(unit(rho_min), "rho_min", "must lie in [0, 1]");
    require(unit(rho_max), "rho_max", "must lie in [0, 1]");
    require(sigma2 > 0.0, "sigma2", "must be positive");
    require(informed_sigma2 > 0.0, "informed_sigma2", "must be positive");
    require(unit(p_informed_min), "p_informed_min", "must lie in [0, 1]");
    require(unit(p_informed_max), "p_informed_max", "must lie in [0, 1]");
    require(!bias || unit(*bias), "bias", "must lie in [0, 1] or be none");
    require(unit(contagion_fraction), "contagion_fraction", "must lie in [0, 1]");
    require(conv_window >= 1, "conv_window", "must be at least 1");
    require(conv_tol > 0.0, "conv_tol", "must be positive");
    require(fvi_bins >= 1, "fvi_bins", "must be at least 1");
    require(informed_cost >= 0.0, "informed_cost", "must be non-negative");
    require(uninformed_cost >= 0.0, "uninformed_cost", "must be non-negative");
    require(formation_iters >= 1, "formation_iters", "must be at least 1");
    require(unit(q_prime), "q_prime", "must lie in [0, 1]");
    require(beta >= 0.0, "beta", "must be non-negative");
    require(networks >= 1, "networks", "must be at least 1");
    require(!er_density || unit(*er_density), "er_density", "must lie in [0, 1] or be auto");
    require(!bias_grid.empty() && std::all_of(bias_grid.begin(), bias_grid.end(), unit),
            "bias_grid", "must be a non-empty list of values in [0, 1]");
    if (id == "ENDO") {
        require(agents == informed_agents + uninformed_agents, "agents",
                "must equal informed_agents + uninformed_agents");
    }
}

SimulationConfig preset(std::string_view id) {
    SimulationConfig c;
    if (id == "I") {
        c.mu0 = 0.4;
        c.mu1 = 0.6;
    } else if (id == "U") {
        c.mu0 = 0.49;
        c.mu1 = 0.51;
    } else if (id == "H") {
        c.mu0 = 0.49;
        c.mu1 = 0.51;
        c.rho_min = c.rho_max = 0.5;
        c.rho_steps = 1;
        c.p_informed_min = 0.1;
        c.p_informed_max = 0.9;
        c.p_informed_steps = 9;
    } else if (id == "ENDO") {
        c.agents = 30;
        c.replicas = 100;
        c.mu0 = 0.4;
        c.mu1 = 0.6;
    } else if (id != "custom") {
        throw ConfigError("config", "unknown preset '" + std::string(id) + "'");
    }
    c.id = std::string(id);
    return c;
}

void apply_setting(SimulationConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "config") {
        throw ConfigError("config", "the preset can only be chosen in the config file");
    }
    for (const auto& k : keys()) {
        if (k.name == key) {
            k.set(cfg, trim(value));
            return;
        }
    }
    throw ConfigError(std::string(key), "unknown key");
}

SimulationConfig parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::optional<std::string> preset_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const auto body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(body),
                              "line " + std::to_string(line_no) + " is not 'key = value'");
        }
        std::string key(trim(body.substr(0, eq)));
        std::string value(trim(body.substr(eq + 1)));
        if (std::any_of(entries.begin(), entries.end(),
                        [&](const auto& e) { return e.first == key; }) ||
            (key == "config" && preset_id)) {
            throw ConfigError(key, "given more than once");
        }
        if (key == "config") {
            preset_id = value;
        } else {
            entries.emplace_back(std::move(key), std::move(value));
        }
    }
    SimulationConfig cfg = preset(preset_id.value_or("custom"));
    for (const auto& [k, v] : entries) {
        apply_setting(cfg, k, v);
    }
    return cfg;
}

void apply_overrides(SimulationConfig& cfg, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(o, "override must be key=value");
        }
        apply_setting(cfg, trim(std::string_view(o).substr(0, eq)),
                      std::string_view(o).substr(eq + 1));
    }
}

std::string to_text(const SimulationConfig& cfg) {
    std::ostringstream out;
    for (const auto& k : keys()) {
        out << k.name << " = " << k.get(cfg) << '\n';
    }
    return out.str();
}

std::uint64_t config_hash(const SimulationConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_text(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<AgentProfile> endo_profiles(const SimulationConfig& cfg) {
    std::vector<AgentProfile> out;
    out.reserve(cfg.informed_agents + cfg.uninformed_agents);
    for (std::size_t k = 0; k < cfg.informed_agents; ++k) {
        out.emplace_back(cfg.informed_signal(), cfg.informed_cost, true);
    }
    for (std::size_t k = 0; k < cfg.uninformed_agents; ++k) {
        out.emplace_back(cfg.base_signal(), cfg.uninformed_cost, false);
    }
    return out;
}

}  // namespace contagion
