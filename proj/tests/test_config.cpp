#include <doctest.h>

#include <sstream>

#include "contagion/config.hpp"

using namespace contagion;

namespace {

SimulationConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string error_key(const std::string& text) {
    try {
        parse(text).validate();
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("presets") {
    const auto i = preset("I");
    CHECK(i.agents == 100);
    CHECK(i.steps == 100);
    CHECK(i.replicas == 1000);
    CHECK(i.mu0 == 0.4);
    CHECK(i.mu1 == 0.6);
    CHECK(i.sigma2 == 0.1);
    CHECK(i.rho_grid().size() == 20);

    const auto u = preset("U");
    CHECK(u.mu0 == 0.49);
    CHECK(u.mu1 == 0.51);

    const auto h = preset("H");
    CHECK(h.rho_grid() == std::vector<double>{0.5});
    CHECK(h.p_informed_grid().size() == 9);
    CHECK(h.p_informed_grid().front() == 0.1);
    CHECK(h.p_informed_grid().back() == 0.9);

    const auto e = preset("ENDO");
    CHECK(e.agents == 30);
    CHECK(e.informed_agents == 4);
    CHECK(e.uninformed_agents == 26);
    CHECK(e.informed_mu0 == 0.3);
    CHECK(e.informed_mu1 == 0.7);
    CHECK(e.informed_cost == 0.0);
    CHECK(e.uninformed_cost == 0.1);
    CHECK(e.formation_iters == 400);
    CHECK(e.q_prime == 0.5);
    CHECK(e.beta == 30.0);
    CHECK(e.networks == 1000);
    CHECK(e.replicas == 100);
    CHECK(e.scenario == WeightingScenario::equal);
    CHECK_NOTHROW(e.validate());

    CHECK_THROWS_AS(preset("Z"), ConfigError);
}

TEST_CASE("density grid") {
    const auto grid = preset("I").rho_grid();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(grid[k] == doctest::Approx(0.05 * double(k)).epsilon(1e-15));
    }
    CHECK(grid[3] == 0.15);
    CHECK(grid.back() == 0.95);
}

TEST_CASE("file parsing") {
    const auto cfg = parse("# sweep\nmu0 = 0.45   # trailing comment\n\nconfig = U\nsteps=7\n");
    CHECK(cfg.id == "U");
    CHECK(cfg.mu0 == 0.45);  // preset applied first, file value wins
    CHECK(cfg.mu1 == 0.51);
    CHECK(cfg.steps == 7);

    const auto more = parse("scenario = relative_neighborhood\nbias = 0.3\nbias_grid = 0, 0.5,1\n"
                            "er_density = 0.08\naccept_ties = false\n");
    CHECK(more.scenario == WeightingScenario::relative_neighborhood);
    CHECK(more.bias == 0.3);
    CHECK(more.bias_grid == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(more.er_density == 0.08);
    CHECK_FALSE(more.accept_ties);
    CHECK_FALSE(parse("bias = none\n").bias.has_value());
    CHECK_FALSE(parse("er_density = auto\n").er_density.has_value());
}

TEST_CASE("errors name the key") {
    CHECK(error_key("colour = red\n") == "colour");
    CHECK(error_key("steps = -3\n") == "steps");
    CHECK(error_key("mu0 = abc\n") == "mu0");
    CHECK(error_key("scenario = loud\n") == "scenario");
    CHECK(error_key("accept_ties = maybe\n") == "accept_ties");
    CHECK(error_key("rho_max = 1.5\n") == "rho_max");
    CHECK(error_key("agents = 0\n") == "agents");
    CHECK(error_key("sigma2 = 0\n") == "sigma2");
    CHECK(error_key("bias_grid = 0.1, 2\n") == "bias_grid");
    CHECK(error_key("steps = 3\nsteps = 4\n") == "steps");
    CHECK(error_key("config = ENDO\nagents = 31\n") == "agents");
    CHECK(error_key("config = Q\n") == "config");
    CHECK(error_key("just words\n") == "just words");
}

TEST_CASE("overrides take precedence over the file") {
    auto cfg = parse("config = I\nsteps = 50\n");
    apply_overrides(cfg, {"steps=60", "mu1 = 0.7"});
    CHECK(cfg.steps == 60);
    CHECK(cfg.mu1 == 0.7);
    CHECK_THROWS_AS(apply_overrides(cfg, {"steps"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, {"config=U"}), ConfigError);
}

TEST_CASE("text form round trip and hash") {
    auto cfg = preset("ENDO");
    cfg.seed = 1234;
    cfg.bias = 0.25;
    cfg.er_density = 0.0123456789;
    const std::string text = to_text(cfg);
    std::istringstream in(text);
    const auto back = parse_config(in);
    CHECK(to_text(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));
    cfg.mu1 = 0.7;
    CHECK(config_hash(back) != config_hash(cfg));
}

TEST_CASE("endogenous population profiles") {
    const auto cfg = preset("ENDO");
    const auto profiles = endo_profiles(cfg);
    REQUIRE(profiles.size() == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(profiles[i].informed == (i < 4));
        CHECK(profiles[i].cost == (i < 4 ? 0.0 : 0.1));
    }
    CHECK(profiles[0].signal.mu0() == 0.3);
    CHECK(profiles[29].signal.mu0() == 0.4);
}

}  // TEST_SUITE
