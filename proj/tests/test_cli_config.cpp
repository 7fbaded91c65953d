#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli_config.hpp"

using bqcli::ConfigError;
using bqcli::ExperimentConfig;
using nlohmann::json;

namespace {

json sample_config() {
    return json::parse(R"({
        "dist": {"type":"hyperexp","probs":[0.8,0.2],"rates":[2.0,0.3333333333333333]},
        "rho": 0.8,
        "policies": [
            {"type":"fcfs"},
            {"type":"boost","boost":{"type":"theta_optimal","theta":null}},
            {"type":"nudge-m","k":8}
        ],
        "jobs": 5000000,
        "seeds": [1, 2, 3],
        "t_grid": {"kind":"log","lo":1.0,"hi":60.0,"points":40},
        "warmup": 0.01,
        "noise_sigma": 0.0,
        "out": "out"
    })");
}

} // namespace

TEST_CASE("config round-trips field for field") {
    auto cfg = ExperimentConfig::from_json(sample_config());
    cfg.validate();
    auto reparsed = ExperimentConfig::from_json(cfg.to_json());
    CHECK(cfg.to_json() == reparsed.to_json());
    CHECK(reparsed.jobs == 5000000);
    CHECK(reparsed.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(reparsed.policies.size() == 3);
    CHECK(reparsed.t_grid.kind == "log");
    CHECK(reparsed.t_grid.points == 40);
    CHECK(*reparsed.warmup_fraction == 0.01);
    CHECK(reparsed.rho.has_value());
    CHECK(!reparsed.lambda.has_value());
}

TEST_CASE("metadata header reconstructs an equivalent config") {
    auto cfg = ExperimentConfig::from_json(sample_config());
    std::string csv = "# boostq-simulate\n" + bqcli::config_metadata_line(cfg) +
                      "\n# seed=1\nt,survival\n0.5,0.9\n";
    auto back = bqcli::config_from_metadata(csv);
    CHECK(back.to_json() == cfg.to_json());
}

TEST_CASE("config validation") {
    auto both = sample_config();
    both["lambda"] = 0.8;  // rho is already set
    CHECK_THROWS_AS(ExperimentConfig::from_json(both).validate(), ConfigError);

    auto neither = sample_config();
    neither.erase("rho");
    CHECK_THROWS_AS(ExperimentConfig::from_json(neither).validate(), ConfigError);

    auto no_seeds = sample_config();
    no_seeds["seeds"] = json::array();
    CHECK_THROWS_AS(ExperimentConfig::from_json(no_seeds).validate(), ConfigError);

    auto bad_warmup = sample_config();
    bad_warmup["warmup"] = 0.6;
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_warmup).validate(), ConfigError);

    auto bad_grid = sample_config();
    bad_grid["t_grid"]["kind"] = "cubic";
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_grid).validate(), ConfigError);
}
