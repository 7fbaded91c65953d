#pragma once

// Experiment configuration for the boostq CLI. Lives with the CLI (the
// library itself takes JSON per object); kept header-only so the config
// round-trip is unit-testable.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace bqcli {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TGridSpec {
    std::string kind = "log";  // "log" or "linear"
    double lo = std::numeric_limits<double>::quiet_NaN();  // NaN -> auto from FCFS run
    double hi = std::numeric_limits<double>::quiet_NaN();
    std::size_t points = 40;
};

struct ExperimentConfig {
    json model;                       // distribution object or {"labels":[...]}
    std::optional<double> lambda;     // exactly one of lambda / rho
    std::optional<double> rho;
    std::vector<json> policies;
    std::size_t jobs = 100000;
    std::vector<std::uint64_t> seeds{1};
    TGridSpec t_grid;
    std::optional<double> warmup_fraction;  // unset -> library default
    std::optional<double> gamma_override;   // misspecified decay rate for theta-optimal boosts
    double noise_sigma = 0.0;
    bool dump_jobs = false;  // also write per-job samples per policy run
    std::string out_dir = ".";

    void validate() const {
        if (model.is_null()) throw ConfigError("config needs a 'dist' field");
        if (lambda.has_value() == rho.has_value())
            throw ConfigError("config needs exactly one of 'lambda' and 'rho'");
        if (seeds.empty()) throw ConfigError("config needs at least one seed");
        if (warmup_fraction && !(*warmup_fraction >= 0.0 && *warmup_fraction < 0.5))
            throw ConfigError("warmup fraction must lie in [0, 0.5)");
        if (jobs == 0) throw ConfigError("job count must be positive");
        if (t_grid.kind != "log" && t_grid.kind != "linear")
            throw ConfigError("t_grid kind must be 'log' or 'linear'");
        if (t_grid.points < 2) throw ConfigError("t_grid needs at least 2 points");
        if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be nonnegative");
    }

    static ExperimentConfig from_json(const json& j) {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        ExperimentConfig c;
        if (j.contains("dist")) c.model = j["dist"];
        if (j.contains("lambda") && !j["lambda"].is_null())
            c.lambda = j["lambda"].get<double>();
        if (j.contains("rho") && !j["rho"].is_null()) c.rho = j["rho"].get<double>();
        if (j.contains("policies")) {
            if (!j["policies"].is_array()) throw ConfigError("'policies' must be an array");
            for (const auto& p : j["policies"]) c.policies.push_back(p);
        }
        if (j.contains("jobs")) c.jobs = j["jobs"].get<std::size_t>();
        if (j.contains("seeds")) {
            c.seeds.clear();
            for (const auto& s : j["seeds"]) c.seeds.push_back(s.get<std::uint64_t>());
        }
        if (j.contains("t_grid")) {
            const auto& g = j["t_grid"];
            if (g.contains("kind")) c.t_grid.kind = g["kind"].get<std::string>();
            if (g.contains("lo") && !g["lo"].is_null()) c.t_grid.lo = g["lo"].get<double>();
            if (g.contains("hi") && !g["hi"].is_null()) c.t_grid.hi = g["hi"].get<double>();
            if (g.contains("points")) c.t_grid.points = g["points"].get<std::size_t>();
        }
        if (j.contains("warmup") && !j["warmup"].is_null())
            c.warmup_fraction = j["warmup"].get<double>();
        if (j.contains("gamma_override") && !j["gamma_override"].is_null())
            c.gamma_override = j["gamma_override"].get<double>();
        if (j.contains("noise_sigma")) c.noise_sigma = j["noise_sigma"].get<double>();
        if (j.contains("dump_jobs")) c.dump_jobs = j["dump_jobs"].get<bool>();
        if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
        return c;
    }

    json to_json() const {
        json j;
        j["dist"] = model;
        if (lambda) j["lambda"] = *lambda;
        if (rho) j["rho"] = *rho;
        j["policies"] = policies;
        j["jobs"] = jobs;
        j["seeds"] = seeds;
        json g;
        g["kind"] = t_grid.kind;
        if (!std::isnan(t_grid.lo)) g["lo"] = t_grid.lo;
        if (!std::isnan(t_grid.hi)) g["hi"] = t_grid.hi;
        g["points"] = t_grid.points;
        j["t_grid"] = g;
        if (warmup_fraction) j["warmup"] = *warmup_fraction;
        if (gamma_override) j["gamma_override"] = *gamma_override;
        j["noise_sigma"] = noise_sigma;
        j["dump_jobs"] = dump_jobs;
        j["out"] = out_dir;
        return j;
    }
};

/// One `# config=...` line embeds the whole config; extra `# key=value`
/// lines are human-readable duplicates.
inline std::string config_metadata_line(const ExperimentConfig& c) {
    return "# config=" + c.to_json().dump();
}

/// Reconstructs the config from CSV metadata text (the `# config=` line).
inline ExperimentConfig config_from_metadata(const std::string& text) {
    const std::string tag = "# config=";
    std::size_t pos = text.find(tag);
    if (pos == std::string::npos) throw ConfigError("metadata has no config line");
    std::size_t end = text.find('\n', pos);
    std::string line = text.substr(pos + tag.size(),
                                   end == std::string::npos ? std::string::npos
                                                            : end - pos - tag.size());
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ConfigError("metadata config line is not valid JSON");
    return ExperimentConfig::from_json(j);
}

} // namespace bqcli
