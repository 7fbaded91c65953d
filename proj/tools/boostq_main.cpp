// boostq CLI: closed-form tail constants, M/G/1 simulation, and batch
// verification, driven by a JSON experiment config. Links only the C API.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boostq/boostq.h"
#include "cli_config.hpp"

namespace fs = std::filesystem;
using bqcli::ExperimentConfig;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

[[noreturn]] void die(int code, const std::string& msg) {
    std::cerr << "boostq: " << msg << "\n";
    std::exit(code);
}

void check(bq_status st, const std::string& context) {
    if (st == BQ_OK) return;
    int code = (st == BQ_ERR_PARSE || st == BQ_ERR_INVALID_ARGUMENT) ? kExitConfig : kExitNumeric;
    die(code, context + ": " + bq_last_error());
}

template <class T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    explicit Handle(T* p) : ptr(p) {}
    ~Handle() { if (ptr) Free(ptr); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
    Handle& operator=(Handle&& o) noexcept {
        if (this != &o) { if (ptr) Free(ptr); ptr = o.ptr; o.ptr = nullptr; }
        return *this;
    }
    T* get() const { return ptr; }
};

using ModelHandle = Handle<bq_model, bq_model_free>;
using BoostHandle = Handle<bq_boost, bq_boost_free>;
using PolicyHandle = Handle<bq_policy, bq_policy_free>;
using TraceHandle = Handle<bq_trace, bq_trace_free>;
using SampleHandle = Handle<bq_sample, bq_sample_free>;

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) die(kExitConfig, "cannot open config file " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) die(kExitConfig, "config file " + path + " is not valid JSON");
    try {
        ExperimentConfig c = ExperimentConfig::from_json(j);
        c.validate();
        return c;
    } catch (const bqcli::ConfigError& e) {
        die(kExitConfig, std::string("config: ") + e.what());
    }
}

struct ModelContext {
    ModelHandle model;
    double lambda = 0.0;
    double rho = 0.0;
    double mean = 0.0;
};

ModelContext open_model(const ExperimentConfig& cfg) {
    ModelContext ctx;
    bq_model* m = nullptr;
    check(bq_model_create_json(cfg.model.dump().c_str(), &m), "distribution");
    ctx.model = ModelHandle(m);
    check(bq_model_mean(ctx.model.get(), &ctx.mean), "mean");
    ctx.lambda = cfg.lambda ? *cfg.lambda : *cfg.rho / ctx.mean;
    ctx.rho = ctx.lambda * ctx.mean;
    return ctx;
}

// Fills in theta for theta-optimal boosts declared without one: the solved
// decay rate, or the configured override (misspecification runs).
json resolve_policy(const json& policy, double gamma, const ExperimentConfig& cfg) {
    json p = policy;
    if (p.contains("boost") && p["boost"].is_object()) {
        json& b = p["boost"];
        if (b.value("type", "") == "theta_optimal" &&
            (!b.contains("theta") || b["theta"].is_null())) {
            b["theta"] = cfg.gamma_override ? *cfg.gamma_override : gamma;
        }
    }
    return p;
}

std::string policy_tag(const json& policy, std::size_t index) {
    std::string type = policy.value("type", "unknown");
    std::string tag = "p" + std::to_string(index) + "_" + type;
    if (policy.contains("k")) tag += "_k" + std::to_string(policy["k"].get<int>());
    if (policy.value("preemptive", false)) tag += "_pre";
    return tag;
}

// --- gamma -----------------------------------------------------------------

int cmd_gamma(const ExperimentConfig& cfg) {
    ModelContext ctx = open_model(cfg);
    double gamma = 0.0, rho = 0.0, theta_star = 0.0, cw = 0.0, cfcfs = 0.0;
    check(bq_solve_gamma(ctx.model.get(), ctx.lambda, &gamma, &rho), "decay rate");
    check(bq_model_theta_star(ctx.model.get(), &theta_star), "theta*");
    check(bq_work_tail_constant(ctx.model.get(), ctx.lambda, gamma, &cw), "work tail constant");
    check(bq_fcfs_tail_constant(ctx.model.get(), ctx.lambda, gamma, cw, &cfcfs),
          "fcfs tail constant");
    json out;
    out["lambda"] = ctx.lambda;
    out["rho"] = rho;
    out["gamma"] = gamma;
    out["theta_star"] = std::isinf(theta_star) ? json() : json(theta_star);
    out["c_w"] = cw;
    out["c_fcfs"] = cfcfs;
    std::cout << out.dump(2) << "\n";
    return 0;
}

// --- constants ----------------------------------------------------------------

// Analytic Nudge-M needs the two-label reduction; only defined for two-label
// models here.
double nudge_m_constant(const ModelContext& ctx, double gamma, double cfcfs, int k_or_scan,
                        int* k_used) {
    std::size_t labels = 0;
    check(bq_model_label_count(ctx.model.get(), &labels), "label count");
    if (labels != 2)
        die(kExitConfig, "analytic nudge-m constants need a two-label model");
    double s0 = 0.0, s1 = 0.0;
    check(bq_model_conditional_mgf(ctx.model.get(), 0.0, gamma, &s0), "label MGF");
    check(bq_model_conditional_mgf(ctx.model.get(), 1.0, gamma, &s1), "label MGF");
    if (s0 == s1) die(kExitConfig, "nudge-m needs distinguishable label classes");
    // recover p0 from the mixture identity M = p0 s0 + (1 - p0) s1
    double marginal = 0.0;
    check(bq_model_mgf(ctx.model.get(), gamma, &marginal), "marginal MGF");
    double p1 = (marginal - s1) / (s0 - s1), sa = s0, sb = s1;
    if (sa > sb) { std::swap(sa, sb); p1 = 1.0 - p1; }
    auto ratio_at = [&](int k) {
        double r = 0.0;
        check(bq_nudge_m_ratio(p1, sa, sb, k, &r), "nudge-m ratio");
        return r;
    };
    if (k_or_scan >= 0) {
        *k_used = k_or_scan;
        return ratio_at(k_or_scan) * cfcfs;
    }
    int best_k = 0;
    double best = ratio_at(0);
    for (int k = 1; k <= 50; ++k) {
        double r = ratio_at(k);
        if (r < best) { best = r; best_k = k; }
    }
    *k_used = best_k;
    return best * cfcfs;
}

int cmd_constants(const ExperimentConfig& cfg) {
    ModelContext ctx = open_model(cfg);
    double gamma = 0.0, rho = 0.0, cw = 0.0, cfcfs = 0.0;
    check(bq_solve_gamma(ctx.model.get(), ctx.lambda, &gamma, &rho), "decay rate");
    check(bq_work_tail_constant(ctx.model.get(), ctx.lambda, gamma, &cw), "work tail constant");
    check(bq_fcfs_tail_constant(ctx.model.get(), ctx.lambda, gamma, cw, &cfcfs),
          "fcfs tail constant");

    std::cout << "# lambda=" << ctx.lambda << " rho=" << rho << " gamma=" << gamma
              << " c_w=" << cw << "\n";
    std::cout << "policy,tail_constant,tir\n";
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
        json p = resolve_policy(cfg.policies[i], gamma, cfg);
        std::string type = p.value("type", "");
        double constant = std::numeric_limits<double>::quiet_NaN();
        std::string name = policy_tag(p, i);
        if (type == "fcfs") {
            constant = cfcfs;
        } else if (type == "boost" || type == "cheat-boost") {
            bq_boost* b = nullptr;
            check(bq_boost_create_json(p["boost"].dump().c_str(), &b), "boost");
            BoostHandle boost(b);
            check(bq_boost_tail_constant(ctx.model.get(), boost.get(), ctx.lambda, gamma, cw,
                                         &constant),
                  "boost tail constant");
        } else if (type == "gamma-boost") {
            check(bq_optimal_tail_constant(ctx.model.get(), ctx.lambda, gamma, cw, &constant),
                  "optimal tail constant");
        } else if (type == "nudge-m") {
            int k_used = 0;
            int k = p.contains("k") && !p["k"].is_null() ? p["k"].get<int>() : -1;
            constant = nudge_m_constant(ctx, gamma, cfcfs, k, &k_used);
            name = "p" + std::to_string(i) + "_nudge-m_k" + std::to_string(k_used);
        } else {
            std::cerr << "boostq: no closed-form tail constant for policy '" << type
                      << "'; skipping\n";
            continue;
        }
        std::cout << name << "," << constant << "," << bq_asymptotic_tir(constant, cfcfs) << "\n";
    }
    return 0;
}

// --- simulate -----------------------------------------------------------------

std::vector<double> make_grid(const ExperimentConfig& cfg, bq_sample* fcfs) {
    double lo = cfg.t_grid.lo, hi = cfg.t_grid.hi;
    if (std::isnan(lo)) check(bq_quantile(fcfs, 0.5, &lo), "grid quantile");
    if (std::isnan(hi)) {
        double v = 0.0, se = 0.0, used_lo = 0.0;
        check(bq_empirical_tail_constant(fcfs, 0.0, std::nan(""), std::nan(""), &v, &se,
                                         &used_lo, &hi),
              "grid window");
    }
    if (!(lo > 0)) lo = 1e-3;
    if (!(hi > lo)) hi = lo * 10.0;
    std::vector<double> grid(cfg.t_grid.points);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double f = static_cast<double>(i) / static_cast<double>(grid.size() - 1);
        grid[i] = cfg.t_grid.kind == "log" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    }
    return grid;
}

void write_atomic(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) die(kExitConfig, "cannot write " + tmp.string());
        out << contents;
    }
    fs::rename(tmp, path);
}

struct SeedOutcome {
    std::vector<std::string> lines;
};

SeedOutcome simulate_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    SeedOutcome outcome;
    ModelContext ctx = open_model(cfg);
    double gamma = 0.0, rho = 0.0;
    check(bq_solve_gamma(ctx.model.get(), ctx.lambda, &gamma, &rho), "decay rate");

    bq_trace* traw = nullptr;
    check(bq_trace_generate(ctx.model.get(), ctx.lambda, cfg.jobs, seed, cfg.noise_sigma, &traw),
          "trace");
    TraceHandle trace(traw);

    std::size_t warmup = cfg.warmup_fraction
                             ? static_cast<std::size_t>(*cfg.warmup_fraction *
                                                        static_cast<double>(cfg.jobs))
                             : static_cast<std::size_t>(-1);

    bq_policy* fcfs_raw = nullptr;
    check(bq_policy_create_json(R"({"type":"fcfs"})", &fcfs_raw), "fcfs policy");
    PolicyHandle fcfs_policy(fcfs_raw);
    bq_sample* fs_raw = nullptr;
    check(bq_sim_run(trace.get(), fcfs_policy.get(), warmup, &fs_raw), "fcfs run");
    SampleHandle fcfs(fs_raw);

    std::vector<double> grid = make_grid(cfg, fcfs.get());

    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
        json pj = resolve_policy(cfg.policies[i], gamma, cfg);
        bq_policy* praw = nullptr;
        check(bq_policy_create_json(pj.dump().c_str(), &praw), "policy");
        PolicyHandle policy(praw);
        bq_sample* sraw = nullptr;
        check(bq_sim_run(trace.get(), policy.get(), warmup, &sraw),
              "run " + policy_tag(pj, i));
        SampleHandle sample(sraw);

        std::vector<double> surv(grid.size()), se(grid.size());
        std::vector<double> tir(grid.size()), tir_se(grid.size());
        check(bq_survival(sample.get(), grid.data(), grid.size(), surv.data(), se.data()),
              "survival");
        check(bq_empirical_tir(sample.get(), fcfs.get(), grid.data(), grid.size(), tir.data(),
                               tir_se.data()),
              "tir");

        std::ostringstream csv;
        csv << "# boostq-simulate\n" << bqcli::config_metadata_line(cfg) << "\n";
        csv << "# policy=" << pj.dump() << "\n";
        csv << "# policy_index=" << i << "\n";
        csv << "# seed=" << seed << "\n";
        csv << "# lambda=" << ctx.lambda << "\n";
        csv << "# rho=" << rho << "\n";
        csv << "# gamma=" << gamma << "\n";
        csv << "# dist=" << cfg.model.dump() << "\n";
        csv << "# jobs=" << cfg.jobs << "\n";
        csv << "# warmup_jobs=" << bq_sample_warmup(sample.get()) << "\n";
        csv << "# noise_sigma=" << cfg.noise_sigma << "\n";
        csv << "# crn=shared-trace; tir baseline is FCFS on the same trace\n";
        std::size_t negatives = bq_sample_negative_responses(sample.get());
        if (pj.value("type", "") == "cheat-boost") {
            csv << "# negative_responses=" << negatives << "\n";
            outcome.lines.push_back("cheat-boost seed " + std::to_string(seed) + ": " +
                                    std::to_string(negatives) + " negative responses");
        }
        csv << "t,survival,stderr,tir,tir_stderr\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            csv << grid[g] << "," << surv[g] << "," << se[g] << "," << tir[g] << "," << tir_se[g]
                << "\n";
        }

        fs::path out = fs::path(cfg.out_dir) /
                       (policy_tag(pj, i) + "_seed" + std::to_string(seed) + ".csv");
        write_atomic(out, csv.str());
        outcome.lines.push_back("wrote " + out.string());

        if (cfg.dump_jobs) {
            std::ostringstream jobs_csv;
            jobs_csv << "# boostq-simulate per-job samples\n"
                     << "# policy=" << pj.dump() << "\n"
                     << "# seed=" << seed << "\n"
                     << "id,arrival,departure,response\n";
            for (std::size_t jx = 0; jx < bq_sample_count(sample.get()); ++jx) {
                double ar = 0.0, dep = 0.0, resp = 0.0;
                check(bq_sample_job(sample.get(), jx, &ar, &dep, &resp), "job row");
                jobs_csv << jx << "," << ar << "," << dep << "," << resp << "\n";
            }
            fs::path jobs_out = fs::path(cfg.out_dir) / (policy_tag(pj, i) + "_seed" +
                                                         std::to_string(seed) + "_jobs.csv");
            write_atomic(jobs_out, jobs_csv.str());
            outcome.lines.push_back("wrote " + jobs_out.string());
        }
    }
    return outcome;
}

int cmd_simulate(const ExperimentConfig& cfg) {
    if (cfg.policies.empty()) die(kExitConfig, "simulate needs at least one policy");
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) die(kExitConfig, "cannot create output directory " + cfg.out_dir);

    // replications (seeds) run in parallel; each writes disjoint files
    std::vector<std::future<SeedOutcome>> futures;
    for (std::uint64_t seed : cfg.seeds)
        futures.push_back(std::async(std::launch::async,
                                     [&cfg, seed] { return simulate_seed(cfg, seed); }));
    for (auto& f : futures)
        for (const auto& line : f.get().lines) std::cout << line << "\n";
    return 0;
}

// --- batch-verify ----------------------------------------------------------------

int cmd_batch_verify(const std::string& file, const std::string& random_spec, double theta,
                     std::uint64_t seed) {
    std::string instances;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) die(kExitConfig, "cannot open instance file " + file);
        std::stringstream ss;
        ss << in.rdbuf();
        instances = ss.str();
        if (theta > 0) {
            // --theta overrides the file's theta
            json j = json::parse(instances, nullptr, false);
            if (j.is_discarded()) die(kExitConfig, "instance file is not valid JSON");
            j["theta"] = theta;
            instances = j.dump();
        }
    } else if (!random_spec.empty()) {
        std::size_t comma = random_spec.find(',');
        if (comma == std::string::npos)
            die(kExitConfig, "--random expects N,COUNT (e.g. --random 7,200)");
        std::size_t max_n = std::stoul(random_spec.substr(0, comma));
        std::size_t count = std::stoul(random_spec.substr(comma + 1));
        if (!(theta > 0)) die(kExitConfig, "--random needs --theta > 0");
        char* generated = nullptr;
        check(bq_batch_random_instances(max_n, count, seed, theta, &generated), "instances");
        instances = generated;
        bq_string_free(generated);
    } else {
        die(kExitConfig, "batch-verify needs --file or --random");
    }

    char* report_raw = nullptr;
    check(bq_batch_verify_json(instances.c_str(), &report_raw), "verification");
    std::string report = report_raw;
    bq_string_free(report_raw);
    std::cout << report << "\n";
    json r = json::parse(report);
    return r["all_pass"].get<bool>() ? 0 : kExitVerify;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"M/G/1 tail-optimal scheduling: exact tail constants, simulation, "
                 "and batch verification"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::uint64_t> seed_override;
    std::size_t jobs_override = 0;
    std::string out_override;
    bool dump_jobs = false;

    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--seed", seed_override, "override config seeds");
    app.add_option("--jobs", jobs_override, "override config job count");
    app.add_option("--out", out_override, "override config output directory");
    app.add_flag("--dump-jobs", dump_jobs, "also write per-job samples per run");

    auto* gamma_cmd = app.add_subcommand("gamma", "decay rate and FCFS constants as JSON");
    auto* constants_cmd =
        app.add_subcommand("constants", "per-policy analytic tail constants as CSV");
    auto* simulate_cmd = app.add_subcommand("simulate", "run the simulator; CSV per policy");

    auto* batch_cmd = app.add_subcommand("batch-verify",
                                         "check boosted-arrival order against brute force");
    for (auto* sub : {gamma_cmd, constants_cmd, simulate_cmd, batch_cmd}) sub->fallthrough();
    std::string batch_file, batch_random;
    double batch_theta = 0.0;
    std::uint64_t batch_seed = 1;
    batch_cmd->add_option("--file", batch_file, "JSON instance file");
    batch_cmd->add_option("--random", batch_random, "N,COUNT random instances");
    batch_cmd->add_option("--theta", batch_theta, "discount rate theta");
    batch_cmd->add_option("--batch-seed", batch_seed, "seed for --random");

    CLI11_PARSE(app, argc, argv);

    try {
        if (batch_cmd->parsed())
            return cmd_batch_verify(batch_file, batch_random, batch_theta, batch_seed);

        if (config_path.empty()) die(kExitConfig, "--config is required for this command");
        ExperimentConfig cfg = load_config(config_path);
        if (!seed_override.empty()) cfg.seeds = seed_override;
        if (jobs_override > 0) cfg.jobs = jobs_override;
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (dump_jobs) cfg.dump_jobs = true;
        cfg.validate();

        if (gamma_cmd->parsed()) return cmd_gamma(cfg);
        if (constants_cmd->parsed()) return cmd_constants(cfg);
        if (simulate_cmd->parsed()) return cmd_simulate(cfg);
    } catch (const bqcli::ConfigError& e) {
        die(kExitConfig, std::string("config: ") + e.what());
    } catch (const std::exception& e) {
        die(kExitNumeric, e.what());
    }
    return 0;
}
