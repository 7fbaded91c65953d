#include "boostq/boostq.h"

#include <cmath>
#include <cstring>
#include <new>
#include <span>
#include <string>

#include <json.hpp>

#include "analytics.hpp"
#include "batch.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "sim.hpp"

using namespace boostq;

struct bq_dist { SizeDistribution value; };
struct bq_model { LabelSizeModel value; };
struct bq_boost { BoostFunction value; };
struct bq_policy { PolicySpec value; };
struct bq_trace { ArrivalTrace value; };
struct bq_sample { ResponseSample value; };

namespace {

thread_local std::string g_last_error;

bq_status status_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return BQ_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse: return BQ_ERR_PARSE;
    case ErrorCode::unstable: return BQ_ERR_UNSTABLE;
    case ErrorCode::no_root: return BQ_ERR_NO_ROOT;
    case ErrorCode::domain: return BQ_ERR_DOMAIN;
    case ErrorCode::inadmissible: return BQ_ERR_INADMISSIBLE;
    case ErrorCode::insufficient_data: return BQ_ERR_INSUFFICIENT_DATA;
    case ErrorCode::numeric: return BQ_ERR_NUMERIC;
    case ErrorCode::too_large: return BQ_ERR_TOO_LARGE;
    case ErrorCode::mismatch: return BQ_ERR_MISMATCH;
    case ErrorCode::convergence: return BQ_ERR_CONVERGENCE;
    }
    return BQ_ERR_NUMERIC;
}

template <class F>
bq_status guarded(F&& f) {
    try {
        f();
        return BQ_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return BQ_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BQ_ERR_NUMERIC;
    }
}

bq_status invalid(const char* msg) {
    g_last_error = msg;
    return BQ_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* bq_last_error(void) { return g_last_error.c_str(); }

void bq_string_free(char* s) { delete[] s; }

/* --- distributions -------------------------------------------------------- */

bq_status bq_dist_create_json(const char* json, bq_dist** out) {
    if (!json || !out) return invalid("null argument");
    return guarded([&] { *out = new bq_dist{config::dist_from_json(json)}; });
}

void bq_dist_free(bq_dist* d) { delete d; }

bq_status bq_dist_mean(const bq_dist* d, double* out) {
    if (!d || !out) return invalid("null argument");
    return guarded([&] { *out = d->value.mean(); });
}

bq_status bq_dist_mgf(const bq_dist* d, double theta, double* out) {
    if (!d || !out) return invalid("null argument");
    return guarded([&] { *out = d->value.mgf(theta); });
}

bq_status bq_dist_mgf_prime(const bq_dist* d, double theta, double* out) {
    if (!d || !out) return invalid("null argument");
    return guarded([&] { *out = d->value.mgf_prime(theta); });
}

bq_status bq_dist_theta_star(const bq_dist* d, double* out) {
    if (!d || !out) return invalid("null argument");
    return guarded([&] { *out = d->value.theta_star(); });
}

bq_status bq_dist_sample(const bq_dist* d, uint64_t seed, uint64_t stream, size_t count,
                         double* out) {
    if (!d || !out) return invalid("null argument");
    return guarded([&] {
        Rng rng(seed, stream);
        for (size_t i = 0; i < count; ++i) out[i] = d->value.sample(rng);
    });
}

/* --- models ---------------------------------------------------------------- */

bq_status bq_model_create_json(const char* json, bq_model** out) {
    if (!json || !out) return invalid("null argument");
    return guarded([&] { *out = new bq_model{config::model_from_json(json)}; });
}

void bq_model_free(bq_model* m) { delete m; }

bq_status bq_model_mean(const bq_model* m, double* out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] { *out = m->value.mean(); });
}

bq_status bq_model_mgf(const bq_model* m, double theta, double* out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] { *out = m->value.mgf(theta); });
}

bq_status bq_model_theta_star(const bq_model* m, double* out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] { *out = m->value.theta_star(); });
}

bq_status bq_model_conditional_mgf(const bq_model* m, double label, double theta, double* out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] { *out = m->value.conditional_mgf(label, theta); });
}

bq_status bq_model_label_count(const bq_model* m, size_t* out) {
    if (!m || !out) return invalid("null argument");
    *out = m->value.label_count();
    return BQ_OK;
}

/* --- boosts ----------------------------------------------------------------- */

bq_status bq_boost_create_json(const char* json, bq_boost** out) {
    if (!json || !out) return invalid("null argument");
    return guarded([&] { *out = new bq_boost{config::boost_from_json(json)}; });
}

void bq_boost_free(bq_boost* b) { delete b; }

/* --- analytics --------------------------------------------------------------- */

bq_status bq_solve_gamma(const bq_model* m, double lambda, double* gamma, double* rho) {
    if (!m || !gamma) return invalid("null argument");
    return guarded([&] {
        DecayRate dr = solve_gamma(lambda, m->value);
        *gamma = dr.gamma;
        if (rho) *rho = dr.rho;
    });
}

bq_status bq_work_tail_constant(const bq_model* m, double lambda, double gamma, double* out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] {
        DecayRate dr{gamma, lambda, lambda * m->value.mean()};
        *out = work_tail_constant(lambda, m->value, dr).value;
    });
}

bq_status bq_fcfs_tail_constant(const bq_model* m, double lambda, double gamma, double cw,
                                double* out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] {
        DecayRate dr{gamma, lambda, lambda * m->value.mean()};
        *out = fcfs_tail_constant(TailConstant{cw, "work", gamma}, m->value, dr).value;
    });
}

bq_status bq_optimal_boost(const bq_model* m, double label, double theta, double* out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] { *out = optimal_boost(m->value, label, theta); });
}

bq_status bq_admissibility(const bq_model* m, const bq_boost* b, double lambda, double gamma,
                           double* out) {
    if (!m || !b || !out) return invalid("null argument");
    return guarded([&] {
        DecayRate dr{gamma, lambda, lambda * m->value.mean()};
        *out = admissibility(m->value, b->value, dr);
    });
}

bq_status bq_boost_tail_constant(const bq_model* m, const bq_boost* b, double lambda,
                                 double gamma, double cw, double* out) {
    if (!m || !b || !out) return invalid("null argument");
    return guarded([&] {
        DecayRate dr{gamma, lambda, lambda * m->value.mean()};
        *out = boost_tail_constant(lambda, m->value, b->value, dr,
                                   TailConstant{cw, "work", gamma})
                   .value;
    });
}

bq_status bq_optimal_tail_constant(const bq_model* m, double lambda, double gamma, double cw,
                                   double* out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] {
        DecayRate dr{gamma, lambda, lambda * m->value.mean()};
        *out = optimal_tail_constant(lambda, m->value, dr, TailConstant{cw, "work", gamma}).value;
    });
}

bq_status bq_crossing_work_transform(const bq_model* m, const bq_boost* b, double lambda,
                                     double theta, double u, double* out) {
    if (!m || !b || !out) return invalid("null argument");
    return guarded([&] {
        *out = crossing_work_transform(lambda, m->value, b->value, theta, u);
    });
}

double bq_asymptotic_tir(double c_policy, double c_fcfs) {
    return 1.0 - c_policy / c_fcfs;
}

bq_status bq_nudge_m_ratio(double p1, double s1, double s2, int k, double* out) {
    if (!out) return invalid("null argument");
    return guarded([&] { *out = nudge_m_ratio(p1, s1, s2, k); });
}

bq_status bq_two_label_boost_ratio(double p1, double s1, double s2, double delta, double lambda,
                                   double gamma, double* out) {
    if (!out) return invalid("null argument");
    return guarded([&] { *out = two_label_boost_ratio(p1, s1, s2, delta, lambda, gamma); });
}

bq_status bq_finite_label_constant(double lambda, double gamma, double cw, const double* p,
                                   const double* s, const double* b, size_t n, double* out) {
    if (!p || !s || !b || !out) return invalid("null argument");
    return guarded([&] {
        *out = finite_label_constant(lambda, gamma, cw, {p, n}, {s, n}, {b, n});
    });
}

bq_status bq_finite_label_gradient(double lambda, double gamma, double cw, const double* p,
                                   const double* s, const double* b, size_t n, double* grad_out) {
    if (!p || !s || !b || !grad_out) return invalid("null argument");
    return guarded([&] {
        auto g = finite_label_gradient(lambda, gamma, cw, {p, n}, {s, n}, {b, n});
        std::copy(g.begin(), g.end(), grad_out);
    });
}

bq_status bq_minimize_finite_label(double lambda, double gamma, double cw, const double* p,
                                   const double* s, const double* b0, size_t n, double* b_out) {
    if (!p || !s || !b0 || !b_out) return invalid("null argument");
    return guarded([&] {
        auto b = minimize_finite_label(lambda, gamma, cw, {p, n}, {s, n}, {b0, n});
        std::copy(b.begin(), b.end(), b_out);
    });
}

/* --- simulation --------------------------------------------------------------- */

bq_status bq_trace_generate(const bq_model* m, double lambda, size_t n, uint64_t seed,
                            double noise_sigma, bq_trace** out) {
    if (!m || !out) return invalid("null argument");
    return guarded([&] {
        *out = new bq_trace{generate_trace(lambda, m->value, n, seed, noise_sigma)};
    });
}

void bq_trace_free(bq_trace* t) { delete t; }

size_t bq_trace_count(const bq_trace* t) { return t ? t->value.jobs.size() : 0; }

bq_status bq_policy_create_json(const char* json, bq_policy** out) {
    if (!json || !out) return invalid("null argument");
    return guarded([&] { *out = new bq_policy{config::policy_from_json(json)}; });
}

void bq_policy_free(bq_policy* p) { delete p; }

bq_status bq_sim_run(const bq_trace* t, const bq_policy* p, size_t warmup, bq_sample** out) {
    if (!t || !p || !out) return invalid("null argument");
    return guarded([&] { *out = new bq_sample{run(t->value, p->value, warmup)}; });
}

void bq_sample_free(bq_sample* s) { delete s; }

size_t bq_sample_count(const bq_sample* s) { return s ? s->value.size() : 0; }

size_t bq_sample_warmup(const bq_sample* s) { return s ? s->value.warmup() : 0; }

bq_status bq_sample_job(const bq_sample* s, size_t i, double* arrival, double* departure,
                        double* response) {
    if (!s) return invalid("null argument");
    if (i >= s->value.size()) return invalid("job index out of range");
    if (arrival) *arrival = s->value.arrival(i);
    if (departure) *departure = s->value.departure(i);
    if (response) *response = s->value.response(i);
    return BQ_OK;
}

size_t bq_sample_negative_responses(const bq_sample* s) {
    if (!s) return 0;
    size_t count = 0;
    for (size_t i = 0; i < s->value.size(); ++i)
        if (s->value.response(i) < 0.0) ++count;
    return count;
}

bq_status bq_survival(const bq_sample* s, const double* t, size_t nt, double* surv, double* se) {
    if (!s || !t || !surv) return invalid("null argument");
    return guarded([&] {
        auto pts = survival(s->value, {t, nt});
        for (size_t i = 0; i < nt; ++i) {
            surv[i] = pts[i].prob;
            if (se) se[i] = pts[i].stderr_;
        }
    });
}

bq_status bq_empirical_tir(const bq_sample* pol, const bq_sample* fcfs, const double* t,
                           size_t nt, double* tir, double* se) {
    if (!pol || !fcfs || !t || !tir) return invalid("null argument");
    return guarded([&] {
        auto pts = empirical_tir(pol->value, fcfs->value, {t, nt});
        for (size_t i = 0; i < nt; ++i) {
            tir[i] = pts[i].tir;
            if (se) se[i] = pts[i].stderr_;
        }
    });
}

bq_status bq_empirical_tail_constant(const bq_sample* s, double gamma, double t_lo, double t_hi,
                                     double* value, double* se, double* used_lo, double* used_hi) {
    if (!s || !value) return invalid("null argument");
    return guarded([&] {
        auto est = empirical_tail_constant(s->value, gamma, t_lo, t_hi);
        *value = est.value;
        if (se) *se = est.stderr_;
        if (used_lo) *used_lo = est.t_lo;
        if (used_hi) *used_hi = est.t_hi;
    });
}

bq_status bq_quantile(const bq_sample* s, double q, double* out) {
    if (!s || !out) return invalid("null argument");
    return guarded([&] { *out = quantile(s->value, q); });
}

} /* extern "C" */

/* --- batch verification --------------------------------------------------------- */

namespace {

using nlohmann::json;

json verify_full(const batch::FullInstance& inst, double theta, const json& claimed) {
    auto order = batch::boost_order(inst, theta);
    auto brute = batch::brute_force_min(inst, theta);
    double boost_cost = batch::theta_cost(inst, order, theta);
    double tol = 1e-9 * std::max(1.0, std::abs(brute.min_cost));
    json r;
    r["n"] = inst.jobs.size();
    r["boost_order"] = order;
    r["boost_cost"] = boost_cost;
    r["min_cost"] = brute.min_cost;
    bool pass = boost_cost <= brute.min_cost + tol;
    if (!claimed.is_null()) {
        std::vector<std::size_t> claimed_order = claimed.get<std::vector<std::size_t>>();
        double claimed_cost = batch::theta_cost(inst, claimed_order, theta);
        r["claimed_cost"] = claimed_cost;
        r["cost_gap"] = claimed_cost - brute.min_cost;
        pass = pass && claimed_cost <= brute.min_cost + tol;
    }
    r["pass"] = pass;
    return r;
}

json verify_label(const batch::LabelInstance& inst, double theta) {
    auto order = batch::boost_order(inst, theta);
    auto brute = batch::brute_force_min(inst, theta);
    double boost_cost = batch::expected_theta_cost(inst, order, theta);
    double tol = 1e-9 * std::max(1.0, std::abs(brute.min_cost));
    json r;
    r["n"] = inst.jobs.size();
    r["boost_order"] = order;
    r["boost_cost"] = boost_cost;
    r["min_cost"] = brute.min_cost;
    r["pass"] = boost_cost <= brute.min_cost + tol;
    return r;
}

} // namespace

extern "C" {

bq_status bq_batch_verify_json(const char* instances_json, char** report_json) {
    if (!instances_json || !report_json) return invalid("null argument");
    return guarded([&] {
        json in = json::parse(instances_json, nullptr, false);
        if (in.is_discarded() || !in.is_object() || !in.contains("theta") ||
            !in.contains("instances") || !in["instances"].is_array())
            fail(ErrorCode::parse, "expected {\"theta\":..., \"instances\":[...]}");
        double theta = in["theta"].get<double>();
        if (!(theta > 0)) fail(ErrorCode::parse, "theta must be positive");

        json results = json::array();
        size_t passed = 0;
        for (const auto& spec : in["instances"]) {
            if (!spec.is_object() || !spec.contains("jobs") || !spec["jobs"].is_array() ||
                spec["jobs"].empty())
                fail(ErrorCode::parse, "each instance needs a nonempty 'jobs' array");
            for (const auto& row : spec["jobs"])
                if (!row.is_array() || row.size() != 2 || !row[0].is_number())
                    fail(ErrorCode::parse, "each job is an [arrival, size-or-label] pair");
            // any label payload makes the instance a label instance; plain
            // sizes become deterministic branches
            bool labelled = false;
            for (const auto& row : spec["jobs"])
                if (row[1].is_object()) labelled = true;
            json r;
            if (labelled) {
                batch::LabelInstance inst;
                for (const auto& row : spec["jobs"]) {
                    inst.jobs.push_back(
                        {row[0].get<double>(),
                         row[1].is_object()
                             ? config::dist_from_json(row[1].dump())
                             : SizeDistribution::deterministic(row[1].get<double>())});
                }
                r = verify_label(inst, theta);
            } else {
                batch::FullInstance inst;
                for (const auto& row : spec["jobs"])
                    inst.jobs.push_back({row[0].get<double>(), row[1].get<double>()});
                r = verify_full(inst, theta,
                                spec.contains("claimed_order") ? spec["claimed_order"] : json());
            }
            if (r["pass"].get<bool>()) ++passed;
            results.push_back(std::move(r));
        }
        json report;
        report["theta"] = theta;
        report["total"] = results.size();
        report["passed"] = passed;
        report["all_pass"] = passed == results.size();
        report["results"] = std::move(results);
        *report_json = dup_string(report.dump());
    });
}

bq_status bq_batch_random_instances(size_t max_n, size_t count, uint64_t seed, double theta,
                                    char** instances_json) {
    if (!instances_json) return invalid("null argument");
    if (max_n == 0 || max_n > 9 || count == 0) return invalid("need 1 <= max_n <= 9, count >= 1");
    return guarded([&] {
        Rng rng(seed, stream::scratch);
        json instances = json::array();
        for (size_t c = 0; c < count; ++c) {
            auto n = static_cast<size_t>(rng.uniform() * static_cast<double>(max_n)) + 1;
            n = std::min(n, max_n);
            json jobs = json::array();
            double t = 0.0;
            for (size_t i = 0; i < n; ++i) {
                t += rng.exponential(0.8);
                jobs.push_back({t, rng.exponential(1.0)});
            }
            instances.push_back(json{{"jobs", jobs}});
        }
        json out;
        out["theta"] = theta;
        out["instances"] = instances;
        *instances_json = dup_string(out.dump());
    });
}

} /* extern "C" */
