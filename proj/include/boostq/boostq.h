/* boostq — M/G/1 tail-optimal scheduling toolkit.
 *
 * C interface to the boostq shared library: size distributions and
 * label-size models, exact response-time tail asymptotics for FCFS / Boost /
 * gamma-Boost / Nudge-M, a discrete-event M/G/1 simulator, and batch
 * scheduling verification against brute force.
 *
 * All objects are opaque handles created from JSON descriptions and freed
 * with the matching *_free call. Functions return BQ_OK on success; on any
 * other status bq_last_error() holds a thread-local message.
 */

#ifndef BOOSTQ_H
#define BOOSTQ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bq_status {
    BQ_OK = 0,
    BQ_ERR_INVALID_ARGUMENT = 1,
    BQ_ERR_PARSE = 2,
    BQ_ERR_UNSTABLE = 3,          /* offered load rho >= 1 */
    BQ_ERR_NO_ROOT = 4,           /* gamma equation has no root below theta* */
    BQ_ERR_DOMAIN = 5,            /* argument outside the operation's domain */
    BQ_ERR_INADMISSIBLE = 6,      /* infinite boost / divergent expectation */
    BQ_ERR_INSUFFICIENT_DATA = 7,
    BQ_ERR_NUMERIC = 8,
    BQ_ERR_TOO_LARGE = 9,         /* brute-force size guard */
    BQ_ERR_MISMATCH = 10,         /* paired samples from different traces */
    BQ_ERR_CONVERGENCE = 11,
} bq_status;

typedef struct bq_dist bq_dist;       /* job size distribution */
typedef struct bq_model bq_model;     /* label-size model */
typedef struct bq_boost bq_boost;     /* boost function */
typedef struct bq_policy bq_policy;   /* scheduling policy spec */
typedef struct bq_trace bq_trace;     /* realized arrival trace */
typedef struct bq_sample bq_sample;   /* per-job response times of one run */

/* Message for the most recent failing call on this thread. */
const char* bq_last_error(void);

/* Frees strings returned through char** out-parameters. */
void bq_string_free(char* s);

/* --- distributions ------------------------------------------------------ */

/* JSON: {"type":"deterministic","value":2.0}
 *       {"type":"exponential","rate":1.0}
 *       {"type":"uniform","lo":0.0,"hi":2.0}
 *       {"type":"hyperexp","probs":[0.8,0.2],"rates":[2.0,0.3333]}
 *       {"type":"bounded_lomax","shape":2,"bound":4,"mean":1}   (or "scale")
 *       {"type":"empirical","samples":[...]}                              */
bq_status bq_dist_create_json(const char* json, bq_dist** out);
void bq_dist_free(bq_dist* d);

bq_status bq_dist_mean(const bq_dist* d, double* out);
/* E[exp(theta S)]; +infinity at or beyond theta* (a value, not an error). */
bq_status bq_dist_mgf(const bq_dist* d, double theta, double* out);
/* E[S exp(theta S)]; BQ_ERR_DOMAIN for theta >= theta*. */
bq_status bq_dist_mgf_prime(const bq_dist* d, double theta, double* out);
bq_status bq_dist_theta_star(const bq_dist* d, double* out);
/* `count` deterministic draws for (seed, stream). */
bq_status bq_dist_sample(const bq_dist* d, uint64_t seed, uint64_t stream, size_t count,
                         double* out);

/* --- label-size models --------------------------------------------------- */

/* JSON: a bare distribution object (full information, L = S), or
 *       {"labels":[{"p":0.5,"dist":{...}},{"p":0.5,"dist":{...}}]}        */
bq_status bq_model_create_json(const char* json, bq_model** out);
void bq_model_free(bq_model* m);

bq_status bq_model_mean(const bq_model* m, double* out);
bq_status bq_model_mgf(const bq_model* m, double theta, double* out);
bq_status bq_model_theta_star(const bq_model* m, double* out);
/* E[exp(theta S) | L = l]; under full information `label` is a size, for
 * finite labels it is the 0-based class index. */
bq_status bq_model_conditional_mgf(const bq_model* m, double label, double theta, double* out);
bq_status bq_model_label_count(const bq_model* m, size_t* out);

/* --- boost functions ------------------------------------------------------ */

/* JSON: {"type":"zero"}
 *       {"type":"theta_optimal","theta":0.2}
 *       {"type":"constant","value":1.0}
 *       {"type":"table","boosts":[b0,b1,...]}       (finite labels)
 *       {"type":"reciprocal","scale":1.0}           (b(s) = scale/s)      */
bq_status bq_boost_create_json(const char* json, bq_boost** out);
void bq_boost_free(bq_boost* b);

/* --- closed-form asymptotics ---------------------------------------------- */

/* Least positive solution of gamma = lambda (E[exp(gamma S)] - 1). */
bq_status bq_solve_gamma(const bq_model* m, double lambda, double* gamma, double* rho);
/* C_W = (1 - rho) / (lambda M_S'(gamma) - 1). */
bq_status bq_work_tail_constant(const bq_model* m, double lambda, double gamma, double* out);
/* C_FCFS = C_W E[exp(gamma S)]. */
bq_status bq_fcfs_tail_constant(const bq_model* m, double lambda, double gamma, double cw,
                                double* out);
/* theta-optimal boost of one label: (1/theta) log(M/(M-1)). */
bq_status bq_optimal_boost(const bq_model* m, double label, double theta, double* out);
/* E[b(L)(exp(gamma S) - 1)]; +infinity signals an inadmissible boost. */
bq_status bq_admissibility(const bq_model* m, const bq_boost* b, double lambda, double gamma,
                           double* out);
/* C_Boost = C_W E[exp(gamma(S - b(L)))] exp(lambda E[b(L)(exp(gamma S)-1)]). */
bq_status bq_boost_tail_constant(const bq_model* m, const bq_boost* b, double lambda,
                                 double gamma, double cw, double* out);
/* C* = C_W (E[exp(gamma S)] - 1) exp(lambda E[b_gamma(L)(exp(gamma S)-1)]). */
bq_status bq_optimal_tail_constant(const bq_model* m, double lambda, double gamma, double cw,
                                   double* out);
/* E[exp(theta V(u))] = exp(lambda E[(exp(theta S')-1) min(B', u)]); pass
 * u = INFINITY for the full crossing work. */
bq_status bq_crossing_work_transform(const bq_model* m, const bq_boost* b, double lambda,
                                     double theta, double u, double* out);
/* 1 - c_policy / c_fcfs. */
double bq_asymptotic_tir(double c_policy, double c_fcfs);
/* C_NudgeM / C_FCFS for a two-label system (s1 <= s2 are the conditional
 * MGFs at gamma, K the pass budget). */
bq_status bq_nudge_m_ratio(double p1, double s1, double s2, int k, double* out);
/* C_Boost / C_FCFS for a two-label system with boost gap delta = b1 - b2. */
bq_status bq_two_label_boost_ratio(double p1, double s1, double s2, double delta, double lambda,
                                   double gamma, double* out);
/* Finite-label tail constant, its gradient, and projected-descent minimizer. */
bq_status bq_finite_label_constant(double lambda, double gamma, double cw, const double* p,
                                   const double* s, const double* b, size_t n, double* out);
bq_status bq_finite_label_gradient(double lambda, double gamma, double cw, const double* p,
                                   const double* s, const double* b, size_t n, double* grad_out);
bq_status bq_minimize_finite_label(double lambda, double gamma, double cw, const double* p,
                                   const double* s, const double* b0, size_t n, double* b_out);

/* --- simulation ------------------------------------------------------------ */

/* Deterministic M/G/1 arrival trace: n jobs, Poisson(lambda) arrivals,
 * (label, size) i.i.d. from the model, multiplicative LogNormal(0, sigma^2)
 * observation noise when noise_sigma > 0. */
bq_status bq_trace_generate(const bq_model* m, double lambda, size_t n, uint64_t seed,
                            double noise_sigma, bq_trace** out);
void bq_trace_free(bq_trace* t);
size_t bq_trace_count(const bq_trace* t);

/* JSON: {"type":"fcfs"} | {"type":"srpt"}
 *       {"type":"boost","boost":{...},"preemptive":false}
 *       {"type":"cheat-boost","boost":{...}}
 *       {"type":"nudge","threshold":1.0}            (threshold default E[S])
 *       {"type":"nudge-k","k":2} | {"type":"nudge-m","k":8}               */
bq_status bq_policy_create_json(const char* json, bq_policy** out);
void bq_policy_free(bq_policy* p);

/* Event-driven run (offline busy-period replay for cheat-boost). Pass
 * warmup = SIZE_MAX for the default cutoff (1% of jobs, at least 1e4,
 * at most half the trace). */
bq_status bq_sim_run(const bq_trace* t, const bq_policy* p, size_t warmup, bq_sample** out);
void bq_sample_free(bq_sample* s);

size_t bq_sample_count(const bq_sample* s);
size_t bq_sample_warmup(const bq_sample* s);
bq_status bq_sample_job(const bq_sample* s, size_t i, double* arrival, double* departure,
                        double* response);
/* Number of jobs with negative response (cheating runs only). */
size_t bq_sample_negative_responses(const bq_sample* s);

/* Empirical P[T > t] with binomial standard errors over the post-warm-up jobs. */
bq_status bq_survival(const bq_sample* s, const double* t, size_t nt, double* surv, double* se);
/* TIR(t) = 1 - P[T_pol > t] / P[T_fcfs > t]; samples must share a trace.
 * Points with an empty FCFS tail come back as NaN. */
bq_status bq_empirical_tir(const bq_sample* pol, const bq_sample* fcfs, const double* t,
                           size_t nt, double* tir, double* se);
/* Average of exp(gamma t) P[T > t] over a log grid in [t_lo, t_hi] with a
 * jackknife standard error; pass NaN bounds for the default window. */
bq_status bq_empirical_tail_constant(const bq_sample* s, double gamma, double t_lo, double t_hi,
                                     double* value, double* se, double* used_lo, double* used_hi);
/* Nearest-rank quantile of post-warm-up responses. */
bq_status bq_quantile(const bq_sample* s, double q, double* out);

/* --- batch verification ----------------------------------------------------- */

/* Verifies that the boosted-arrival order attains the brute-force minimum
 * theta-cost on every instance. Input JSON:
 *   {"theta":0.2,
 *    "instances":[
 *      {"jobs":[[arrival,size],...]},                      (full information)
 *      {"jobs":[[arrival,{"type":...}],...]},              (label branches)
 *      {"jobs":[...],"claimed_order":[2,0,1]}              (audit an order)
 *    ]}
 * The report JSON carries per-instance costs, the orders checked, and an
 * overall "passed" flag. Verification failures still return BQ_OK; callers
 * inspect the report. */
bq_status bq_batch_verify_json(const char* instances_json, char** report_json);

/* Deterministic random full-information instances for fuzzing the oracle:
 * `count` instances with 1..max_n jobs each. */
bq_status bq_batch_random_instances(size_t max_n, size_t count, uint64_t seed, double theta,
                                    char** instances_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BOOSTQ_H */
