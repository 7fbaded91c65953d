#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "policy.hpp"

namespace boostq {

/// Realized Poisson arrival sequence with per-job labels and sizes.
struct ArrivalTrace {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;
    LabelSizeModel model = LabelSizeModel::full_information(SizeDistribution::deterministic(1.0));
    std::vector<Job> jobs;  // arrival-sorted; boost fields unset (policy-dependent)
};

/// Deterministic trace for fixed (seed, n, model). Observed sizes carry
/// multiplicative LogNormal(0, sigma^2) noise when sigma > 0.
ArrivalTrace generate_trace(double lambda, const LabelSizeModel& model, std::size_t n,
                            std::uint64_t seed, double noise_sigma = 0.0);

struct BusyPeriod {
    double start = 0.0;
    double end = 0.0;
    std::uint32_t first_job = 0;  // members are the contiguous id range [first, last]
    std::uint32_t last_job = 0;
};

using BusyPeriodIndex = std::vector<BusyPeriod>;

/// Work-conserving sweep: a period starts at an arrival to an empty system
/// and ends when the work hits zero. Identical for all non-idling policies.
BusyPeriodIndex busy_periods(const ArrivalTrace& trace);

/// Per-job response times from one policy run on a trace.
class ResponseSample {
public:
    ResponseSample(std::string policy, const ArrivalTrace& trace, std::vector<double> departure,
                   double total_idle, std::size_t warmup);

    const std::string& policy() const { return policy_; }
    std::uint64_t trace_seed() const { return trace_seed_; }
    double lambda() const { return lambda_; }
    std::size_t size() const { return response_.size(); }
    std::size_t warmup() const { return warmup_; }
    double total_idle() const { return total_idle_; }

    double arrival(std::size_t i) const { return arrival_[i]; }
    double departure(std::size_t i) const { return arrival_[i] + response_[i]; }
    double response(std::size_t i) const { return response_[i]; }
    std::span<const double> responses() const { return response_; }

    /// Post-warm-up responses, ascending (cached).
    const std::vector<double>& sorted_post_warmup() const;

private:
    std::string policy_;
    std::uint64_t trace_seed_;
    double lambda_;
    std::size_t warmup_;
    double total_idle_;
    std::vector<double> arrival_;
    std::vector<double> response_;
    mutable std::vector<double> sorted_;  // lazily built
};

/// Default warm-up cutoff: the first 1% of jobs, at least 1e4, never more
/// than half the trace.
std::size_t default_warmup(std::size_t n);

/// Event-driven run of a policy over a trace. `warmup` of SIZE_MAX applies
/// the default cutoff. Rejects cheat-boost specs (see replay_cheat).
ResponseSample run(const ArrivalTrace& trace, const PolicySpec& spec,
                   std::size_t warmup = static_cast<std::size_t>(-1));

/// Offline replay of the cheating system: within each busy period, jobs are
/// served back-to-back from the period start in boosted-arrival order, so
/// responses may be below the size or negative.
ResponseSample replay_cheat(const ArrivalTrace& trace, const BoostFunction& boost,
                            std::size_t warmup = static_cast<std::size_t>(-1));

struct SurvivalPoint {
    double t = 0.0;
    double prob = 0.0;
    double stderr_ = 0.0;
};

/// Empirical P[T > t] per grid point with binomial standard errors.
std::vector<SurvivalPoint> survival(const ResponseSample& sample, std::span<const double> t_grid);

struct TirPoint {
    double t = 0.0;
    double tir = 0.0;      // NaN where the FCFS tail is empty
    double stderr_ = 0.0;
};

/// TIR(t) = 1 - P[T_policy > t] / P[T_fcfs > t]; both samples must come from
/// the same trace (common random numbers).
std::vector<TirPoint> empirical_tir(const ResponseSample& policy_sample,
                                    const ResponseSample& fcfs_sample,
                                    std::span<const double> t_grid);

struct TailConstantEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
};

/// Average of exp(gamma t) P[T > t] over a log-spaced grid in the window,
/// with a jackknife standard error over contiguous job blocks. Pass NaN
/// bounds for the default window [0.5 t_0.999, t at 100 exceedances].
TailConstantEstimate empirical_tail_constant(const ResponseSample& sample, double gamma,
                                             double t_lo = kNaN, double t_hi = kNaN);

/// Nearest-rank order-statistic quantile of post-warm-up responses.
double quantile(const ResponseSample& sample, double q);

} // namespace boostq
