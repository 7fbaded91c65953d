#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "dist.hpp"

namespace boostq {

/// One job as the scheduler sees it. `label` is the class index for
/// finite-label models and -1 under full information; `observed` is the
/// (possibly noisy) size estimate the scheduler acts on, while `size` is the
/// true service requirement.
struct Job {
    std::uint32_t id = 0;  // arrival ordinal
    double arrival = 0.0;
    double size = 0.0;
    double observed = 0.0;
    std::int32_t label = -1;
    double boost = 0.0;
    double boosted = 0.0;  // arrival - boost, exactly
};

enum class PolicyKind { fcfs, boost, cheat_boost, nudge, nudge_k, nudge_m, srpt };

struct PolicySpec {
    PolicyKind kind = PolicyKind::fcfs;
    BoostFunction boost = BoostFunction::zero();
    bool preemptive = false;        // Boost only
    double threshold = kNaN;        // Nudge small/large split; NaN -> E[S]
    int k = 1;                      // Nudge pass budget, K >= 1

    static PolicySpec fcfs();
    static PolicySpec boost_policy(BoostFunction b, bool preemptive = false);
    static PolicySpec cheat_boost(BoostFunction b);
    static PolicySpec nudge(double threshold = kNaN);
    static PolicySpec nudge_k(int k, double threshold = kNaN);
    static PolicySpec nudge_m(int k, double threshold = kNaN);
    static PolicySpec srpt();

    std::string name() const;
    std::string describe() const;
};

/// Sets a job's boost (and boosted arrival) under a spec already bound to a
/// model. Non-Boost policies assign boost 0.
void assign_boost(Job& job, const PolicySpec& spec, const BoostFunction::Bound& bound);

/// Waiting-room discipline shared by the simulator and the unit tests.
/// `insert` admits an arrival, `pop_best` is the selection rule applied at a
/// decision epoch, and `preempts` says whether a new arrival displaces the
/// job in service (given its current remaining work).
class WaitingQueue {
public:
    virtual ~WaitingQueue() = default;
    virtual void insert(const Job& job) = 0;
    virtual std::optional<std::uint32_t> pop_best() = 0;
    virtual bool empty() const = 0;
    virtual bool preempts(const Job& arrived, const Job& running, double running_remaining) const {
        (void)arrived; (void)running; (void)running_remaining;
        return false;
    }
};

/// Builds the waiting queue for a spec. `jobs` and `remaining` must outlive
/// the queue; `threshold` is the resolved Nudge split (ignored elsewhere) and
/// `remaining` is the per-job remaining-work array maintained by the engine
/// (SRPT keys on it).
std::unique_ptr<WaitingQueue> make_queue(const PolicySpec& spec, const std::vector<Job>& jobs,
                                         double threshold, std::vector<double>& remaining);

} // namespace boostq
