#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dist.hpp"
#include "sim.hpp"

namespace boostq {
namespace batch {

/// Finite batch of (arrival time, size) pairs. Batch-relaxation semantics:
/// service starts at time 0 and runs back-to-back, so a job may be served
/// before its arrival time.
struct FullInstance {
    struct Entry { double arrival; double size; };
    std::vector<Entry> jobs;
};

/// Finite batch of (arrival time, label) pairs where each label carries its
/// branch size distribution; sizes are drawn independently per job.
struct LabelInstance {
    struct Entry { double arrival; SizeDistribution branch; };
    std::vector<Entry> jobs;
};

/// sum_i exp(theta (d_i - a_i)) for the schedule that serves `order`
/// back-to-back from time 0.
double theta_cost(const FullInstance& inst, std::span<const std::size_t> order, double theta);

/// E[sum_i exp(theta (D_i - a_i))] under the independent job-size model:
/// E[exp(theta D_k)] is the product of the branch MGFs served up to k.
double expected_theta_cost(const LabelInstance& inst, std::span<const std::size_t> order,
                           double theta);

/// WDSPT order: ascending boosted arrival a_i - b_theta(s_i), ties by
/// (arrival, index).
std::vector<std::size_t> boost_order(const FullInstance& inst, double theta);

/// WDSEPT order: ascending a_i - b_theta(l_i) using per-label conditional MGFs.
std::vector<std::size_t> boost_order(const LabelInstance& inst, double theta);

struct BruteForceResult {
    double min_cost;
    std::vector<std::vector<std::size_t>> optimal_orders;
};

/// Exhaustive minimum over all n! orderings; n <= 9.
BruteForceResult brute_force_min(const FullInstance& inst, double theta);
BruteForceResult brute_force_min(const LabelInstance& inst, double theta);

/// Busy periods of an arrival trace (work-conserving sweep); re-exported
/// here because busy periods are the batch instances the M/G/1 reduces to.
using boostq::busy_periods;

} // namespace batch
} // namespace boostq
