#include "sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "errors.hpp"

namespace boostq {

ArrivalTrace generate_trace(double lambda, const LabelSizeModel& model, std::size_t n,
                            std::uint64_t seed, double noise_sigma) {
    if (n == 0) fail(ErrorCode::invalid_argument, "empty trace requested");
    if (!(lambda > 0)) fail(ErrorCode::invalid_argument, "arrival rate must be positive");
    ArrivalTrace trace;
    trace.lambda = lambda;
    trace.seed = seed;
    trace.noise_sigma = noise_sigma;
    trace.model = model;
    trace.jobs.resize(n);

    Rng arrivals(seed, stream::arrivals);
    Rng sizes(seed, stream::sizes);
    Rng noise(seed, stream::noise);

    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t += arrivals.exponential(lambda);
        auto draw = model.sample(sizes);
        Job& j = trace.jobs[i];
        j.id = static_cast<std::uint32_t>(i);
        j.arrival = t;
        j.size = draw.size;
        j.label = draw.cls;
        j.observed = noise_sigma > 0.0 ? draw.size * std::exp(noise_sigma * noise.normal())
                                       : draw.size;
    }
    return trace;
}

BusyPeriodIndex busy_periods(const ArrivalTrace& trace) {
    BusyPeriodIndex index;
    double depletion = 0.0;  // time at which current work hits zero
    for (const Job& j : trace.jobs) {
        if (index.empty() || j.arrival >= depletion) {
            index.push_back({j.arrival, j.arrival + j.size, j.id, j.id});
            depletion = j.arrival + j.size;
        } else {
            depletion += j.size;
            index.back().end = depletion;
            index.back().last_job = j.id;
        }
    }
    return index;
}

ResponseSample::ResponseSample(std::string policy, const ArrivalTrace& trace,
                               std::vector<double> departure, double total_idle,
                               std::size_t warmup)
    : policy_(std::move(policy)),
      trace_seed_(trace.seed),
      lambda_(trace.lambda),
      warmup_(warmup),
      total_idle_(total_idle) {
    arrival_.resize(trace.jobs.size());
    response_.resize(trace.jobs.size());
    for (std::size_t i = 0; i < trace.jobs.size(); ++i) {
        arrival_[i] = trace.jobs[i].arrival;
        response_[i] = departure[i] - trace.jobs[i].arrival;
    }
}

const std::vector<double>& ResponseSample::sorted_post_warmup() const {
    if (sorted_.empty() && warmup_ < response_.size()) {
        sorted_.assign(response_.begin() + static_cast<std::ptrdiff_t>(warmup_), response_.end());
        std::sort(sorted_.begin(), sorted_.end());
    }
    return sorted_;
}

std::size_t default_warmup(std::size_t n) {
    std::size_t w = std::max<std::size_t>(n / 100, 10000);
    return std::min(w, n / 2);
}

namespace {

struct EngineResult {
    std::vector<double> departure;
    double total_idle = 0.0;
};

EngineResult run_engine(const std::vector<Job>& jobs, const PolicySpec& spec, double threshold) {
    std::size_t n = jobs.size();
    std::vector<double> remaining(n);
    for (std::size_t i = 0; i < n; ++i) remaining[i] = jobs[i].size;
    auto queue = make_queue(spec, jobs, threshold, remaining);

    EngineResult out;
    out.departure.assign(n, 0.0);

    double t = 0.0;
    double completion = kInf;
    std::int64_t serving = -1;
    std::size_t i = 0;

    auto start_service = [&](std::uint32_t id) {
        serving = id;
        completion = t + remaining[id];
    };

    while (serving >= 0 || i < n) {
        double next_arrival = i < n ? jobs[i].arrival : kInf;
        if (serving < 0) {
            // system empty; jump to the next arrival (busy period start)
            out.total_idle += next_arrival - t;
            t = next_arrival;
            queue->insert(jobs[i]);
            ++i;
            start_service(*queue->pop_best());
        } else if (completion <= next_arrival) {
            // completions before arrivals at equal timestamps
            t = completion;
            out.departure[static_cast<std::size_t>(serving)] = t;
            remaining[static_cast<std::size_t>(serving)] = 0.0;
            serving = -1;
            completion = kInf;
            if (auto next = queue->pop_best()) start_service(*next);
        } else {
            t = next_arrival;
            const Job& job = jobs[i];
            ++i;
            double run_rem = completion - t;
            if (queue->preempts(job, jobs[static_cast<std::size_t>(serving)], run_rem)) {
                remaining[static_cast<std::size_t>(serving)] = run_rem;
                assert(run_rem > 0.0);
                queue->insert(jobs[static_cast<std::size_t>(serving)]);
                queue->insert(job);
                start_service(*queue->pop_best());
            } else {
                queue->insert(job);
            }
        }
    }
    return out;
}

} // namespace

ResponseSample run(const ArrivalTrace& trace, const PolicySpec& spec, std::size_t warmup) {
    if (spec.kind == PolicyKind::cheat_boost) {
        return replay_cheat(trace, spec.boost, warmup);
    }
    if (warmup == static_cast<std::size_t>(-1)) warmup = default_warmup(trace.jobs.size());
    if (warmup >= trace.jobs.size() && !trace.jobs.empty())
        fail(ErrorCode::invalid_argument, "warm-up cutoff discards the whole trace");

    double threshold = spec.threshold;
    if (std::isnan(threshold)) threshold = trace.model.mean();

    std::vector<Job> jobs = trace.jobs;
    if (spec.kind == PolicyKind::boost) {
        auto bound = spec.boost.bind(trace.model);
        for (Job& j : jobs) assign_boost(j, spec, bound);
    } else {
        auto zero = BoostFunction::zero().bind(trace.model);
        for (Job& j : jobs) assign_boost(j, spec, zero);
    }

    auto result = run_engine(jobs, spec, threshold);
    return ResponseSample(spec.describe(), trace, std::move(result.departure), result.total_idle,
                          warmup);
}

ResponseSample replay_cheat(const ArrivalTrace& trace, const BoostFunction& boost,
                            std::size_t warmup) {
    if (warmup == static_cast<std::size_t>(-1)) warmup = default_warmup(trace.jobs.size());
    auto bound = boost.bind(trace.model);
    auto spec = PolicySpec::cheat_boost(boost);

    std::vector<Job> jobs = trace.jobs;
    for (Job& j : jobs) assign_boost(j, spec, bound);

    std::vector<double> departure(jobs.size(), 0.0);
    double total_idle = 0.0;
    double prev_end = 0.0;
    std::vector<std::uint32_t> order;
    for (const BusyPeriod& bp : busy_periods(trace)) {
        total_idle += bp.start - prev_end;
        prev_end = bp.end;
        order.clear();
        for (std::uint32_t id = bp.first_job; id <= bp.last_job; ++id) order.push_back(id);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (jobs[a].boosted != jobs[b].boosted) return jobs[a].boosted < jobs[b].boosted;
            if (jobs[a].arrival != jobs[b].arrival) return jobs[a].arrival < jobs[b].arrival;
            return a < b;
        });
        double t = bp.start;
        for (std::uint32_t id : order) {
            t += jobs[id].size;
            departure[id] = t;
        }
    }
    return ResponseSample(spec.describe(), trace, std::move(departure), total_idle, warmup);
}

namespace {

// count of post-warm-up responses strictly greater than t
std::size_t exceedances(const std::vector<double>& sorted, double t) {
    return sorted.size() -
           static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), t) -
                                    sorted.begin());
}

const std::vector<double>& checked_sorted(const ResponseSample& sample) {
    const auto& sorted = sample.sorted_post_warmup();
    if (sorted.empty()) fail(ErrorCode::insufficient_data, "no post-warm-up jobs in sample");
    return sorted;
}

} // namespace

std::vector<SurvivalPoint> survival(const ResponseSample& sample, std::span<const double> t_grid) {
    const auto& sorted = checked_sorted(sample);
    double n = static_cast<double>(sorted.size());
    std::vector<SurvivalPoint> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        double p = static_cast<double>(exceedances(sorted, t)) / n;
        out.push_back({t, p, std::sqrt(p * (1.0 - p) / n)});
    }
    return out;
}

std::vector<TirPoint> empirical_tir(const ResponseSample& policy_sample,
                                    const ResponseSample& fcfs_sample,
                                    std::span<const double> t_grid) {
    if (policy_sample.trace_seed() != fcfs_sample.trace_seed() ||
        policy_sample.size() != fcfs_sample.size())
        fail(ErrorCode::mismatch, "TIR needs both samples from the same trace");
    auto sp = survival(policy_sample, t_grid);
    auto sf = survival(fcfs_sample, t_grid);
    std::vector<TirPoint> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        out[i].t = t_grid[i];
        if (sf[i].prob == 0.0) {
            out[i].tir = kNaN;
            out[i].stderr_ = kNaN;
            continue;
        }
        double ratio = sp[i].prob / sf[i].prob;
        out[i].tir = 1.0 - ratio;
        if (sp[i].prob == 0.0) {
            out[i].stderr_ = sf[i].stderr_ / sf[i].prob;  // scale guess at the boundary
        } else {
            double rp = sp[i].stderr_ / sp[i].prob;
            double rf = sf[i].stderr_ / sf[i].prob;
            out[i].stderr_ = ratio * std::sqrt(rp * rp + rf * rf);
        }
    }
    return out;
}

TailConstantEstimate empirical_tail_constant(const ResponseSample& sample, double gamma,
                                             double t_lo, double t_hi) {
    const auto& sorted = checked_sorted(sample);
    std::size_t n = sorted.size();
    if (std::isnan(t_hi)) {
        if (n < 300) fail(ErrorCode::insufficient_data, "too few jobs for a tail window");
        t_hi = sorted[n - 101];  // 100 exceedances when responses are distinct
    }
    if (std::isnan(t_lo)) {
        double q999 = sorted[static_cast<std::size_t>(
            std::ceil(0.999 * static_cast<double>(n))) - 1];
        t_lo = 0.5 * q999;
    }
    if (!(t_lo < t_hi))
        fail(ErrorCode::insufficient_data, "tail window is empty");
    if (exceedances(sorted, t_hi) < 100)
        fail(ErrorCode::insufficient_data, "fewer than 100 exceedances at the window top");

    constexpr std::size_t kGrid = 20;
    constexpr std::size_t kBlocks = 20;
    std::vector<double> grid(kGrid);
    double ratio = t_hi / t_lo;
    for (std::size_t g = 0; g < kGrid; ++g)
        grid[g] = t_lo * std::pow(ratio, static_cast<double>(g) / (kGrid - 1));

    // per-block exceedance counts; blocks are contiguous in arrival order
    const std::size_t first = sample.warmup();
    const std::size_t total = sample.size() - first;
    std::vector<std::vector<double>> cnt(kBlocks, std::vector<double>(kGrid, 0.0));
    for (std::size_t j = 0; j < total; ++j) {
        double r = sample.response(first + j);
        // responses > grid[g] for all g with grid[g] < r
        auto k = static_cast<std::size_t>(
            std::lower_bound(grid.begin(), grid.end(), r) - grid.begin());
        if (k == 0) continue;
        std::size_t block = j * kBlocks / total;
        for (std::size_t g = 0; g < k; ++g) cnt[block][g] += 1.0;
    }

    auto estimate = [&](int skip_block) {
        double acc = 0.0;
        double m = (skip_block < 0)
                       ? static_cast<double>(total)
                       : static_cast<double>(total) * (kBlocks - 1) / kBlocks;
        for (std::size_t g = 0; g < kGrid; ++g) {
            double c = 0.0;
            for (std::size_t b = 0; b < kBlocks; ++b)
                if (static_cast<int>(b) != skip_block) c += cnt[b][g];
            acc += std::exp(gamma * grid[g]) * (c / m);
        }
        return acc / static_cast<double>(kGrid);
    };

    TailConstantEstimate out;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    out.value = estimate(-1);
    double mean_loo = 0.0;
    std::vector<double> loo(kBlocks);
    for (std::size_t b = 0; b < kBlocks; ++b) {
        loo[b] = estimate(static_cast<int>(b));
        mean_loo += loo[b];
    }
    mean_loo /= kBlocks;
    double var = 0.0;
    for (double v : loo) var += (v - mean_loo) * (v - mean_loo);
    out.stderr_ = std::sqrt(var * (kBlocks - 1) / kBlocks);
    return out;
}

double quantile(const ResponseSample& sample, double q) {
    if (!(q > 0 && q < 1)) fail(ErrorCode::invalid_argument, "quantile level must be in (0, 1)");
    const auto& sorted = checked_sorted(sample);
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

} // namespace boostq
