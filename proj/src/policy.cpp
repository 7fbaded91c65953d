#include "policy.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace boostq {

PolicySpec PolicySpec::fcfs() { return PolicySpec{}; }

PolicySpec PolicySpec::boost_policy(BoostFunction b, bool preemptive) {
    PolicySpec s;
    s.kind = PolicyKind::boost;
    s.boost = std::move(b);
    s.preemptive = preemptive;
    return s;
}

PolicySpec PolicySpec::cheat_boost(BoostFunction b) {
    PolicySpec s;
    s.kind = PolicyKind::cheat_boost;
    s.boost = std::move(b);
    return s;
}

PolicySpec PolicySpec::nudge(double threshold) {
    PolicySpec s;
    s.kind = PolicyKind::nudge;
    s.threshold = threshold;
    s.k = 1;
    return s;
}

PolicySpec PolicySpec::nudge_k(int k, double threshold) {
    if (k < 1) fail(ErrorCode::invalid_argument, "nudge-k needs K >= 1");
    PolicySpec s;
    s.kind = PolicyKind::nudge_k;
    s.threshold = threshold;
    s.k = k;
    return s;
}

PolicySpec PolicySpec::nudge_m(int k, double threshold) {
    if (k < 1) fail(ErrorCode::invalid_argument, "nudge-m needs K >= 1");
    PolicySpec s;
    s.kind = PolicyKind::nudge_m;
    s.threshold = threshold;
    s.k = k;
    return s;
}

PolicySpec PolicySpec::srpt() {
    PolicySpec s;
    s.kind = PolicyKind::srpt;
    return s;
}

std::string PolicySpec::name() const {
    switch (kind) {
    case PolicyKind::fcfs: return "fcfs";
    case PolicyKind::boost: return preemptive ? "boost-preemptive" : "boost";
    case PolicyKind::cheat_boost: return "cheat-boost";
    case PolicyKind::nudge: return "nudge";
    case PolicyKind::nudge_k: return "nudge-k";
    case PolicyKind::nudge_m: return "nudge-m";
    case PolicyKind::srpt: return "srpt";
    }
    return "?";
}

std::string PolicySpec::describe() const {
    std::string out = name();
    switch (kind) {
    case PolicyKind::boost:
    case PolicyKind::cheat_boost:
        out += "[" + boost.describe() + "]";
        break;
    case PolicyKind::nudge:
    case PolicyKind::nudge_k:
    case PolicyKind::nudge_m:
        out += "[K=" + std::to_string(k) + "]";
        break;
    default:
        break;
    }
    return out;
}

void assign_boost(Job& job, const PolicySpec& spec, const BoostFunction::Bound& bound) {
    if (spec.kind == PolicyKind::boost || spec.kind == PolicyKind::cheat_boost) {
        job.boost = bound(job.label, job.observed);
        if (!(job.boost >= 0) || !std::isfinite(job.boost))
            fail(ErrorCode::inadmissible, "boost function produced an invalid boost");
    } else {
        job.boost = 0.0;
    }
    job.boosted = job.arrival - job.boost;
}

namespace {

struct HeapEntry {
    double key;
    double arrival;
    std::uint32_t id;

    bool operator<(const HeapEntry& o) const {
        // std::priority_queue is a max-heap; invert for least-first with
        // deterministic (key, arrival, id) tie-breaking
        if (key != o.key) return key > o.key;
        if (arrival != o.arrival) return arrival > o.arrival;
        return id > o.id;
    }
};

class FcfsQueue final : public WaitingQueue {
public:
    void insert(const Job& job) override { q_.push_back(job.id); }
    std::optional<std::uint32_t> pop_best() override {
        if (q_.empty()) return std::nullopt;
        std::uint32_t id = q_.front();
        q_.pop_front();
        return id;
    }
    bool empty() const override { return q_.empty(); }

private:
    std::deque<std::uint32_t> q_;
};

class BoostQueue final : public WaitingQueue {
public:
    explicit BoostQueue(bool preemptive) : preemptive_(preemptive) {}

    void insert(const Job& job) override { q_.push({job.boosted, job.arrival, job.id}); }
    std::optional<std::uint32_t> pop_best() override {
        if (q_.empty()) return std::nullopt;
        std::uint32_t id = q_.top().id;
        q_.pop();
        return id;
    }
    bool empty() const override { return q_.empty(); }
    bool preempts(const Job& arrived, const Job& running, double) const override {
        return preemptive_ && arrived.boosted < running.boosted;
    }

private:
    bool preemptive_;
    std::priority_queue<HeapEntry> q_;
};

class SrptQueue final : public WaitingQueue {
public:
    explicit SrptQueue(std::vector<double>& remaining) : remaining_(remaining) {}

    void insert(const Job& job) override {
        q_.push({remaining_[job.id], job.arrival, job.id});
    }
    std::optional<std::uint32_t> pop_best() override {
        if (q_.empty()) return std::nullopt;
        std::uint32_t id = q_.top().id;
        q_.pop();
        return id;
    }
    bool empty() const override { return q_.empty(); }
    bool preempts(const Job& arrived, const Job&, double running_remaining) const override {
        return remaining_[arrived.id] < running_remaining;
    }

private:
    std::vector<double>& remaining_;
    std::priority_queue<HeapEntry> q_;
};

class NudgeQueue final : public WaitingQueue {
public:
    NudgeQueue(PolicyKind kind, int k, double threshold, const std::vector<Job>& jobs)
        : kind_(kind), k_(k), threshold_(threshold), jobs_(jobs), passed_(jobs.size(), false) {}

    void insert(const Job& job) override {
        bool large = jobs_[job.id].observed > threshold_;
        if (large) {
            q_.push_back(job.id);
            return;
        }
        // A small arrival passes up to K eligible large jobs, scanning from
        // the back; the scan stops at the first job it may not pass.
        auto it = q_.end();
        int passes = 0;
        while (passes < k_ && it != q_.begin()) {
            std::uint32_t cand = *(it - 1);
            if (!(jobs_[cand].observed > threshold_)) break;  // small job blocks
            if (kind_ == PolicyKind::nudge_k || kind_ == PolicyKind::nudge) {
                if (passed_[cand]) break;  // each large job passable once
            } else {  // nudge_m: only large jobs among the K most recent arrivals
                if (cand + static_cast<std::uint32_t>(k_) < job.id) break;
            }
            --it;
            ++passes;
            if (kind_ == PolicyKind::nudge_k || kind_ == PolicyKind::nudge) passed_[cand] = true;
        }
        q_.insert(it, job.id);
    }

    std::optional<std::uint32_t> pop_best() override {
        if (q_.empty()) return std::nullopt;
        std::uint32_t id = q_.front();
        q_.pop_front();
        return id;
    }
    bool empty() const override { return q_.empty(); }

private:
    PolicyKind kind_;
    int k_;
    double threshold_;
    const std::vector<Job>& jobs_;
    std::deque<std::uint32_t> q_;
    std::vector<bool> passed_;
};

} // namespace

std::unique_ptr<WaitingQueue> make_queue(const PolicySpec& spec, const std::vector<Job>& jobs,
                                         double threshold, std::vector<double>& remaining) {
    switch (spec.kind) {
    case PolicyKind::fcfs:
        return std::make_unique<FcfsQueue>();
    case PolicyKind::boost:
        return std::make_unique<BoostQueue>(spec.preemptive);
    case PolicyKind::cheat_boost:
        fail(ErrorCode::invalid_argument, "cheating runs use the offline replay, not the engine");
    case PolicyKind::nudge:
    case PolicyKind::nudge_k:
    case PolicyKind::nudge_m:
        return std::make_unique<NudgeQueue>(spec.kind, spec.k, threshold, jobs);
    case PolicyKind::srpt:
        return std::make_unique<SrptQueue>(remaining);
    }
    fail(ErrorCode::invalid_argument, "unknown policy kind");
}

} // namespace boostq
