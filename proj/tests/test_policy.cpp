#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "errors.hpp"
#include "policy.hpp"
#include "sim.hpp"

using namespace boostq;

namespace {

Job make_job(std::uint32_t id, double arrival, double size, double boost = 0.0) {
    Job j;
    j.id = id;
    j.arrival = arrival;
    j.size = size;
    j.observed = size;
    j.label = -1;
    j.boost = boost;
    j.boosted = arrival - boost;
    return j;
}

LabelSizeModel exp_model() {
    return LabelSizeModel::full_information(SizeDistribution::exponential(1.0));
}

std::vector<double> responses(const ResponseSample& s) {
    std::vector<double> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = s.response(i);
    return r;
}

} // namespace

TEST_CASE("assign_boost") {
    auto model = exp_model();
    double gamma = 0.2;

    Job j = make_job(0, 5.0, 1.0);
    auto fcfs = PolicySpec::fcfs();
    auto zero = BoostFunction::zero().bind(model);
    assign_boost(j, fcfs, zero);
    CHECK(j.boost == 0.0);
    CHECK(j.boosted == 5.0);

    // fixed point: size log(2)/gamma has boost equal to its size
    double s = std::log(2.0) / gamma;
    Job k = make_job(1, s, s);
    auto spec = PolicySpec::boost_policy(BoostFunction::theta_optimal(gamma));
    auto bound = spec.boost.bind(model);
    assign_boost(k, spec, bound);
    CHECK(k.boost == doctest::Approx(s).epsilon(1e-12));
    CHECK(k.boosted == doctest::Approx(0.0));

    // noisy runs: the boost is computed from the observed size, not the true one
    Job noisy = make_job(2, 1.0, 1.0);
    noisy.observed = 2.5;
    assign_boost(noisy, spec, bound);
    double expected = -std::log1p(-std::exp(-gamma * 2.5)) / gamma;
    CHECK(noisy.boost == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("boost queue orders by boosted arrival") {
    std::vector<Job> jobs;
    std::vector<double> remaining;
    auto spec = PolicySpec::boost_policy(BoostFunction::zero());

    // close arrivals: the small job's bigger boost wins (overtake)
    Job x = make_job(0, 0.0, 3.25, 1.0);   // large, small boost
    Job y = make_job(1, 0.5, 1.75, 3.0);   // small, big boost, arrives later
    auto q = make_queue(spec, jobs, 0.0, remaining);
    q->insert(x);
    q->insert(y);
    CHECK(*q->pop_best() == 1);  // boosted: y = -2.5 < x = -1
    CHECK(*q->pop_best() == 0);
    CHECK(q->empty());

    // far-apart arrivals: the earlier large job keeps its spot
    Job y2 = make_job(1, 4.0, 1.75, 3.0);  // boosted 1.0 > x's -1
    q->insert(x);
    q->insert(y2);
    CHECK(*q->pop_best() == 0);
    CHECK(*q->pop_best() == 1);

    // single waiting job is always chosen
    q->insert(y2);
    CHECK(*q->pop_best() == 1);
    CHECK(!q->pop_best().has_value());
}

TEST_CASE("ties break by arrival then id") {
    std::vector<Job> jobs;
    std::vector<double> remaining;
    auto q = make_queue(PolicySpec::boost_policy(BoostFunction::zero()), jobs, 0.0, remaining);
    Job a = make_job(3, 2.0, 1.0, 2.0);  // boosted 0
    Job b = make_job(1, 1.0, 1.0, 1.0);  // boosted 0, earlier arrival
    Job c = make_job(2, 1.0, 1.0, 1.0);  // boosted 0, same arrival as b, higher id
    q->insert(a);
    q->insert(b);
    q->insert(c);
    CHECK(*q->pop_best() == 1);
    CHECK(*q->pop_best() == 2);
    CHECK(*q->pop_best() == 3);
}

TEST_CASE("nudge insert") {
    // threshold 1: sizes above are large
    std::vector<Job> jobs;
    jobs.push_back(make_job(0, 0.0, 2.0));  // large
    jobs.push_back(make_job(1, 0.5, 0.5));  // small
    jobs.push_back(make_job(2, 0.9, 0.5));  // small
    std::vector<double> remaining;

    SUBCASE("small passes one large, once (nudge / nudge-k)") {
        auto q = make_queue(PolicySpec::nudge(1.0), jobs, 1.0, remaining);
        q->insert(jobs[0]);
        q->insert(jobs[1]);  // passes the large job
        // second small may not pass the already-passed large job
        q->insert(jobs[2]);
        CHECK(*q->pop_best() == 1);
        CHECK(*q->pop_best() == 0);
        CHECK(*q->pop_best() == 2);
    }

    SUBCASE("empty queue insert") {
        auto q = make_queue(PolicySpec::nudge(1.0), jobs, 1.0, remaining);
        q->insert(jobs[1]);
        CHECK(*q->pop_best() == 1);
    }

    SUBCASE("nudge-m recency window") {
        std::vector<Job> js;
        js.push_back(make_job(0, 0.0, 2.0));  // large, old
        js.push_back(make_job(1, 0.2, 2.0));  // large
        js.push_back(make_job(2, 0.4, 2.0));  // large, recent
        js.push_back(make_job(3, 0.6, 0.5));  // small arrival
        auto q = make_queue(PolicySpec::nudge_m(2), js, 1.0, remaining);
        for (int i = 0; i < 3; ++i) q->insert(js[i]);
        // K = 2: only jobs 1 and 2 are among the two most recent arrivals
        q->insert(js[3]);
        CHECK(*q->pop_best() == 0);
        CHECK(*q->pop_best() == 3);
        CHECK(*q->pop_best() == 1);
        CHECK(*q->pop_best() == 2);
    }

    SUBCASE("nudge-k K=2 passes two distinct large jobs") {
        std::vector<Job> js;
        js.push_back(make_job(0, 0.0, 2.0));
        js.push_back(make_job(1, 0.2, 2.0));
        js.push_back(make_job(2, 0.4, 0.5));  // small
        auto q = make_queue(PolicySpec::nudge_k(2), js, 1.0, remaining);
        q->insert(js[0]);
        q->insert(js[1]);
        q->insert(js[2]);
        CHECK(*q->pop_best() == 2);
        CHECK(*q->pop_best() == 0);
        CHECK(*q->pop_best() == 1);
    }

    CHECK_THROWS_AS(PolicySpec::nudge_k(0), Error);
    CHECK_THROWS_AS(PolicySpec::nudge_m(0), Error);
}

TEST_CASE("srpt queue keys on remaining work") {
    std::vector<Job> jobs;
    jobs.push_back(make_job(0, 0.0, 3.0));
    jobs.push_back(make_job(1, 0.1, 1.0));
    std::vector<double> remaining = {3.0, 1.0};
    auto q = make_queue(PolicySpec::srpt(), jobs, 0.0, remaining);
    q->insert(jobs[0]);
    q->insert(jobs[1]);
    CHECK(*q->pop_best() == 1);
    CHECK(q->preempts(jobs[1], jobs[0], 2.0));   // 1.0 < 2.0 remaining
    CHECK(!q->preempts(jobs[0], jobs[1], 0.5));  // 3.0 > 0.5
}

// --- engine-level policy invariants -----------------------------------------

namespace {

std::vector<PolicySpec> every_policy(double gamma) {
    return {PolicySpec::fcfs(),
            PolicySpec::boost_policy(BoostFunction::theta_optimal(gamma)),
            PolicySpec::boost_policy(BoostFunction::theta_optimal(gamma), true),
            PolicySpec::nudge(),
            PolicySpec::nudge_k(3),
            PolicySpec::nudge_m(3),
            PolicySpec::srpt(),
            PolicySpec::cheat_boost(BoostFunction::theta_optimal(gamma))};
}

} // namespace

TEST_CASE("work conservation: identical idle time under every policy") {
    auto trace = generate_trace(0.8, exp_model(), 20000, 31, 0.0);
    double idle_fcfs = run(trace, PolicySpec::fcfs(), 0).total_idle();
    for (const auto& spec : every_policy(0.2)) {
        auto sample = run(trace, spec, 0);
        INFO(spec.describe());
        CHECK(sample.total_idle() == doctest::Approx(idle_fcfs).epsilon(1e-9));
    }
}

TEST_CASE("zero boost reproduces FCFS departures job for job") {
    auto trace = generate_trace(0.8, exp_model(), 20000, 37, 0.0);
    auto fcfs = run(trace, PolicySpec::fcfs(), 0);
    auto zero = run(trace, PolicySpec::boost_policy(BoostFunction::zero()), 0);
    CHECK(responses(fcfs) == responses(zero));
}

TEST_CASE("nudge variants coincide at K = 1") {
    auto trace = generate_trace(0.85, exp_model(), 30000, 41, 0.0);
    auto nudge = run(trace, PolicySpec::nudge(), 0);
    auto nudge_k = run(trace, PolicySpec::nudge_k(1), 0);
    auto nudge_m = run(trace, PolicySpec::nudge_m(1), 0);
    CHECK(responses(nudge) == responses(nudge_k));
    CHECK(responses(nudge) == responses(nudge_m));
}

TEST_CASE("busy-period membership is policy independent") {
    auto trace = generate_trace(0.8, exp_model(), 10000, 43, 0.0);
    auto periods = busy_periods(trace);
    for (const auto& spec : every_policy(0.2)) {
        auto sample = run(trace, spec, 0);
        INFO(spec.describe());
        std::size_t p = 0;
        for (std::size_t i = 0; i < sample.size(); ++i) {
            while (trace.jobs[i].arrival > periods[p].end) ++p;
            CHECK(sample.departure(i) <= periods[p].end + 1e-7);
            CHECK(sample.departure(i) >= periods[p].start);
        }
    }
}

TEST_CASE("preempt-resume loses no work on a constructed trace") {
    // three jobs: a long one, then two short boosted arrivals that preempt
    ArrivalTrace trace;
    trace.lambda = 1.0;
    trace.seed = 1;
    trace.model = exp_model();
    trace.jobs = {make_job(0, 0.0, 5.0), make_job(1, 1.0, 0.5), make_job(2, 2.0, 0.5)};

    auto nonpre = run(trace, PolicySpec::boost_policy(BoostFunction::theta_optimal(0.2)), 0);
    auto pre = run(trace, PolicySpec::boost_policy(BoostFunction::theta_optimal(0.2), true), 0);

    // same busy period, so the final departure matches and no work is lost
    double total = 6.0;
    CHECK(nonpre.total_idle() == pre.total_idle());
    double last_nonpre = 0.0, last_pre = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        last_nonpre = std::max(last_nonpre, nonpre.departure(i));
        last_pre = std::max(last_pre, pre.departure(i));
    }
    CHECK(last_nonpre == doctest::Approx(total));
    CHECK(last_pre == doctest::Approx(total));
    // departures differ by at most one job size per job
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(nonpre.departure(i) - pre.departure(i)) <= 5.0 + 1e-12);
}
