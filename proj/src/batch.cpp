#include "batch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace boostq {
namespace batch {
namespace {

constexpr std::size_t kBruteForceMax = 9;  // 9! ~ 363k permutations

void check_order(std::size_t n, std::span<const std::size_t> order) {
    if (order.size() != n) fail(ErrorCode::invalid_argument, "order is not a permutation");
    std::vector<bool> seen(n, false);
    for (std::size_t i : order) {
        if (i >= n || seen[i]) fail(ErrorCode::invalid_argument, "order is not a permutation");
        seen[i] = true;
    }
}

template <class Cost>
BruteForceResult brute_force(std::size_t n, Cost&& cost) {
    if (n == 0) fail(ErrorCode::invalid_argument, "empty batch instance");
    if (n > kBruteForceMax) fail(ErrorCode::too_large, "brute force capped at 9 jobs");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    BruteForceResult out;
    out.min_cost = kInf;
    do {
        double c = cost(perm);
        double tol = 1e-12 * std::abs(c);
        if (out.optimal_orders.empty() || c < out.min_cost - tol) {
            out.min_cost = c;
            out.optimal_orders.clear();
            out.optimal_orders.push_back(perm);
        } else if (c <= out.min_cost + tol) {
            out.optimal_orders.push_back(perm);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

// stable form of b_theta(s) = (1/theta) log(1/(1 - e^{-theta s}))
double boost_of_size(double theta, double s) {
    return -std::log1p(-std::exp(-theta * s)) / theta;
}

double boost_of_mgf(double theta, double m) {
    if (!std::isfinite(m) || !(m > 1.0))
        fail(ErrorCode::inadmissible, "branch MGF must be finite and exceed 1");
    return -std::log1p(-1.0 / m) / theta;
}

template <class GetKey>
std::vector<std::size_t> index_order(std::size_t n, std::span<const double> arrivals,
                                     GetKey&& key) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double ka = key(a), kb = key(b);
        if (ka != kb) return ka < kb;
        if (arrivals[a] != arrivals[b]) return arrivals[a] < arrivals[b];
        return a < b;
    });
    return order;
}

} // namespace

double theta_cost(const FullInstance& inst, std::span<const std::size_t> order, double theta) {
    check_order(inst.jobs.size(), order);
    double t = 0.0, cost = 0.0;
    for (std::size_t i : order) {
        t += inst.jobs[i].size;
        cost += std::exp(theta * (t - inst.jobs[i].arrival));
    }
    return cost;
}

double expected_theta_cost(const LabelInstance& inst, std::span<const std::size_t> order,
                           double theta) {
    check_order(inst.jobs.size(), order);
    double mgf_product = 1.0, cost = 0.0;
    for (std::size_t i : order) {
        double m = inst.jobs[i].branch.mgf(theta);
        if (!std::isfinite(m)) fail(ErrorCode::domain, "branch MGF diverges at theta");
        mgf_product *= m;
        cost += mgf_product * std::exp(-theta * inst.jobs[i].arrival);
    }
    return cost;
}

std::vector<std::size_t> boost_order(const FullInstance& inst, double theta) {
    std::size_t n = inst.jobs.size();
    std::vector<double> arrivals(n), keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(inst.jobs[i].size > 0))
            fail(ErrorCode::invalid_argument, "batch sizes must be positive");
        arrivals[i] = inst.jobs[i].arrival;
        keys[i] = inst.jobs[i].arrival - boost_of_size(theta, inst.jobs[i].size);
    }
    return index_order(n, arrivals, [&](std::size_t i) { return keys[i]; });
}

std::vector<std::size_t> boost_order(const LabelInstance& inst, double theta) {
    std::size_t n = inst.jobs.size();
    std::vector<double> arrivals(n), keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        arrivals[i] = inst.jobs[i].arrival;
        keys[i] = inst.jobs[i].arrival - boost_of_mgf(theta, inst.jobs[i].branch.mgf(theta));
    }
    return index_order(n, arrivals, [&](std::size_t i) { return keys[i]; });
}

BruteForceResult brute_force_min(const FullInstance& inst, double theta) {
    return brute_force(inst.jobs.size(),
                       [&](std::span<const std::size_t> p) { return theta_cost(inst, p, theta); });
}

BruteForceResult brute_force_min(const LabelInstance& inst, double theta) {
    return brute_force(inst.jobs.size(), [&](std::span<const std::size_t> p) {
        return expected_theta_cost(inst, p, theta);
    });
}

} // namespace batch
} // namespace boostq
