#include "dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "errors.hpp"
#include "quadrature.hpp"

namespace boostq {
namespace {

constexpr double kProbTol = 1e-12;

void require(bool ok, const char* what) {
    if (!ok) fail(ErrorCode::invalid_argument, what);
}

// Untruncated Lomax(alpha, sigma) mean restricted to [0, L], divided by the
// truncation mass; finite for every alpha > 0 thanks to the bound.
double lomax_truncated_mean(double alpha, double sigma, double bound) {
    double u = 1.0 + bound / sigma;
    double mass = 1.0 - std::pow(u, -alpha);
    double head = (alpha == 1.0) ? std::log(u)
                                 : (1.0 - std::pow(u, 1.0 - alpha)) / (alpha - 1.0);
    double integral = alpha * sigma * (head - (1.0 - std::pow(u, -alpha)) / alpha);
    return integral / mass;
}

} // namespace

SizeDistribution SizeDistribution::deterministic(double value) {
    require(value > 0, "deterministic size must be positive");
    return SizeDistribution{Deterministic{value}};
}

SizeDistribution SizeDistribution::exponential(double rate) {
    require(rate > 0, "exponential rate must be positive");
    return SizeDistribution{Exponential{rate}};
}

SizeDistribution SizeDistribution::uniform(double lo, double hi) {
    require(lo >= 0, "uniform lower endpoint must be >= 0");
    require(hi > lo, "uniform upper endpoint must exceed the lower");
    return SizeDistribution{Uniform{lo, hi}};
}

SizeDistribution SizeDistribution::hyperexponential(std::vector<double> probs,
                                                    std::vector<double> rates) {
    require(!probs.empty() && probs.size() == rates.size(),
            "hyperexponential needs matching branch probabilities and rates");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        require(probs[i] > 0, "branch probabilities must be positive");
        require(rates[i] > 0, "branch rates must be positive");
        total += probs[i];
    }
    require(std::abs(total - 1.0) <= kProbTol, "branch probabilities must sum to 1");
    return SizeDistribution{Hyperexp{std::move(probs), std::move(rates)}};
}

SizeDistribution SizeDistribution::bounded_lomax(double shape, double scale, double bound) {
    require(shape > 0 && scale > 0 && bound > 0, "bounded lomax parameters must be positive");
    double norm = 1.0 - std::pow(1.0 + bound / scale, -shape);
    return SizeDistribution{BoundedLomax{shape, scale, bound, norm}};
}

SizeDistribution SizeDistribution::bounded_lomax_mean(double shape, double bound, double mean) {
    require(shape > 0 && bound > 0 && mean > 0, "bounded lomax parameters must be positive");
    require(mean < bound, "target mean must lie below the bound");
    // Truncated mean is increasing in sigma, from 0 toward bound/2-ish limits.
    double lo = 1e-9, hi = 1.0;
    while (lomax_truncated_mean(shape, hi, bound) < mean) {
        hi *= 2.0;
        if (hi > 1e12) fail(ErrorCode::no_root, "no scale attains the requested truncated mean");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (lomax_truncated_mean(shape, mid, bound) < mean ? lo : hi) = mid;
    }
    return bounded_lomax(shape, 0.5 * (lo + hi), bound);
}

SizeDistribution SizeDistribution::empirical(std::vector<double> samples) {
    require(!samples.empty(), "empirical distribution needs at least one sample");
    for (double s : samples) require(s > 0, "empirical samples must be positive");
    std::sort(samples.begin(), samples.end());
    return SizeDistribution{Empirical{std::move(samples)}};
}

double SizeDistribution::mean() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return d.value;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 / d.rate;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return 0.5 * (d.lo + d.hi);
            } else if constexpr (std::is_same_v<T, Hyperexp>) {
                double m = 0.0;
                for (std::size_t i = 0; i < d.probs.size(); ++i) m += d.probs[i] / d.rates[i];
                return m;
            } else if constexpr (std::is_same_v<T, BoundedLomax>) {
                return lomax_truncated_mean(d.shape, d.scale, d.bound);
            } else {
                double m = std::accumulate(d.samples.begin(), d.samples.end(), 0.0);
                return m / static_cast<double>(d.samples.size());
            }
        },
        v_);
}

double SizeDistribution::theta_star() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return d.rate;
            } else if constexpr (std::is_same_v<T, Hyperexp>) {
                return *std::min_element(d.rates.begin(), d.rates.end());
            } else {
                return kInf;  // bounded support
            }
        },
        v_);
}

double SizeDistribution::upper_bound() const {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) return d.value;
            else if constexpr (std::is_same_v<T, Uniform>) return d.hi;
            else if constexpr (std::is_same_v<T, BoundedLomax>) return d.bound;
            else if constexpr (std::is_same_v<T, Empirical>) return d.samples.back();
            else return kInf;
        },
        v_);
}

double SizeDistribution::mgf(double theta) const {
    if (theta >= theta_star()) return kInf;
    if (theta == 0.0) return 1.0;
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return std::exp(theta * d.value);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return d.rate / (d.rate - theta);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                double x = theta * (d.hi - d.lo);
                return std::exp(theta * d.lo) * std::expm1(x) / x;
            } else if constexpr (std::is_same_v<T, Hyperexp>) {
                double m = 0.0;
                for (std::size_t i = 0; i < d.probs.size(); ++i)
                    m += d.probs[i] * d.rates[i] / (d.rates[i] - theta);
                return m;
            } else if constexpr (std::is_same_v<T, BoundedLomax>) {
                return expect([&](double s) { return std::exp(theta * s); }, theta);
            } else {
                double m = 0.0;
                for (double s : d.samples) m += std::exp(theta * s);
                return m / static_cast<double>(d.samples.size());
            }
        },
        v_);
}

double SizeDistribution::mgf_prime(double theta) const {
    if (theta >= theta_star())
        fail(ErrorCode::domain, "mgf derivative requested at or beyond theta*");
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return d.value * std::exp(theta * d.value);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                double den = d.rate - theta;
                return d.rate / (den * den);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                double delta = d.hi - d.lo;
                if (std::abs(theta) * delta < 0.02) {
                    // series in theta over raw moments; cancellation-free
                    double term = 0.0, fact = 1.0;
                    for (int k = 0; k < 8; ++k) {
                        double mk = (std::pow(d.hi, k + 2) - std::pow(d.lo, k + 2)) /
                                    (delta * (k + 2));
                        term += mk * fact;
                        fact *= theta / (k + 1);
                    }
                    return term;
                }
                auto part = [&](double s) { return std::exp(theta * s) * (s / theta - 1.0 / (theta * theta)); };
                return (part(d.hi) - part(d.lo)) / delta;
            } else if constexpr (std::is_same_v<T, Hyperexp>) {
                double m = 0.0;
                for (std::size_t i = 0; i < d.probs.size(); ++i) {
                    double den = d.rates[i] - theta;
                    m += d.probs[i] * d.rates[i] / (den * den);
                }
                return m;
            } else if constexpr (std::is_same_v<T, BoundedLomax>) {
                return expect([&](double s) { return s * std::exp(theta * s); }, theta);
            } else {
                double m = 0.0;
                for (double s : d.samples) m += s * std::exp(theta * s);
                return m / static_cast<double>(d.samples.size());
            }
        },
        v_);
}

double SizeDistribution::sample(Rng& rng) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return d.value;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return rng.exponential(d.rate);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return d.lo + (d.hi - d.lo) * rng.uniform();
            } else if constexpr (std::is_same_v<T, Hyperexp>) {
                double u = rng.uniform(), acc = 0.0;
                std::size_t pick = d.probs.size() - 1;
                for (std::size_t i = 0; i < d.probs.size(); ++i) {
                    acc += d.probs[i];
                    if (u < acc) { pick = i; break; }
                }
                return rng.exponential(d.rates[pick]);
            } else if constexpr (std::is_same_v<T, BoundedLomax>) {
                double u = rng.uniform();
                return d.scale * (std::pow(1.0 - u * d.norm, -1.0 / d.shape) - 1.0);
            } else {
                auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(d.samples.size()));
                return d.samples[std::min(i, d.samples.size() - 1)];
            }
        },
        v_);
}

double SizeDistribution::expect(const std::function<double(double)>& g, double growth,
                                std::span<const double> breakpoints) const {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return g(d.value);
            } else if constexpr (std::is_same_v<T, Empirical>) {
                double m = 0.0;
                for (double s : d.samples) m += g(s);
                return m / static_cast<double>(d.samples.size());
            } else if constexpr (std::is_same_v<T, Uniform>) {
                double w = 1.0 / (d.hi - d.lo);
                double lo = std::max(d.lo, 1e-12);
                return integrate([&](double s) { return g(s) * w; }, lo, d.hi, breakpoints);
            } else if constexpr (std::is_same_v<T, BoundedLomax>) {
                double c = d.shape / d.scale / d.norm;
                auto f = [&](double s) {
                    return g(s) * c * std::pow(1.0 + s / d.scale, -(d.shape + 1.0));
                };
                return integrate(f, 1e-12, d.bound, breakpoints);
            } else {
                // exponential tails: cut where density * e^{growth s} is below ~1e-16
                double slowest = theta_star();
                if (growth >= slowest) return kInf;
                double cut = (38.0 + std::log(slowest / (slowest - growth))) / (slowest - growth);
                if constexpr (std::is_same_v<T, Exponential>) {
                    auto f = [&](double s) { return g(s) * d.rate * std::exp(-d.rate * s); };
                    return integrate(f, 1e-12, cut, breakpoints);
                } else {
                    auto f = [&](double s) {
                        double w = 0.0;
                        for (std::size_t i = 0; i < d.probs.size(); ++i)
                            w += d.probs[i] * d.rates[i] * std::exp(-d.rates[i] * s);
                        return g(s) * w;
                    };
                    return integrate(f, 1e-12, cut, breakpoints);
                }
            }
        },
        v_);
}

std::string SizeDistribution::describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                os << "deterministic(" << d.value << ")";
            } else if constexpr (std::is_same_v<T, Exponential>) {
                os << "exponential(rate=" << d.rate << ")";
            } else if constexpr (std::is_same_v<T, Uniform>) {
                os << "uniform(" << d.lo << "," << d.hi << ")";
            } else if constexpr (std::is_same_v<T, Hyperexp>) {
                os << "hyperexp(";
                for (std::size_t i = 0; i < d.probs.size(); ++i) {
                    if (i) os << ",";
                    os << d.probs[i] << ":Exp(" << d.rates[i] << ")";
                }
                os << ")";
            } else if constexpr (std::is_same_v<T, BoundedLomax>) {
                os << "bounded_lomax(shape=" << d.shape << ",scale=" << d.scale
                   << ",bound=" << d.bound << ")";
            } else {
                os << "empirical(n=" << d.samples.size() << ")";
            }
        },
        v_);
    return os.str();
}

// ---------------------------------------------------------------------------

LabelSizeModel LabelSizeModel::full_information(SizeDistribution dist) {
    return LabelSizeModel{std::move(dist), {}};
}

LabelSizeModel LabelSizeModel::finite_labels(std::vector<LabelClass> classes) {
    require(!classes.empty(), "finite-label model needs at least one class");
    double total = 0.0;
    for (const auto& c : classes) {
        require(c.prob > 0, "label probabilities must be positive");
        total += c.prob;
    }
    require(std::abs(total - 1.0) <= kProbTol, "label probabilities must sum to 1");
    // The marginal slot is unused for mixtures; keep a placeholder.
    return LabelSizeModel{SizeDistribution::deterministic(1.0), std::move(classes)};
}

const LabelSizeModel::LabelClass& LabelSizeModel::label_class(std::size_t i) const {
    if (i >= classes_.size()) fail(ErrorCode::invalid_argument, "label index out of range");
    return classes_[i];
}

const SizeDistribution& LabelSizeModel::full_info_dist() const {
    if (!full_info()) fail(ErrorCode::invalid_argument, "model is not full-information");
    return marginal_;
}

double LabelSizeModel::mean() const {
    if (full_info()) return marginal_.mean();
    double m = 0.0;
    for (const auto& c : classes_) m += c.prob * c.dist.mean();
    return m;
}

double LabelSizeModel::mgf(double theta) const {
    if (full_info()) return marginal_.mgf(theta);
    double m = 0.0;
    for (const auto& c : classes_) m += c.prob * c.dist.mgf(theta);
    return m;
}

double LabelSizeModel::mgf_prime(double theta) const {
    if (full_info()) return marginal_.mgf_prime(theta);
    double m = 0.0;
    for (const auto& c : classes_) m += c.prob * c.dist.mgf_prime(theta);
    return m;
}

double LabelSizeModel::theta_star() const {
    if (full_info()) return marginal_.theta_star();
    double t = kInf;
    for (const auto& c : classes_) t = std::min(t, c.dist.theta_star());
    return t;
}

double LabelSizeModel::conditional_mgf(double label, double theta) const {
    if (full_info()) return std::exp(theta * label);
    double idx = std::round(label);
    if (idx < 0 || idx >= static_cast<double>(classes_.size()) || idx != label)
        fail(ErrorCode::invalid_argument, "unknown label");
    return classes_[static_cast<std::size_t>(idx)].dist.mgf(theta);
}

double LabelSizeModel::expect(const std::function<double(double)>& g, double growth,
                              std::span<const double> breakpoints) const {
    if (full_info()) return marginal_.expect(g, growth, breakpoints);
    double m = 0.0;
    for (const auto& c : classes_) m += c.prob * c.dist.expect(g, growth, breakpoints);
    return m;
}

LabelSizeModel::Draw LabelSizeModel::sample(Rng& rng) const {
    if (full_info()) {
        double s = marginal_.sample(rng);
        return {s, s, -1};
    }
    double u = rng.uniform(), acc = 0.0;
    std::size_t pick = classes_.size() - 1;
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        acc += classes_[i].prob;
        if (u < acc) { pick = i; break; }
    }
    double s = classes_[pick].dist.sample(rng);
    return {static_cast<double>(pick), s, static_cast<int>(pick)};
}

std::string LabelSizeModel::describe() const {
    if (full_info()) return marginal_.describe();
    std::ostringstream os;
    os << "labels(";
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (i) os << ";";
        os << classes_[i].prob << ":" << classes_[i].dist.describe();
    }
    os << ")";
    return os.str();
}

} // namespace boostq
