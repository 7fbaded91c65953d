#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rng.hpp"

namespace boostq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Job size distribution with exact (or numerically stable) MGF evaluation,
/// sampling, and the leftmost MGF singularity theta*.
class SizeDistribution {
public:
    struct Deterministic { double value; };
    struct Exponential { double rate; };
    struct Uniform { double lo, hi; };
    struct Hyperexp {
        std::vector<double> probs;
        std::vector<double> rates;
    };
    struct BoundedLomax {
        double shape;  // alpha
        double scale;  // sigma
        double bound;  // L; law is Lomax(alpha, sigma) conditioned on [0, L]
        double norm;   // P[Lomax <= L] = 1 - (1 + L/sigma)^-alpha
    };
    struct Empirical { std::vector<double> samples; };  // sorted

    static SizeDistribution deterministic(double value);
    static SizeDistribution exponential(double rate);
    static SizeDistribution uniform(double lo, double hi);
    static SizeDistribution hyperexponential(std::vector<double> probs, std::vector<double> rates);
    static SizeDistribution bounded_lomax(double shape, double scale, double bound);
    // Solves the scale so the truncated mean equals `mean`.
    static SizeDistribution bounded_lomax_mean(double shape, double bound, double mean);
    static SizeDistribution empirical(std::vector<double> samples);

    double mean() const;
    /// E[exp(theta S)]; +infinity for theta >= theta* (a value, not an error).
    double mgf(double theta) const;
    /// E[S exp(theta S)]; throws domain error for theta >= theta*.
    double mgf_prime(double theta) const;
    /// Leftmost singularity of the MGF; +infinity for bounded-support laws.
    double theta_star() const;
    double sample(Rng& rng) const;

    /// Supremum of the support (+infinity if unbounded).
    double upper_bound() const;

    /// E[g(S)] by exact sum (atoms) or adaptive quadrature (densities).
    /// `growth` bounds |g(s)| <= C exp(growth s); returns +infinity when
    /// growth >= theta* (the expectation cannot be guaranteed finite).
    double expect(const std::function<double(double)>& g, double growth,
                  std::span<const double> breakpoints = {}) const;

    std::string describe() const;

    template <class T> bool is() const { return std::holds_alternative<T>(v_); }
    template <class T> const T& as() const { return std::get<T>(v_); }

private:
    explicit SizeDistribution(
        std::variant<Deterministic, Exponential, Uniform, Hyperexp, BoundedLomax, Empirical> v)
        : v_(std::move(v)) {}

    std::variant<Deterministic, Exponential, Uniform, Hyperexp, BoundedLomax, Empirical> v_;
};

/// Joint law of a label-size pair (L, S): either full information (L = S) or
/// a finite label mixture with per-label branch distributions.
class LabelSizeModel {
public:
    struct LabelClass {
        double prob;
        SizeDistribution dist;
    };

    static LabelSizeModel full_information(SizeDistribution dist);
    static LabelSizeModel finite_labels(std::vector<LabelClass> classes);

    bool full_info() const { return classes_.empty(); }
    std::size_t label_count() const { return classes_.size(); }  // 0 for full info
    const LabelClass& label_class(std::size_t i) const;
    const SizeDistribution& full_info_dist() const;

    double mean() const;
    double mgf(double theta) const;       // marginal S
    double mgf_prime(double theta) const;
    double theta_star() const;

    /// E[exp(theta S) | L = l]. Full information: l is a size, returns
    /// exp(theta l). Finite labels: l is the label index.
    double conditional_mgf(double label, double theta) const;

    /// Marginal E[g(S)].
    double expect(const std::function<double(double)>& g, double growth,
                  std::span<const double> breakpoints = {}) const;

    /// Draws (label, size); label is the class index, or the size itself
    /// under full information.
    struct Draw { double label; double size; int cls; };  // cls = -1 for full info
    Draw sample(Rng& rng) const;

    std::string describe() const;

private:
    LabelSizeModel(SizeDistribution marginal, std::vector<LabelClass> classes)
        : marginal_(std::move(marginal)), classes_(std::move(classes)) {}

    SizeDistribution marginal_;        // full-info law, or unused sentinel for mixtures
    std::vector<LabelClass> classes_;  // empty for full information
};

} // namespace boostq
