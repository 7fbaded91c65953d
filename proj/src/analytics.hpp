#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dist.hpp"

namespace boostq {

/// Decay rate of the response-time tail: the least positive solution of
/// gamma = lambda (E[exp(gamma S)] - 1).
struct DecayRate {
    double gamma;
    double lambda;
    double rho;
};

struct TailConstant {
    double value;
    std::string policy;
    double gamma;
};

/// Per-label head start. Bind against a model before evaluating.
class BoostFunction {
public:
    enum class Kind { zero, theta_optimal, constant, table, curve };

    static BoostFunction zero();
    static BoostFunction theta_optimal(double theta);
    static BoostFunction constant(double value);
    static BoostFunction per_label_table(std::vector<double> boosts);
    /// Full-information boost curve size -> boost. `growth` bounds the
    /// exponential growth rate of the curve (0 for bounded/decaying curves).
    static BoostFunction user_curve(std::function<double(double)> curve, double growth = 0.0);

    Kind kind() const { return kind_; }
    double theta() const { return theta_; }
    std::string describe() const;

    /// Model-bound evaluator: boost(cls, size) with cls = -1 for full info.
    struct Bound {
        std::vector<double> table;              // finite labels
        std::function<double(double)> curve;    // full information
        bool full_info = true;
        double growth = 0.0;                    // growth bound of the curve

        double operator()(int cls, double size) const {
            return full_info ? curve(size) : table[static_cast<std::size_t>(cls)];
        }
    };
    Bound bind(const LabelSizeModel& model) const;

private:
    Kind kind_ = Kind::zero;
    double theta_ = 0.0;
    double value_ = 0.0;
    std::vector<double> table_;
    std::function<double(double)> curve_;
    double growth_ = 0.0;
};

/// Least positive root of lambda (M_S(theta) - 1) = theta on (0, theta*).
DecayRate solve_gamma(double lambda, const LabelSizeModel& model);
DecayRate solve_gamma(double lambda, const SizeDistribution& dist);

/// Residue of the Pollaczek-Khinchine transform at its simple pole:
/// C_W = (1 - rho) / (lambda M_S'(gamma) - 1).
TailConstant work_tail_constant(double lambda, const LabelSizeModel& model, const DecayRate& dr);

/// C_FCFS = C_W E[exp(gamma S)].
TailConstant fcfs_tail_constant(const TailConstant& cw, const LabelSizeModel& model,
                                const DecayRate& dr);

/// theta-optimal boost of one label: (1/theta) log(M / (M - 1)) with
/// M = E[exp(theta S) | L = l]. Strictly decreasing in size under full info.
double optimal_boost(const LabelSizeModel& model, double label, double theta);

/// E[b(L) (exp(gamma S) - 1)]; +infinity signals the tail-constant formula
/// is inapplicable for this boost.
double admissibility(const LabelSizeModel& model, const BoostFunction& boost, const DecayRate& dr);

/// C_Boost = C_W E[exp(gamma (S - b(L)))] exp(lambda E[b(L)(exp(gamma S) - 1)]).
TailConstant boost_tail_constant(double lambda, const LabelSizeModel& model,
                                 const BoostFunction& boost, const DecayRate& dr,
                                 const TailConstant& cw);

/// C* = C_W (E[exp(gamma S)] - 1) exp(lambda E[b_gamma(L)(exp(gamma S) - 1)]).
TailConstant optimal_tail_constant(double lambda, const LabelSizeModel& model, const DecayRate& dr,
                                   const TailConstant& cw);

/// E[exp(theta V(u))] = exp(lambda E[(exp(theta S') - 1) min{B', u}]); the
/// transform of the crossing work arriving in (0, u). Returns +infinity when
/// the inner expectation diverges.
double crossing_work_transform(double lambda, const LabelSizeModel& model,
                               const BoostFunction& boost, double theta, double u);

/// 1 - C_policy / C_fcfs.
double asymptotic_tir(double c_policy, double c_fcfs);

/// C_NudgeM / C_FCFS for a two-label system with conditional MGFs s1 <= s2
/// at gamma and pass budget K.
double nudge_m_ratio(double p1, double s1, double s2, int k);

/// C_Boost / C_FCFS for a two-label system with boost gap delta = b1 - b2 >= 0.
/// Assumes the gamma fixed point lambda (p1 s1 + p2 s2 - 1) = gamma.
double two_label_boost_ratio(double p1, double s1, double s2, double delta, double lambda,
                             double gamma);

/// Finite-label tail constant
/// C(b) = C_W sum_i p_i s_i exp(-gamma b_i + sum_j lambda p_j b_j (s_j - 1)).
/// Requires the consistency identity lambda sum_i p_i (s_i - 1) = gamma.
double finite_label_constant(double lambda, double gamma, double cw, std::span<const double> p,
                             std::span<const double> s, std::span<const double> b);

std::vector<double> finite_label_gradient(double lambda, double gamma, double cw,
                                          std::span<const double> p, std::span<const double> s,
                                          std::span<const double> b);

/// Projected gradient descent (onto b >= 0) from b0; converges to the
/// closed-form minimizer b*_i = (1/gamma) log(s_i / (s_i - 1)).
std::vector<double> minimize_finite_label(double lambda, double gamma, double cw,
                                          std::span<const double> p, std::span<const double> s,
                                          std::span<const double> b0);

} // namespace boostq
