#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "renewal/errors.hpp"

namespace renewal {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Closed-form segment laws. All are expressed in absolute time t.
// ---------------------------------------------------------------------------

/// Survival scale * (e^{-t} + 1). Hazard 1/(1+e^t), independent of the scale.
struct LogisticSurvival {
    double scale = 0.5;

    double survival(double t) const;
    double density(double t) const;
    double density_slope(double t) const;
    double hazard(double t) const;
    double hazard_slope(double t) const;
    std::optional<double> inverse_survival(double u) const;
};

/// Survival alpha * e^{-lambda t} - beta; hazard lambda / (1 - (beta/alpha) e^{lambda t}).
struct ShiftedExponentialSurvival {
    double alpha = 1.0;
    double lambda = 1.0;
    double beta = 0.0;

    double epsilon() const { return beta / alpha; }
    double survival(double t) const;
    double density(double t) const;
    double density_slope(double t) const;
    double hazard(double t) const;
    double hazard_slope(double t) const;
    std::optional<double> inverse_survival(double u) const;
};

/// Hazard r0 * e^{(t0 - t)/decay_scale}, anchored at survival S0 at time t0.
struct DecayingHazard {
    double t_anchor = 0.0;
    double survival_anchor = 1.0;
    double hazard_anchor = 1.0;
    double decay_scale = 2.0;

    double survival(double t) const;
    double density(double t) const;
    double density_slope(double t) const;
    double hazard(double t) const;
    double hazard_slope(double t) const;
    std::optional<double> inverse_survival(double u) const;
};

/// Constant hazard `rate`, anchored at survival S0 at time t0.
struct ConstantHazard {
    double t_anchor = 0.0;
    double survival_anchor = 1.0;
    double rate = 1.0;

    double survival(double t) const;
    double density(double t) const;
    double density_slope(double t) const;
    double hazard(double t) const;
    double hazard_slope(double t) const;
    std::optional<double> inverse_survival(double u) const;
};

/// Erlang-2 with the given rate: density rate^2 t e^{-rate t}.
struct Erlang2Survival {
    double rate = 1.0;

    double survival(double t) const;
    double density(double t) const;
    double density_slope(double t) const;
    double hazard(double t) const;
    double hazard_slope(double t) const;
    std::optional<double> inverse_survival(double) const { return std::nullopt; }
};

/// Finite mixture of exponentials (hyperexponential): survival sum_j w_j e^{-rate_j t}.
struct ExponentialMixture {
    std::vector<double> weights;
    std::vector<double> rates;

    double survival(double t) const;
    double density(double t) const;
    double density_slope(double t) const;
    double hazard(double t) const;
    double hazard_slope(double t) const;
    std::optional<double> inverse_survival(double) const { return std::nullopt; }
};

using SegmentForm = std::variant<LogisticSurvival, ShiftedExponentialSurvival, DecayingHazard,
                                 ConstantHazard, Erlang2Survival, ExponentialMixture>;

std::string form_name(const SegmentForm& form);

struct Segment {
    double t_lo = 0.0;
    double t_hi = kInfinity;
    SegmentForm form;
};

/// Point evaluation. Value fields come from the segment owning t (knots belong to the left
/// segment); the slope fields are one-sided and come from the segment on each side.
struct PointValues {
    double survival = 1.0;
    double density = 0.0;
    double hazard = 0.0;
    double hazard_slope_left = 0.0;
    double hazard_slope_right = 0.0;
    double density_slope_left = 0.0;
    double density_slope_right = 0.0;
};

/// Lifetime law on [0, inf) made of closed-form segments that tile the half line.
class PiecewiseDistribution {
public:
    /// Throws DomainError unless the segments tile [0, inf), survival starts at 1, and both
    /// survival and density are continuous at every interior knot.
    explicit PiecewiseDistribution(std::vector<Segment> segments);

    const std::vector<Segment>& segments() const { return segments_; }
    /// Interior segment boundaries, ascending.
    const std::vector<double>& knots() const { return knots_; }

    PointValues eval(double t) const;
    double survival(double t) const;
    double density(double t) const;
    double hazard(double t) const;

    /// Index of the segment owning t for values: t in (t_lo, t_hi], or the first segment at t = 0.
    std::size_t owning_segment(double t) const;

    /// Inverse of the survival function for u in (0, 1). Closed form where the owning segment
    /// provides one, safeguarded Newton otherwise.
    double inverse_survival(double u) const;

private:
    std::vector<Segment> segments_;
    std::vector<double> knots_;
};

// ---------------------------------------------------------------------------
// Reference laws used as solver test inputs.
// ---------------------------------------------------------------------------

PiecewiseDistribution make_exponential(double rate);
PiecewiseDistribution make_erlang2(double rate);
PiecewiseDistribution make_hyperexponential(std::vector<double> weights, std::vector<double> rates);

// ---------------------------------------------------------------------------
// The non-DFR counterexample family.
// ---------------------------------------------------------------------------

struct FamilyParams {
    double t1 = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    double epsilon = 0.0;
    double r_t1 = 0.0;
    double f0 = 0.5;
};

/// lambda = [1 + (1+2 beta) e^{t1}]^{-1}, alpha = e^{(lambda-1) t1} / (2 lambda), epsilon = beta/alpha.
FamilyParams derive_family_params(double t1, double beta);

struct CounterexampleSpec {
    double t1 = 1.0;
    double t2 = 1.5;
    std::optional<double> t3;
    double beta = 0.02;
};

/// Smallest t3 giving r(t3) <= r(t1): t2 + 2 ln(r(t2)/r(t1)).
double minimal_t3(double t1, double t2, double beta);

/// Four-segment counterexample. Throws DomainError on any violated precondition; an absent t3
/// defaults to minimal_t3.
PiecewiseDistribution build_counterexample(const CounterexampleSpec& spec);

/// Same construction with the t3 lower bound left unchecked, so that condition (iv) failures
/// can be produced on purpose. Ordering and positivity are still enforced.
PiecewiseDistribution build_counterexample_unchecked(const CounterexampleSpec& spec);

// ---------------------------------------------------------------------------
// Hazard-shape conditions on the four intervals [0,t1], [t1,t2], [t2,t3], [t3,inf).
// ---------------------------------------------------------------------------

struct ConditionCheck {
    bool pass = false;
    /// Largest amount by which the sampled inequality is violated (0 when it holds everywhere).
    double worst_violation = 0.0;
    /// Time of the largest sampled margin.
    double where = 0.0;
    /// Signed margin lhs - rhs at `where`; strict conditions need it below zero.
    double margin = 0.0;
    /// True when the segment form was recognised and the condition confirmed in closed form.
    bool analytic = false;
    std::string note;
};

struct ConditionReport {
    std::array<ConditionCheck, 4> conditions;
    double horizon = 8.0;
    double tail_survival = 0.0;

    bool all_pass() const;
};

inline constexpr double kConditionTolerance = 1e-10;

ConditionReport validate_conditions(const PiecewiseDistribution& dist, double grid_step,
                                    double horizon = 8.0);

std::string format_report(const ConditionReport& report);

}  // namespace renewal
