#pragma once

#include <cstddef>
#include <vector>

#include "renewal/dist_model.hpp"

namespace renewal {

inline constexpr double kDefaultStep = 1.0 / 512.0;
inline constexpr double kDefaultHorizon = 8.0;

/// Samples of a scalar function on the uniform grid t_i = t0 + i*h. Distribution knots are
/// grid points; their indices are kept for one-sided bookkeeping.
struct GridFunction {
    double t0 = 0.0;
    double h = kDefaultStep;
    std::vector<double> values;
    std::vector<std::size_t> knot_indices;

    std::size_t size() const { return values.size(); }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * h; }
    double horizon() const { return values.empty() ? t0 : time(values.size() - 1); }
};

/// A piecewise-continuous grid function stored with both one-sided limits. `left` and
/// `right` coincide except at knot indices.
struct SlopeGridFunction {
    GridFunction left;
    GridFunction right;

    std::size_t size() const { return left.size(); }
};

struct RenewalSolution {
    GridFunction m;
    GridFunction M;
    SlopeGridFunction m_slope;
    double h = kDefaultStep;
    /// Sup-norm of m'(t) - r'(t) S(t) - int_0^t m'(x) [r(t-x) - r(t)] S(t-x) dx.
    double residual_key_identity = 0.0;
    /// Sup-norm of int_0^t m'(x) S(t-x) dx - f(t) + f(0) S(t).
    double residual_int_identity = 0.0;
};

/// Trapezoidal product integration of m = f + m*f with implicit diagonal solve.
/// Throws ConfigError when a knot or the horizon is not a grid point, when horizon <= last
/// knot, or when 1 - h f(0)/2 <= 1/2.
GridFunction solve_renewal_density(const PiecewiseDistribution& dist, double h = kDefaultStep,
                                   double horizon = kDefaultHorizon);

/// Cumulative trapezoid of m; M(0) = 0.
GridFunction renewal_function(const GridFunction& m);

/// Forward solve of m'(t) = f'(t) + m(0) f(t) + int_0^t m'(x) f(t-x) dx on the grid of m.
/// At knots the left value uses f'(t-) and the right value f'(t+); m'(0) is set to r'(0+).
SlopeGridFunction solve_renewal_density_slope(const PiecewiseDistribution& dist, const GridFunction& m);

GridFunction key_identity_residual(const PiecewiseDistribution& dist, const SlopeGridFunction& m_slope);
GridFunction int_identity_residual(const PiecewiseDistribution& dist, const SlopeGridFunction& m_slope);

/// Runs the whole pipeline: m, M, m', and both identity residual sup-norms.
RenewalSolution solve_renewal(const PiecewiseDistribution& dist, double h = kDefaultStep,
                              double horizon = kDefaultHorizon);

double sup_norm(const GridFunction& g);

struct MonotonicityReport {
    bool is_nonincreasing = true;
    double max_increase = 0.0;
    /// Left end of the step with the largest increase.
    double where = 0.0;
};

/// is_nonincreasing iff max_i (g_{i+1} - g_i) <= tol.
MonotonicityReport monotonicity_report(const GridFunction& g, double tol);

struct SlopeMaximum {
    double value = 0.0;
    double where = 0.0;
};

/// Largest value over both one-sided samples.
SlopeMaximum max_slope(const SlopeGridFunction& g);

struct LogConvexityReport {
    bool is_log_convex = true;
    bool is_log_concave = true;
    /// max(0, -min second difference of log g): how far log-convexity fails.
    double worst_convex_violation = 0.0;
    double worst_convex_where = 0.0;
    /// max(0, max second difference of log g): how far log-concavity fails.
    double worst_concave_violation = 0.0;
    double worst_concave_where = 0.0;
};

/// Tests second differences of log g against -tol (convex) and +tol (concave).
/// Throws DomainError if any sample is not strictly positive.
LogConvexityReport log_convexity_report(const GridFunction& g, double tol);

/// Samples t -> fn(t) on the grid shape of `like` (same t0, h, size and knots).
template <class Fn>
GridFunction sample_like(const GridFunction& like, Fn&& fn) {
    GridFunction out = like;
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = fn(like.time(i));
    return out;
}

}  // namespace renewal
