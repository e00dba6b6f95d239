#include "renewal/renewal_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace renewal {

namespace {

/// Distribution values on the solver grid; slopes kept one-sided at knots.
struct SampledLaw {
    double h = 0.0;
    std::vector<double> times;
    std::vector<double> survival;
    std::vector<double> density;
    std::vector<double> hazard;
    std::vector<double> density_slope_left;
    std::vector<double> density_slope_right;
    std::vector<double> hazard_slope_left;
    std::vector<double> hazard_slope_right;
    std::vector<std::size_t> knot_indices;

    std::size_t size() const { return times.size(); }
};

std::size_t grid_index_of(double t, double h, const char* what) {
    const double ratio = t / h;
    const double idx = std::round(ratio);
    if (std::abs(ratio - idx) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg.precision(12);
        msg << what << " " << t << " is not a multiple of the step h = " << h;
        throw ConfigError(msg.str());
    }
    return static_cast<std::size_t>(idx);
}

SampledLaw sample_law(const PiecewiseDistribution& dist, double h, double horizon) {
    if (!(std::isfinite(h) && h > 0.0)) throw ConfigError("step h must be positive");
    if (!(std::isfinite(horizon) && horizon > 0.0)) throw ConfigError("horizon must be positive");
    const std::size_t n = grid_index_of(horizon, h, "horizon");

    SampledLaw law;
    law.h = h;
    for (double k : dist.knots()) {
        if (!(k < horizon)) throw ConfigError("horizon must exceed every distribution knot");
        law.knot_indices.push_back(grid_index_of(k, h, "knot"));
    }

    const double f0 = dist.density(0.0);
    if (!(1.0 - 0.5 * h * f0 > 0.5)) throw ConfigError("step too coarse: need 1 - h f(0)/2 > 1/2");

    law.times.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) law.times[i] = static_cast<double>(i) * h;
    // exact knot values so that knot ownership in eval() is not left to rounding
    for (std::size_t k = 0; k < law.knot_indices.size(); ++k) law.times[law.knot_indices[k]] = dist.knots()[k];

    auto resize = [n](std::vector<double>& v) { v.resize(n + 1); };
    resize(law.survival);
    resize(law.density);
    resize(law.hazard);
    resize(law.density_slope_left);
    resize(law.density_slope_right);
    resize(law.hazard_slope_left);
    resize(law.hazard_slope_right);
    for (std::size_t i = 0; i <= n; ++i) {
        const PointValues v = dist.eval(law.times[i]);
        law.survival[i] = v.survival;
        law.density[i] = v.density;
        law.hazard[i] = v.hazard;
        law.density_slope_left[i] = v.density_slope_left;
        law.density_slope_right[i] = v.density_slope_right;
        law.hazard_slope_left[i] = v.hazard_slope_left;
        law.hazard_slope_right[i] = v.hazard_slope_right;
    }
    return law;
}

SampledLaw sample_law_for(const PiecewiseDistribution& dist, const GridFunction& like) {
    if (like.t0 != 0.0) throw ConfigError("grid functions must start at t = 0");
    if (like.size() < 2) throw ConfigError("grid function needs at least two samples");
    SampledLaw law = sample_law(dist, like.h, like.horizon());
    if (law.size() != like.size() || law.knot_indices != like.knot_indices)
        throw ConfigError("grid function does not match the distribution grid");
    return law;
}

GridFunction empty_like(const SampledLaw& law) {
    GridFunction g;
    g.t0 = 0.0;
    g.h = law.h;
    g.values.assign(law.size(), 0.0);
    g.knot_indices = law.knot_indices;
    return g;
}

/// Slope values used inside convolution sums: the mean of both one-sided limits, which is
/// what the trapezoid sees when adjacent panels use their own limits.
std::vector<double> panel_values(const SlopeGridFunction& s) {
    std::vector<double> mid(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) mid[i] = 0.5 * (s.left.values[i] + s.right.values[i]);
    return mid;
}

}  // namespace

GridFunction solve_renewal_density(const PiecewiseDistribution& dist, double h, double horizon) {
    const SampledLaw law = sample_law(dist, h, horizon);
    const std::vector<double>& f = law.density;
    const std::size_t n = law.size();
    const double diag = 1.0 - 0.5 * h * f[0];

    GridFunction m = empty_like(law);
    std::vector<double>& v = m.values;
    v[0] = f[0];
    for (std::size_t i = 1; i < n; ++i) {
        double conv = 0.5 * v[0] * f[i];
        for (std::size_t j = 1; j < i; ++j) conv += v[j] * f[i - j];
        v[i] = (f[i] + h * conv) / diag;
    }
    return m;
}

GridFunction renewal_function(const GridFunction& m) {
    GridFunction M = m;
    if (M.values.empty()) return M;
    M.values[0] = 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i < m.size(); ++i) {
        acc += 0.5 * m.h * (m.values[i - 1] + m.values[i]);
        M.values[i] = acc;
    }
    return M;
}

SlopeGridFunction solve_renewal_density_slope(const PiecewiseDistribution& dist, const GridFunction& m) {
    const SampledLaw law = sample_law_for(dist, m);
    const std::vector<double>& f = law.density;
    const std::size_t n = law.size();
    const double h = law.h;
    const double diag = 1.0 - 0.5 * h * f[0];
    const double m0 = m.values[0];

    SlopeGridFunction s{empty_like(law), empty_like(law)};
    std::vector<double>& left = s.left.values;
    std::vector<double>& right = s.right.values;
    std::vector<double> mid(n, 0.0);

    left[0] = right[0] = mid[0] = law.hazard_slope_right[0];
    for (std::size_t i = 1; i < n; ++i) {
        double conv = 0.5 * mid[0] * f[i];
        for (std::size_t j = 1; j < i; ++j) conv += mid[j] * f[i - j];
        left[i] = (law.density_slope_left[i] + m0 * f[i] + h * conv) / diag;
        right[i] = left[i] + (law.density_slope_right[i] - law.density_slope_left[i]);
        mid[i] = 0.5 * (left[i] + right[i]);
    }
    return s;
}

GridFunction key_identity_residual(const PiecewiseDistribution& dist, const SlopeGridFunction& m_slope) {
    const SampledLaw law = sample_law_for(dist, m_slope.left);
    const std::size_t n = law.size();
    const double h = law.h;
    const std::vector<double>& S = law.survival;
    const std::vector<double>& r = law.hazard;
    const std::vector<double>& slope = m_slope.left.values;
    const std::vector<double> mid = panel_values(m_slope);

    GridFunction res = empty_like(law);
    res.values[0] = m_slope.right.values[0] - law.hazard_slope_right[0] * S[0];
    for (std::size_t i = 1; i < n; ++i) {
        // integrand vanishes at x = 0 since r(t - 0) = r(t)
        double integral = 0.5 * slope[i] * (r[0] - r[i]) * S[0];
        for (std::size_t j = 1; j < i; ++j) integral += mid[j] * (r[i - j] - r[i]) * S[i - j];
        res.values[i] = slope[i] - law.hazard_slope_left[i] * S[i] - h * integral;
    }
    return res;
}

GridFunction int_identity_residual(const PiecewiseDistribution& dist, const SlopeGridFunction& m_slope) {
    const SampledLaw law = sample_law_for(dist, m_slope.left);
    const std::size_t n = law.size();
    const double h = law.h;
    const std::vector<double>& S = law.survival;
    const std::vector<double>& f = law.density;
    const std::vector<double>& slope = m_slope.left.values;
    const std::vector<double> mid = panel_values(m_slope);

    GridFunction res = empty_like(law);
    res.values[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double integral = 0.5 * (mid[0] * S[i] + slope[i] * S[0]);
        for (std::size_t j = 1; j < i; ++j) integral += mid[j] * S[i - j];
        res.values[i] = h * integral - f[i] + f[0] * S[i];
    }
    return res;
}

RenewalSolution solve_renewal(const PiecewiseDistribution& dist, double h, double horizon) {
    RenewalSolution sol;
    sol.h = h;
    sol.m = solve_renewal_density(dist, h, horizon);
    sol.M = renewal_function(sol.m);
    sol.m_slope = solve_renewal_density_slope(dist, sol.m);
    sol.residual_key_identity = sup_norm(key_identity_residual(dist, sol.m_slope));
    sol.residual_int_identity = sup_norm(int_identity_residual(dist, sol.m_slope));
    return sol;
}

double sup_norm(const GridFunction& g) {
    double s = 0.0;
    for (double v : g.values) s = std::max(s, std::abs(v));
    return s;
}

MonotonicityReport monotonicity_report(const GridFunction& g, double tol) {
    MonotonicityReport rep;
    if (g.size() < 2) return rep;
    rep.max_increase = -kInfinity;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double inc = g.values[i + 1] - g.values[i];
        if (inc > rep.max_increase) {
            rep.max_increase = inc;
            rep.where = g.time(i);
        }
    }
    rep.is_nonincreasing = rep.max_increase <= tol;
    return rep;
}

SlopeMaximum max_slope(const SlopeGridFunction& g) {
    SlopeMaximum best{-kInfinity, 0.0};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = std::max(g.left.values[i], g.right.values[i]);
        if (v > best.value) best = {v, g.left.time(i)};
    }
    return best;
}

LogConvexityReport log_convexity_report(const GridFunction& g, double tol) {
    std::vector<double> logs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g.values[i] > 0.0)) throw DomainError("log-convexity test needs strictly positive samples");
        logs[i] = std::log(g.values[i]);
    }
    LogConvexityReport rep;
    for (std::size_t i = 1; i + 1 < logs.size(); ++i) {
        const double d2 = logs[i + 1] - 2.0 * logs[i] + logs[i - 1];
        if (-d2 > rep.worst_convex_violation) {
            rep.worst_convex_violation = -d2;
            rep.worst_convex_where = g.time(i);
        }
        if (d2 > rep.worst_concave_violation) {
            rep.worst_concave_violation = d2;
            rep.worst_concave_where = g.time(i);
        }
    }
    rep.is_log_convex = rep.worst_convex_violation <= tol;
    rep.is_log_concave = rep.worst_concave_violation <= tol;
    return rep;
}

}  // namespace renewal
