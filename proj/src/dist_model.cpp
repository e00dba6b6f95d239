#include "renewal/dist_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>
#include <utility>

namespace renewal {

namespace {

bool is_positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

double relative_gap(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

/// Hazard slope from survival, density and density slope: r' = (f' S + f^2) / S^2.
double hazard_slope_from(double survival, double density, double density_slope) {
    return (density_slope * survival + density * density) / (survival * survival);
}

/// Points lo, lo + step, ..., hi (hi always included).
std::vector<double> sample_points(double lo, double hi, double step) {
    std::vector<double> pts;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
    pts.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k) pts.push_back(lo + static_cast<double>(k) * step);
    pts.push_back(hi);
    return pts;
}

}  // namespace

// --- LogisticSurvival -------------------------------------------------------

double LogisticSurvival::survival(double t) const { return scale * (std::exp(-t) + 1.0); }
double LogisticSurvival::density(double t) const { return scale * std::exp(-t); }
double LogisticSurvival::density_slope(double t) const { return -scale * std::exp(-t); }
double LogisticSurvival::hazard(double t) const { return 1.0 / (1.0 + std::exp(t)); }
double LogisticSurvival::hazard_slope(double t) const {
    const double e = std::exp(-t);
    // -e^t/(1+e^t)^2 written in e^{-t} to stay finite for large t
    return -e / ((1.0 + e) * (1.0 + e));
}
std::optional<double> LogisticSurvival::inverse_survival(double u) const {
    return -std::log(u / scale - 1.0);
}

// --- ShiftedExponentialSurvival ---------------------------------------------

double ShiftedExponentialSurvival::survival(double t) const {
    return alpha * std::exp(-lambda * t) - beta;
}
double ShiftedExponentialSurvival::density(double t) const {
    return alpha * lambda * std::exp(-lambda * t);
}
double ShiftedExponentialSurvival::density_slope(double t) const {
    return -alpha * lambda * lambda * std::exp(-lambda * t);
}
double ShiftedExponentialSurvival::hazard(double t) const {
    return lambda / (1.0 - epsilon() * std::exp(lambda * t));
}
double ShiftedExponentialSurvival::hazard_slope(double t) const {
    const double r = hazard(t);
    return (r - lambda) * r;
}
std::optional<double> ShiftedExponentialSurvival::inverse_survival(double u) const {
    return -std::log((u + beta) / alpha) / lambda;
}

// --- DecayingHazard ---------------------------------------------------------

double DecayingHazard::survival(double t) const {
    return survival_anchor *
           std::exp(-decay_scale * hazard_anchor * (1.0 - std::exp((t_anchor - t) / decay_scale)));
}
double DecayingHazard::density(double t) const { return hazard(t) * survival(t); }
double DecayingHazard::density_slope(double t) const {
    const double r = hazard(t);
    return survival(t) * (hazard_slope(t) - r * r);
}
double DecayingHazard::hazard(double t) const {
    return hazard_anchor * std::exp((t_anchor - t) / decay_scale);
}
double DecayingHazard::hazard_slope(double t) const { return -hazard(t) / decay_scale; }
std::optional<double> DecayingHazard::inverse_survival(double u) const {
    const double arg = 1.0 + std::log(u / survival_anchor) / (decay_scale * hazard_anchor);
    if (!(arg > 0.0)) return std::nullopt;
    return t_anchor - decay_scale * std::log(arg);
}

// --- ConstantHazard ---------------------------------------------------------

double ConstantHazard::survival(double t) const {
    return survival_anchor * std::exp(-rate * (t - t_anchor));
}
double ConstantHazard::density(double t) const { return rate * survival(t); }
double ConstantHazard::density_slope(double t) const { return -rate * rate * survival(t); }
double ConstantHazard::hazard(double) const { return rate; }
double ConstantHazard::hazard_slope(double) const { return 0.0; }
std::optional<double> ConstantHazard::inverse_survival(double u) const {
    return t_anchor - std::log(u / survival_anchor) / rate;
}

// --- Erlang2Survival --------------------------------------------------------

double Erlang2Survival::survival(double t) const {
    return (1.0 + rate * t) * std::exp(-rate * t);
}
double Erlang2Survival::density(double t) const {
    return rate * rate * t * std::exp(-rate * t);
}
double Erlang2Survival::density_slope(double t) const {
    return rate * rate * (1.0 - rate * t) * std::exp(-rate * t);
}
double Erlang2Survival::hazard(double t) const { return rate * rate * t / (1.0 + rate * t); }
double Erlang2Survival::hazard_slope(double t) const {
    const double d = 1.0 + rate * t;
    return rate * rate / (d * d);
}

// --- ExponentialMixture -----------------------------------------------------

double ExponentialMixture::survival(double t) const {
    double s = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * std::exp(-rates[j] * t);
    return s;
}
double ExponentialMixture::density(double t) const {
    double s = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j)
        s += weights[j] * rates[j] * std::exp(-rates[j] * t);
    return s;
}
double ExponentialMixture::density_slope(double t) const {
    double s = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j)
        s -= weights[j] * rates[j] * rates[j] * std::exp(-rates[j] * t);
    return s;
}
double ExponentialMixture::hazard(double t) const { return density(t) / survival(t); }
double ExponentialMixture::hazard_slope(double t) const {
    return hazard_slope_from(survival(t), density(t), density_slope(t));
}

std::string form_name(const SegmentForm& form) {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, LogisticSurvival>) return "logistic_survival";
            else if constexpr (std::is_same_v<T, ShiftedExponentialSurvival>)
                return "shifted_exponential_survival";
            else if constexpr (std::is_same_v<T, DecayingHazard>) return "decaying_hazard";
            else if constexpr (std::is_same_v<T, ConstantHazard>) return "constant_hazard";
            else if constexpr (std::is_same_v<T, Erlang2Survival>) return "erlang2_survival";
            else return "exponential_mixture";
        },
        form);
}

// --- PiecewiseDistribution --------------------------------------------------

PiecewiseDistribution::PiecewiseDistribution(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
    if (segments_.empty()) throw DomainError("distribution needs at least one segment");
    if (segments_.front().t_lo != 0.0) throw DomainError("first segment must start at t = 0");
    if (segments_.back().t_hi != kInfinity) throw DomainError("last segment must extend to infinity");
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const auto& s = segments_[k];
        if (!(s.t_lo < s.t_hi)) throw DomainError("segment with t_lo >= t_hi");
        if (k + 1 < segments_.size()) {
            if (s.t_hi != segments_[k + 1].t_lo) throw DomainError("segments leave a gap or overlap");
            knots_.push_back(s.t_hi);
        }
    }
    const double s0 = std::visit([](const auto& f) { return f.survival(0.0); }, segments_.front().form);
    if (std::abs(s0 - 1.0) > 1e-12) throw DomainError("survival at t = 0 must equal 1");

    for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
        const double t = segments_[k].t_hi;
        const auto& left = segments_[k].form;
        const auto& right = segments_[k + 1].form;
        const double sl = std::visit([t](const auto& f) { return f.survival(t); }, left);
        const double sr = std::visit([t](const auto& f) { return f.survival(t); }, right);
        const double fl = std::visit([t](const auto& f) { return f.density(t); }, left);
        const double fr = std::visit([t](const auto& f) { return f.density(t); }, right);
        if (!(sl > 0.0) || !(sr > 0.0)) throw DomainError("survival must stay positive at knots");
        if (relative_gap(sl, sr) > 1e-9) throw DomainError("survival is discontinuous at a knot");
        if (relative_gap(fl, fr) > 1e-9) throw DomainError("density is discontinuous at a knot");
        const double s_lo =
            std::visit([&](const auto& f) { return f.survival(segments_[k].t_lo); }, left);
        if (!(sl < s_lo)) throw DomainError("survival must decrease across each segment");
    }
}

std::size_t PiecewiseDistribution::owning_segment(double t) const {
    for (std::size_t k = 0; k < segments_.size(); ++k)
        if (t <= segments_[k].t_hi) return k;
    return segments_.size() - 1;
}

PointValues PiecewiseDistribution::eval(double t) const {
    if (!(t >= 0.0)) throw DomainError("evaluation time must be nonnegative");
    const std::size_t left = owning_segment(t);
    std::size_t right = left;
    if (left + 1 < segments_.size() && t == segments_[left].t_hi) right = left + 1;

    PointValues v;
    std::visit(
        [&](const auto& f) {
            v.survival = f.survival(t);
            v.density = f.density(t);
            v.hazard = f.hazard(t);
            v.hazard_slope_left = f.hazard_slope(t);
            v.density_slope_left = f.density_slope(t);
        },
        segments_[left].form);
    std::visit(
        [&](const auto& f) {
            v.hazard_slope_right = f.hazard_slope(t);
            v.density_slope_right = f.density_slope(t);
        },
        segments_[right].form);
    return v;
}

double PiecewiseDistribution::survival(double t) const {
    if (!(t >= 0.0)) throw DomainError("evaluation time must be nonnegative");
    return std::visit([t](const auto& f) { return f.survival(t); }, segments_[owning_segment(t)].form);
}

double PiecewiseDistribution::density(double t) const {
    if (!(t >= 0.0)) throw DomainError("evaluation time must be nonnegative");
    return std::visit([t](const auto& f) { return f.density(t); }, segments_[owning_segment(t)].form);
}

double PiecewiseDistribution::hazard(double t) const {
    if (!(t >= 0.0)) throw DomainError("evaluation time must be nonnegative");
    return std::visit([t](const auto& f) { return f.hazard(t); }, segments_[owning_segment(t)].form);
}

double PiecewiseDistribution::inverse_survival(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("inverse survival needs u in (0, 1)");

    std::size_t k = 0;
    while (k + 1 < segments_.size() && survival(segments_[k].t_hi) >= u) ++k;
    const Segment& seg = segments_[k];

    const auto closed = std::visit([u](const auto& f) { return f.inverse_survival(u); }, seg.form);
    if (closed && std::isfinite(*closed)) return std::clamp(*closed, seg.t_lo, seg.t_hi);

    auto sv = [&](double t) { return std::visit([t](const auto& f) { return f.survival(t); }, seg.form); };
    auto dn = [&](double t) { return std::visit([t](const auto& f) { return f.density(t); }, seg.form); };

    double lo = seg.t_lo;
    double hi = seg.t_hi;
    if (!std::isfinite(hi)) {
        hi = lo + 1.0;
        while (sv(hi) >= u) hi = lo + 2.0 * (hi - lo);
    }
    // Newton on S(t) - u, falling back to bisection whenever the step leaves the bracket.
    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double g = sv(t) - u;
        if (g > 0.0) lo = t; else hi = t;
        const double d = dn(t);
        double next = d > 0.0 ? t + g / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t))) return next;
        t = next;
    }
    return t;
}

// --- Reference laws ---------------------------------------------------------

PiecewiseDistribution make_exponential(double rate) {
    if (!is_positive_finite(rate)) throw DomainError("exponential rate must be positive");
    return PiecewiseDistribution({Segment{0.0, kInfinity, ConstantHazard{0.0, 1.0, rate}}});
}

PiecewiseDistribution make_erlang2(double rate) {
    if (!is_positive_finite(rate)) throw DomainError("Erlang-2 rate must be positive");
    return PiecewiseDistribution({Segment{0.0, kInfinity, Erlang2Survival{rate}}});
}

PiecewiseDistribution make_hyperexponential(std::vector<double> weights, std::vector<double> rates) {
    if (weights.empty() || weights.size() != rates.size())
        throw DomainError("hyperexponential needs matching nonempty weight and rate lists");
    for (std::size_t j = 0; j < weights.size(); ++j)
        if (!is_positive_finite(weights[j]) || !is_positive_finite(rates[j]))
            throw DomainError("hyperexponential weights and rates must be positive");
    return PiecewiseDistribution(
        {Segment{0.0, kInfinity, ExponentialMixture{std::move(weights), std::move(rates)}}});
}

// --- Counterexample family --------------------------------------------------

FamilyParams derive_family_params(double t1, double beta) {
    if (!is_positive_finite(t1)) throw DomainError("t1 must be positive");
    if (!is_positive_finite(beta)) throw DomainError("beta must be positive");
    FamilyParams p;
    p.t1 = t1;
    p.beta = beta;
    p.lambda = 1.0 / (1.0 + (1.0 + 2.0 * beta) * std::exp(t1));
    p.alpha = std::exp((p.lambda - 1.0) * t1) / (2.0 * p.lambda);
    p.epsilon = beta / p.alpha;
    p.r_t1 = 1.0 / (1.0 + std::exp(t1));
    p.f0 = 0.5;
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw DomainError("epsilon = beta/alpha must lie in (0, 1)");
    return p;
}

double minimal_t3(double t1, double t2, double beta) {
    const FamilyParams p = derive_family_params(t1, beta);
    const ShiftedExponentialSurvival mid{p.alpha, p.lambda, p.beta};
    return t2 + 2.0 * std::log(mid.hazard(t2) / p.r_t1);
}

namespace {

PiecewiseDistribution build_family(const CounterexampleSpec& spec, bool check_t3_bound) {
    const FamilyParams p = derive_family_params(spec.t1, spec.beta);
    if (!std::isfinite(spec.t2) || !(spec.t2 > spec.t1)) throw DomainError("ordering violated: need t1 < t2");

    const LogisticSurvival head{0.5};
    const ShiftedExponentialSurvival mid{p.alpha, p.lambda, p.beta};
    if (!(mid.survival(spec.t2) > 0.0))
        throw DomainError("survival at t2 is not positive: need t2 < ln(alpha/beta)/lambda");

    const double bound = spec.t2 + 2.0 * std::log(mid.hazard(spec.t2) / p.r_t1);
    const double t3 = spec.t3.value_or(bound);
    if (!std::isfinite(t3) || !(t3 > spec.t2)) throw DomainError("ordering violated: need t2 < t3");
    if (check_t3_bound && t3 < bound) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "condition (iv) violated: t3 = " << t3 << " is below t2 + 2 ln(r(t2)/r(t1)) = " << bound;
        throw DomainError(msg.str());
    }

    const DecayingHazard decay{spec.t2, mid.survival(spec.t2), mid.hazard(spec.t2), 2.0};
    const ConstantHazard tail{t3, decay.survival(t3), decay.hazard(t3)};

    return PiecewiseDistribution({
        Segment{0.0, spec.t1, head},
        Segment{spec.t1, spec.t2, mid},
        Segment{spec.t2, t3, decay},
        Segment{t3, kInfinity, tail},
    });
}

}  // namespace

PiecewiseDistribution build_counterexample(const CounterexampleSpec& spec) {
    return build_family(spec, true);
}

PiecewiseDistribution build_counterexample_unchecked(const CounterexampleSpec& spec) {
    return build_family(spec, false);
}

// --- Condition checks -------------------------------------------------------

bool ConditionReport::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.pass; });
}

namespace {

/// Tracks the largest signed margin (lhs - rhs) over sampled points.
struct MarginTracker {
    double margin = -kInfinity;
    double where = 0.0;

    void add(double m, double t) {
        if (m > margin || std::isnan(m)) {
            margin = m;
            where = t;
        }
    }
};

ConditionCheck structure_failure(const std::string& why) {
    ConditionCheck c;
    c.pass = false;
    c.worst_violation = kInfinity;
    c.margin = kInfinity;
    c.note = why;
    return c;
}

}  // namespace

ConditionReport validate_conditions(const PiecewiseDistribution& dist, double grid_step, double horizon) {
    if (!is_positive_finite(grid_step)) throw DomainError("grid step must be positive");
    ConditionReport report;
    report.horizon = horizon;
    report.tail_survival = dist.survival(horizon);

    const auto& segs = dist.segments();
    const double tol = kConditionTolerance;

    // (i) r' < 0 on [0, t1].
    {
        const double t1 = std::isfinite(segs[0].t_hi) ? segs[0].t_hi : horizon;
        MarginTracker mt;
        const auto pts = sample_points(0.0, t1, grid_step);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const PointValues v = dist.eval(pts[k]);
            mt.add(k == 0 ? v.hazard_slope_right : v.hazard_slope_left, pts[k]);
        }
        ConditionCheck& c = report.conditions[0];
        c.margin = mt.margin;
        c.where = mt.where;
        c.worst_violation = std::max(0.0, mt.margin);
        c.pass = mt.margin < 0.0;
        if (std::holds_alternative<LogisticSurvival>(segs[0].form)) {
            c.analytic = true;
            c.note = "hazard 1/(1+e^t) is strictly decreasing";
        }
        if (!c.pass) c.note = "hazard slope is not negative on the first interval";
    }

    if (segs.size() != 4) {
        const std::string why = "needs the four-interval structure";
        for (std::size_t k = 1; k < 4; ++k) report.conditions[k] = structure_failure(why);
        return report;
    }

    const double t1 = segs[0].t_hi;
    const double t2 = segs[1].t_hi;
    const double t3 = segs[2].t_hi;
    const double f0 = dist.density(0.0);
    const double r_t1 = dist.hazard(t1);

    // (ii) r = lambda / (1 - eps e^{lambda t}) on [t1, t2], eps in (0,1), lambda tied to r(t1).
    {
        ConditionCheck& c = report.conditions[1];
        const auto* mid = std::get_if<ShiftedExponentialSurvival>(&segs[1].form);
        if (mid == nullptr) {
            c = structure_failure("second interval is not of the shifted-exponential form");
        } else {
            const double lambda = mid->lambda;
            const double eps = mid->epsilon();
            MarginTracker mt;
            for (double t : sample_points(t1, t2, grid_step)) {
                const PointValues v = dist.eval(t);
                const double expected = lambda / (1.0 - eps * std::exp(lambda * t));
                // at t1 the left segment owns the value; the hazard is continuous there
                mt.add(relative_gap(v.hazard, expected) - tol, t);
            }
            const double link = relative_gap(r_t1, lambda / (1.0 - eps * std::exp(lambda * t1)));
            mt.add(link - tol, t1);
            c.margin = mt.margin;
            c.where = mt.where;
            c.worst_violation = std::max(0.0, mt.margin + tol);
            c.analytic = true;
            c.pass = mt.margin <= 0.0 && lambda > 0.0 && eps > 0.0 && eps < 1.0;
            if (!c.pass) c.note = "hazard on the second interval does not match lambda/(1-eps e^{lambda t})";
        }
    }

    // (iii) r' <= r^2 - f(0) r on (t2, t3).
    {
        ConditionCheck& c = report.conditions[2];
        MarginTracker mt;
        const auto pts = sample_points(t2, t3, grid_step);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const PointValues v = dist.eval(pts[k]);
            const double slope = (k == 0) ? v.hazard_slope_right : v.hazard_slope_left;
            mt.add(slope - v.hazard * v.hazard + f0 * v.hazard, pts[k]);
        }
        c.margin = mt.margin;
        c.where = mt.where;
        c.worst_violation = std::max(0.0, mt.margin);
        c.pass = mt.margin <= tol;
        if (const auto* decay = std::get_if<DecayingHazard>(&segs[2].form)) {
            // r' - r^2 + f0 r = r (f0 - 1/kappa - r): nonpositive iff r >= f0 - 1/kappa, and r is
            // smallest at t3.
            c.analytic = true;
            const bool closed = decay->hazard(t3) >= f0 - 1.0 / decay->decay_scale - tol;
            c.pass = c.pass && closed;
            c.note = closed ? "holds in closed form for the decaying hazard"
                            : "decaying hazard drops below f(0) - 1/scale";
        }
        if (!c.pass && c.note.empty()) c.note = "hazard does not decrease fast enough after t2";
    }

    // (iv) r(t3) <= r(t1) and r' <= 0 on [t3, inf), truncated at the horizon.
    {
        ConditionCheck& c = report.conditions[3];
        MarginTracker mt;
        const double r_t3 = dist.hazard(t3);
        mt.add(r_t3 - r_t1, t3);
        if (horizon > t3) {
            const auto pts = sample_points(t3, horizon, grid_step);
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const PointValues v = dist.eval(pts[k]);
                mt.add(k == 0 ? v.hazard_slope_right : v.hazard_slope_left, pts[k]);
            }
        }
        c.margin = mt.margin;
        c.where = mt.where;
        c.worst_violation = std::max(0.0, mt.margin);
        c.pass = mt.margin <= tol;
        c.analytic = std::holds_alternative<ConstantHazard>(segs[3].form);
        if (!c.pass) c.note = r_t3 > r_t1 + tol ? "r(t3) exceeds r(t1)" : "hazard increases on the tail";
        else if (c.analytic) c.note = "flat tail hazard";
    }
    return report;
}

std::string format_report(const ConditionReport& report) {
    static const char* names[4] = {"(i)   r' < 0 on [0,t1]", "(ii)  r = lambda/(1-eps e^{lambda t}) on [t1,t2]",
                                   "(iii) r' <= r^2 - f(0) r on (t2,t3)", "(iv)  r(t3) <= r(t1), r' <= 0 on [t3,inf)"};
    std::ostringstream os;
    os.precision(6);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& c = report.conditions[k];
        os << "condition " << names[k] << ": " << (c.pass ? "pass" : "FAIL")
           << "  worst_violation=" << c.worst_violation << " at t=" << c.where;
        if (c.analytic) os << " [closed form]";
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << '\n';
    }
    os << "tail survival at horizon " << report.horizon << ": " << report.tail_survival << '\n';
    return os.str();
}

}  // namespace renewal
