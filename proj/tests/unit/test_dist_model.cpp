#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "renewal/dist_model.hpp"

using namespace renewal;

namespace {

const CounterexampleSpec kBaseInstance{1.0, 1.5, 2.0, 0.02};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_SUITE("dist_model") {

TEST_CASE("family parameters for t1 = 1, beta = 0.02") {
    const FamilyParams p = derive_family_params(1.0, 0.02);
    CHECK(p.lambda == doctest::Approx(1.0 / (1.0 + 1.04 * std::exp(1.0))).epsilon(1e-15));
    CHECK(p.lambda == doctest::Approx(0.26129).epsilon(1e-4));
    CHECK(p.epsilon == doctest::Approx(p.beta / p.alpha).epsilon(1e-15));
    CHECK(p.epsilon > 0.0);
    CHECK(p.epsilon < 1.0);
    CHECK(p.r_t1 == doctest::Approx(1.0 / (1.0 + std::exp(1.0))));
    CHECK(p.f0 == 0.5);

    // both matching conditions at t1, substituted back
    const double left_survival = 0.5 * (std::exp(-1.0) + 1.0);
    const double right_survival = p.alpha * std::exp(-p.lambda) - p.beta;
    const double left_slope = -0.5 * std::exp(-1.0);
    const double right_slope = -p.alpha * p.lambda * std::exp(-p.lambda);
    CHECK(rel(left_survival, right_survival) < 1e-12);
    CHECK(rel(left_slope, right_slope) < 1e-12);
}

TEST_CASE("lambda tends to r(t1) as beta goes to zero") {
    const double r1 = 1.0 / (1.0 + std::exp(1.0));
    double prev_gap = 1.0;
    for (double beta : {1e-2, 1e-4, 1e-6, 1e-9}) {
        const FamilyParams p = derive_family_params(1.0, beta);
        const double gap = r1 - p.lambda;
        CHECK(gap > 0.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-9);
}

TEST_CASE("family parameters reject nonpositive inputs") {
    CHECK_THROWS_AS(derive_family_params(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(derive_family_params(1.0, -0.1), DomainError);
    CHECK_THROWS_AS(derive_family_params(0.0, 0.02), DomainError);
    CHECK_THROWS_AS(derive_family_params(-1.0, 0.02), DomainError);
}

TEST_CASE("base instance builds with four continuous segments") {
    const PiecewiseDistribution d = build_counterexample(kBaseInstance);
    REQUIRE(d.segments().size() == 4);
    CHECK(d.knots() == std::vector<double>{1.0, 1.5, 2.0});
    CHECK(d.survival(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(form_name(d.segments()[0].form) == "logistic_survival");
    CHECK(form_name(d.segments()[1].form) == "shifted_exponential_survival");
    CHECK(form_name(d.segments()[2].form) == "decaying_hazard");
    CHECK(form_name(d.segments()[3].form) == "constant_hazard");

    for (std::size_t k = 0; k + 1 < d.segments().size(); ++k) {
        const double t = d.knots()[k];
        const auto& l = d.segments()[k].form;
        const auto& r = d.segments()[k + 1].form;
        const double fl = std::visit([t](const auto& f) { return f.density(t); }, l);
        const double fr = std::visit([t](const auto& f) { return f.density(t); }, r);
        const double sl = std::visit([t](const auto& f) { return f.survival(t); }, l);
        const double sr = std::visit([t](const auto& f) { return f.survival(t); }, r);
        CHECK(rel(fl, fr) < 1e-12);
        CHECK(rel(sl, sr) < 1e-12);
    }
}

TEST_CASE("default t3 is the exact condition (iv) bound") {
    const double bound = 1.5 + 0.008179356682264554;
    CHECK(minimal_t3(1.0, 1.5, 0.02) == doctest::Approx(bound).epsilon(1e-12));
    const PiecewiseDistribution d = build_counterexample({1.0, 1.5, std::nullopt, 0.02});
    CHECK(d.knots()[2] == doctest::Approx(bound).epsilon(1e-12));
    CHECK(d.hazard(d.knots()[2]) == doctest::Approx(d.hazard(1.0)).epsilon(1e-12));
}

TEST_CASE("t3 below the bound is rejected as a condition (iv) error") {
    const double bound = minimal_t3(1.0, 1.5, 0.02) - 1.5;
    const CounterexampleSpec spec{1.0, 1.5, 1.5 + 0.5 * bound, 0.02};
    try {
        (void)build_counterexample(spec);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("condition (iv)") != std::string::npos);
    }
    CHECK_NOTHROW((void)build_counterexample_unchecked(spec));
}

TEST_CASE("construction preconditions") {
    CHECK_THROWS_AS(build_counterexample({1.0, 0.5, 2.0, 0.02}), DomainError);   // t2 < t1
    CHECK_THROWS_AS(build_counterexample({1.0, 1.5, 1.4, 0.02}), DomainError);   // t3 < t2
    CHECK_THROWS_AS(build_counterexample({1.0, 1.5, 2.0, 0.0}), DomainError);    // beta
    CHECK_THROWS_AS(build_counterexample({1.0, 20.0, 30.0, 0.02}), DomainError); // survival(t2) <= 0
    const FamilyParams p = derive_family_params(1.0, 0.02);
    const double zero_at = std::log(p.alpha / p.beta) / p.lambda;
    CHECK_THROWS_AS(build_counterexample({1.0, zero_at + 1e-9, std::nullopt, 0.02}), DomainError);
}

TEST_CASE("eval at t = 0") {
    const PointValues v = build_counterexample(kBaseInstance).eval(0.0);
    CHECK(v.survival == 1.0);
    CHECK(v.density == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.hazard == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.hazard_slope_right == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("hazard on (t1, t2) has the lambda/(1 - eps e^{lambda t}) form") {
    const PiecewiseDistribution d = build_counterexample(kBaseInstance);
    const FamilyParams p = derive_family_params(1.0, 0.02);
    for (double t = 1.01; t < 1.5; t += 0.037) {
        CHECK(rel(d.hazard(t), p.lambda / (1.0 - p.epsilon * std::exp(p.lambda * t))) < 1e-12);
        // r' = (r - lambda) r on this interval
        const PointValues v = d.eval(t);
        CHECK(rel(v.hazard_slope_left, (v.hazard - p.lambda) * v.hazard) < 1e-12);
        CHECK(v.hazard_slope_left > 0.0);
    }
}

TEST_CASE("eval rejects negative time") {
    const PiecewiseDistribution d = build_counterexample(kBaseInstance);
    CHECK_THROWS_AS(d.eval(-1.0), DomainError);
    CHECK_THROWS_AS(d.survival(-1.0), DomainError);
}

TEST_CASE("knots belong to the left segment; slopes are one-sided") {
    const PiecewiseDistribution d = build_counterexample(kBaseInstance);
    const PointValues at_t1 = d.eval(1.0);
    const LogisticSurvival head{0.5};
    CHECK(at_t1.hazard_slope_left == doctest::Approx(head.hazard_slope(1.0)).epsilon(1e-14));
    CHECK(at_t1.hazard_slope_left < 0.0);
    CHECK(at_t1.hazard_slope_right > 0.0);
    CHECK(at_t1.density_slope_left != at_t1.density_slope_right);
    CHECK(d.owning_segment(1.0) == 0);
    CHECK(d.owning_segment(1.0 + 1e-12) == 1);
}

TEST_CASE("validate_conditions: base instance passes all four") {
    const ConditionReport rep = validate_conditions(build_counterexample(kBaseInstance), 1.0 / 512);
    for (const auto& c : rep.conditions) {
        CHECK(c.pass);
        CHECK(c.worst_violation <= kConditionTolerance);
        CHECK(c.analytic);
    }
    CHECK(rep.all_pass());
    CHECK(rep.tail_survival > 0.0);
    CHECK(rep.tail_survival < 1.0);
}

TEST_CASE("validate_conditions: pure exponential fails (i)") {
    const ConditionReport rep = validate_conditions(make_exponential(1.0), 1.0 / 64);
    CHECK_FALSE(rep.conditions[0].pass);
    CHECK(rep.conditions[0].margin == 0.0);
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("validate_conditions: t3 below the bound fails (iv) only") {
    const double bound = minimal_t3(1.0, 1.5, 0.02) - 1.5;
    const PiecewiseDistribution d = build_counterexample_unchecked({1.0, 1.5, 1.5 + 0.5 * bound, 0.02});
    const ConditionReport rep = validate_conditions(d, 1.0 / 512);
    CHECK(rep.conditions[0].pass);
    CHECK(rep.conditions[1].pass);
    CHECK(rep.conditions[2].pass);
    CHECK_FALSE(rep.conditions[3].pass);
    CHECK(rep.conditions[3].worst_violation > kConditionTolerance);
}

TEST_CASE("property: random admissible specs are non-DFR and satisfy (iii) identically") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> t1d(0.2, 2.0), dtd(0.05, 1.0), betad(1e-4, 0.1);
    int built = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double t1 = t1d(eng), t2 = t1 + dtd(eng), beta = betad(eng);
        const PiecewiseDistribution d = build_counterexample({t1, t2, std::nullopt, beta});
        ++built;
        CHECK(d.hazard(t2) - d.hazard(t1) > 0.0);
        const double t3 = d.knots()[2];
        for (int k = 1; k < 20; ++k) {
            const double t = t2 + (t3 - t2) * k / 20.0;
            const PointValues v = d.eval(t);
            CHECK(v.hazard_slope_left - v.hazard * v.hazard + 0.5 * v.hazard <= 0.0);
        }
        CHECK(validate_conditions(d, (t3 - t2) / 16).all_pass());
    }
    CHECK(built == 200);
}

TEST_CASE("property: numerical derivative of survival matches -density to second order") {
    const PiecewiseDistribution d = build_counterexample(kBaseInstance);
    auto S = [&](double t) { return d.survival(t); };
    for (double t : {0.5, 1.25, 1.75, 3.0}) {
        const double e1 = std::abs(oracle::central_difference(S, t, 1e-2) + d.density(t));
        const double e2 = std::abs(oracle::central_difference(S, t, 5e-3) + d.density(t));
        CHECK(e1 < 1e-4);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("eval is pure and bit-reproducible") {
    const PiecewiseDistribution a = build_counterexample(kBaseInstance);
    const PiecewiseDistribution b = build_counterexample(kBaseInstance);
    for (double t = 0.0; t < 8.0; t += 0.173) {
        const PointValues x = a.eval(t), y = b.eval(t), z = a.eval(t);
        CHECK(x.survival == y.survival);
        CHECK(x.density == z.density);
        CHECK(x.hazard_slope_right == y.hazard_slope_right);
    }
}

TEST_CASE("reference laws") {
    const PiecewiseDistribution e = make_erlang2(1.0);
    CHECK(e.density(0.0) == 0.0);
    CHECK(e.hazard(1.0) == doctest::Approx(0.5));
    const PiecewiseDistribution h = make_hyperexponential({0.5, 0.5}, {1.0, 2.0});
    CHECK(h.density(0.0) == doctest::Approx(1.5));
    CHECK(h.eval(1.0).hazard_slope_left < 0.0);
    CHECK_THROWS_AS(make_exponential(0.0), DomainError);
    CHECK_THROWS_AS(make_hyperexponential({0.5}, {1.0, 2.0}), DomainError);
}

TEST_CASE("segment tiling is enforced") {
    CHECK_THROWS_AS(PiecewiseDistribution({}), DomainError);
    CHECK_THROWS_AS(PiecewiseDistribution({Segment{0.0, 1.0, ConstantHazard{0.0, 1.0, 1.0}}}), DomainError);
    CHECK_THROWS_AS(PiecewiseDistribution({Segment{0.0, 1.0, ConstantHazard{0.0, 1.0, 1.0}},
                                           Segment{1.0, kInfinity, ConstantHazard{1.0, 0.5, 1.0}}}),
                    DomainError);  // survival jumps at 1
}

}  // TEST_SUITE
