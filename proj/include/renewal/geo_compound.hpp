#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "renewal/errors.hpp"

namespace renewal {

/// Probability masses f_1..f_N on {1, 2, ...}. Mass not listed (the truncated tail) sits
/// beyond N; by default it is 1 - sum f_n.
class DiscretePMF {
public:
    /// Throws DomainError on negative or non-finite masses, or a total above 1 + 1e-12.
    explicit DiscretePMF(std::vector<double> masses, std::optional<double> tail_mass = std::nullopt);

    std::size_t size() const { return masses_.size(); }
    /// f_n for n >= 1; zero beyond the listed masses.
    double mass(std::size_t n) const { return (n >= 1 && n <= masses_.size()) ? masses_[n - 1] : 0.0; }
    const std::vector<double>& masses() const { return masses_; }
    double tail_mass() const { return tail_; }
    bool truncated() const { return tail_ > 0.0; }

    /// Survival Pr(X >= n) for n = 1..N+1, index 0 holding n = 1. Built from suffix sums.
    const std::vector<double>& survival() const { return survival_; }
    double survival(std::size_t n) const { return survival_.at(n - 1); }

    /// Same law with zero masses appended up to length n (no-op when already that long).
    DiscretePMF padded(std::size_t n) const;

private:
    std::vector<double> masses_;
    double tail_ = 0.0;
    std::vector<double> survival_;
};

struct CompoundResult {
    /// g_1..g_N, index 0 holding n = 1.
    std::vector<double> g;
    /// Survival Pr(Y >= n) for n = 1..N+1.
    std::vector<double> G_bar;
    double p = 0.0;
    double q = 0.0;

    double mass(std::size_t n) const { return g.at(n - 1); }
    double survival(std::size_t n) const { return G_bar.at(n - 1); }
    /// Pr(Y > N), the mass the truncation leaves out.
    double tail_mass() const { return G_bar.back(); }
};

/// Y = X_1 + ... + X_T with T ~ Geometric(p) on {1, 2, ...}. The masses and the survival come
/// from their own recursions, so g_n = G_n - G_{n+1} is a genuine cross-check.
CompoundResult compound_geometric(const DiscretePMF& f, double p, std::size_t N);

struct IdentityResidual {
    double residual = 0.0;
    /// Sum of the magnitudes of the products that enter the identity.
    double scale = 0.0;

    double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// LHS - RHS of the log-convexity propagation identity at index n:
///   F_n (G_{n+2} G_n - G_{n+1}^2)
///     - p G_n (F_{n+2} F_n - F_{n+1}^2)
///     - q sum_{k=2}^{n} (F_{n+1} f_{k-1} - F_n f_k)(G_{n+1} G_{n+1-k} - G_n G_{n+2-k}).
/// Needs 1 <= n and n + 2 <= N + 1; throws DomainError otherwise.
IdentityResidual induct_identity_residual(const DiscretePMF& f, const CompoundResult& result, std::size_t n);

inline constexpr double kShapeTolerance = 1e-10;
inline constexpr double kShapeCutoff = 1e-13;

struct DiscreteShapeReport {
    bool dfr = true;
    bool ifr = true;
    /// 1-based n of the worst violation of S_{n+2} S_n >= S_{n+1}^2 (0 when none).
    std::size_t worst_dfr_index = 0;
    double worst_dfr_violation = 0.0;
    std::size_t worst_ifr_index = 0;
    double worst_ifr_violation = 0.0;
    /// Number of indices n actually tested.
    std::size_t tested = 0;
};

/// Log-convexity (DFR) and log-concavity (IFR) of a survival sequence S_1, S_2, ...
/// Index n is tested while S_{n+1} >= kShapeCutoff; S_{n+2} may be zero.
DiscreteShapeReport discrete_shape_report(std::span<const double> survival, double tol = kShapeTolerance);

/// Pointwise cross-product difference S_{n+2} S_n - S_{n+1}^2 (1-based n).
double shape_cross_difference(std::span<const double> survival, std::size_t n);

// ---------------------------------------------------------------------------
// Closure of DFR (and, contrapositively, IFR) under geometric compounding.
// ---------------------------------------------------------------------------

/// Mixture of 2-4 geometrics with random weights and ratios in (0.05, 0.95), truncated at N
/// with the exact tail mass attached. Always discrete DFR.
DiscretePMF random_geometric_mixture(std::uint64_t seed, std::size_t N);

/// Random PMF on {1..L}, L in [3, 8], rejected until the shape report certifies it is not IFR.
DiscretePMF random_non_ifr_pmf(std::uint64_t seed);

struct ClosureSuiteConfig {
    std::size_t dfr_trials = 100;
    std::size_t non_ifr_trials = 20;
    double p = 0.3;
    std::uint64_t seed = 20240601;
    std::size_t N = 200;
};

struct ClosureFailure {
    int part = 1;
    std::size_t trial = 0;
    std::vector<double> witness;
    double violation = 0.0;
};

struct ClosureReport {
    std::size_t dfr_trials = 0;
    std::size_t dfr_failures = 0;
    std::size_t non_ifr_trials = 0;
    std::size_t non_ifr_failures = 0;
    std::vector<ClosureFailure> failures;

    bool ok() const { return dfr_failures == 0 && non_ifr_failures == 0; }
};

/// Part 1: every DFR input yields a DFR compound. Part 2 (contrapositive): every certified
/// non-IFR input yields a non-IFR compound. Throws DomainError for p outside (0,1).
ClosureReport closure_property_suite(const ClosureSuiteConfig& config);

}  // namespace renewal
