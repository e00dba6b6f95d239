#include "renewal/geo_compound.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace renewal {

DiscretePMF::DiscretePMF(std::vector<double> masses, std::optional<double> tail_mass)
    : masses_(std::move(masses)) {
    double total = 0.0;
    for (double v : masses_) {
        if (!std::isfinite(v) || v < 0.0) throw DomainError("probability masses must be finite and nonnegative");
        total += v;
    }
    if (total > 1.0 + 1e-12) throw DomainError("probability masses sum to more than 1");
    if (tail_mass) {
        if (!std::isfinite(*tail_mass) || *tail_mass < 0.0) throw DomainError("tail mass must be nonnegative");
        tail_ = *tail_mass;
    } else {
        tail_ = std::max(0.0, 1.0 - total);
    }
    survival_.assign(masses_.size() + 1, 0.0);
    double acc = tail_;
    survival_[masses_.size()] = acc;
    for (std::size_t k = masses_.size(); k-- > 0;) {
        acc += masses_[k];
        survival_[k] = acc;
    }
}

DiscretePMF DiscretePMF::padded(std::size_t n) const {
    if (n <= masses_.size()) return *this;
    std::vector<double> m = masses_;
    m.resize(n, 0.0);
    return DiscretePMF(std::move(m), tail_);
}

CompoundResult compound_geometric(const DiscretePMF& f, double p, std::size_t N) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("geometric parameter p must lie in (0, 1)");
    if (N < 1 || N > f.size()) throw DomainError("truncation N must satisfy 1 <= N <= PMF length");

    CompoundResult out;
    out.p = p;
    out.q = 1.0 - p;
    const double q = out.q;

    out.g.assign(N, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        double conv = 0.0;
        for (std::size_t k = 1; k < n; ++k) conv += f.mass(k) * out.g[n - k - 1];
        out.g[n - 1] = p * f.mass(n) + q * conv;
    }

    out.G_bar.assign(N + 1, 0.0);
    for (std::size_t n = 1; n <= N + 1; ++n) {
        double conv = 0.0;
        for (std::size_t k = 1; k < n; ++k) conv += f.mass(k) * out.G_bar[n - k - 1];
        out.G_bar[n - 1] = f.survival(n) + q * conv;
    }
    return out;
}

IdentityResidual induct_identity_residual(const DiscretePMF& f, const CompoundResult& result, std::size_t n) {
    if (n < 1 || n + 2 > result.G_bar.size() || n + 2 > f.survival().size())
        throw DomainError("identity index out of range");
    const auto F = [&](std::size_t k) { return f.survival(k); };
    const auto G = [&](std::size_t k) { return result.survival(k); };
    const double p = result.p;
    const double q = result.q;

    const double lhs_a = F(n) * G(n + 2) * G(n);
    const double lhs_b = F(n) * G(n + 1) * G(n + 1);
    const double rhs_a = p * G(n) * F(n + 2) * F(n);
    const double rhs_b = p * G(n) * F(n + 1) * F(n + 1);

    double sum = 0.0;
    double sum_scale = 0.0;
    for (std::size_t k = 2; k <= n; ++k) {
        const double a = F(n + 1) * f.mass(k - 1) - F(n) * f.mass(k);
        const double b = G(n + 1) * G(n + 1 - k) - G(n) * G(n + 2 - k);
        sum += a * b;
        sum_scale += (F(n + 1) * f.mass(k - 1) + F(n) * f.mass(k)) *
                     (G(n + 1) * G(n + 1 - k) + G(n) * G(n + 2 - k));
    }

    IdentityResidual r;
    r.residual = (lhs_a - lhs_b) - (rhs_a - rhs_b) - q * sum;
    r.scale = lhs_a + lhs_b + rhs_a + rhs_b + q * sum_scale;
    return r;
}

double shape_cross_difference(std::span<const double> survival, std::size_t n) {
    return survival[n + 1] * survival[n - 1] - survival[n] * survival[n];
}

DiscreteShapeReport discrete_shape_report(std::span<const double> survival, double tol) {
    DiscreteShapeReport rep;
    for (std::size_t n = 1; n + 2 <= survival.size(); ++n) {
        if (survival[n] < kShapeCutoff) break;
        const double d = shape_cross_difference(survival, n);
        ++rep.tested;
        if (-d > rep.worst_dfr_violation) {
            rep.worst_dfr_violation = -d;
            rep.worst_dfr_index = n;
        }
        if (d > rep.worst_ifr_violation) {
            rep.worst_ifr_violation = d;
            rep.worst_ifr_index = n;
        }
    }
    rep.dfr = rep.worst_dfr_violation <= tol;
    rep.ifr = rep.worst_ifr_violation <= tol;
    return rep;
}

DiscretePMF random_geometric_mixture(std::uint64_t seed, std::size_t N) {
    std::mt19937_64 eng(seed);
    std::uniform_int_distribution<int> n_comp(2, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> ratio(0.05, 0.95);

    const int c = n_comp(eng);
    std::vector<double> w(c);
    std::vector<double> rho(c);
    double wsum = 0.0;
    for (int j = 0; j < c; ++j) {
        w[j] = 0.05 + unit(eng);
        wsum += w[j];
        rho[j] = ratio(eng);
    }
    std::vector<double> masses(N, 0.0);
    double tail = 0.0;
    for (int j = 0; j < c; ++j) {
        w[j] /= wsum;
        double pow = 1.0;  // rho^{n-1}
        for (std::size_t n = 1; n <= N; ++n) {
            masses[n - 1] += w[j] * (1.0 - rho[j]) * pow;
            pow *= rho[j];
        }
        tail += w[j] * pow;
    }
    return DiscretePMF(std::move(masses), tail);
}

DiscretePMF random_non_ifr_pmf(std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_int_distribution<std::size_t> len(3, 8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (true) {
        std::vector<double> m(len(eng));
        double s = 0.0;
        for (double& v : m) {
            v = unit(eng);
            s += v;
        }
        for (double& v : m) v /= s;
        DiscretePMF pmf(std::move(m), 0.0);
        // certified with a margin well above the shape tolerance
        const DiscreteShapeReport rep = discrete_shape_report(pmf.survival());
        if (rep.worst_ifr_violation > 1e-3) return pmf;
    }
}

ClosureReport closure_property_suite(const ClosureSuiteConfig& config) {
    if (!(config.p > 0.0 && config.p < 1.0)) throw DomainError("geometric parameter p must lie in (0, 1)");
    ClosureReport rep;
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32)};
    std::vector<std::uint64_t> seeds(2 * (config.dfr_trials + config.non_ifr_trials));
    {
        std::vector<std::uint32_t> raw(2 * seeds.size());
        seq.generate(raw.begin(), raw.end());
        for (std::size_t i = 0; i < seeds.size(); ++i)
            seeds[i] = (static_cast<std::uint64_t>(raw[2 * i]) << 32) | raw[2 * i + 1];
    }

    for (std::size_t t = 0; t < config.dfr_trials; ++t) {
        const DiscretePMF x = random_geometric_mixture(seeds[t], config.N);
        ++rep.dfr_trials;
        const DiscreteShapeReport xs = discrete_shape_report(x.survival());
        if (!xs.dfr) {
            // the mixture generator produced a non-DFR input; count it rather than skip it
            ++rep.dfr_failures;
            rep.failures.push_back({1, t, x.masses(), xs.worst_dfr_violation});
            continue;
        }
        const CompoundResult y = compound_geometric(x, config.p, config.N);
        const DiscreteShapeReport ys = discrete_shape_report(y.G_bar);
        if (!ys.dfr) {
            ++rep.dfr_failures;
            rep.failures.push_back({1, t, x.masses(), ys.worst_dfr_violation});
        }
    }

    for (std::size_t t = 0; t < config.non_ifr_trials; ++t) {
        const DiscretePMF x = random_non_ifr_pmf(seeds[config.dfr_trials + t]).padded(config.N);
        ++rep.non_ifr_trials;
        const CompoundResult y = compound_geometric(x, config.p, config.N);
        const DiscreteShapeReport ys = discrete_shape_report(y.G_bar);
        if (ys.ifr) {
            ++rep.non_ifr_failures;
            rep.failures.push_back({2, t, x.masses(), ys.worst_ifr_violation});
        }
    }
    return rep;
}

}  // namespace renewal
