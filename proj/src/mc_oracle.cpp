#include "renewal/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace renewal {

namespace {

struct Accumulator {
    std::vector<std::uint64_t> sum;
    std::vector<std::uint64_t> sum_sq;
};

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53;
}

void simulate_paths(const PiecewiseDistribution& dist, const std::vector<double>& t_points,
                    std::uint64_t seed, std::uint64_t first, std::uint64_t last, Accumulator& acc) {
    const double t_max = t_points.back();
    std::vector<std::uint64_t> counts(t_points.size());
    for (std::uint64_t path = first; path < last; ++path) {
        auto eng = path_engine(seed, path);
        std::fill(counts.begin(), counts.end(), 0);
        double arrival = 0.0;
        std::size_t next_point = 0;
        std::uint64_t n = 0;
        while (true) {
            arrival += dist.inverse_survival(open_uniform(eng));
            while (next_point < t_points.size() && arrival > t_points[next_point]) counts[next_point++] = n;
            if (arrival > t_max) break;
            ++n;
        }
        for (std::size_t k = 0; k < counts.size(); ++k) {
            acc.sum[k] += counts[k];
            acc.sum_sq[k] += counts[k] * counts[k];
        }
    }
}

}  // namespace

double sample_inter_renewal(const PiecewiseDistribution& dist, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("uniform draw must lie in (0, 1)");
    return dist.inverse_survival(u);
}

McEstimate estimate_renewal_function(const PiecewiseDistribution& dist, std::vector<double> t_points,
                                     std::uint64_t n_paths, std::uint64_t seed, unsigned threads) {
    if (n_paths < 2) throw DomainError("Monte Carlo needs at least two paths");
    if (t_points.empty()) throw DomainError("Monte Carlo needs at least one time point");
    for (std::size_t k = 0; k < t_points.size(); ++k) {
        if (!(std::isfinite(t_points[k]) && t_points[k] > 0.0)) throw DomainError("time points must be positive");
        if (k > 0 && !(t_points[k] > t_points[k - 1])) throw DomainError("time points must be strictly increasing");
    }

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_paths));

    std::vector<Accumulator> partial(threads, Accumulator{std::vector<std::uint64_t>(t_points.size(), 0),
                                                          std::vector<std::uint64_t>(t_points.size(), 0)});
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            const std::uint64_t first = n_paths * w / threads;
            const std::uint64_t last = n_paths * (w + 1) / threads;
            pool.emplace_back([&, w, first, last] { simulate_paths(dist, t_points, seed, first, last, partial[w]); });
        }
    }

    McEstimate est;
    est.n_paths = n_paths;
    est.seed = seed;
    est.mean_counts.resize(t_points.size());
    est.std_errors.resize(t_points.size());
    const double n = static_cast<double>(n_paths);
    for (std::size_t k = 0; k < t_points.size(); ++k) {
        std::uint64_t s = 0;
        std::uint64_t s2 = 0;
        for (const auto& p : partial) {
            s += p.sum[k];
            s2 += p.sum_sq[k];
        }
        const double mean = static_cast<double>(s) / n;
        const double var = std::max(0.0, (static_cast<double>(s2) - n * mean * mean) / (n - 1.0));
        est.mean_counts[k] = mean;
        est.std_errors[k] = std::sqrt(var / n);
    }
    est.t_points = std::move(t_points);
    return est;
}

}  // namespace renewal
