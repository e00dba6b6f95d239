#pragma once

#include <cstdint>
#include <vector>

#include "renewal/dist_model.hpp"

namespace renewal {

struct McEstimate {
    std::vector<double> t_points;
    std::vector<double> mean_counts;
    std::vector<double> std_errors;
    std::uint64_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Inter-renewal time with survival exactly u, by inverting the owning segment.
double sample_inter_renewal(const PiecewiseDistribution& dist, double u);

/// Monte Carlo estimate of M(t) = E N(t), N(t) = number of renewals in (0, t].
///
/// Path k draws its uniforms from an mt19937_64 seeded with seed_seq{seed, k}, so the result
/// depends only on (dist, t_points, n_paths, seed). Counts are reduced as exact integers,
/// which keeps the answer independent of how paths are split across `threads`
/// (0 = hardware concurrency).
McEstimate estimate_renewal_function(const PiecewiseDistribution& dist, std::vector<double> t_points,
                                     std::uint64_t n_paths, std::uint64_t seed, unsigned threads = 0);

}  // namespace renewal
