#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "renewal/dist_model.hpp"
#include "renewal/renewal_engine.hpp"

namespace renewal::cli {

/// Exit codes: 0 all checks passed, 1 a requested check failed, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
    std::string command;

    // Counterexample family.
    double t1 = 1.0;
    double t2 = 1.5;
    std::optional<double> t3;
    double beta = 0.02;
    /// counterexample | exponential | erlang2 | hyperexp (mc-check and identities only)
    std::string law = "counterexample";

    // Solver.
    double h = kDefaultStep;
    double t_max = kDefaultHorizon;
    double tol = 1e-6;

    // Monte Carlo.
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 20240601;
    std::vector<double> t_points{1.0, 2.0, 4.0};

    // Output.
    std::string csv_path;
    std::string svg_path;

    // Sweep.
    std::vector<double> betas;
    std::vector<double> dt2s;

    // Compound.
    std::string pmf_path;
    double p = 0.3;
    std::size_t N = 200;
};

/// Parses "0.25", "1e-3" or "1/512".
double parse_number(const std::string& text);
/// Parses a comma-separated list; an empty string gives an empty list.
std::vector<double> parse_list(const std::string& text);

/// One mass per line, index implicit from 1. Blank lines and '#' comments are skipped.
/// Throws ParseError naming the line on malformed or negative entries.
std::vector<double> parse_pmf(std::istream& in);

/// Smallest grid point not below minimal_t3, so the default t3 satisfies the bound and
/// lies on the solver grid.
double default_t3_on_grid(double t1, double t2, double beta, double h);

PiecewiseDistribution build_law(const RunConfig& config);

int cmd_counterexample(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compound(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_mc_check(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_identities(const RunConfig& config, std::ostream& out, std::ostream& err);

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace renewal::cli
