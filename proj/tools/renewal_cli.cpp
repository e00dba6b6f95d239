#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

using renewal::cli::RunConfig;

namespace {

struct RawOptions {
    std::string h = "1/512";
    std::string betas;
    std::string dt2s;
    std::string t_points = "1,2,4";
    double t3 = 0.0;
};

void add_solver_options(CLI::App* sub, RunConfig& c, RawOptions& raw) {
    // --h is the grid step here, so help is long-form only
    sub->set_help_flag("--help", "print this help message and exit");
    sub->add_option("--h", raw.h, "grid step, e.g. 0.001953125 or 1/512")->capture_default_str();
    sub->add_option("--tmax", c.t_max, "solver horizon")->capture_default_str();
    sub->add_option("--tol", c.tol, "monotonicity tolerance on per-step increases")->capture_default_str();
}

void add_family_options(CLI::App* sub, RunConfig& c, RawOptions& raw) {
    sub->add_option("--t1", c.t1, "end of the decreasing-hazard interval")->capture_default_str();
    sub->add_option("--t2", c.t2, "end of the increasing-hazard interval")->capture_default_str();
    sub->add_option("--t3", raw.t3, "start of the flat tail (default: smallest admissible grid point)");
    sub->add_option("--beta", c.beta, "offset of the shifted-exponential survival")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Renewal-function toolkit: non-DFR counterexamples with concave renewal functions, "
                 "renewal-equation solver, Monte Carlo cross-checks and geometric compounding."};
    app.require_subcommand(1);

    RunConfig c;
    RawOptions raw;

    auto* ce = app.add_subcommand("counterexample", "build the counterexample, check its hazard conditions, solve m and M");
    add_family_options(ce, c, raw);
    add_solver_options(ce, c, raw);
    ce->add_option("--csv", c.csv_path, "grid table output");
    ce->add_option("--svg", c.svg_path, "four-panel plot output");

    auto* sweep = app.add_subcommand("sweep", "map monotonicity of m over a (beta, t2-t1) grid");
    sweep->add_option("--t1", c.t1, "end of the decreasing-hazard interval")->capture_default_str();
    sweep->add_option("--betas", raw.betas, "comma-separated beta values")->required();
    sweep->add_option("--dt2s", raw.dt2s, "comma-separated t2-t1 values")->required();
    add_solver_options(sweep, c, raw);
    sweep->add_option("--csv", c.csv_path, "output file (default: standard output)");

    auto* compound = app.add_subcommand("compound", "geometric compounding of a discrete PMF");
    compound->add_option("--pmf", c.pmf_path, "PMF file, one mass per line")->required();
    compound->add_option("--p", c.p, "geometric parameter in (0,1)")->capture_default_str();
    compound->add_option("--N", c.N, "truncation length")->capture_default_str();
    compound->add_option("--csv", c.csv_path, "output file (default: standard output)");

    auto* mc = app.add_subcommand("mc-check", "Monte Carlo estimate of M(t) against the solver");
    add_family_options(mc, c, raw);
    add_solver_options(mc, c, raw);
    mc->add_option("--law", c.law, "counterexample | exponential | erlang2 | hyperexp")->capture_default_str();
    mc->add_option("--t-points", raw.t_points, "comma-separated times")->capture_default_str();
    mc->add_option("--n-paths", c.n_paths, "number of simulated paths")->capture_default_str();
    mc->add_option("--seed", c.seed, "random seed")->capture_default_str();
    mc->add_option("--csv", c.csv_path, "output file (default: standard output)");

    auto* ids = app.add_subcommand("identities", "identity residual sup-norms at h and h/2");
    add_family_options(ids, c, raw);
    add_solver_options(ids, c, raw);
    ids->add_option("--law", c.law, "counterexample | exponential | erlang2 | hyperexp")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
        c.h = renewal::cli::parse_number(raw.h);
        c.betas = renewal::cli::parse_list(raw.betas);
        c.dt2s = renewal::cli::parse_list(raw.dt2s);
        c.t_points = renewal::cli::parse_list(raw.t_points);
        for (auto* sub : app.get_subcommands())
            if (auto* opt = sub->get_option_no_throw("--t3"); opt && opt->count() > 0) c.t3 = raw.t3;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return renewal::cli::kExitUsage;
    }
    return renewal::cli::dispatch(c, std::cout, std::cerr);
}
