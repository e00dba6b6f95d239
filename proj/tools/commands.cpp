#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "renewal/geo_compound.hpp"
#include "renewal/mc_oracle.hpp"
#include "renewal/report.hpp"

namespace renewal::cli {

using report::csv_line;
using report::format_number;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& text) {
    const std::string s = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + text + "'");
    }
    if (used != s.size()) throw ParseError("not a number: '" + text + "'");
    return v;
}

void banner(const RunConfig& c, std::ostream& out) {
    out << "# renewal_cli " << c.command << "  h=" << format_number(c.h) << " T_max=" << format_number(c.t_max)
        << " tol=" << format_number(c.tol) << " n_paths=" << c.n_paths << " seed=" << c.seed << '\n';
}

/// Writes to the --csv path when one is given, otherwise to `fallback`.
class CsvSink {
public:
    CsvSink(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            os_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_) throw ParseError("cannot open output file '" + path + "'");
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

CounterexampleSpec spec_from(const RunConfig& c) {
    CounterexampleSpec spec{c.t1, c.t2, c.t3, c.beta};
    if (!spec.t3) spec.t3 = default_t3_on_grid(c.t1, c.t2, c.beta, c.h);
    return spec;
}

/// Piecewise-linear read-out of a grid function at an arbitrary time in range.
double value_at(const GridFunction& g, double t) {
    const double x = (t - g.t0) / g.h;
    const auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(g.size() - 1)));
    if (i + 1 >= g.size()) return g.values.back();
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * g.values[i] + w * g.values[i + 1];
}

}  // namespace

double parse_number(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_plain(text);
    const double num = parse_plain(text.substr(0, slash));
    const double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0) throw ParseError("zero denominator in '" + text + "'");
    return num / den;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
    return out;
}

std::vector<double> parse_pmf(std::istream& in) {
    std::vector<double> masses;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (const auto hash = s.find('#'); hash != std::string::npos) s = trim(s.substr(0, hash));
        if (s.empty()) continue;
        double v = 0.0;
        try {
            v = parse_plain(s);
        } catch (const ParseError&) {
            throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
        }
        if (!std::isfinite(v)) throw ParseError("line " + std::to_string(line_no) + ": mass is not finite");
        if (v < 0.0) throw ParseError("line " + std::to_string(line_no) + ": negative mass " + s);
        masses.push_back(v);
    }
    if (masses.empty()) throw ParseError("PMF file contains no masses");
    return masses;
}

double default_t3_on_grid(double t1, double t2, double beta, double h) {
    const double bound = minimal_t3(t1, t2, beta);
    const double x = bound / h;
    const double k = std::round(x);
    if (std::abs(x - k) <= 1e-9 * std::max(1.0, x)) return k * h;
    return std::ceil(x) * h;
}

PiecewiseDistribution build_law(const RunConfig& c) {
    if (c.law == "counterexample") return build_counterexample(spec_from(c));
    if (c.law == "exponential") return make_exponential(1.0);
    if (c.law == "erlang2") return make_erlang2(1.0);
    if (c.law == "hyperexp") return make_hyperexponential({0.5, 0.5}, {1.0, 2.0});
    throw ParseError("unknown law '" + c.law + "' (expected counterexample, exponential, erlang2, hyperexp)");
}

// ---------------------------------------------------------------------------

int cmd_counterexample(const RunConfig& c, std::ostream& out, std::ostream& err) {
    banner(c, out);
    PiecewiseDistribution dist = [&] {
        const CounterexampleSpec spec = spec_from(c);
        out << "# t1=" << format_number(spec.t1) << " t2=" << format_number(spec.t2)
            << " t3=" << format_number(*spec.t3) << (c.t3 ? "" : " (default bound, rounded up to the grid)")
            << " beta=" << format_number(spec.beta) << '\n';
        return build_counterexample(spec);
    }();
    const FamilyParams fp = derive_family_params(c.t1, c.beta);
    out << "# lambda=" << format_number(fp.lambda) << " alpha=" << format_number(fp.alpha)
        << " epsilon=" << format_number(fp.epsilon) << " r(t1)=" << format_number(fp.r_t1) << '\n';

    const ConditionReport conditions = validate_conditions(dist, c.h, c.t_max);
    out << format_report(conditions);

    const RenewalSolution sol = solve_renewal(dist, c.h, c.t_max);
    const MonotonicityReport mono = monotonicity_report(sol.m, c.tol);
    const SlopeMaximum top = max_slope(sol.m_slope);
    out << "max m increase per step: " << format_number(mono.max_increase) << " at t=" << format_number(mono.where)
        << '\n';
    out << "max m': " << format_number(top.value) << " at t=" << format_number(top.where) << '\n';
    out << "hazard rise on [t1,t2]: r(t2) - r(t1) = " << format_number(dist.hazard(c.t2) - dist.hazard(c.t1))
        << '\n';
    out << "monotonicity verdict: " << (mono.is_nonincreasing ? "nonincreasing" : "increasing") << '\n';

    if (!c.csv_path.empty()) {
        CsvSink sink(c.csv_path, out);
        std::ostream& os = sink.stream();
        os << "t,survival,density,hazard,m,M,mslope_left,mslope_right\n";
        std::vector<double> times(sol.m.size());
        for (std::size_t i = 0; i < times.size(); ++i) times[i] = sol.m.time(i);
        for (std::size_t k = 0; k < sol.m.knot_indices.size(); ++k) times[sol.m.knot_indices[k]] = dist.knots()[k];
        for (std::size_t i = 0; i < sol.m.size(); ++i) {
            const PointValues v = dist.eval(times[i]);
            os << csv_line({format_number(times[i]), format_number(v.survival), format_number(v.density),
                            format_number(v.hazard), format_number(sol.m.values[i]), format_number(sol.M.values[i]),
                            format_number(sol.m_slope.left.values[i]), format_number(sol.m_slope.right.values[i])});
        }
    }

    if (!c.svg_path.empty()) {
        std::ofstream svg(c.svg_path, std::ios::binary);
        if (!svg) {
            err << "error: cannot open '" << c.svg_path << "'\n";
            return kExitUsage;
        }
        std::vector<double> t(sol.m.size()), S(t.size()), f(t.size()), r(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = sol.m.time(i);
            const PointValues v = dist.eval(t[i]);
            S[i] = v.survival;
            f[i] = v.density;
            r[i] = v.hazard;
        }
        report::write_svg_panels(svg, {
            {"survival Fbar(t)", t, {{"", S, "#1f77b4"}}},
            {"density f(t) and hazard r(t)", t, {{"f(t)", f, "#1f77b4"}, {"r(t)", r, "#d62728"}}},
            {"renewal density m(t)", t, {{"", sol.m.values, "#2ca02c"}}},
            {"renewal function M(t)", t, {{"", sol.M.values, "#9467bd"}}},
        });
    }

    return (conditions.all_pass() && mono.is_nonincreasing) ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.betas.empty() || c.dt2s.empty()) {
        err << "usage error: sweep needs nonempty --betas and --dt2s lists\n";
        return kExitUsage;
    }
    banner(c, out);

    struct Cell {
        double beta, dt2;
        double epsilon = std::nan("");
        double max_increase = std::nan("");
        std::string monotone = "NA";
    };
    std::vector<Cell> cells;
    for (double b : c.betas)
        for (double d : c.dt2s) cells.push_back({b, d});

    auto run_cell = [&c](Cell& cell) {
        try {
            cell.epsilon = derive_family_params(c.t1, cell.beta).epsilon;
            const double t2 = c.t1 + cell.dt2;
            const CounterexampleSpec spec{c.t1, t2, default_t3_on_grid(c.t1, t2, cell.beta, c.h), cell.beta};
            const PiecewiseDistribution dist = build_counterexample(spec);
            const MonotonicityReport mono = monotonicity_report(solve_renewal_density(dist, c.h, c.t_max), c.tol);
            cell.max_increase = mono.max_increase;
            cell.monotone = mono.is_nonincreasing ? "1" : "0";
        } catch (const std::exception&) {
            cell.monotone = "NA";
        }
    };

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> pending;
    for (std::size_t start = 0; start < cells.size(); start += workers) {
        pending.clear();
        for (std::size_t k = start; k < std::min(cells.size(), start + workers); ++k)
            pending.push_back(std::async(std::launch::async, run_cell, std::ref(cells[k])));
        for (auto& f : pending) f.get();
    }

    CsvSink sink(c.csv_path, out);
    std::ostream& os = sink.stream();
    os << "beta,dt2,epsilon,max_m_increase,monotone\n";
    for (const Cell& cell : cells)
        os << csv_line({format_number(cell.beta), format_number(cell.dt2), format_number(cell.epsilon),
                        format_number(cell.max_increase), cell.monotone});
    return kExitOk;
}

int cmd_compound(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.pmf_path.empty()) {
        err << "usage error: compound needs --pmf FILE\n";
        return kExitUsage;
    }
    std::ifstream in(c.pmf_path);
    if (!in) {
        err << "error: cannot open PMF file '" << c.pmf_path << "'\n";
        return kExitUsage;
    }
    banner(c, out);
    const DiscretePMF f = DiscretePMF(parse_pmf(in)).padded(c.N);
    const CompoundResult y = compound_geometric(f, c.p, c.N);

    const DiscreteShapeReport xs = discrete_shape_report(f.survival());
    const DiscreteShapeReport ys = discrete_shape_report(y.G_bar);

    CsvSink sink(c.csv_path, out);
    std::ostream& os = sink.stream();
    os << "n,f,Fbar,g,Gbar,dfr_ok,ifr_ok,induct_residual\n";
    double worst_residual = 0.0;
    for (std::size_t n = 1; n <= c.N; ++n) {
        std::string dfr_ok = "NA", ifr_ok = "NA", resid = "NA";
        if (n + 2 <= y.G_bar.size() && y.survival(n + 1) >= kShapeCutoff) {
            const double d = shape_cross_difference(y.G_bar, n);
            dfr_ok = d >= -kShapeTolerance ? "1" : "0";
            ifr_ok = d <= kShapeTolerance ? "1" : "0";
        }
        if (n + 2 <= y.G_bar.size()) {
            const double rel = induct_identity_residual(f, y, n).relative();
            worst_residual = std::max(worst_residual, rel);
            resid = format_number(rel);
        }
        os << csv_line({std::to_string(n), format_number(f.mass(n)), format_number(f.survival(n)),
                        format_number(y.mass(n)), format_number(y.survival(n)), dfr_ok, ifr_ok, resid});
    }

    const bool identity_ok = worst_residual <= 1e-12;
    const bool part1_ok = !xs.dfr || ys.dfr;
    const bool part2_ok = !ys.ifr || xs.ifr;
    out << "# summary: X dfr=" << xs.dfr << " ifr=" << xs.ifr << "; Y dfr=" << ys.dfr << " ifr=" << ys.ifr
        << "; max relative identity residual=" << format_number(worst_residual)
        << "; Pr(Y>N)=" << format_number(y.tail_mass()) << '\n';
    return (identity_ok && part1_ok && part2_ok) ? kExitOk : kExitCheckFailed;
}

int cmd_mc_check(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.t_points.empty()) {
        err << "usage error: mc-check needs at least one --t-points entry\n";
        return kExitUsage;
    }
    if (c.t_points.back() > c.t_max) {
        err << "usage error: time points must not exceed --tmax\n";
        return kExitUsage;
    }
    banner(c, out);
    const PiecewiseDistribution dist = build_law(c);
    const GridFunction M = renewal_function(solve_renewal_density(dist, c.h, c.t_max));
    const McEstimate est = estimate_renewal_function(dist, c.t_points, c.n_paths, c.seed);

    bool ok = true;
    std::ostringstream table;
    table << "t,M_engine,M_mc,std_error,z\n";
    for (std::size_t k = 0; k < est.t_points.size(); ++k) {
        const double engine = value_at(M, est.t_points[k]);
        const double z = (est.mean_counts[k] - engine) / est.std_errors[k];
        ok = ok && std::abs(z) <= 3.0;
        table << csv_line({format_number(est.t_points[k]), format_number(engine), format_number(est.mean_counts[k]),
                           format_number(est.std_errors[k]), format_number(z)});
    }
    CsvSink sink(c.csv_path, out);
    sink.stream() << table.str();
    out << "mc-check verdict: " << (ok ? "agree within 3 SE" : "DISAGREE") << '\n';
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_identities(const RunConfig& c, std::ostream& out, std::ostream&) {
    banner(c, out);
    const PiecewiseDistribution dist = build_law(c);
    const RenewalSolution coarse = solve_renewal(dist, c.h, c.t_max);
    const RenewalSolution fine = solve_renewal(dist, c.h / 2.0, c.t_max);

    constexpr double roundoff_floor = 1e-13;
    bool ok = true;
    auto line = [&](const char* name, double a, double b) {
        const bool exact = a <= roundoff_floor && b <= roundoff_floor;
        const double ratio = b > 0.0 ? a / b : std::nan("");
        const bool pass = exact || (ratio >= 3.0 && ratio <= 5.0);
        ok = ok && pass;
        out << name << ": sup|res|(h)=" << format_number(a) << " sup|res|(h/2)=" << format_number(b)
            << " ratio=" << format_number(ratio) << (exact ? " (roundoff floor)" : "") << (pass ? " ok" : " FAIL")
            << '\n';
    };
    line("key identity", coarse.residual_key_identity, fine.residual_key_identity);
    line("integral identity", coarse.residual_int_identity, fine.residual_int_identity);
    return ok ? kExitOk : kExitCheckFailed;
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        if (c.command == "counterexample") return cmd_counterexample(c, out, err);
        if (c.command == "sweep") return cmd_sweep(c, out, err);
        if (c.command == "compound") return cmd_compound(c, out, err);
        if (c.command == "mc-check") return cmd_mc_check(c, out, err);
        if (c.command == "identities") return cmd_identities(c, out, err);
        err << "usage error: unknown command '" << c.command << "'\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
    }
    return kExitUsage;
}

}  // namespace renewal::cli
