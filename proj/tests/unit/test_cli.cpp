#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "renewal/report.hpp"

using namespace renewal;
using namespace renewal::cli;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("renewal_unit_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("number formatting: shortest form capped at 12 digits") {
    using report::format_number;
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(-2.25) == "-2.25");
    CHECK(format_number(1.0 / 512) == "0.001953125");
    CHECK(format_number(std::nan("")) == "NA");
    CHECK(std::stod(format_number(1e-20)) == 1e-20);
}

TEST_CASE("svg panels are well-formed") {
    std::ostringstream os;
    report::write_svg_panels(os, {{"a", {0, 1, 2}, {{"x", {1, 2, 3}, "#000"}}}, {"b", {0, 1}, {{"", {5, 5}, "#111"}}}});
    const std::string s = os.str();
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("<polyline") != std::string::npos);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("number and list parsing") {
    CHECK(parse_number("1/512") == 1.0 / 512);
    CHECK(parse_number(" 0.25 ") == 0.25);
    CHECK_THROWS_AS(parse_number("abc"), ParseError);
    CHECK(parse_list("0.01,0.02, 0.5") == std::vector<double>{0.01, 0.02, 0.5});
    CHECK(parse_list("").empty());
}

TEST_CASE("PMF parsing names the offending line") {
    std::istringstream good("0.5\n\n# comment\n0.25\n0.25\n");
    CHECK(parse_pmf(good) == std::vector<double>{0.5, 0.25, 0.25});

    std::istringstream neg("0.5\n-0.1\n0.6\n");
    try {
        (void)parse_pmf(neg);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream junk("0.5\n0.5x\n");
    CHECK_THROWS_AS(parse_pmf(junk), ParseError);
    std::istringstream empty("\n\n");
    CHECK_THROWS_AS(parse_pmf(empty), ParseError);
}

TEST_CASE("default t3 lands on the grid at or above the bound") {
    const double h = 1.0 / 512;
    const double t3 = default_t3_on_grid(1.0, 1.5, 0.02, h);
    CHECK(t3 >= minimal_t3(1.0, 1.5, 0.02));
    CHECK(t3 - h < minimal_t3(1.0, 1.5, 0.02));
    CHECK(std::fmod(t3, h) == 0.0);
}

TEST_CASE("counterexample: base instance passes; CSV first row") {
    RunConfig c;
    c.command = "counterexample";
    c.t3 = 2.0;
    c.csv_path = temp_file("ce.csv").string();
    std::ostringstream out, err;
    CHECK(dispatch(c, out, err) == kExitOk);
    CHECK(out.str().find("monotonicity verdict: nonincreasing") != std::string::npos);
    CHECK(out.str().find("FAIL") == std::string::npos);

    const auto rows = lines_of(slurp(c.csv_path));
    REQUIRE(rows.size() == 8 * 512 + 2);
    CHECK(rows[0] == "t,survival,density,hazard,m,M,mslope_left,mslope_right");
    const auto first = split(rows[1]);
    CHECK(first[0] == "0");
    CHECK(first[1] == "1");
    CHECK(first[2] == "0.5");
    CHECK(first[4] == "0.5");
    CHECK(first[5] == "0");
    CHECK(first[6] == "-0.25");
}

TEST_CASE("counterexample: beta = 0 is rejected with the precondition named") {
    RunConfig c;
    c.command = "counterexample";
    c.beta = 0.0;
    c.t3 = 2.0;
    std::ostringstream out, err;
    CHECK(dispatch(c, out, err) == kExitUsage);
    CHECK(err.str().find("beta must be positive") != std::string::npos);
}

TEST_CASE("sweep: base cell monotone, large beta cell not, bad cells NA") {
    RunConfig c;
    c.command = "sweep";
    c.betas = {0.02, 0.5};
    c.dt2s = {0.5, 2.0, 0.3};
    c.h = 1.0 / 128;
    std::ostringstream out, err;
    REQUIRE(dispatch(c, out, err) == kExitOk);

    std::map<std::pair<std::string, std::string>, std::vector<std::string>> cells;
    for (const auto& line : lines_of(out.str())) {
        if (line.empty() || line[0] == '#' || line.rfind("beta,", 0) == 0) continue;
        const auto f = split(line);
        cells[{f[0], f[1]}] = f;
    }
    REQUIRE(cells.size() == 6);
    CHECK(cells[{"0.02", "0.5"}][4] == "1");
    CHECK(cells[{"0.5", "2"}][4] == "0");
    CHECK(std::stod(cells[{"0.5", "2"}][3]) > c.tol);
    CHECK(cells[{"0.02", "0.3"}][4] == "NA");  // 1.3 is not a grid point
}

TEST_CASE("sweep: empty grid is a usage error") {
    RunConfig c;
    c.command = "sweep";
    c.dt2s = {0.5};
    std::ostringstream out, err;
    CHECK(dispatch(c, out, err) == kExitUsage);
}

TEST_CASE("compound: X = 1 gives geometric masses") {
    const auto pmf = temp_file("one.pmf");
    std::ofstream(pmf) << "1.0\n";
    RunConfig c;
    c.command = "compound";
    c.pmf_path = pmf.string();
    c.p = 0.4;
    c.N = 25;
    std::ostringstream out, err;
    CHECK(dispatch(c, out, err) == kExitOk);
    const auto rows = lines_of(out.str());
    std::size_t n = 0;
    for (const auto& line : rows) {
        if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
        const auto f = split(line);
        ++n;
        CHECK(std::stoul(f[0]) == n);
        CHECK(std::stod(f[3]) == doctest::Approx(0.4 * std::pow(0.6, n - 1)).epsilon(1e-11));
        if (f[7] != "NA") CHECK(std::stod(f[7]) <= 1e-12);
    }
    CHECK(n == 25);
}

TEST_CASE("compound: negative mass is a parse error") {
    const auto pmf = temp_file("neg.pmf");
    std::ofstream(pmf) << "0.6\n-0.2\n";
    RunConfig c;
    c.command = "compound";
    c.pmf_path = pmf.string();
    std::ostringstream out, err;
    CHECK(dispatch(c, out, err) == kExitUsage);
    CHECK(err.str().find("line 2") != std::string::npos);
}

TEST_CASE("identities and mc-check on reference laws") {
    RunConfig c;
    c.h = 1.0 / 128;
    std::ostringstream out, err;
    c.command = "identities";
    c.law = "erlang2";
    CHECK(dispatch(c, out, err) == kExitOk);
    c.law = "exponential";
    CHECK(dispatch(c, out, err) == kExitOk);
    CHECK(out.str().find("roundoff floor") != std::string::npos);

    c.command = "mc-check";
    c.law = "exponential";
    c.n_paths = 20000;
    CHECK(dispatch(c, out, err) == kExitOk);

    c.law = "weibull";
    CHECK(dispatch(c, out, err) == kExitUsage);
}

}  // TEST_SUITE
