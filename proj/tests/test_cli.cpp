#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qmeas/runner.hpp"

using namespace qmeas;

namespace {

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string f;
    while (std::getline(in, f, ',')) out.push_back(f);
    return out;
}

}  // namespace

TEST_CASE("verify: vienna exits 0 and emits satisfied rows only as applicable") {
    std::string csv;
    const int code = run_cli({"verify", "--scenario", "vienna"}, &csv);
    CHECK(code == kExitOk);
    const auto ls = lines_of(csv);
    REQUIRE(ls.size() > 1);
    CHECK(ls[0] == "phi,relation,lhs,rhs,slack,satisfied,precondition_residual");
    // 181 sweep points x 10 universal relations, plus conditionals where the
    // preconditions hold (phi = 0 and 2 pi).
    CHECK(ls.size() >= 1 + 181 * 10);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields_of(ls[i]);
        REQUIRE(f.size() == 7);
        REQUIRE(f[5] == "1");  // all satisfied on vienna
    }
}

TEST_CASE("verify: CSV output is byte deterministic") {
    std::string a, b;
    CHECK(run_cli({"verify", "--scenario", "vienna"}, &a) == kExitOk);
    CHECK(run_cli({"verify", "--scenario", "vienna"}, &b) == kExitOk);
    CHECK(a == b);
}

TEST_CASE("sweep: vienna components match the closed forms") {
    std::string csv;
    REQUIRE(run_cli({"sweep", "--scenario", "vienna"}, &csv) == kExitOk);
    const auto ls = lines_of(csv);
    REQUIRE(ls.size() == 1 + 181);
    const auto header = fields_of(ls[0]);
    REQUIRE(header[0] == "phi");
    REQUIRE(header[1] == "error_a");
    REQUIRE(header[4] == "error_b");

    bool product_below = false, product_above = false;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields_of(ls[i]);
        const double phi = std::stod(f[0]);
        const double err_a = std::stod(f[1]);
        const double err_b = std::stod(f[4]);
        REQUIRE(std::abs(err_a - 2.0 * std::abs(std::sin(phi / 2.0))) < 1e-9);
        REQUIRE(std::abs(err_b - std::sqrt(2.0) * std::abs(std::cos(phi))) < 1e-9);
        const double product = std::stod(f[17]);
        if (product < 1.0 - 1e-6) product_below = true;
        if (product > 1.0 + 1e-6) product_above = true;
    }
    // The naive error product crosses c_AB = 1 in both directions.
    CHECK(product_below);
    CHECK(product_above);
}

TEST_CASE("region: default unit triple includes the branciard column") {
    std::string csv;
    REQUIRE(run_cli({"region", "--grid", "0:1:101"}, &csv) == kExitOk);
    const auto ls = lines_of(csv);
    REQUIRE(ls.size() == 102);
    CHECK(ls[0] ==
          "eps_a,eps_b_ozawa,eps_b_branciard_special,eps_b_both_unbiased,"
          "eps_b_unbiased_a_proj_b,eps_b_unbiased_a");

    const auto first = fields_of(ls[1]);   // eps_a = 0
    CHECK(std::stod(first[1]) == doctest::Approx(1.0));  // ozawa
    CHECK(std::stod(first[2]) == doctest::Approx(1.0));  // branciard
    CHECK(first[3] == "inf");                            // hyperbola pole
    const auto last = fields_of(ls[101]);  // eps_a = 1
    CHECK(std::stod(last[2]) == doctest::Approx(0.0));   // branciard through (1,0)
    CHECK(std::stod(last[3]) == doctest::Approx(1.0));   // hyperbola through (1,1)
}

TEST_CASE("region: off the unit triple the branciard column disappears") {
    std::string csv;
    REQUIRE(run_cli({"region", "--sigma-a", "2", "--grid", "0:1:3"}, &csv) == kExitOk);
    CHECK(lines_of(csv)[0] ==
          "eps_a,eps_b_ozawa,eps_b_both_unbiased,eps_b_unbiased_a_proj_b,eps_b_unbiased_a");

    std::string err;
    const int code =
        run_cli({"region", "--sigma-a", "2", "--branciard", "--grid", "0:1:3"}, nullptr, &err);
    CHECK(code == kExitInputError);
    CHECK(err.find("branciard") != std::string::npos);
}

TEST_CASE("circuit: vienna rows cross-check exact vs operator routes") {
    std::string csv;
    REQUIRE(run_cli({"circuit", "--scenario", "vienna", "--phi", "1.0471975511965976",
                     "--shots", "20000", "--seed", "5"},
                    &csv) == kExitOk);
    const auto ls = lines_of(csv);
    REQUIRE(ls.size() == 6);  // header + fuzz_a + fuzz_b + error_a + disturbance_b + commutator
    CHECK(ls[0] == "quantity,exact,operator_route,sampled,std_error,shots,seed");

    bool saw_error_a = false;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields_of(ls[i]);
        REQUIRE(f.size() == 7);
        const double exact = std::stod(f[1]);
        const double op_route = std::stod(f[2]);
        REQUIRE(std::abs(exact - op_route) < 1e-7);
        if (f[0] == "error_a") {
            saw_error_a = true;
            // phi = pi/3: exact error is 2 sin(pi/6) = 1.
            CHECK(std::abs(exact - 1.0) < 1e-10);
        }
    }
    CHECK(saw_error_a);
}

TEST_CASE("circuit: phi = pi/2 fuzziness row vanishes on both routes") {
    std::string csv;
    REQUIRE(run_cli({"circuit", "--scenario", "vienna", "--phi", "1.5707963267948966",
                     "--shots", "5000", "--seed", "2", "--basis", "x"},
                    &csv) == kExitOk);
    const auto ls = lines_of(csv);
    REQUIRE(ls.size() == 5);  // no commutator row with --basis x
    const auto f = fields_of(ls[1]);
    REQUIRE(f[0] == "fuzziness_a");
    CHECK(std::abs(std::stod(f[1])) < 1e-7);
    CHECK(std::abs(std::stod(f[2])) < 1e-12);
}

TEST_CASE("circuit: singlet variant matches cswap on a qubit scenario") {
    std::string cswap, singlet;
    const std::vector<std::string> base = {"circuit", "--scenario", "vienna",
                                           "--phi",   "0.7",        "--shots",
                                           "10000",   "--seed",     "3",
                                           "--basis", "x"};
    auto with_variant = [&](const std::string& v) {
        auto args = base;
        args.push_back("--variant");
        args.push_back(v);
        return args;
    };
    REQUIRE(run_cli(with_variant("cswap"), &cswap) == kExitOk);
    REQUIRE(run_cli(with_variant("singlet"), &singlet) == kExitOk);
    const auto la = lines_of(cswap), lb = lines_of(singlet);
    REQUIRE(la.size() == lb.size());
    for (std::size_t i = 1; i < la.size(); ++i) {
        const auto fa = fields_of(la[i]), fb = fields_of(lb[i]);
        CHECK(fa[0] == fb[0]);
        const double va = std::stod(fa[1]), vb = std::stod(fb[1]);
        // Underlying distributions agree to 1e-15; square roots of vanishing
        // radicands only to sqrt of that.
        CHECK(std::abs(va * va - vb * vb) < 1e-12);
        CHECK(std::abs(va - vb) < 1e-7);
    }
}

TEST_CASE("circuit: sampled column is deterministic given the seed") {
    const std::vector<std::string> args = {"circuit", "--scenario", "vienna", "--phi", "0.9",
                                           "--shots", "30000",      "--seed", "11"};
    std::string a, b;
    REQUIRE(run_cli(args, &a) == kExitOk);
    REQUIRE(run_cli(args, &b) == kExitOk);
    CHECK(a == b);
}

TEST_CASE("cli: input errors exit 2 with a message") {
    std::string err;
    CHECK(run_cli({"frobnicate"}, nullptr, &err) == kExitInputError);
    CHECK(err.find("unknown command") != std::string::npos);

    CHECK(run_cli({"verify"}, nullptr, &err) == kExitInputError);
    CHECK(run_cli({"verify", "--scenario", "does_not_exist.scn"}, nullptr, &err) ==
          kExitInputError);
    CHECK(run_cli({"region", "--grid", "oops"}, nullptr, &err) == kExitInputError);
    CHECK(run_cli({"circuit", "--scenario", "vienna"}, nullptr, &err) == kExitInputError);
    CHECK(run_cli({}, nullptr, &err) == kExitInputError);

    std::string out;
    CHECK(run_cli({"--help"}, &out) == kExitOk);
    CHECK(out.find("usage") != std::string::npos);
}

TEST_CASE("cli: --out writes the same bytes as stdout") {
    std::string direct;
    REQUIRE(run_cli({"region", "--grid", "0:1:11"}, &direct) == kExitOk);
    const std::string path = "cli_region_test.tmp";
    REQUIRE(run_cli({"region", "--grid", "0:1:11", "--out", path}) == kExitOk);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == direct);
    std::remove(path.c_str());
}
