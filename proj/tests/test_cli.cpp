#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(NSWEXP_BINARY) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, out};
}

std::string sample(const std::string& name) { return std::string(NSW_SAMPLES_DIR) + "/" + name; }

bool has_line(const std::string& text, const std::string& line) {
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l))
        if (l == line) return true;
    return false;
}

} // namespace

TEST_CASE("analyze martinet") {
    auto r = run("analyze " + sample("martinet.sys"));
    CHECK(r.exit_code == 0);
    CHECK(has_line(r.output, "Q = 5"));
    CHECK(has_line(r.output, "hoermander_index = 3"));
    CHECK(has_line(r.output, "w = 4"));
    CHECK(has_line(r.output, "nu_origin = 5"));
    CHECK(has_line(r.output, "degenerate_vars = {x1}"));
    CHECK(has_line(r.output, "alphaX = 1"));
    CHECK(has_line(r.output, "classification = Degenerate(1)"));
}

TEST_CASE("analyze bony and heisenberg") {
    auto bony = run("analyze " + sample("bony_3.sys"));
    CHECK(bony.exit_code == 0);
    CHECK(has_line(bony.output, "Q = 6"));
    CHECK(has_line(bony.output, "w = 4"));
    CHECK(has_line(bony.output, "hoermander_index = 3"));

    auto heis = run("analyze " + sample("heisenberg.sys"));
    CHECK(heis.exit_code == 0);
    CHECK(has_line(heis.output, "classification = NonDegenerate"));
    CHECK(has_line(heis.output, "degenerate_vars = {}"));
}

TEST_CASE("exponents of the fractional-rate system") {
    auto r = run("exponents " + sample("ex6_4.sys"));
    CHECK(r.exit_code == 0);
    CHECK(has_line(r.output, "Q0 = 11/3"));
    CHECK(has_line(r.output, "d0 = 0"));
    CHECK(has_line(r.output, "derivation = MonomialLP"));
    CHECK(has_line(r.output, "pair (3,0) s=3: status=Counted m=2/3 d=0 s+m=11/3"));
    CHECK(has_line(r.output, "pair (0,1) s=4: status=Counted m=-1/3 d=0 s+m=11/3"));
    CHECK(has_line(r.output, "pair (0,0) s=6: status=Counted m=-3 d=0 s+m=3"));
    CHECK(has_line(r.output, "pair (2,0) s=4: status=Skipped_NotFullDim"));
    CHECK(has_line(r.output, "pair (1,0) s=5: status=Skipped_NotFullDim"));
}

TEST_CASE("exponents requiring resolution") {
    auto r = run("exponents " + sample("ex6_6.sys"));
    CHECK(r.exit_code == 3);
    CHECK(has_line(r.output, "NeedsResolution"));
    CHECK(r.output.find("x1 + x2") != std::string::npos);
}

TEST_CASE("exponents with substitution") {
    auto r = run("exponents " + sample("ex6_6_subst.sys"));
    CHECK(r.exit_code == 0);
    CHECK(has_line(r.output, "Q0 = 4"));
    CHECK(has_line(r.output, "d0 = 1"));
    CHECK(has_line(r.output, "derivation = MonomialLP"));
}

TEST_CASE("exponents from a hand-resolved chart") {
    auto r = run("exponents " + sample("ex6_6_chart.sys"));
    CHECK(r.exit_code == 0);
    CHECK(has_line(r.output, "Q0 = 4"));
    CHECK(has_line(r.output, "d0 = 1"));
    CHECK(has_line(r.output, "derivation = UserChart"));
}

TEST_CASE("divergent chart exits with the witness") {
    auto r = run("exponents " + sample("divergent_chart.sys"));
    CHECK(r.exit_code == 4);
    CHECK(has_line(r.output, "Divergent"));
    CHECK(has_line(r.output, "witness = pair (2) s=0"));
}

TEST_CASE("law output") {
    auto g21 = run("law " + sample("grushin_2_1.sys"));
    CHECK(g21.exit_code == 0);
    CHECK(has_line(g21.output, "lambda_k ~ k^(1) * (ln k)^(-1)"));
    CHECK(has_line(g21.output, "N(lambda) ~ lambda^(1) * (ln lambda)^1"));

    auto e65 = run("law " + sample("ex6_5.sys"));
    CHECK(e65.exit_code == 0);
    CHECK(has_line(e65.output, "lambda_k ~ k^(1/2) * (ln k)^(-1/2)"));

    auto heis = run("law " + sample("heisenberg.sys"));
    CHECK(heis.exit_code == 0);
    CHECK(has_line(heis.output, "lambda_k ~ k^(1/2)"));
    CHECK(has_line(heis.output, "N(lambda) ~ lambda^(2)"));

    auto e64 = run("law " + sample("ex6_4.sys"));
    CHECK(e64.exit_code == 0);
    CHECK(has_line(e64.output, "lambda_k ~ k^(6/11)"));

    auto chain = run("law " + sample("chain_3.sys"));
    CHECK(chain.exit_code == 0);
    CHECK(has_line(chain.output, "lambda_k ~ k^(2/3) * (ln k)^(-4/3)"));
    CHECK(has_line(chain.output, "N(lambda) ~ lambda^(3/2) * (ln lambda)^2"));
}

TEST_CASE("semantic and usage errors exit with 2") {
    auto missing = run("analyze /nonexistent.sys");
    CHECK(missing.exit_code == 2);

    auto ladder = run("verify " + sample("martinet.sys") + " --rmin 0.5 --rmax 0.1");
    CHECK(ladder.exit_code == 2);

    auto no_sub = run(sample("martinet.sys"));
    CHECK(no_sub.exit_code == 2);

    auto chart_analyze = run("analyze " + sample("ex6_6_chart.sys"));
    CHECK(chart_analyze.exit_code == 2);

    auto few_points = run("verify " + sample("martinet.sys") + " --points 2");
    CHECK(few_points.exit_code == 2);
}

TEST_CASE("bad weights are a semantic error naming the field") {
    std::string tmp = "/tmp/nswexp_bad_weights.sys";
    {
        std::FILE* f = std::fopen(tmp.c_str(), "w");
        REQUIRE(f);
        std::fputs("dim 3\nweights 1 2 3\nfield X1 = 1*d1\nfield X2 = 1*d2 + x1^2*d3\n", f);
        std::fclose(f);
    }
    auto r = run("analyze " + tmp);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("X2") != std::string::npos);
}

TEST_CASE("verify passes on the closed-form chart") {
    auto r = run("verify " + sample("closedform_chart.sys") + " --points 5 --rmin 1e-4 --rmax 1e-2");
    CHECK(r.exit_code == 0);
    CHECK(has_line(r.output, "Q0 = 0"));
    CHECK(has_line(r.output, "result = PASS"));
    // the fitted log power should sit near 1 for ln(1 + 1/r)
    auto j = run("verify " + sample("closedform_chart.sys") +
                 " --points 5 --rmin 1e-4 --rmax 1e-2 --json");
    CHECK(j.exit_code == 0);
    json parsed = json::parse(j.output);
    CHECK(std::abs(parsed["d0_hat"].get<double>() - 1.0) < 0.2);
    CHECK(parsed["result"] == "PASS");
}

TEST_CASE("verify passes on systems across the reduction kinds") {
    // trivial reduction: the integrand is constant in x
    auto heis = run("verify " + sample("heisenberg.sys") + " --points 4 --rmin 1e-4 --rmax 1e-2");
    CHECK(heis.exit_code == 0);
    CHECK(has_line(heis.output, "Q0 = 4"));
    CHECK(has_line(heis.output, "result = PASS"));

    // single degenerate variable, quadrature route
    auto g21 = run("verify " + sample("grushin_2_1.sys") + " --points 5");
    CHECK(g21.exit_code == 0);
    CHECK(has_line(g21.output, "result = PASS"));

    // substituted two-variable route
    auto e66 = run("verify " + sample("ex6_6_subst.sys") + " --points 4 --rmin 1e-3 --rmax 1e-2 --nodes 128");
    CHECK(e66.exit_code == 0);
    CHECK(has_line(e66.output, "result = PASS"));
}

TEST_CASE("verify fails with an impossible tolerance") {
    auto r = run("verify " + sample("closedform_chart.sys") +
                 " --points 5 --rmin 1e-4 --rmax 1e-2 --tol 1e-9");
    CHECK(r.exit_code == 5);
    CHECK(has_line(r.output, "result = FAIL"));
}

TEST_CASE("json and plain outputs carry identical values") {
    auto plain = run("exponents " + sample("ex6_4.sys"));
    auto js = run("exponents " + sample("ex6_4.sys") + " --json");
    CHECK(js.exit_code == 0);
    json parsed = json::parse(js.output);
    CHECK(parsed["Q0"] == "11/3");
    CHECK(parsed["d0"] == 0);
    CHECK(parsed["derivation"] == "MonomialLP");
    REQUIRE(parsed["pairs"].size() == 5);
    int counted = 0, skipped = 0;
    for (const auto& p : parsed["pairs"]) {
        if (p["status"] == "Counted") ++counted;
        else ++skipped;
    }
    CHECK(counted == 3);
    CHECK(skipped == 2);

    auto analyze_json_run = run("analyze " + sample("martinet.sys") + " --json");
    json an = json::parse(analyze_json_run.output);
    CHECK(an["Q"] == 5);
    CHECK(an["w"] == 4);
    CHECK(an["degenerate_vars"] == json::array({"x1"}));
    CHECK(an["classification"] == "Degenerate(1)");
}

TEST_CASE("report combines the blocks") {
    auto r = run("report " + sample("martinet.sys"));
    CHECK(r.exit_code == 0);
    CHECK(has_line(r.output, "Q = 5"));
    CHECK(has_line(r.output, "Q0 = 4"));
    CHECK(has_line(r.output, "derivation = SingleComponent"));
    CHECK(has_line(r.output, "lambda_k ~ k^(1/2) * (ln k)^(-1/2)"));
}

TEST_CASE("output is stable run to run") {
    auto a = run("exponents " + sample("ex6_4.sys"));
    auto b = run("exponents " + sample("ex6_4.sys"));
    CHECK(a.output == b.output);
    auto va = run("verify " + sample("ex6_6_chart.sys") + " --points 4 --rmin 1e-3 --rmax 1e-2");
    auto vb = run("verify " + sample("ex6_6_chart.sys") + " --points 4 --rmin 1e-3 --rmax 1e-2");
    CHECK(va.output == vb.output);
}
