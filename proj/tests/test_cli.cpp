#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

// Path to the built CLI binary, injected by the build system.
#ifndef HOA_CLI_PATH
#error "HOA_CLI_PATH must be defined"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd = env_prefix + HOA_CLI_PATH " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = "/tmp/" + name;
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
    return path;
}

const std::string kSixWaveDsl =
    "mode A coherent(alpha);\n"
    "mode B vacuum;\n"
    "mode C vacuum;\n"
    "H = g*Ad^2*B^3*C + hc;\n";

}  // namespace

TEST_CASE("derive: pretty output names the solution and term count") {
    RunResult r = run("derive --system six_wave --order 2");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("six_wave: A(t), order 2") != std::string::npos);
    CHECK(r.output.find("(10 terms)") != std::string::npos);
    CHECK(r.output.find("A(t) = ") != std::string::npos);
}

TEST_CASE("derive: JSON term counts per system and order") {
    RunResult six = run("derive --system six_wave --order 2 --format json");
    REQUIRE(six.exit_code == 0);
    auto j = nlohmann::json::parse(six.output);
    CHECK(j["system"] == "six_wave");
    CHECK(j["operator"] == "A");
    CHECK(j["order"] == 2);
    CHECK(j["series"].size() == 10);

    RunResult four = run("derive --system four_wave --order 1 --format json");
    REQUIRE(four.exit_code == 0);
    auto jf = nlohmann::json::parse(four.output);
    CHECK(jf["series"].size() == 2);
}

TEST_CASE("derive: DSL file and builtin give identical series") {
    std::string path = write_temp("cli_six_wave.hoa", kSixWaveDsl);
    RunResult from_file = run("derive --system @" + path + " --order 2 --format json");
    RunResult builtin = run("derive --system six_wave --order 2 --format json");
    REQUIRE(from_file.exit_code == 0);
    REQUIRE(builtin.exit_code == 0);
    auto ja = nlohmann::json::parse(from_file.output);
    auto jb = nlohmann::json::parse(builtin.output);
    CHECK(ja["series"] == jb["series"]);
}

TEST_CASE("derive: --operator and --latex") {
    // a2(t) = a2 - i g t a1² at first order: no daggers, a squared annihilator
    RunResult r = run("derive --system shg --operator A2 --order 1 --latex");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("A2(t) = ") != std::string::npos);
    CHECK(r.output.find("A1^{2}") != std::string::npos);

    // the pump solution does carry a creation operator
    RunResult pump = run("derive --system shg --order 1 --latex");
    CHECK(pump.exit_code == 0);
    CHECK(pump.output.find("\\dagger") != std::string::npos);
}

TEST_CASE("hoa: symbolic block plus numeric grid summary") {
    RunResult r = run("hoa --system six_wave --order 2 --l 2");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("d(1) = ") != std::string::npos);
    CHECK(r.output.find("d(2) = ") != std::string::npos);
    // default grid g=1e-3, t=1, alpha=1: both orders antibunched
    CHECK(r.output.find("antibunched (d<0) at 2/2 grid points") != std::string::npos);
}

TEST_CASE("hoa: CSV output is deterministic and well-formed") {
    std::string args = "hoa --system four_wave --format csv --g 1e-3 2e-3 --t 0.5 1.0 --l 2";
    RunResult a = run(args);
    RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.rfind("system,l,g,t,alpha_re,alpha_im,d_l,A_l,R_l1\n", 0) == 0);
    // header + 2 g * 2 t * 1 alpha * 2 l rows
    CHECK(std::count(a.output.begin(), a.output.end(), '\n') == 9);
}

TEST_CASE("sweep: cross-system ratio of d(1) is 6 on the shared grid") {
    RunResult r = run("sweep --systems six_wave four_wave --g 1e-3 --t 1.0 --l 1 --workers 2");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.output);
    std::string line;
    std::getline(lines, line);  // header
    double d[2] = {0, 0};
    for (int i = 0; i < 2; ++i) {
        REQUIRE(std::getline(lines, line));
        // column 7 is d_l
        std::istringstream cells(line);
        std::string cell;
        for (int c = 0; c < 7; ++c) REQUIRE(std::getline(cells, cell, ','));
        d[i] = std::stod(cell);
    }
    CHECK(d[0] == doctest::Approx(6.0 * d[1]).epsilon(1e-12));
    CHECK(r.output.find("six_wave,1,") != std::string::npos);
    CHECK(r.output.find("four_wave,1,") != std::string::npos);
}

TEST_CASE("sweep: --out writes the file instead of stdout") {
    std::string out_path = "/tmp/cli_sweep_out.csv";
    std::remove(out_path.c_str());
    RunResult r = run("sweep --system shg --g 1e-3 --t 1.0 --l 1 --out " + out_path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.empty());
    std::ifstream in(out_path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "system,l,g,t,alpha_re,alpha_im,d_l,A_l,R_l1");
}

TEST_CASE("verify: SHG passes at the default tolerance") {
    RunResult r = run("verify --system shg --g 1e-3 --t 1.0 --l 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("verification PASSED") != std::string::npos);
}

TEST_CASE("parse-check: valid and invalid DSL") {
    std::string good = write_temp("cli_good.hoa", kSixWaveDsl);
    RunResult ok = run("parse-check --system @" + good);
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("ok: system 'cli_good'") != std::string::npos);  // name from file stem
    CHECK(ok.output.find("H_int = ") != std::string::npos);

    std::string bad = write_temp("cli_bad.hoa",
                                 "mode A coherent(alpha);\nH = g*Ad^2*Bq + hc;\n");
    RunResult fail = run("parse-check --system @" + bad);
    CHECK(fail.exit_code == 1);
    CHECK(fail.output.find("parse error") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("frobnicate").exit_code == 1);
    CHECK(run("derive --system no_such_builtin").exit_code == 1);
    std::string cfg = write_temp("cli_empty_grid.json", R"({"g": []})");
    CHECK(run("sweep --system shg --config " + cfg).exit_code == 1);
}

TEST_CASE("config file mirrors command-line flags") {
    std::string cfg = write_temp("cli_cfg.json",
                                 R"({"system": "four_wave", "order": 1, "format": "json"})");
    RunResult r = run("derive --config " + cfg);
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.output);
    CHECK(j["system"] == "four_wave");
    CHECK(j["order"] == 1);
    CHECK(j["series"].size() == 2);
}

TEST_CASE("term ceiling exhaustion exits with the resource code") {
    RunResult r = run("derive --system six_wave --order 4", "HOA_TERM_CEILING=10 ");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("ceiling") != std::string::npos);
}
