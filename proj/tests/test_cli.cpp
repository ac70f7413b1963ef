#include <doctest.h>

#include <stdexcept>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + UNIREG_CLI + "\" " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::current_path() / "cli_scratch";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("help and bad input exit codes") {
    CHECK(run_cli("--help >/dev/null") == 0);
    CHECK(run_cli("tune --method pid --quiet --out /dev/null") == 2);
    CHECK(run_cli("simulate --episodes 0 --out /dev/null") == 2);
    CHECK(run_cli("simulate --no-such-flag") == 2);
    CHECK(run_cli("simulate --K 5 --N 1 --out /dev/null") == 2);
}

TEST_CASE("simulate and tune write deterministic CSVs") {
    const auto a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.csv");
    REQUIRE(run_cli("tune --method shc-ase --episodes 3 --seed 7 --quiet --out " + a.string()) == 0);
    REQUIRE(run_cli("tune --method shc-ase --episodes 3 --seed 7 --quiet --out " + b.string()) == 0);
    REQUIRE(run_cli("tune --method shc-ase --episodes 3 --seed 8 --quiet --out " + c.string()) == 0);
    const auto text = slurp(a);
    CHECK(text.rfind("episode,k,t,r,x,u,e,K,N,branch_tag", 0) == 0);
    CHECK(text == slurp(b));
    CHECK(text != slurp(c));
}

TEST_CASE("every tuning method runs") {
    for (const char* method : {"gss", "gss2d", "shc", "shc-ase"}) {
        INFO(method);
        CHECK(run_cli(std::string("tune --method ") + method +
                      " --episodes 2 --quiet --out /dev/null") == 0);
    }
}

TEST_CASE("JSON config supplies defaults and flags override it") {
    const auto cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"K": 50, "N": 100, "episodes": 2, "trajectory": "versine"})";
    const auto from_json = scratch("json.csv"), overridden = scratch("flag.csv");
    REQUIRE(run_cli("simulate --quiet --config " + cfg.string() + " --out " + from_json.string()) == 0);
    REQUIRE(run_cli("simulate --quiet --config " + cfg.string() + " --K 40 --out " +
                    overridden.string()) == 0);
    std::istringstream json_rows(slurp(from_json)), flag_rows(slurp(overridden));
    std::string header, row_json, row_flag;
    std::getline(json_rows, header);
    std::getline(json_rows, row_json);
    std::getline(flag_rows, header);
    std::getline(flag_rows, row_flag);
    CHECK(row_json.ends_with(",50,100"));
    CHECK(row_flag.ends_with(",40,100"));

    std::ofstream(cfg) << R"({"bogus": 1})";
    CHECK(run_cli("simulate --config " + cfg.string() + " --out /dev/null") == 2);
    std::ofstream(cfg) << "{not json";
    CHECK(run_cli("simulate --config " + cfg.string() + " --out /dev/null") == 2);
}

TEST_CASE("traj writes k,t,r") {
    const auto out = scratch("traj.csv");
    REQUIRE(run_cli("traj --trajectory rectangular --steps 4 --out " + out.string()) == 0);
    CHECK(slurp(out) == "k,t,r\n0,0,0\n1,0.10000000000000001,1\n2,0.20000000000000001,1\n"
                        "3,0.30000000000000004,1\n");
}

TEST_CASE("divergence gives exit code 1") {
    CHECK(run_cli("simulate --K 100 --N 600 --divergence-factor 0.5 --quiet --out /dev/null") == 1);
}

TEST_CASE("compare is the same in parallel and in sequence") {
    const auto par = scratch("par.csv"), seq = scratch("seq.csv");
    const auto dir = scratch("per_method");
    fs::create_directories(dir);
    REQUIRE(run_cli("compare --episodes 3 --seed 5 --out " + par.string() + " --out-dir " +
                    dir.string()) == 0);
    REQUIRE(run_cli("compare --episodes 3 --seed 5 --sequential --out " + seq.string()) == 0);
    CHECK(slurp(par) == slurp(seq));
    for (const char* m : {"fixed", "gss", "gss2d", "shc", "shc-ase"}) {
        CHECK(fs::exists(dir / (std::string(m) + ".csv")));
    }
}

TEST_CASE("SVG output") {
    const auto svg = scratch("run.svg");
    REQUIRE(run_cli("tune --method shc-ase --episodes 2 --quiet --out /dev/null --svg " +
                    svg.string()) == 0);
    CHECK(slurp(svg).find("</svg>") != std::string::npos);
}
