#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "unireg/csv.hpp"
#include "unireg/svg.hpp"

using namespace unireg;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

}  // namespace

TEST_CASE("format_number round trips doubles") {
    Gen gen(71);
    for (int i = 0; i < 20000; ++i) {
        const double v = gen.coin() ? gen.uniform(-1e6, 1e6) : std::ldexp(gen.uniform(-1, 1), gen.integer(-300, 300));
        REQUIRE(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(42.0) == "42");
}

TEST_CASE("session CSV layout and round trip") {
    SessionConfig cfg;
    cfg.episodes = 2;
    const auto res = run_adaptive_session(cfg);
    std::ostringstream out;
    write_session_csv(out, res.logs, true);
    const auto rows = lines(out.str());
    REQUIRE(rows.front() == "episode,k,t,r,x,u,e,K,N,branch_tag,omega,xi,omega_draw");
    REQUIRE(rows.size() == 1 + res.logs[0].size() + res.logs[1].size());

    std::size_t row = 1;
    int evaluated = 0;
    for (const auto& log : res.logs) {
        for (const auto& rec : log.records) {
            const auto f = split(rows[row++]);
            REQUIRE(f.size() == 13);
            REQUIRE(std::stoi(f[0]) == log.episode);
            REQUIRE(std::stoll(f[1]) == rec.k);
            REQUIRE(std::strtod(f[4].c_str(), nullptr) == rec.x);
            REQUIRE(std::strtod(f[5].c_str(), nullptr) == rec.u);
            REQUIRE(std::strtod(f[6].c_str(), nullptr) == rec.e);
            REQUIRE(std::strtod(f[7].c_str(), nullptr) == rec.K);
            REQUIRE(std::strtod(f[8].c_str(), nullptr) == rec.N);
            REQUIRE(f[9].empty() == !rec.ase.has_value());
            if (rec.ase && rec.ase->omega) {
                ++evaluated;
                REQUIRE(std::strtod(f[10].c_str(), nullptr) == *rec.ase->omega);
            }
        }
    }
    CHECK(evaluated > 0);
}

TEST_CASE("session CSV without ASE columns") {
    SessionConfig cfg;
    cfg.method = TuningMethod::Fixed;
    cfg.episodes = 1;
    std::ostringstream out;
    write_session_csv(out, run_adaptive_session(cfg).logs, false);
    const auto rows = lines(out.str());
    CHECK(rows.front() == "episode,k,t,r,x,u,e,K,N");
    CHECK(split(rows[1]).size() == 9);
}

TEST_CASE("trajectory CSV") {
    const auto traj = TrajectorySpec::rectangular(100.0, 0.1);
    std::ostringstream out;
    write_trajectory_csv(out, traj, 5);
    const auto rows = lines(out.str());
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "k,t,r");
    for (int k = 0; k < 5; ++k) {
        const auto f = split(rows[k + 1]);
        CHECK(std::stoi(f[0]) == k);
        CHECK(std::strtod(f[2].c_str(), nullptr) == traj(k));
    }
}

TEST_CASE("SVG has three panels and all series") {
    SessionConfig cfg;
    cfg.episodes = 3;
    std::ostringstream out;
    write_session_svg(out, run_adaptive_session(cfg).logs, "demo <run>");
    const auto svg = out.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t polylines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) {
        ++polylines;
    }
    CHECK(polylines == 5);
    CHECK(svg.find("Gains at episode end") != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("SVG of an empty session is still well formed") {
    std::ostringstream out;
    write_session_svg(out, {}, "empty");
    CHECK(out.str().find("</svg>") != std::string::npos);
}

TEST_CASE("SVG escapes the title") {
    std::ostringstream out;
    write_session_svg(out, {}, "a<b & c");
    CHECK(out.str().find("a&lt;b &amp; c") != std::string::npos);
}
