#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conekit/reports.hpp"

#ifndef CONEKIT_CLI_PATH
#error "CONEKIT_CLI_PATH must point at the CLI binary"
#endif

using namespace conekit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stdout only unless the arguments redirect stderr themselves.
Run cli(const std::string& args) {
  const std::string cmd = std::string(CONEKIT_CLI_PATH) + " " + args;
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("conekit_cli_test_" + name);
  fs::remove_all(p);
  return p.string();
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("enumerate") {
  SUBCASE("CP1 up to p = 3") {
    const Run r = cli("enumerate --base cp 1 --pmax 3");
    CHECK(r.code == 0);
    CHECK(r.out.find("2    3    small1") != std::string::npos);
    CHECK(r.out.find("3    4    small2") != std::string::npos);
    CHECK(r.out.find("2    3    canonical  1") != std::string::npos);
    CHECK(r.out.find("pI/2<k<pI empty") != std::string::npos);
  }
  SUBCASE("CP2 up to p = 1") {
    const Run r = cli("enumerate --base cp 2 --pmax 1");
    CHECK(r.code == 0);
    CHECK(r.out.find("# 1 admissible") != std::string::npos);
  }
}

TEST_CASE("solve") {
  SUBCASE("flagship record") {
    const Run r = cli("solve --base cp 1 --p 2 --k 3 --case small1");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["version"] == "1");
    const RootSolution rs = solve_family({1, 2, 2, 3, ResolutionCase::SmallResolutionI, 0});
    CHECK(solution_from_json(j["solution"]) == rs);
  }
  SUBCASE("inadmissible family") {
    const Run r = cli("solve --base cp 1 --p 2 --k 2");
    CHECK(r.code == 2);
    const json j = json::parse(r.out);
    CHECK(j["error"] == "inadmissible");
    CHECK(j["message"] == "pI/2 < k violated");
  }
  SUBCASE("usage errors") {
    CHECK(cli("solve --no-such-flag 2>/dev/null").code == 2);
    CHECK(cli("2>/dev/null").code == 2);
    const Run r = cli("verify --suite nope --out " + scratch("nope"));
    CHECK(r.code == 2);
    CHECK(json::parse(r.out)["error"] == "usage");
  }
}

TEST_CASE("config files and flags") {
  const std::string dir = scratch("config");
  fs::create_directories(dir);
  const std::string path = dir + "/run.json";
  std::ofstream(path) << R"({"version": "1", "base": "cp 1", "p": 3, "k": 4, "case": "small2"})";
  const json j = json::parse(cli("solve --config " + path).out);
  CHECK(j["family"]["case"] == "small2");
  const json k = json::parse(cli("solve --config " + path + " --k 5 --case small1").out);
  CHECK(k["family"]["k"] == 5);
  std::ofstream(path) << R"({"p": 3})";
  CHECK(cli("solve --config " + path).code == 2);
}

TEST_CASE("verify") {
  SUBCASE("lemma suite is routed by --n") {
    const std::string out = scratch("lemmas");
    const Run r = cli("verify --suite lemmas --n 1 --out " + out);
    CHECK(r.code == 0);
    std::ifstream f(out + "/lemmas.json");
    const json j = json::parse(f);
    CHECK(j["suite"] == "lemmas");
    CHECK(j["pass"] == true);
    CHECK(fs::exists(out + "/summary.json"));
  }
  SUBCASE("a perturbed mu fails with exit 1") {
    const std::string out = scratch("perturbed");
    const Run r = cli("verify --suite ricci --perturb-mu 1e-3 --interior-points 5 --out " + out + " 2>&1");
    CHECK(r.code == 1);
    CHECK(r.out.find("verification failed; worst suite: ricci") != std::string::npos);
  }
}

TEST_CASE("profile") {
  const std::string out = scratch("profile");
  REQUIRE(cli("profile --base cp 1 --p 2 --k 3 --out " + out).code == 0);
  const RootSolution rs = solve_family({1, 2, 2, 3, ResolutionCase::SmallResolutionI, 0});
  SUBCASE("Y vanishes at both ends of its interval") {
    const auto y = read_csv(out + "/Y.csv");
    REQUIRE(y.size() == 201);
    CHECK(y.front()[0] == rs.y1);
    CHECK(y.back()[0] == rs.y2);
    CHECK(std::abs(y.front()[1]) < 1e-14);
    CHECK(std::abs(y.back()[1]) < 1e-14);
    for (std::size_t i = 1; i + 1 < y.size(); ++i) CHECK(y[i][1] > 0.0);
  }
  SUBCASE("X vanishes at the collapse root") {
    const auto x = read_csv(out + "/X.csv");
    CHECK(x.front()[0] == rs.x_star);
    CHECK(std::abs(x.front()[1]) < 1e-14);
  }
  SUBCASE("Q runs from 1 to 2 and R = 1 - Q") {
    const auto q = read_csv(out + "/Q.csv");
    const auto r = read_csv(out + "/R.csv");
    REQUIRE(q.size() == r.size());
    CHECK(std::abs(q.front()[1] - 1.0) < 1e-4);
    CHECK(std::abs(q.back()[1] - 2.0) < 1e-4);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(q[i][1] + r[i][1] - 1.0) < 1e-12);
  }
  SUBCASE("fibre curves reach the coordinate axes") {
    const auto c = read_csv(out + "/fibre_curves.csv");
    REQUIRE(c.size() == 12 * 41);
    for (const auto& row : c) {
      CHECK(row[3] >= 0.0);
      CHECK(row[4] >= 0.0);
    }
    // constant-x curves end at y = y2 where R1 = 0; constant-y curves start at x = y1 where R2 = 0
    for (int k = 0; k < 6; ++k) CHECK(c[static_cast<std::size_t>(41 * k + 40)][3] == 0.0);
    for (int k = 6; k < 12; ++k) CHECK(c[static_cast<std::size_t>(41 * k)][4] == 0.0);
  }
  SUBCASE("cone deviation decreases") {
    const auto e = read_csv(out + "/cone_deviation.csv");
    REQUIRE(e.size() == 4);
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i][1] < e[i - 1][1]);
  }
}
