#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "liesym/cli.hpp"

using namespace liesym;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json run_json(std::vector<std::string> args) {
  args.push_back("--json");
  auto r = run(args);
  REQUIRE(r.code == 0);
  return nlohmann::json::parse(r.out);
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("lie_reduce_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"nonsense"}).code == cli::kUsage);
  CHECK(run({"verify", "--model", "nope"}).code == cli::kUsage);
  CHECK(run({"verify"}).code == cli::kUsage);
  CHECK(run({"verify", "--model", "heat", "--bogus"}).code == cli::kUsage);
  CHECK(run({"reduce", "--model", "heston", "--ansatz", "b1"}).code == cli::kUsage);
  CHECK(run({"reduce", "--model", "heston", "--kappa1", "1+"}).code == cli::kUsage);
  CHECK(run({"figures", "7", "--out", scratch("badfig").string()}).code == cli::kUsage);
  CHECK(run({"verify", "--model", "heat", "--params", "/nonexistent.json"}).code == cli::kUsage);
  auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("figures") != std::string::npos);
}

TEST_CASE("verify") {
  auto stein = run({"verify", "--model", "stein-stein"});
  CHECK(stein.code == 0);
  CHECK(stein.out.find("3/3 generators pass") != std::string::npos);

  auto heat = run_json({"verify", "--model", "heat"});
  CHECK(heat["verified"] == 6);
  CHECK(heat["passed"] == true);

  auto cv = run_json({"verify", "--model", "const-vol"});
  CHECK(cv["verified"] == 6);
  CHECK(cv["printed_passed"] == 4);
  CHECK(cv["diffs"].size() == 2);
}

TEST_CASE("classify") {
  CHECK(run_json({"classify", "--model", "generic-f"})["dimension"] == 3);
  CHECK(run_json({"classify", "--model", "const-vol"})["dimension"] == 6);
  auto bsm = run({"classify", "--model", "bsm"});
  CHECK(bsm.code == 0);
  CHECK(bsm.out.find("dimension 6") != std::string::npos);
}

TEST_CASE("brackets") {
  auto dir = scratch("brackets");
  auto r = run({"brackets", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("[Xbar2, Xbar4] = 2*Xu") != std::string::npos);
  auto j = nlohmann::json::parse(slurp(dir / "brackets_const-vol.json"));
  CHECK(j["model"] == "const-vol");
}

TEST_CASE("reduce") {
  auto heston = run_json({"reduce", "--model", "heston"});
  CHECK(heston["diffs"].size() == 2);
  CHECK(heston["ode"].contains("a"));

  auto stein = run_json({"reduce", "--model", "stein-stein", "--kappa1", "1", "--kappa2", "1/2"});
  CHECK(stein["diffs"].size() == 1);

  auto c2 = run_json({"reduce", "--model", "const-vol", "--ansatz", "c2"});
  CHECK(c2.contains("ode1"));

  auto y12 = run_json({"reduce", "--model", "generic-f", "--ansatz", "y12", "--c", "0"});
  CHECK(y12["variables"] == nlohmann::json({"z", "y"}));

  SUBCASE("params file") {
    auto dir = scratch("params");
    std::ofstream(dir / "p.json") << R"({"model": "stein-stein", "params": {"beta": 0.5, "r": 0.5, "alpha": 0.3,
      "m": 1, "gamma0": 0, "rho": 0}})";
    auto j = run_json({"reduce", "--params", (dir / "p.json").string(), "--kappa1", "1", "--kappa2", "1/2"});
    CHECK(j["model"] == "stein-stein");
    CHECK(j["ode"]["a"] == "1/4");
    std::ofstream(dir / "bad.json") << R"({"model": "stein-stein", "params": {"rho": 2}})";
    CHECK(run({"verify", "--params", (dir / "bad.json").string()}).code == cli::kUsage);
  }
}

TEST_CASE("figures write twelve CSV files, byte-identical across runs") {
  auto a = scratch("fig_a"), b = scratch("fig_b");
  auto r = run({"figures", "--figure", "1", "--out", a.string(), "--seed", "3"});
  REQUIRE(r.code == 0);
  CHECK(run({"figures", "1", "--out", b.string(), "--seed", "3"}).code == 0);
  for (int k = 1; k <= 12; ++k) {
    auto name = "fig1_curve" + std::to_string(k) + ".csv";
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(!fs::exists(a / "fig1_curve13.csv"));
  auto summary = nlohmann::json::parse(slurp(a / "figures_summary.json"));
  CHECK(summary["curves"].size() == 12);
  for (const auto& c : summary["curves"]) CHECK(c["passed"] == true);
  CHECK(slurp(a / "figures_summary.json") == slurp(b / "figures_summary.json"));
}
