#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "qdim/cli.hpp"

using nlohmann::json;
using doctest::Approx;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qdim::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const std::string e1 = fixtures::data_file("e1.json");
const std::string e2 = fixtures::data_file("e2.json");
const std::string e3 = fixtures::data_file("e3.json");

}  // namespace

TEST_CASE("qdim and beta reports") {
  const auto a = run({"qdim", "--system", e1, "--r", "2"});
  REQUIRE(a.code == 0);
  const auto j = json::parse(a.out);
  CHECK(j["kappa_r"].get<double>() == Approx(oracle::log2_over_log3()).epsilon(1e-9));
  CHECK(j["system_digest"].get<std::string>().size() == 16);
  CHECK(j["seed"].get<std::uint64_t>() == qdim::cli::kDefaultSeed);

  const auto b = run({"beta", "--system", e1, "--q", "1"});
  REQUIRE(b.code == 0);
  CHECK(std::abs(json::parse(b.out)["beta"].get<double>()) <= 1e-10);

  const auto p = run({"pressure", "--system", e1, "--q", "0", "--t", "1"});
  REQUIRE(p.code == 0);
  CHECK(json::parse(p.out)["pressure"].get<double>() == Approx(std::log(2.0 / 3.0)).epsilon(1e-12));

  const auto d = run({"dimh", "--system", fixtures::data_file("gauss2.json")});
  REQUIRE(d.code == 0);
  CHECK(json::parse(d.out)["dim_h"].get<double>() == Approx(0.5313).epsilon(1e-3));
  CHECK(json::parse(d.out)["assumptions"].size() == 1);
}

TEST_CASE("beta grid CSV") {
  const auto b = run({"beta", "--system", e2});
  REQUIRE(b.code == 0);
  std::istringstream in(b.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "q,beta_q");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 21);
}

TEST_CASE("CSV files come with a JSON sidecar") {
  const auto dir = std::filesystem::temp_directory_path() / "qdim_cli_test";
  std::filesystem::create_directories(dir);
  const auto out = (dir / "sweep.csv").string();
  const auto s = run({"sweep", "--system", e3, "--r", "2", "--m-list", "1,2,4", "--out", out});
  REQUIRE(s.code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("M,kappa_rM,degenerate\n1,0,1\n", 0) == 0);
  const auto side = json::parse(slurp(out + ".json"));
  CHECK(side["nondecreasing"].get<bool>());
  CHECK(side["command"] == "sweep");

  const auto fig = (dir / "fig.csv").string();
  REQUIRE(run({"figure1", "--system", e2, "--r", "2", "--out", fig}).code == 0);
  CHECK(slurp(fig).rfind("q,beta,line,chord,legendre_alpha,legendre_f,intercept\n", 0) == 0);
  CHECK(json::parse(slurp(fig + ".json"))["intercept"].get<double>() == Approx(0.6125).epsilon(1e-3));
  std::filesystem::remove_all(dir);
}

TEST_CASE("sample and quantize are reproducible") {
  const std::vector<std::string> args{"quantize", "--system", e1, "--r", "2", "--n-list", "2,4",
                                      "--samples", "5000", "--seed", "17"};
  const auto a = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == run(args).out);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  CHECK(run(threaded).out == a.out);
  CHECK(a.out.rfind("n,r,V_hat,e_hat,D_running\n", 0) == 0);

  const auto s1 = run({"sample", "--system", e2, "--samples", "100", "--seed", "1"});
  const auto s2 = run({"sample", "--system", e2, "--samples", "100", "--seed", "2"});
  REQUIRE(s1.code == 0);
  CHECK(s1.out != s2.out);
}

TEST_CASE("verify: pass, determinism and gap exit code") {
  const std::vector<std::string> args{"verify", "--system", e1, "--r", "2", "--n-list", "4,8,16,32",
                                      "--samples", "20000"};
  const auto a = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == run(args).out);
  const auto j = json::parse(a.out);
  CHECK(j["pass"].get<bool>());

  auto strict = args;
  strict.insert(strict.end(), {"--gap", "1e-9"});
  CHECK(run(strict).code == qdim::cli::kVerificationGap);
}

TEST_CASE("exit codes for malformed input and numerical failure") {
  CHECK(run({"qdim", "--system", "/nonexistent.json", "--r", "2"}).code == qdim::cli::kMalformedSpec);
  CHECK(run({"qdim", "--system", e1}).code == qdim::cli::kMalformedSpec);
  CHECK(run({"frobnicate", "--system", e1}).code == qdim::cli::kMalformedSpec);
  CHECK(run({"qdim", "--system", e1, "--r", "-1"}).code == qdim::cli::kMalformedSpec);
  // Sampling takes one truncation, not a list.
  CHECK(run({"sample", "--system", e3, "--samples", "10", "--depth", "3", "--m-list", "2,3"}).code ==
        qdim::cli::kMalformedSpec);
  // A non-summable family has no finite pressure to normalize.
  const auto bad = (std::filesystem::temp_directory_path() / "qdim_divergent.json").string();
  {
    std::ofstream f(bad);
    f << R"({"domain":[0,1],"kind":"gauss","infinite":{"family":"gauss","tail":{"c":1,"p":2}},)"
         R"("potential":{"kind":"derivative","s":0.4}})";
  }
  CHECK(run({"qdim", "--system", bad, "--r", "2"}).code == qdim::cli::kNumericalFailure);
  std::filesystem::remove(bad);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("verify") != std::string::npos);
}
