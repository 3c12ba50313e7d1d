#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ibnet_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Result cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(IBNET_CLI_PATH) + " " + args + " 2>" + err.string() + " >/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("run writes a record and refuses to overwrite") {
  const auto d = scratch("run");
  put(d / "small.cfg", "n_banks = 10\nn_firms = 10\nmax_timesteps = 60\n");
  const std::string args = "run --config " + (d / "small.cfg").string() + " --seed 3 --out " + (d / "o").string();
  REQUIRE(cli(args, d).code == 0);
  const auto rec = nlohmann::json::parse(slurp(d / "o" / "run.json"));
  CHECK(rec["seed"] == 3);
  CHECK(rec["mode"] == "normal");
  CHECK(fs::exists(d / "o" / "events.log"));

  const auto again = cli(args, d);
  CHECK(again.code == 1);
  CHECK(again.err.find("--force") != std::string::npos);
  CHECK(cli(args + " --force", d).code == 0);
}

TEST_CASE("config and usage errors exit with 2") {
  const auto d = scratch("bad");
  put(d / "bad.cfg", "n_banks = 10\nbogus = 1\n");
  const auto r = cli("run --config " + (d / "bad.cfg").string() + " --out " + (d / "o").string(), d);
  CHECK(r.code == 2);
  CHECK(r.err.find("bogus") != std::string::npos);
  CHECK(cli("run --mode sideways --out " + (d / "o").string(), d).code == 2);
  CHECK(cli("launch", d).code == 2);
}

TEST_CASE("centrality snapshot") {
  const auto d = scratch("cen");
  put(d / "cap.csv", "bank,capital\n0,5\n1,5\n");
  put(d / "liab.csv", "borrower,lender,amount\n0,1,10\n");
  REQUIRE(cli("centrality --liabilities " + (d / "liab.csv").string() + " --capital " + (d / "cap.csv").string() +
                  " --out " + (d / "o").string(),
              d)
              .code == 0);
  const auto text = slurp(d / "o" / "centrality.csv");
  CHECK(text.rfind("bank_id,debtrank,katz,rank_debt,rank_katz\n", 0) == 0);

  put(d / "broken.csv", "0,1,10\n1,0,oops\n");
  const auto r = cli("centrality --liabilities " + (d / "broken.csv").string() + " --capital " +
                         (d / "cap.csv").string() + " --out " + (d / "o2").string(),
                     d);
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("small ensemble writes all outputs") {
  const auto d = scratch("ens");
  put(d / "small.cfg", "n_banks = 10\nn_firms = 10\nmax_timesteps = 120\n");
  REQUIRE(cli("ensemble --config " + (d / "small.cfg").string() + " --runs 3 --modes normal,fast --out " +
                  (d / "o").string(),
              d)
              .code == 0);
  const auto csv = slurp(d / "o" / "ensemble.csv");
  CHECK(csv.rfind("run_id,seed,mode,network,t_fd,censored,losses,cascade_size,efficiency,volume\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(fs::exists(d / "o" / "debtrank_profile_normal.csv"));
  CHECK(fs::exists(d / "o" / "debtrank_profile_fast.csv"));
  const auto summary = nlohmann::json::parse(slurp(d / "o" / "summary.json"));
  CHECK(summary.contains("fast"));
}
