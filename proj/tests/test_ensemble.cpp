#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "ibnet/ensemble.hpp"

using namespace ibnet;

namespace {

EnsembleConfig small() {
  EnsembleConfig cfg;
  cfg.params.n_banks = cfg.params.n_firms = 10;
  cfg.params.max_timesteps = 150;
  cfg.n_runs = 6;
  cfg.base_seed = 40;
  return cfg;
}

}  // namespace

TEST_CASE("paired and unpaired seeds") {
  auto cfg = small();
  CHECK(ensemble_seed(cfg, 3, 0) == ensemble_seed(cfg, 3, 1));
  cfg.unpaired = true;
  CHECK(ensemble_seed(cfg, 3, 0) == 43);
  CHECK(ensemble_seed(cfg, 3, 1) == 49);
}

TEST_CASE("ensemble rows are independent of the worker count") {
  auto cfg = small();
  cfg.threads = 1;
  const auto a = run_ensemble(cfg);
  cfg.threads = 3;
  const auto b = run_ensemble(cfg);
  REQUIRE(a.size() == 12u);
  REQUIRE(b.size() == 12u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].run_id == static_cast<int>(k / 2));
    CHECK(a[k].record.seed == b[k].record.seed);
    CHECK(a[k].record.t_fd == b[k].record.t_fd);
    CHECK(a[k].record.losses == b[k].record.losses);
  }
  CHECK(records_for(a, cfg.modes[1]).size() == 6u);

  std::ostringstream csv;
  write_ensemble_csv(csv, a);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "run_id,seed,mode,network,t_fd,censored,losses,cascade_size,efficiency,volume");

  std::ostringstream js;
  write_summary_json(js, a, cfg.modes);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc.contains("normal"));
  CHECK(doc["transparent"]["t_fd"].contains("kurtosis"));
}

TEST_CASE("censored runs leave empty cells") {
  EnsembleTable t(1);
  t[0].record.policy = {};
  t[0].record.efficiency = 1.0;
  std::ostringstream csv;
  write_ensemble_csv(csv, t);
  CHECK(csv.str().find("\n0,0,normal,complete,,1,0,0,1,\n") != std::string::npos);
  std::ostringstream prof;
  write_profile_csv(prof, t, {});
  CHECK(prof.str() == "run_id,bank_rank_position,normalized_debtrank\n");
}

TEST_CASE("histogram bins") {
  const auto h = histogram({0.0, 4.9, 5.0, 12.0}, 5.0);
  CHECK(h.edges == std::vector<double>{0, 5, 10, 15});
  CHECK(h.counts == std::vector<long>{2, 1, 1});
  const auto shifted = histogram({11.0, 12.0}, 5.0);
  CHECK(shifted.edges.front() == 10.0);
  CHECK(shifted.counts == std::vector<long>{2});
  CHECK(histogram({1, 1, 1}, 1.0).counts == std::vector<long>{3});
  CHECK_THROWS_AS(histogram({1}, 0.0), std::invalid_argument);
}
