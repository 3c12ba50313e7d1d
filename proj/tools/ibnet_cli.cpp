// ibnet: run single simulations, ensembles, and centrality snapshots.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ibnet/csv.hpp"
#include "ibnet/engine.hpp"
#include "ibnet/ensemble.hpp"
#include "ibnet/params.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  fs::path dir;
  bool force = false;

  fs::path prepare(const std::string& name) const {
    fs::create_directories(dir);
    fs::path p = dir / name;
    if (fs::exists(p) && !force)
      throw std::runtime_error("refusing to overwrite " + p.string() + " (pass --force)");
    return p;
  }

  template <typename F>
  void write(const std::string& name, F body) const {
    const fs::path p = prepare(name);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    body(out);
    if (!out) throw std::runtime_error("write failed: " + p.string());
  }
};

ordered_json to_json(const ibnet::RunRecord& r) {
  ordered_json j;
  j["seed"] = r.seed;
  j["mode"] = ibnet::to_string(r.policy);
  j["network"] = ibnet::to_string(r.network);
  j["t_fd"] = r.t_fd ? ordered_json(*r.t_fd) : ordered_json(nullptr);
  j["censored"] = r.censored();
  j["losses"] = r.losses;
  j["cascade_size"] = r.cascade_size;
  j["efficiency"] = r.efficiency ? ordered_json(*r.efficiency) : ordered_json(nullptr);
  j["volume"] = r.volume ? ordered_json(*r.volume) : ordered_json(nullptr);
  j["debtrank_profile"] = r.debtrank_profile;
  if (r.failed) j["error"] = r.error;
  return j;
}

ibnet::SimParams base_params(const std::string& config) {
  return config.empty() ? ibnet::SimParams{} : ibnet::load_config(config);
}

ibnet::ModePolicy policy_arg(const std::string& s) {
  try {
    return ibnet::parse_policy(s);
  } catch (const std::invalid_argument& e) {
    throw ibnet::ConfigError({"mode"}, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interbank network simulator"};
  app.require_subcommand(1);

  std::string config, out_dir = "out", mode, network, modes_list;
  std::uint64_t seed = 1;
  int runs = 0;
  bool force = false, unpaired = false, paper_scale = false;

  auto* run = app.add_subcommand("run", "simulate one run; writes run.json and events.log");
  run->add_option("--config", config, "config file (key = value lines)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "run seed");
  run->add_option("--mode", mode, "normal|transparent|fast, optional -katz suffix");
  run->add_option("--network", network, "complete|er:GAMMA|ba:M");
  run->add_flag("--force", force, "overwrite existing outputs");

  auto* ens = app.add_subcommand("ensemble", "paired ensemble; writes ensemble.csv, profiles and summary.json");
  ens->add_option("--config", config, "config file (key = value lines)");
  ens->add_option("--out", out_dir, "output directory");
  ens->add_option("--seed", seed, "base seed; run k uses seed + k");
  ens->add_option("--runs", runs, "number of runs per mode");
  ens->add_option("--mode", mode, "compare normal against this mode");
  ens->add_option("--modes", modes_list, "comma-separated list of modes");
  ens->add_option("--network", network, "complete|er:GAMMA|ba:M");
  ens->add_flag("--unpaired", unpaired, "disjoint seed ranges per mode");
  ens->add_flag("--paper-scale", paper_scale, "10000 runs with 100 banks");
  ens->add_flag("--force", force, "overwrite existing outputs");

  std::string liabilities, capital;
  auto* cen = app.add_subcommand("centrality", "score a liability snapshot; writes centrality.csv");
  cen->add_option("--liabilities", liabilities, "CSV rows borrower,lender,amount")->required();
  cen->add_option("--capital", capital, "CSV rows bank,capital")->required();
  cen->add_option("--out", out_dir, "output directory");
  cen->add_flag("--force", force, "overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  const Output output{out_dir, force};
  try {
    if (*run) {
      ibnet::SimParams p = base_params(config);
      if (!mode.empty()) {
        const auto pol = policy_arg(mode);
        p.mode = pol.mode;
        p.rank_metric = pol.metric;
      }
      if (!network.empty()) p.network_kind = ibnet::parse_network_kind(network);
      ibnet::validate(p);
      ibnet::WorldState w = ibnet::init_world(p, seed);
      w.log_events = true;
      const ibnet::RunRecord rec = ibnet::run_world(w);
      output.write("run.json", [&](std::ostream& o) { o << to_json(rec).dump(2) << '\n'; });
      output.write("events.log", [&](std::ostream& o) { ibnet::write_events(o, w.events); });
      return exit_ok;
    }

    if (*ens) {
      ibnet::EnsembleConfig cfg;
      cfg.params = base_params(config);
      if (config.empty()) cfg.params.n_banks = cfg.params.n_firms = 50;
      cfg.n_runs = 1000;
      if (paper_scale) {
        cfg.params.n_banks = cfg.params.n_firms = 100;
        cfg.n_runs = 10000;
      }
      if (runs > 0) cfg.n_runs = runs;
      if (!network.empty()) cfg.params.network_kind = ibnet::parse_network_kind(network);
      cfg.base_seed = seed;
      cfg.unpaired = unpaired;
      if (!modes_list.empty()) {
        cfg.modes.clear();
        std::stringstream ss(modes_list);
        for (std::string m; std::getline(ss, m, ',');) cfg.modes.push_back(policy_arg(m));
      } else if (!mode.empty()) {
        cfg.modes = {{ibnet::Mode::Normal, ibnet::RankMetric::DebtRank}, policy_arg(mode)};
      }
      ibnet::validate(cfg.params);
      // refuse before spending time on the runs
      output.prepare("ensemble.csv");
      const auto table = ibnet::run_ensemble(cfg);
      output.write("ensemble.csv", [&](std::ostream& o) { ibnet::write_ensemble_csv(o, table); });
      for (const auto& m : cfg.modes)
        output.write("debtrank_profile_" + ibnet::to_string(m) + ".csv",
                     [&](std::ostream& o) { ibnet::write_profile_csv(o, table, m); });
      output.write("summary.json", [&](std::ostream& o) { ibnet::write_summary_json(o, table, cfg.modes); });
      long failed = 0;
      for (const auto& row : table) failed += row.record.failed ? 1 : 0;
      if (failed > 0) std::cerr << "warning: " << failed << " runs failed (see summary.json)\n";
      return exit_ok;
    }

    if (*cen) {
      std::ifstream cap_in(capital), liab_in(liabilities);
      if (!cap_in) throw UsageError("cannot read " + capital);
      if (!liab_in) throw UsageError("cannot read " + liabilities);
      Eigen::VectorXd C;
      try {
        C = ibnet::read_capital_csv(cap_in);
      } catch (const ibnet::CsvError& e) {
        throw UsageError(capital + ": " + e.what());
      }
      Eigen::MatrixXd L;
      try {
        L = ibnet::read_liability_csv(liab_in, static_cast<int>(C.size()));
      } catch (const ibnet::CsvError& e) {
        throw UsageError(liabilities + ": " + e.what());
      }
      output.write("centrality.csv", [&](std::ostream& o) { ibnet::write_centrality_csv(o, L, C); });
      return exit_ok;
    }
  } catch (const ibnet::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_failure;
}
