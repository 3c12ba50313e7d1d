#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ibnet/engine.hpp"
#include "ibnet/metrics.hpp"
#include "ibnet/params.hpp"

namespace ibnet {

struct EnsembleConfig {
  SimParams params;
  int n_runs = 1000;
  std::uint64_t base_seed = 1;
  std::vector<ModePolicy> modes{{Mode::Normal, RankMetric::DebtRank}, {Mode::Transparent, RankMetric::DebtRank}};
  /// Give every mode its own seed range instead of sharing seeds run by run.
  bool unpaired = false;
  /// Worker count; 0 means hardware concurrency capped by SIM_THREADS.
  int threads = 0;
  RunOptions options;
};

struct EnsembleRow {
  int run_id = 0;
  RunRecord record;
};

/// Rows ordered by run index, then by the position of the mode in cfg.modes.
using EnsembleTable = std::vector<EnsembleRow>;

/// Seed of run k under mode number m.
std::uint64_t ensemble_seed(const EnsembleConfig& cfg, int run, std::size_t mode_index);

/// Worker count honoring SIM_THREADS.
int default_thread_count();

EnsembleTable run_ensemble(const EnsembleConfig& cfg);

/// Rows of a single mode, in run order.
std::vector<RunRecord> records_for(const EnsembleTable& table, const ModePolicy& policy);

struct Histogram {
  std::vector<double> edges;  // counts.size() + 1 bin edges
  std::vector<long> counts;
};

/// Left-closed bins [k w, (k+1) w) from 0 up to the bin holding the largest
/// value; leading empty bins are dropped.
Histogram histogram(const std::vector<double>& values, double bin_width);

inline constexpr const char* ensemble_csv_header =
    "run_id,seed,mode,network,t_fd,censored,losses,cascade_size,efficiency,volume";
inline constexpr const char* profile_csv_header = "run_id,bank_rank_position,normalized_debtrank";

void write_ensemble_csv(std::ostream& out, const EnsembleTable& table);
/// Profiles of the rows running `policy`; runs without a profile are skipped.
void write_profile_csv(std::ostream& out, const EnsembleTable& table, const ModePolicy& policy);
/// mean/sd/skewness/kurtosis of t_fd, losses, cascade_size, efficiency and
/// volume per mode, as JSON. Undefined moments are null.
void write_summary_json(std::ostream& out, const EnsembleTable& table, const std::vector<ModePolicy>& modes);

}  // namespace ibnet
