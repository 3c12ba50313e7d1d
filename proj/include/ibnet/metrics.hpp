#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ibnet/params.hpp"
#include "ibnet/world.hpp"

namespace ibnet {

/// Outcome of a bank-default cascade within one timestep.
struct CascadeReport {
  int trigger_bank = -1;
  std::vector<int> defaulted_banks;  // in default order, trigger first
  int t0 = 0;
  Eigen::VectorXd capital_before;  // equity at the end of t0 - 1
  Eigen::VectorXd capital_after;   // equity after the cascade resolved
};

/// Observables of one simulation run.
struct RunRecord {
  std::uint64_t seed = 0;
  ModePolicy policy;
  NetworkKind network;
  std::optional<int> t_fd;  // empty when no bank defaulted by T_max (censored)
  double losses = 0.0;
  int cascade_size = 0;
  std::optional<double> efficiency;
  std::optional<double> volume;
  /// Normalized DebtRank at the profile timestep, sorted descending; empty
  /// if the run ended earlier.
  std::vector<double> debtrank_profile;
  bool failed = false;
  std::string error;

  bool censored() const { return !t_fd.has_value(); }
};

/// -sum_i [C_i(t0) - C_i(t0 - 1)] over all banks.
double losses(const CascadeReport& report);
int cascade_size(const CascadeReport& report);

/// Time average of E(t) = sum granted / sum requested; timesteps without
/// requests are skipped. Empty when no timestep had a request.
std::optional<double> efficiency(std::span<const double> requested, std::span<const double> granted);

/// IB loans issued at T plus those issued at T - tau (repaid at T), read from
/// the event log. Empty when the run did not complete timestep T.
std::optional<double> transaction_volume(const std::vector<Event>& events, int T, int tau, bool completed = true);

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;                  // sample standard deviation
  std::optional<double> skewness;   // empty when sd == 0
  std::optional<double> kurtosis;   // Pearson (non-excess): 3 for a Gaussian
};

/// Throws std::invalid_argument for fewer than two values.
SummaryStats summary_stats(std::span<const double> values);

/// Linear-interpolated quantile (q in [0,1]) of an unsorted sample.
double quantile(std::vector<double> values, double q);

/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace ibnet
