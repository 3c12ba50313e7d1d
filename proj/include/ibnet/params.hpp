#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibnet {

enum class Mode { Normal, Transparent, Fast };
enum class RankMetric { DebtRank, Katz };

/// Counterparty-ordering regime of the interbank market. The metric is
/// ignored in normal mode.
struct ModePolicy {
  Mode mode = Mode::Normal;
  RankMetric metric = RankMetric::DebtRank;

  friend bool operator==(const ModePolicy&, const ModePolicy&) = default;
};

/// Topology of the interbank relation network.
struct NetworkKind {
  enum class Type { Complete, ER, BA };
  Type type = Type::Complete;
  double edge_prob = 0.0;  // ER only
  int attach = 0;          // BA only

  static NetworkKind complete() { return {}; }
  static NetworkKind er(double gamma) { return {Type::ER, gamma, 0}; }
  static NetworkKind ba(int m) { return {Type::BA, 0.0, m}; }

  friend bool operator==(const NetworkKind&, const NetworkKind&) = default;
};

/// All model parameters of one simulation run. Keys in the config file
/// are exactly the member names.
struct SimParams {
  int n_banks = 100;
  int n_firms = 100;
  int max_timesteps = 500;
  int tau = 10;
  double r_ib = 0.01;
  double r_floan = 0.02;
  double r_h = 0.002;
  double r_fdeposit = 0.002;
  double loan_request_max = 20.0;
  double invest_fraction = 0.5;
  double deposit_fraction = 0.5;
  double consumption_dispersion = 0.5;
  double firm_return_mean = 0.0;
  /// Firm i gets firm_return_mean + spread * (2 i / (F - 1) - 1).
  double firm_return_spread = 0.1;
  /// Optional per-firm override of both (length n_firms).
  std::vector<double> firm_return_means;
  double firm_return_sd = 0.5;
  double firm_default_threshold = -120.0;
  double initial_bank_cash = 12.0;
  double initial_firm_cash = 10.0;
  double initial_household_cash = 0.0;
  Mode mode = Mode::Normal;
  RankMetric rank_metric = RankMetric::DebtRank;
  NetworkKind network_kind = NetworkKind::complete();

  ModePolicy policy() const { return {mode, rank_metric}; }

  double return_mean(int firm) const {
    if (!firm_return_means.empty()) return firm_return_means[static_cast<std::size_t>(firm)];
    if (n_firms < 2) return firm_return_mean;
    return firm_return_mean + firm_return_spread * (2.0 * firm / (n_firms - 1) - 1.0);
  }
};

/// Raised for invalid parameter values or malformed config documents.
/// `fields()` names every offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::vector<std::string> fields, const std::string& what)
      : std::runtime_error(what), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

void validate(const SimParams& p);

/// Parses a flat `key = value` document. Blank lines and `#` comments are
/// ignored; absent keys keep their defaults. Every problem (unknown key,
/// unparsable or invalid value) is collected before throwing ConfigError.
SimParams parse_config(std::istream& in);
SimParams load_config(const std::string& path);
std::string to_config(const SimParams& p);

std::string to_string(Mode m);
std::string to_string(RankMetric m);
std::string to_string(const NetworkKind& k);
/// "normal", "transparent", "fast", with a "-katz" suffix for Katz ranking.
std::string to_string(const ModePolicy& p);
ModePolicy parse_policy(const std::string& s);
Mode parse_mode(const std::string& s);
RankMetric parse_rank_metric(const std::string& s);
NetworkKind parse_network_kind(const std::string& s);

}  // namespace ibnet
