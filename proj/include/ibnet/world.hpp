#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ibnet/network.hpp"
#include "ibnet/params.hpp"
#include "ibnet/rng.hpp"

namespace ibnet {

using LiabilityMatrix = Eigen::MatrixXd;

struct FirmLoan {
  int firm = -1;
  double principal = 0.0;
  int issued = 0;
};

/// One interbank loan; the same record sits in the borrower's liabilities
/// and the lender's assets.
struct IbLoan {
  long id = 0;
  int borrower = -1;
  int lender = -1;
  double principal = 0.0;
  int issued = 0;

  friend bool operator==(const IbLoan&, const IbLoan&) = default;
};

struct BankState {
  double cash = 0.0;
  std::vector<FirmLoan> firm_loans;
  std::vector<IbLoan> ib_assets;
  std::vector<IbLoan> ib_liabilities;
  double household_deposits = 0.0;
  double firm_deposits = 0.0;
  bool defaulted = false;

  // running ledger totals, kept in step with the vectors above
  double firm_loan_book = 0.0;
  double ib_asset_book = 0.0;
  double ib_liability_book = 0.0;

  double equity() const {
    return cash + firm_loan_book + ib_asset_book - household_deposits - firm_deposits - ib_liability_book;
  }
  /// Equity from the raw ledgers, independent of the running totals.
  double recomputed_equity() const;
};

struct FirmState {
  double cash = 0.0;
  std::vector<FirmLoan> bank_loans;
  double deposits_at_bank = 0.0;
  int main_bank = -1;
  double return_mean = 0.0;
  bool defaulted = false;
  double loan_book = 0.0;
  /// Salaries and investment paid at the firm's latest update.
  double investment = 0.0;
  /// Share of household consumption the firm attracts during the current
  /// timestep: investment at the start of the step times max(0, 1 + eps),
  /// eps ~ Normal(return_mean, firm_return_sd * consumption_dispersion).
  double sales_weight = 0.0;

  double equity() const { return cash + deposits_at_bank - loan_book; }
};

struct HouseholdState {
  double cash = 0.0;
  std::vector<double> deposits;  // per bank
};

enum class EventKind {
  FirmLoanRequest,
  FirmLoan,
  FirmRepayment,
  FirmInterest,
  FirmDefault,
  FirmWriteOff,
  IbAsk,
  IbLoan,
  IbRepayment,
  IbInterest,
  IbWriteOff,
  DepositInterest,
  HouseholdDeposit,
  HouseholdWithdrawal,
  BankDefault,
};

std::string to_string(EventKind k);

/// Audit record. `a`/`b` are agent ids whose meaning depends on the kind
/// (borrower/lender, firm/bank). `score` is the lender's risk score for
/// IbAsk events and 0 otherwise.
struct Event {
  int t = 0;
  EventKind kind{};
  int a = -1;
  int b = -1;
  double amount = 0.0;
  double score = 0.0;
};

/// Per-timestep aggregates, indexed by timestep.
struct StepSeries {
  std::vector<double> requested;
  std::vector<double> granted;
  std::vector<double> ib_issued;  // principal of IB loans issued at t
  std::vector<double> ib_repaid;  // principal of IB loans repaid at t
};

struct WorldState {
  int t = 1;  // the timestep about to be executed
  SimParams params;
  std::uint64_t seed = 0;
  std::uint64_t network_seed = 0;

  std::vector<BankState> banks;
  std::vector<FirmState> firms;
  HouseholdState household;
  RelationNetwork relation;

  Rng pair_rng, request_rng, household_rng, counterparty_rng;

  bool log_events = true;
  std::vector<Event> events;
  StepSeries series;
  double cash_baseline = 0.0;
  long next_loan_id = 1;

  // risk scores used to order counterparties in transparent and fast mode
  Eigen::VectorXd risk_scores;
  std::vector<int> risk_rank;
  bool scores_stale = true;
  std::uint64_t score_epoch = 0;

  int n_banks() const { return static_cast<int>(banks.size()); }
  void log(EventKind kind, int a, int b, double amount, double score = 0.0) {
    if (log_events) events.push_back({t, kind, a, b, amount, score});
  }
};

/// Sub-seed used for the relation network of a run.
std::uint64_t network_seed_for(std::uint64_t seed);
RelationNetwork make_network(const SimParams& p, std::uint64_t network_seed);

WorldState init_world(const SimParams& params, std::uint64_t seed);

double bank_equity(const WorldState& w, int bank);
double firm_equity(const WorldState& w, int firm);
double total_cash(const WorldState& w);

/// L(i,j) = sum of principals bank i owes bank j (gross, no netting).
LiabilityMatrix liability_matrix(const WorldState& w);
/// L aggregated from the lenders' asset ledgers; equals liability_matrix
/// while no loan has been written off.
LiabilityMatrix liability_matrix_from_assets(const WorldState& w);
Eigen::VectorXd capital_vector(const WorldState& w);
std::vector<bool> alive_mask(const WorldState& w);

/// Throws std::logic_error when the two sides of the IB ledgers disagree,
/// a running total drifts from its ledger, or deposits do not match
/// between banks, firms and the household.
void check_books(const WorldState& w, double tol = 1e-9);

void write_events(std::ostream& out, const std::vector<Event>& events);

}  // namespace ibnet
