#include "ibnet/world.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace ibnet {

double BankState::recomputed_equity() const {
  double fl = 0.0, ia = 0.0, il = 0.0;
  for (const auto& l : firm_loans) fl += l.principal;
  for (const auto& l : ib_assets) ia += l.principal;
  for (const auto& l : ib_liabilities) il += l.principal;
  return cash + fl + ia - household_deposits - firm_deposits - il;
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::FirmLoanRequest: return "firm_loan_request";
    case EventKind::FirmLoan: return "firm_loan";
    case EventKind::FirmRepayment: return "firm_repayment";
    case EventKind::FirmInterest: return "firm_interest";
    case EventKind::FirmDefault: return "firm_default";
    case EventKind::FirmWriteOff: return "firm_write_off";
    case EventKind::IbAsk: return "ib_ask";
    case EventKind::IbLoan: return "ib_loan";
    case EventKind::IbRepayment: return "ib_repayment";
    case EventKind::IbInterest: return "ib_interest";
    case EventKind::IbWriteOff: return "ib_write_off";
    case EventKind::DepositInterest: return "deposit_interest";
    case EventKind::HouseholdDeposit: return "household_deposit";
    case EventKind::HouseholdWithdrawal: return "household_withdrawal";
    case EventKind::BankDefault: return "bank_default";
  }
  return "?";
}

std::uint64_t network_seed_for(std::uint64_t seed) { return stream_seed(seed, Stream::Network); }

RelationNetwork make_network(const SimParams& p, std::uint64_t network_seed) {
  switch (p.network_kind.type) {
    case NetworkKind::Type::Complete: return gen_complete(p.n_banks);
    case NetworkKind::Type::ER: return gen_er(p.n_banks, p.network_kind.edge_prob, network_seed);
    case NetworkKind::Type::BA: return gen_ba(p.n_banks, p.network_kind.attach, network_seed);
  }
  throw std::logic_error("unknown network kind");
}

WorldState init_world(const SimParams& params, std::uint64_t seed) {
  validate(params);
  WorldState w;
  w.params = params;
  w.seed = seed;
  w.network_seed = network_seed_for(seed);
  w.relation = make_network(params, w.network_seed);

  const auto nb = static_cast<std::size_t>(params.n_banks);
  const auto nf = static_cast<std::size_t>(params.n_firms);
  w.banks.assign(nb, BankState{});
  for (auto& b : w.banks) b.cash = params.initial_bank_cash;
  w.firms.assign(nf, FirmState{});
  for (std::size_t f = 0; f < nf; ++f) {
    auto& firm = w.firms[f];
    firm.cash = params.initial_firm_cash;
    firm.main_bank = static_cast<int>(f % nb);
    firm.return_mean = params.return_mean(static_cast<int>(f));
  }
  w.household.cash = params.initial_household_cash;
  w.household.deposits.assign(nb, 0.0);

  w.pair_rng.seed(stream_seed(seed, Stream::PairOrder));
  w.request_rng.seed(stream_seed(seed, Stream::FirmRequests));
  w.household_rng.seed(stream_seed(seed, Stream::Household));
  w.counterparty_rng.seed(stream_seed(seed, Stream::Counterparty));

  const auto steps = static_cast<std::size_t>(params.max_timesteps) + 1;
  w.series.requested.assign(steps, 0.0);
  w.series.granted.assign(steps, 0.0);
  w.series.ib_issued.assign(steps, 0.0);
  w.series.ib_repaid.assign(steps, 0.0);

  w.risk_scores = Eigen::VectorXd::Zero(params.n_banks);
  w.cash_baseline = total_cash(w);
  return w;
}

double bank_equity(const WorldState& w, int bank) { return w.banks.at(static_cast<std::size_t>(bank)).equity(); }

double firm_equity(const WorldState& w, int firm) { return w.firms.at(static_cast<std::size_t>(firm)).equity(); }

double total_cash(const WorldState& w) {
  double sum = w.household.cash;
  for (const auto& b : w.banks) sum += b.cash;
  for (const auto& f : w.firms) sum += f.cash;
  return sum;
}

LiabilityMatrix liability_matrix(const WorldState& w) {
  const int n = w.n_banks();
  LiabilityMatrix L = LiabilityMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (const auto& loan : w.banks[static_cast<std::size_t>(i)].ib_liabilities) L(i, loan.lender) += loan.principal;
  return L;
}

LiabilityMatrix liability_matrix_from_assets(const WorldState& w) {
  const int n = w.n_banks();
  LiabilityMatrix L = LiabilityMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (const auto& loan : w.banks[static_cast<std::size_t>(j)].ib_assets) L(loan.borrower, j) += loan.principal;
  return L;
}

Eigen::VectorXd capital_vector(const WorldState& w) {
  Eigen::VectorXd c(w.n_banks());
  for (int i = 0; i < w.n_banks(); ++i) c(i) = w.banks[static_cast<std::size_t>(i)].equity();
  return c;
}

std::vector<bool> alive_mask(const WorldState& w) {
  std::vector<bool> alive(w.banks.size());
  for (std::size_t i = 0; i < w.banks.size(); ++i) alive[i] = !w.banks[i].defaulted;
  return alive;
}

void check_books(const WorldState& w, double tol) {
  auto fail = [](const std::string& msg) { throw std::logic_error("ledger check failed: " + msg); };
  auto close = [tol](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a) + std::abs(b)); };

  using Key = std::tuple<long, int, int, int>;
  std::map<Key, double> liabilities, assets;
  for (int i = 0; i < w.n_banks(); ++i) {
    const auto& b = w.banks[static_cast<std::size_t>(i)];
    double fl = 0.0, ia = 0.0, il = 0.0;
    for (const auto& l : b.firm_loans) fl += l.principal;
    for (const auto& l : b.ib_assets) {
      ia += l.principal;
      if (l.lender != i) fail("asset entry filed under the wrong lender");
      assets[{l.id, l.borrower, l.lender, l.issued}] = l.principal;
    }
    for (const auto& l : b.ib_liabilities) {
      il += l.principal;
      if (l.borrower != i) fail("liability entry filed under the wrong borrower");
      if (l.principal > 0.0 && !w.relation.linked(l.borrower, l.lender)) fail("IB loan outside relation network");
      // a defaulted borrower's debts have been written off by its creditors
      if (!b.defaulted) liabilities[{l.id, l.borrower, l.lender, l.issued}] = l.principal;
    }
    if (!close(fl, b.firm_loan_book) || !close(ia, b.ib_asset_book) || !close(il, b.ib_liability_book))
      fail("running total of bank " + std::to_string(i) + " drifted from its ledger");
    if (!close(b.household_deposits, w.household.deposits[static_cast<std::size_t>(i)]))
      fail("household deposits of bank " + std::to_string(i) + " disagree");
  }
  if (liabilities != assets) fail("IB asset and liability ledgers are not mirror images");

  std::vector<double> fdep(w.banks.size(), 0.0);
  for (const auto& f : w.firms) {
    if (!f.defaulted) fdep[static_cast<std::size_t>(f.main_bank)] += f.deposits_at_bank;
    double book = 0.0;
    for (const auto& l : f.bank_loans) book += l.principal;
    if (!close(book, f.loan_book)) fail("firm loan book drifted from its ledger");
  }
  for (std::size_t i = 0; i < w.banks.size(); ++i)
    if (!close(fdep[i], w.banks[i].firm_deposits)) fail("firm deposits of bank " + std::to_string(i) + " disagree");
}

void write_events(std::ostream& out, const std::vector<Event>& events) {
  std::ostringstream line;
  line.precision(17);
  for (const auto& e : events) {
    line.str({});
    line << e.t << ' ' << to_string(e.kind) << ' ' << e.a << ' ' << e.b << ' ' << e.amount << '\n';
    out << line.str();
  }
}

}  // namespace ibnet
