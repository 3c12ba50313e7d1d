#include "ibnet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <numeric>
#include <sstream>

#include "ibnet/centrality.hpp"

namespace ibnet {
namespace {

BankState& bank_at(WorldState& w, int i) { return w.banks[static_cast<std::size_t>(i)]; }
FirmState& firm_at(WorldState& w, int f) { return w.firms[static_cast<std::size_t>(f)]; }

void make_ib_loan(WorldState& w, int borrower, int lender, double amount) {
  auto& b = bank_at(w, borrower);
  auto& l = bank_at(w, lender);
  const IbLoan loan{w.next_loan_id++, borrower, lender, amount, w.t};
  l.cash -= amount;
  b.cash += amount;
  b.ib_liabilities.push_back(loan);
  b.ib_liability_book += amount;
  l.ib_assets.push_back(loan);
  l.ib_asset_book += amount;
  w.series.ib_issued[static_cast<std::size_t>(w.t)] += amount;
  w.scores_stale = true;
  w.log(EventKind::IbLoan, borrower, lender, amount);
}

// Pays `amount` out of bank i's cash, topping the cash up in the IB market
// when needed. Returns false (and pays nothing) if the bank stays short.
bool pay_from_bank(WorldState& w, int i, double amount, const ModePolicy& policy) {
  if (amount <= 0.0) return true;
  if (bank_at(w, i).cash < amount) ib_funding_round(w, i, amount - bank_at(w, i).cash, policy);
  auto& b = bank_at(w, i);
  if (b.cash < amount) {
    // rounding in the funding round can leave a sub-ulp gap
    if (amount - b.cash > 1e-12 * std::max(1.0, amount)) return false;
    amount = b.cash;
  }
  b.cash -= amount;
  return true;
}

// (i) firm repays its matured loans; a firm that cannot pay in full defaults.
void repay_firm_loans(WorldState& w, int firm) {
  auto& f = firm_at(w, firm);
  if (f.defaulted) return;
  const int due_t = w.t - w.params.tau;
  double principal = 0.0;
  for (const auto& l : f.bank_loans)
    if (l.issued == due_t) principal += l.principal;
  if (principal <= 0.0) return;
  const double due = principal * (1.0 + w.params.r_floan);
  if (f.cash + f.deposits_at_bank < due) {
    default_firm(w, firm);
    return;
  }
  auto& b = bank_at(w, f.main_bank);
  const double from_cash = std::min(f.cash, due);
  const double from_deposits = due - from_cash;
  f.cash -= from_cash;
  b.cash += from_cash;
  f.deposits_at_bank -= from_deposits;
  b.firm_deposits -= from_deposits;

  std::erase_if(f.bank_loans, [due_t](const FirmLoan& l) { return l.issued == due_t; });
  f.loan_book -= principal;
  std::erase_if(b.firm_loans, [firm, due_t](const FirmLoan& l) { return l.firm == firm && l.issued == due_t; });
  b.firm_loan_book -= principal;
  w.log(EventKind::FirmRepayment, firm, f.main_bank, principal);
  w.log(EventKind::FirmInterest, firm, f.main_bank, due - principal);
}

// Bank i repays its matured IB loans. Returns false if it cannot.
bool repay_ib_loans(WorldState& w, int i, const ModePolicy& policy) {
  const int due_t = w.t - w.params.tau;
  std::vector<IbLoan> due;
  for (const auto& l : bank_at(w, i).ib_liabilities)
    if (l.issued == due_t) due.push_back(l);
  for (const auto& loan : due) {
    const double interest = loan.principal * w.params.r_ib;
    if (!pay_from_bank(w, i, loan.principal + interest, policy)) return false;
    auto& b = bank_at(w, i);
    auto& lender = bank_at(w, loan.lender);
    lender.cash += loan.principal + interest;
    std::erase_if(b.ib_liabilities, [&](const IbLoan& l) { return l.id == loan.id; });
    b.ib_liability_book -= loan.principal;
    std::erase_if(lender.ib_assets, [&](const IbLoan& l) { return l.id == loan.id; });
    lender.ib_asset_book -= loan.principal;
    w.series.ib_repaid[static_cast<std::size_t>(w.t)] += loan.principal;
    w.scores_stale = true;
    w.log(EventKind::IbRepayment, i, loan.lender, loan.principal);
    w.log(EventKind::IbInterest, i, loan.lender, interest);
  }
  return true;
}

void deposit_firm_cash(WorldState& w, int firm) {
  auto& f = firm_at(w, firm);
  if (f.defaulted || f.cash <= 0.0) return;
  auto& b = bank_at(w, f.main_bank);
  b.cash += f.cash;
  b.firm_deposits += f.cash;
  f.deposits_at_bank += f.cash;
  f.cash = 0.0;
}

// (iii) interest on deposits: paid in cash to the household, credited to
// the firm's account.
bool pay_deposit_interest(WorldState& w, int i, int firm, const ModePolicy& policy) {
  const double hh = w.params.r_h * w.household.deposits[static_cast<std::size_t>(i)];
  if (hh > 0.0) {
    if (!pay_from_bank(w, i, hh, policy)) return false;
    w.household.cash += hh;
    w.log(EventKind::DepositInterest, -1, i, hh);
  }
  auto& f = firm_at(w, firm);
  if (!f.defaulted && f.deposits_at_bank > 0.0) {
    const double fi = w.params.r_fdeposit * f.deposits_at_bank;
    f.deposits_at_bank += fi;
    bank_at(w, i).firm_deposits += fi;
    w.log(EventKind::DepositInterest, firm, i, fi);
  }
  return true;
}

// (v) the household withdraws its deposits at the pair's bank, deposits a
// share of the cash received since its last redistribution at a random bank
// and spends everything else on the firms' products.
bool household_redistribution(WorldState& w, int i, const ModePolicy& policy) {
  auto& hh = w.household;
  const double inflow = hh.cash;
  const double withdraw = hh.deposits[static_cast<std::size_t>(i)];
  if (withdraw > 0.0) {
    if (!pay_from_bank(w, i, withdraw, policy)) return false;
    hh.cash += withdraw;
    bank_at(w, i).household_deposits -= withdraw;
    hh.deposits[static_cast<std::size_t>(i)] = 0.0;
    w.log(EventKind::HouseholdWithdrawal, -1, i, withdraw);
  }

  const double deposit = w.params.deposit_fraction * std::max(0.0, inflow);
  std::vector<int> open;
  for (int j = 0; j < w.n_banks(); ++j)
    if (!bank_at(w, j).defaulted) open.push_back(j);
  if (deposit > 0.0 && !open.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    const int j = open[pick(w.household_rng)];
    hh.cash -= deposit;
    bank_at(w, j).cash += deposit;
    bank_at(w, j).household_deposits += deposit;
    hh.deposits[static_cast<std::size_t>(j)] += deposit;
    w.log(EventKind::HouseholdDeposit, -1, j, deposit);
  }

  const double spend = hh.cash;
  if (spend <= 0.0) return true;
  std::vector<double> weight(w.firms.size(), 0.0);
  double total = 0.0;
  for (std::size_t f = 0; f < w.firms.size(); ++f) {
    if (w.firms[f].defaulted) continue;
    weight[f] = w.firms[f].sales_weight;
    total += weight[f];
  }
  if (total <= 0.0) {
    for (std::size_t f = 0; f < w.firms.size(); ++f) weight[f] = w.firms[f].defaulted ? 0.0 : 1.0;
    total = std::accumulate(weight.begin(), weight.end(), 0.0);
  }
  if (total <= 0.0) return true;  // no firm left to buy from
  double paid = 0.0;
  std::size_t last = 0;
  for (std::size_t f = 0; f < w.firms.size(); ++f) {
    if (weight[f] <= 0.0) continue;
    const double share = spend * weight[f] / total;
    w.firms[f].cash += share;
    paid += share;
    last = f;
  }
  // keep the household's cash exactly at zero
  w.firms[last].cash += spend - paid;
  hh.cash = 0.0;
  return true;
}

void draw_sales_weights(WorldState& w) {
  const double sd = w.params.firm_return_sd * w.params.consumption_dispersion;
  for (auto& f : w.firms) {
    if (f.defaulted) continue;
    double eps = f.return_mean;
    if (sd > 0.0) eps = std::normal_distribution<double>(f.return_mean, sd)(w.household_rng);
    f.sales_weight = f.investment * std::max(0.0, 1.0 + eps);
  }
}

// Executes steps (i)-(viii) for pair k. Returns the id of a bank that failed
// or -1.
int update_pair(WorldState& w, int k, const ModePolicy& policy) {
  const int bank = k;
  const int firm = k;
  if (bank_at(w, bank).defaulted) return -1;

  repay_firm_loans(w, firm);
  if (bank_at(w, bank).equity() < 0.0) return bank;
  if (!repay_ib_loans(w, bank, policy)) return bank;

  deposit_firm_cash(w, firm);
  if (!pay_deposit_interest(w, bank, firm, policy)) return bank;

  double request = 0.0;
  const bool active = !firm_at(w, firm).defaulted;
  if (active) request = std::uniform_real_distribution<double>(0.0, w.params.loan_request_max)(w.request_rng);

  if (!household_redistribution(w, bank, policy)) return bank;

  if (active) {
    const double granted = request_firm_loan(w, bank, firm, policy, request);
    auto& f = firm_at(w, firm);
    const double invest = w.params.invest_fraction * granted;
    f.cash -= invest;
    w.household.cash += invest;
    f.investment = invest;
    deposit_firm_cash(w, firm);
    if (f.equity() < w.params.firm_default_threshold) default_firm(w, firm);
  }
  if (bank_at(w, bank).equity() < 0.0) return bank;
  return -1;
}

std::unique_ptr<bool[]> alive_flags(const WorldState& w) {
  auto flags = std::make_unique<bool[]>(w.banks.size());
  for (std::size_t i = 0; i < w.banks.size(); ++i) flags[i] = !w.banks[i].defaulted;
  return flags;
}

void check_conservation(const WorldState& w) {
  const double now = total_cash(w);
  if (std::abs(now - w.cash_baseline) <= conservation_tolerance * std::max(1.0, std::abs(w.cash_baseline))) return;
  std::ostringstream msg;
  msg.precision(17);
  msg << "cash conservation violated at t=" << w.t << ": baseline " << w.cash_baseline << ", now " << now
      << " (household " << w.household.cash << ")\n";
  for (int i = 0; i < w.n_banks(); ++i)
    msg << "  bank " << i << " cash " << w.banks[static_cast<std::size_t>(i)].cash << '\n';
  for (std::size_t f = 0; f < w.firms.size(); ++f) msg << "  firm " << f << " cash " << w.firms[f].cash << '\n';
  throw ConservationError(msg.str());
}

}  // namespace

void default_firm(WorldState& w, int firm) {
  auto& f = firm_at(w, firm);
  if (f.defaulted) return;
  auto& b = bank_at(w, f.main_bank);
  double written = 0.0;
  for (const auto& l : b.firm_loans)
    if (l.firm == firm) written += l.principal;
  std::erase_if(b.firm_loans, [firm](const FirmLoan& l) { return l.firm == firm; });
  b.firm_loan_book -= written;

  b.firm_deposits -= f.deposits_at_bank;
  b.household_deposits += f.deposits_at_bank;
  w.household.deposits[static_cast<std::size_t>(f.main_bank)] += f.deposits_at_bank;
  f.deposits_at_bank = 0.0;
  w.household.cash += f.cash;
  f.cash = 0.0;
  f.investment = f.sales_weight = 0.0;
  f.defaulted = true;
  w.log(EventKind::FirmDefault, firm, f.main_bank, 0.0);
  if (written > 0.0) w.log(EventKind::FirmWriteOff, firm, f.main_bank, written);
}

Eigen::VectorXd risk_scores(const WorldState& w, RankMetric metric) {
  const auto flags = alive_flags(w);
  const std::span<const bool> alive(flags.get(), w.banks.size());
  const LiabilityMatrix L = liability_matrix(w);
  if (metric == RankMetric::DebtRank) return debtrank_all(L, capital_vector(w), 1.0, alive);

  LiabilityMatrix live = L;
  for (int i = 0; i < w.n_banks(); ++i)
    if (!alive[static_cast<std::size_t>(i)]) {
      live.row(i).setZero();
      live.col(i).setZero();
    }
  Eigen::VectorXd k = katz_scores(live).K;
  for (int i = 0; i < w.n_banks(); ++i)
    if (!alive[static_cast<std::size_t>(i)]) k(i) = 0.0;
  return k;
}

void refresh_risk_scores(WorldState& w, RankMetric metric) {
  w.risk_scores = risk_scores(w, metric);
  Eigen::VectorXd keyed = w.risk_scores;
  // defaulted banks rank as the most risky
  const double top = keyed.size() ? keyed.maxCoeff() + 1.0 : 0.0;
  for (int i = 0; i < w.n_banks(); ++i)
    if (w.banks[static_cast<std::size_t>(i)].defaulted) keyed(i) = top;
  w.risk_rank = rank_banks(keyed, derive_seed(w.seed, {static_cast<std::uint64_t>(Stream::Ties),
                                                       static_cast<std::uint64_t>(w.t), ++w.score_epoch}));
  w.scores_stale = false;
}

std::vector<int> order_counterparties(WorldState& w, int i, const ModePolicy& policy, std::uint64_t step_seed) {
  std::vector<int> out;
  for (int j : w.relation.neighbors(i))
    if (!bank_at(w, j).defaulted) out.push_back(j);
  if (policy.mode == Mode::Normal) {
    Rng rng(step_seed);
    std::shuffle(out.begin(), out.end(), rng);
    return out;
  }
  if (policy.mode == Mode::Fast && w.scores_stale) refresh_risk_scores(w, policy.metric);
  if (w.risk_rank.size() != w.banks.size()) refresh_risk_scores(w, policy.metric);
  // least risky (largest rank number) first
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return w.risk_rank[static_cast<std::size_t>(a)] > w.risk_rank[static_cast<std::size_t>(b)];
  });
  return out;
}

double ib_funding_round(WorldState& w, int i, double amount, const ModePolicy& policy) {
  if (amount <= 0.0) return 0.0;
  const std::uint64_t step_seed = policy.mode == Mode::Normal ? w.counterparty_rng() : 0;
  std::vector<int> order = order_counterparties(w, i, policy, step_seed);
  double remaining = amount;
  std::size_t pos = 0;
  while (pos < order.size() && remaining > 0.0) {
    const int j = order[pos++];
    const double score = w.risk_scores.size() ? w.risk_scores(j) : 0.0;
    w.log(EventKind::IbAsk, i, j, remaining, policy.mode == Mode::Normal ? 0.0 : score);
    const double offer = std::min(std::max(0.0, bank_at(w, j).cash), remaining);
    if (offer <= 0.0) continue;
    make_ib_loan(w, i, j, offer);
    remaining = offer == remaining ? 0.0 : remaining - offer;
    if (policy.mode == Mode::Fast && remaining > 0.0 && pos < order.size()) {
      refresh_risk_scores(w, policy.metric);
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(pos), order.end(), [&](int a, int b) {
        return w.risk_rank[static_cast<std::size_t>(a)] > w.risk_rank[static_cast<std::size_t>(b)];
      });
    }
  }
  return amount - remaining;
}

double request_firm_loan(WorldState& w, int bank, int firm, const ModePolicy& policy, std::optional<double> amount) {
  const double request =
      amount ? *amount : std::uniform_real_distribution<double>(0.0, w.params.loan_request_max)(w.request_rng);
  w.log(EventKind::FirmLoanRequest, firm, bank, request);
  w.series.requested[static_cast<std::size_t>(w.t)] += request;
  if (request <= 0.0) return 0.0;
  if (bank_at(w, bank).cash < request) ib_funding_round(w, bank, request - bank_at(w, bank).cash, policy);
  auto& b = bank_at(w, bank);
  if (b.cash < request) return 0.0;
  auto& f = firm_at(w, firm);
  b.cash -= request;
  f.cash += request;
  const FirmLoan loan{firm, request, w.t};
  b.firm_loans.push_back(loan);
  b.firm_loan_book += request;
  f.bank_loans.push_back(loan);
  f.loan_book += request;
  w.series.granted[static_cast<std::size_t>(w.t)] += request;
  w.log(EventKind::FirmLoan, firm, bank, request);
  return request;
}

CascadeReport resolve_defaults(WorldState& w, int initial) {
  CascadeReport r;
  r.trigger_bank = initial;
  r.t0 = w.t;
  std::deque<int> queue;
  auto fail = [&](int i) {
    bank_at(w, i).defaulted = true;
    r.defaulted_banks.push_back(i);
    queue.push_back(i);
    w.log(EventKind::BankDefault, i, -1, 0.0);
  };
  fail(initial);
  while (!queue.empty()) {
    const int d = queue.front();
    queue.pop_front();
    std::vector<int> creditors;
    for (const auto& l : bank_at(w, d).ib_liabilities) creditors.push_back(l.lender);
    std::sort(creditors.begin(), creditors.end());
    creditors.erase(std::unique(creditors.begin(), creditors.end()), creditors.end());
    for (int j : creditors) {
      auto& c = bank_at(w, j);
      double written = 0.0;
      for (const auto& l : c.ib_assets)
        if (l.borrower == d) written += l.principal;
      if (written <= 0.0) continue;
      std::erase_if(c.ib_assets, [d](const IbLoan& l) { return l.borrower == d; });
      c.ib_asset_book -= written;
      w.log(EventKind::IbWriteOff, j, d, written);
      if (!c.defaulted && c.equity() < 0.0) fail(j);
    }
  }
  w.scores_stale = true;
  r.capital_after = capital_vector(w);
  return r;
}

std::optional<CascadeReport> run_timestep(WorldState& w, const ModePolicy& policy) {
  if (w.t > w.params.max_timesteps) throw std::logic_error("run_timestep: past max_timesteps");
  const Eigen::VectorXd before = capital_vector(w);
  if (policy.mode != Mode::Normal) refresh_risk_scores(w, policy.metric);

  draw_sales_weights(w);

  std::vector<int> pairs(static_cast<std::size_t>(w.n_banks()));
  std::iota(pairs.begin(), pairs.end(), 0);
  std::shuffle(pairs.begin(), pairs.end(), w.pair_rng);
  for (int k : pairs) {
    const int failed = update_pair(w, k, policy);
    if (failed < 0) continue;
    CascadeReport r = resolve_defaults(w, failed);
    r.capital_before = before;
    check_conservation(w);
    return r;
  }
  check_conservation(w);
  ++w.t;
  return std::nullopt;
}

std::vector<double> debtrank_profile(const WorldState& w) {
  const auto flags = alive_flags(w);
  const std::span<const bool> alive(flags.get(), w.banks.size());
  const Eigen::VectorXd R = debtrank_all(liability_matrix(w), capital_vector(w), 1.0, alive);
  const Eigen::VectorXd n = normalize_debtrank(R).values;
  std::vector<double> out(n.data(), n.data() + n.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

RunRecord run_world(WorldState& w, const RunOptions& opts) {
  const ModePolicy policy = w.params.policy();
  RunRecord rec;
  rec.seed = w.seed;
  rec.policy = policy;
  rec.network = w.params.network_kind;
  std::optional<CascadeReport> cascade;
  while (w.t <= w.params.max_timesteps) {
    if (w.t == opts.profile_timestep) rec.debtrank_profile = debtrank_profile(w);
    cascade = run_timestep(w, policy);
    if (opts.check_books) check_books(w);
    if (cascade) break;
  }
  const int last = std::min(w.t, w.params.max_timesteps);
  const auto steps = static_cast<std::size_t>(last);
  rec.efficiency = efficiency(std::span<const double>(w.series.requested).subspan(1, steps),
                              std::span<const double>(w.series.granted).subspan(1, steps));
  const int T = opts.volume_timestep;
  if (T >= 1 && T <= w.params.max_timesteps && (!cascade || cascade->t0 > T))
    rec.volume = w.series.ib_issued[static_cast<std::size_t>(T)] + w.series.ib_repaid[static_cast<std::size_t>(T)];
  if (cascade) {
    rec.t_fd = cascade->t0;
    rec.losses = losses(*cascade);
    rec.cascade_size = cascade_size(*cascade);
  }
  return rec;
}

RunRecord run_simulation(const SimParams& params, std::uint64_t seed, const RunOptions& opts) {
  WorldState w = init_world(params, seed);
  w.log_events = opts.log_events;
  return run_world(w, opts);
}

}  // namespace ibnet
