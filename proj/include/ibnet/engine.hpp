#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ibnet/metrics.hpp"
#include "ibnet/params.hpp"
#include "ibnet/world.hpp"

namespace ibnet {

/// Cash left or entered the closed system: an engine bug, never a modeled
/// outcome. The message carries a diagnostic dump.
class ConservationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double conservation_tolerance = 1e-9;

/// Executes one timestep: every bank-firm pair is updated once in a fresh
/// random order. Returns the cascade report if a bank defaulted (the world
/// stays at that timestep); otherwise advances w.t.
std::optional<CascadeReport> run_timestep(WorldState& w, const ModePolicy& policy);

/// Non-defaulted relation-network neighbors of bank i in the order bank i
/// asks them for IB loans: shuffled (normal) or least risky first using the
/// start-of-step ranks (transparent) or ranks refreshed after the latest IB
/// transaction (fast).
std::vector<int> order_counterparties(WorldState& w, int i, const ModePolicy& policy, std::uint64_t step_seed);

/// Bank i borrows up to `amount` from its ordered neighbors, each lending
/// min(its cash, remaining need) at r_ib. Returns the amount raised.
double ib_funding_round(WorldState& w, int i, double amount, const ModePolicy& policy);

/// Firm asks its main bank for a loan of `amount` (drawn from the request
/// stream when not given). The payout is all-or-nothing; IB funds raised for
/// a refused loan stay on the bank's books. Returns the granted amount.
double request_firm_loan(WorldState& w, int bank, int firm, const ModePolicy& policy,
                         std::optional<double> amount = std::nullopt);

/// Marks `initial` defaulted and propagates: creditors write off their full
/// exposure to each defaulted bank and default themselves when their equity
/// turns negative. capital_before is left empty; run_timestep fills it.
CascadeReport resolve_defaults(WorldState& w, int initial);

/// Writes off all loans of a firm at its main bank and hands the firm's
/// remaining cash and deposits to the household.
void default_firm(WorldState& w, int firm);

/// Risk scores of all banks for `metric` from the current liability matrix
/// and equities; defaulted banks score 0.
Eigen::VectorXd risk_scores(const WorldState& w, RankMetric metric);
/// Recomputes w.risk_scores and w.risk_rank (defaulted banks ranked last).
void refresh_risk_scores(WorldState& w, RankMetric metric);

/// Normalized DebtRank of all banks, sorted descending.
std::vector<double> debtrank_profile(const WorldState& w);

struct RunOptions {
  bool log_events = false;
  bool check_books = false;  // run check_books after every timestep
  int profile_timestep = 100;
  int volume_timestep = 100;
};

/// Full run: init_world, then timesteps until the first bank-default
/// cascade is resolved or T_max is reached.
RunRecord run_simulation(const SimParams& params, std::uint64_t seed, const RunOptions& opts = {});

/// Same as run_simulation but on a prepared world, which is left in its
/// final state for inspection.
RunRecord run_world(WorldState& w, const RunOptions& opts = {});

}  // namespace ibnet
