#pragma once

// Systemic-risk scores of banks computed from a liability matrix L (L(i,j) is
// what bank i owes bank j) and a capital vector C: DebtRank in its
// distress-propagation form, the damped recursive impact, and Katz
// centrality, plus ordinal ranks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ibnet/rng.hpp"

namespace ibnet {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Impact matrix and economic value

/// W(i,j) = min(1, L(i,j) / C(j)): the fraction of j's capital lost if i
/// defaults. A nonpositive capital with a positive exposure gives W = 1.
template <typename DerivedL, typename DerivedC>
Mat<typename DerivedL::Scalar> impact_matrix(const Eigen::MatrixBase<DerivedL>& L,
                                             const Eigen::MatrixBase<DerivedC>& C) {
  using Scalar = typename DerivedL::Scalar;
  if (L.rows() != L.cols() || C.size() != L.rows())
    throw std::invalid_argument("impact_matrix: dimension mismatch");
  const Eigen::Index n = L.rows();
  Mat<Scalar> W = Mat<Scalar>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar cap = C(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar exposure = L(i, j);
      if (exposure <= Scalar(0)) continue;
      W(i, j) = cap <= Scalar(0) ? Scalar(1) : std::min(Scalar(1), exposure / cap);
    }
  }
  return W;
}

template <typename Scalar>
struct EconomicValue {
  Vec<Scalar> v;
  bool degenerate = false;  // no outstanding loans; v is uniform
};

/// v_i = (sum_j L(j,i)) / (sum of all entries): bank i's share of all
/// outstanding interbank lending.
template <typename Derived>
EconomicValue<typename Derived::Scalar> economic_value(const Eigen::MatrixBase<Derived>& L) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = L.cols();
  EconomicValue<Scalar> out;
  const Vec<Scalar> lent = L.colwise().sum().transpose();
  const Scalar total = lent.sum();
  if (total > Scalar(0)) {
    out.v = lent / total;
  } else {
    out.v = Vec<Scalar>::Constant(n, n > 0 ? Scalar(1) / Scalar(n) : Scalar(0));
    out.degenerate = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// DebtRank

enum class Distress : std::uint8_t { Undistressed, Distressed, Inactive };

template <typename Scalar>
struct DebtRankResult {
  Scalar value = 0;
  int rounds = 0;  // propagation rounds until no node is distressed
  Vec<Scalar> h;   // final distress levels
};

namespace detail {

/// Nonzero rows of W as adjacency lists: out[j] = {(i, W(j,i))}.
template <typename Scalar>
struct ImpactLists {
  std::vector<std::vector<std::pair<int, Scalar>>> out;

  template <typename Derived>
  explicit ImpactLists(const Eigen::MatrixBase<Derived>& W) : out(static_cast<std::size_t>(W.rows())) {
    for (Eigen::Index j = 0; j < W.rows(); ++j)
      for (Eigen::Index i = 0; i < W.cols(); ++i)
        if (W(j, i) > Scalar(0)) out[static_cast<std::size_t>(j)].emplace_back(static_cast<int>(i), W(j, i));
  }
};

/// Scratch buffers reused across seeds.
template <typename Scalar>
struct PropagationWork {
  std::vector<Scalar> h, incoming;
  std::vector<Distress> state;
  std::vector<int> active, next, touched;
  std::vector<char> is_touched;

  void reset(std::size_t n) {
    h.assign(n, Scalar(0));
    incoming.assign(n, Scalar(0));
    state.assign(n, Distress::Undistressed);
    is_touched.assign(n, 0);
    active.clear();
  }
};

/// Runs the h/s dynamics from the seed set until no node is distressed and
/// returns the induced distress sum_j h_j(T) v_j - sum_j h_j(1) v_j.
template <typename Scalar, typename DerivedV>
Scalar propagate(const ImpactLists<Scalar>& g, const Eigen::MatrixBase<DerivedV>& v,
                 std::span<const int> seeds, Scalar psi, PropagationWork<Scalar>& w, int& rounds) {
  const std::size_t n = g.out.size();
  w.reset(n);
  Scalar initial = 0;
  for (int s : seeds) {
    const auto k = static_cast<std::size_t>(s);
    if (w.state[k] == Distress::Distressed) continue;
    w.h[k] = psi;
    w.state[k] = Distress::Distressed;
    w.active.push_back(s);
    initial += psi * v(s);
  }
  rounds = 0;
  while (!w.active.empty()) {
    ++rounds;
    w.touched.clear();
    // contributions use h(t-1) of distressed nodes only
    for (int j : w.active) {
      const Scalar hj = w.h[static_cast<std::size_t>(j)];
      for (const auto& [i, wji] : g.out[static_cast<std::size_t>(j)]) {
        const auto k = static_cast<std::size_t>(i);
        w.incoming[k] += wji * hj;
        if (!w.is_touched[k]) {
          w.is_touched[k] = 1;
          w.touched.push_back(i);
        }
      }
    }
    for (int j : w.active) w.state[static_cast<std::size_t>(j)] = Distress::Inactive;
    w.next.clear();
    for (int i : w.touched) {
      const auto k = static_cast<std::size_t>(i);
      w.h[k] = std::min(Scalar(1), w.h[k] + w.incoming[k]);
      w.incoming[k] = 0;
      w.is_touched[k] = 0;
      if (w.state[k] == Distress::Undistressed && w.h[k] > Scalar(0)) {
        w.state[k] = Distress::Distressed;
        w.next.push_back(i);
      }
    }
    std::swap(w.active, w.next);
  }
  Scalar final_sum = 0;
  for (std::size_t k = 0; k < n; ++k) final_sum += w.h[k] * v(static_cast<Eigen::Index>(k));
  // v sums to 1 only up to rounding
  return std::clamp(final_sum - initial, Scalar(0), Scalar(1));
}

}  // namespace detail

/// DebtRank of the seed set S_f with initial distress psi.
template <typename DerivedW, typename DerivedV>
DebtRankResult<typename DerivedW::Scalar> debtrank(const Eigen::MatrixBase<DerivedW>& W,
                                                   const Eigen::MatrixBase<DerivedV>& v,
                                                   std::span<const int> seeds,
                                                   typename DerivedW::Scalar psi) {
  using Scalar = typename DerivedW::Scalar;
  if (W.rows() != W.cols() || v.size() != W.rows())
    throw std::invalid_argument("debtrank: dimension mismatch");
  if (!(psi >= Scalar(0) && psi <= Scalar(1))) throw std::invalid_argument("debtrank: psi must lie in [0,1]");
  for (int s : seeds)
    if (s < 0 || s >= W.rows()) throw std::invalid_argument("debtrank: seed out of range");
  const detail::ImpactLists<Scalar> g(W);
  detail::PropagationWork<Scalar> work;
  DebtRankResult<Scalar> out;
  out.value = detail::propagate(g, v, seeds, psi, work, out.rounds);
  out.h = Eigen::Map<const Vec<Scalar>>(work.h.data(), static_cast<Eigen::Index>(work.h.size()));
  return out;
}

/// Single-seed DebtRank of every bank. Banks with alive[i] == false are
/// removed from L and C first and score 0.
template <typename DerivedL, typename DerivedC>
Vec<typename DerivedL::Scalar> debtrank_all(const Eigen::MatrixBase<DerivedL>& L,
                                            const Eigen::MatrixBase<DerivedC>& C,
                                            typename DerivedL::Scalar psi,
                                            std::span<const bool> alive = {}) {
  using Scalar = typename DerivedL::Scalar;
  const Eigen::Index n = L.rows();
  Mat<Scalar> live = L;
  if (!alive.empty()) {
    if (static_cast<Eigen::Index>(alive.size()) != n) throw std::invalid_argument("debtrank_all: mask size");
    for (Eigen::Index i = 0; i < n; ++i)
      if (!alive[static_cast<std::size_t>(i)]) {
        live.row(i).setZero();
        live.col(i).setZero();
      }
  }
  const Mat<Scalar> W = impact_matrix(live, C);
  const auto ev = economic_value(live);
  const detail::ImpactLists<Scalar> g(W);
  detail::PropagationWork<Scalar> work;
  Vec<Scalar> scores = Vec<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!alive.empty() && !alive[static_cast<std::size_t>(i)]) continue;
    if (g.out[static_cast<std::size_t>(i)].empty()) continue;  // no lenders, nothing to propagate
    const int seed = static_cast<int>(i);
    int rounds = 0;
    scores(i) = detail::propagate(g, ev.v, std::span<const int>(&seed, 1), psi, work, rounds);
  }
  return scores;
}

template <typename Scalar>
struct NormalizedScores {
  Vec<Scalar> values;
  bool degenerate = false;  // all-zero input; values are uniform
};

/// R_i / sum_j R_j.
template <typename Derived>
NormalizedScores<typename Derived::Scalar> normalize_debtrank(const Eigen::MatrixBase<Derived>& R) {
  using Scalar = typename Derived::Scalar;
  NormalizedScores<Scalar> out;
  const Scalar total = R.sum();
  if (total > Scalar(0)) {
    out.values = R / total;
  } else {
    out.values = Vec<Scalar>::Constant(R.size(), R.size() ? Scalar(1) / Scalar(R.size()) : Scalar(0));
    out.degenerate = true;
  }
  return out;
}

/// Fixpoint of I = W v + beta W I. Cycles in W can make the impact exceed
/// one; kept for comparison with the propagation form.
template <typename DerivedW, typename DerivedV>
Vec<typename DerivedW::Scalar> recursive_impact(const Eigen::MatrixBase<DerivedW>& W,
                                                const Eigen::MatrixBase<DerivedV>& v,
                                                typename DerivedW::Scalar beta,
                                                double tol = 1e-10, long max_iter = 100000) {
  using Scalar = typename DerivedW::Scalar;
  if (W.rows() != W.cols() || v.size() != W.rows())
    throw std::invalid_argument("recursive_impact: dimension mismatch");
  if (beta < Scalar(0)) throw std::invalid_argument("recursive_impact: beta must be nonnegative");
  const Vec<Scalar> direct = W * v;
  Vec<Scalar> I = direct;
  for (long it = 0; it < max_iter; ++it) {
    const Vec<Scalar> next = direct + beta * (W * I);
    if (!next.allFinite()) break;
    const Scalar residual = (next - I).cwiseAbs().maxCoeff();
    I = next;
    if (residual <= tol) return I;
  }
  throw ConvergenceError("recursive_impact: no convergence within " + std::to_string(max_iter) +
                         " iterations (beta times the spectral radius of W must be below 1)");
}

// ---------------------------------------------------------------------------
// Katz centrality

/// True when the directed graph of nonzero entries has no cycle, i.e. the
/// nonnegative matrix is nilpotent and its spectral radius is exactly 0.
template <typename Derived>
bool support_is_acyclic(const Eigen::MatrixBase<Derived>& L) {
  const Eigen::Index n = L.rows();
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (L(i, j) != 0) ++indeg[static_cast<std::size_t>(j)];
  std::vector<Eigen::Index> ready;
  for (Eigen::Index j = 0; j < n; ++j)
    if (indeg[static_cast<std::size_t>(j)] == 0) ready.push_back(j);
  Eigen::Index removed = 0;
  while (!ready.empty()) {
    const Eigen::Index i = ready.back();
    ready.pop_back();
    ++removed;
    for (Eigen::Index j = 0; j < n; ++j)
      if (L(i, j) != 0 && --indeg[static_cast<std::size_t>(j)] == 0) ready.push_back(j);
  }
  return removed == n;
}

template <typename Scalar>
struct SpectralRadius {
  Scalar value = 0;
  long iterations = 0;
};

/// Largest eigenvalue of a nonnegative matrix by power iteration on the
/// shifted matrix L + s I (the shift removes periodic oscillation).
template <typename Derived>
SpectralRadius<typename Derived::Scalar> spectral_radius(const Eigen::MatrixBase<Derived>& L,
                                                         double tol = 1e-10, long max_iter = 100000) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = L.rows();
  if (n == 0 || support_is_acyclic(L)) return {Scalar(0), 0};
  const Scalar shift = L.rowwise().sum().mean();
  Vec<Scalar> x = Vec<Scalar>::Constant(n, Scalar(1) / Scalar(n));
  Scalar prev = -1;
  int settled = 0;
  for (long it = 1; it <= max_iter; ++it) {
    Vec<Scalar> y = L * x + shift * x;
    const Scalar lambda = y.sum();  // ||y||_1 with ||x||_1 = 1, x >= 0
    x = y / lambda;
    if (std::abs(lambda - prev) <= Scalar(tol) * lambda) {
      if (++settled >= 3) return {lambda - shift, it};
    } else {
      settled = 0;
    }
    prev = lambda;
  }
  throw ConvergenceError("spectral_radius: power iteration did not converge within " +
                         std::to_string(max_iter) + " iterations");
}

template <typename Scalar>
struct KatzResult {
  Vec<Scalar> K;
  Scalar alpha = 0;
  Scalar kappa = 0;                // largest eigenvalue of L
  bool kappa_from_power_iteration = true;
};

/// Attenuation used when L has no cycle (kappa = 0).
inline constexpr double katz_alpha_fallback = 0.1;
/// alpha = katz_alpha_scale / kappa keeps (I - alpha L) invertible.
inline constexpr double katz_alpha_scale = 0.99;

/// Solves K = alpha L K + beta 1. kappa comes from power iteration; if that
/// fails to converge the dense eigen-solver is used and the result flagged.
template <typename Derived>
KatzResult<typename Derived::Scalar> katz_scores(const Eigen::MatrixBase<Derived>& L,
                                                 typename Derived::Scalar beta = 1) {
  using Scalar = typename Derived::Scalar;
  if (L.rows() != L.cols()) throw std::invalid_argument("katz_scores: matrix must be square");
  if ((L.array() < Scalar(0)).any()) throw std::invalid_argument("katz_scores: L must be nonnegative");
  const Eigen::Index n = L.rows();
  KatzResult<Scalar> out;
  try {
    out.kappa = spectral_radius(L).value;
  } catch (const ConvergenceError&) {
    Eigen::EigenSolver<Mat<Scalar>> es(L.eval(), false);
    out.kappa = es.eigenvalues().real().maxCoeff();
    out.kappa_from_power_iteration = false;
  }
  out.alpha = out.kappa < Scalar(1e-12) ? Scalar(katz_alpha_fallback) : Scalar(katz_alpha_scale) / out.kappa;
  const Mat<Scalar> A = Mat<Scalar>::Identity(n, n) - out.alpha * L;
  const Vec<Scalar> rhs = Vec<Scalar>::Constant(n, beta);
  Eigen::PartialPivLU<Mat<Scalar>> lu(A);
  out.K = lu.solve(rhs);
  for (int refine = 0; refine < 3; ++refine) {
    const Vec<Scalar> r = rhs - A * out.K;
    if (r.cwiseAbs().maxCoeff() <= Scalar(1e-12) * std::max(Scalar(1), out.K.cwiseAbs().maxCoeff())) break;
    out.K += lu.solve(r);
  }
  // one fixpoint sweep: rows without liabilities come out exactly beta
  out.K = rhs + out.alpha * (L * out.K);
  return out;
}

// ---------------------------------------------------------------------------
// Ranks

/// Rank 1 = highest score, rank n = lowest. Exact ties are broken by a
/// random permutation drawn from tie_seed.
template <typename Derived>
std::vector<int> rank_banks(const Eigen::MatrixBase<Derived>& scores, std::uint64_t tie_seed) {
  const auto n = static_cast<std::size_t>(scores.size());
  std::vector<int> tiebreak(n);
  std::iota(tiebreak.begin(), tiebreak.end(), 0);
  Rng rng(tie_seed);
  std::shuffle(tiebreak.begin(), tiebreak.end(), rng);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return tiebreak[static_cast<std::size_t>(a)] < tiebreak[static_cast<std::size_t>(b)];
  });
  std::vector<int> rank(n);
  for (std::size_t pos = 0; pos < n; ++pos) rank[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos) + 1;
  return rank;
}

}  // namespace ibnet
