#pragma once

// Slow, literal reference implementations used as test oracles. They share
// no code with the library.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Table = std::vector<std::vector<double>>;

enum State { U, D, I };

struct DebtRankTrace {
  double value = 0.0;
  int rounds = 0;
  std::vector<double> h;
};

// W[i][j] = min(1, L[i][j] / C[j]); a nonpositive C with a positive loan gives 1.
inline Table impact(const Table& L, const std::vector<double>& C) {
  const std::size_t n = L.size();
  Table W(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (L[i][j] <= 0.0) continue;
      W[i][j] = C[j] <= 0.0 ? 1.0 : std::min(1.0, L[i][j] / C[j]);
    }
  return W;
}

inline std::vector<double> value(const Table& L) {
  const std::size_t n = L.size();
  std::vector<double> v(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      v[i] += L[j][i];
      total += L[j][i];
    }
  for (auto& x : v) x = total > 0.0 ? x / total : 1.0 / static_cast<double>(n);
  return v;
}

// Full state tables h(t), s(t) for every t, updated synchronously.
inline DebtRankTrace debtrank(const Table& W, const std::vector<double>& v, int seed, double psi) {
  const std::size_t n = W.size();
  std::vector<std::vector<double>> h(1, std::vector<double>(n, 0.0));
  std::vector<std::vector<State>> s(1, std::vector<State>(n, U));
  h[0][static_cast<std::size_t>(seed)] = psi;
  s[0][static_cast<std::size_t>(seed)] = D;
  DebtRankTrace out;
  for (int t = 1;; ++t) {
    const auto& hp = h.back();
    const auto& sp = s.back();
    bool any_d = false;
    for (auto x : sp) any_d = any_d || x == D;
    if (!any_d) break;
    std::vector<double> hn(n);
    std::vector<State> sn(n);
    for (std::size_t i = 0; i < n; ++i) {
      double add = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (sp[j] == D) add += W[j][i] * hp[j];
      hn[i] = std::min(1.0, hp[i] + add);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (sp[i] == D) sn[i] = I;
      else if (hn[i] > 0.0 && sp[i] != I) sn[i] = D;
      else sn[i] = sp[i];
    }
    h.push_back(hn);
    s.push_back(sn);
    out.rounds = t;
  }
  double fin = 0.0, ini = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    fin += h.back()[j] * v[j];
    ini += h.front()[j] * v[j];
  }
  out.value = fin - ini;
  out.h = h.back();
  return out;
}

// Random sparse nonnegative matrix with zero diagonal.
inline Table random_liabilities(std::mt19937_64& rng, int n, double density, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Table L(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && u(rng) < density) L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = scale * u(rng);
  return L;
}

}  // namespace oracle
