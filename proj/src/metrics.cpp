#include "ibnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ibnet {

double losses(const CascadeReport& report) {
  if (report.capital_before.size() != report.capital_after.size())
    throw std::invalid_argument("losses: capital snapshots differ in length");
  return -(report.capital_after - report.capital_before).sum();
}

int cascade_size(const CascadeReport& report) { return static_cast<int>(report.defaulted_banks.size()); }

std::optional<double> efficiency(std::span<const double> requested, std::span<const double> granted) {
  if (requested.size() != granted.size()) throw std::invalid_argument("efficiency: series are not aligned");
  double sum = 0.0;
  std::size_t steps = 0;
  for (std::size_t t = 0; t < requested.size(); ++t) {
    if (requested[t] <= 0.0) continue;
    sum += granted[t] / requested[t];
    ++steps;
  }
  if (steps == 0) return std::nullopt;
  return sum / static_cast<double>(steps);
}

std::optional<double> transaction_volume(const std::vector<Event>& events, int T, int tau, bool completed) {
  if (!completed) return std::nullopt;
  double volume = 0.0;
  for (const auto& e : events)
    if (e.kind == EventKind::IbLoan && (e.t == T || e.t == T - tau)) volume += e.amount;
  return volume;
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("summary_stats: need at least two values");
  SummaryStats s;
  s.n = values.size();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  s.sd = std::sqrt(m2 / (n - 1.0));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0 && s.sd > 1e-12 * std::max(1.0, std::abs(s.mean))) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
  }
  return s;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace ibnet
