#include "ibnet/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace ibnet {

std::uint64_t ensemble_seed(const EnsembleConfig& cfg, int run, std::size_t mode_index) {
  const auto k = static_cast<std::uint64_t>(run);
  if (!cfg.unpaired) return cfg.base_seed + k;
  return cfg.base_seed + static_cast<std::uint64_t>(mode_index) * static_cast<std::uint64_t>(cfg.n_runs) + k;
}

int default_thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("SIM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

EnsembleTable run_ensemble(const EnsembleConfig& cfg) {
  if (cfg.n_runs < 1) throw std::invalid_argument("run_ensemble: n_runs must be at least 1");
  if (cfg.modes.empty()) throw std::invalid_argument("run_ensemble: no modes given");
  validate(cfg.params);

  const std::size_t n_modes = cfg.modes.size();
  const std::size_t total = static_cast<std::size_t>(cfg.n_runs) * n_modes;
  EnsembleTable table(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const int run = static_cast<int>(job / n_modes);
      const std::size_t m = job % n_modes;
      SimParams p = cfg.params;
      p.mode = cfg.modes[m].mode;
      p.rank_metric = cfg.modes[m].metric;
      const std::uint64_t seed = ensemble_seed(cfg, run, m);
      auto& row = table[job];
      row.run_id = run;
      try {
        row.record = run_simulation(p, seed, cfg.options);
      } catch (const std::exception& e) {
        row.record = RunRecord{};
        row.record.seed = seed;
        row.record.policy = p.policy();
        row.record.network = p.network_kind;
        row.record.failed = true;
        row.record.error = e.what();
      }
    }
  };

  const int threads = std::max(1, std::min(cfg.threads > 0 ? cfg.threads : default_thread_count(),
                                           static_cast<int>(total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return table;
}

std::vector<RunRecord> records_for(const EnsembleTable& table, const ModePolicy& policy) {
  std::vector<RunRecord> out;
  for (const auto& row : table)
    if (row.record.policy == policy) out.push_back(row.record);
  return out;
}

Histogram histogram(const std::vector<double>& values, double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram: bin_width must be positive");
  Histogram h;
  if (values.empty()) return h;
  const auto bin_of = [bin_width](double v) { return static_cast<long>(std::floor(v / bin_width)); };
  long lo = bin_of(values.front()), hi = lo;
  for (double v : values) {
    lo = std::min(lo, bin_of(v));
    hi = std::max(hi, bin_of(v));
  }
  h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  for (double v : values) ++h.counts[static_cast<std::size_t>(bin_of(v) - lo)];
  for (long b = lo; b <= hi + 1; ++b) h.edges.push_back(static_cast<double>(b) * bin_width);
  return h;
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

void write_ensemble_csv(std::ostream& out, const EnsembleTable& table) {
  out << ensemble_csv_header << '\n';
  for (const auto& row : table) {
    const auto& r = row.record;
    out << row.run_id << ',' << r.seed << ',' << to_string(r.policy) << ',' << to_string(r.network) << ',';
    if (r.t_fd) out << *r.t_fd;
    out << ',' << (r.censored() ? 1 : 0) << ',';
    if (!r.failed) out << fmt(r.losses);
    out << ',';
    if (!r.failed) out << r.cascade_size;
    out << ',';
    if (r.efficiency) out << fmt(*r.efficiency);
    out << ',';
    if (r.volume) out << fmt(*r.volume);
    out << '\n';
  }
}

void write_profile_csv(std::ostream& out, const EnsembleTable& table, const ModePolicy& policy) {
  out << profile_csv_header << '\n';
  for (const auto& row : table) {
    if (!(row.record.policy == policy)) continue;
    const auto& prof = row.record.debtrank_profile;
    for (std::size_t k = 0; k < prof.size(); ++k) out << row.run_id << ',' << k + 1 << ',' << fmt(prof[k]) << '\n';
  }
}

void write_summary_json(std::ostream& out, const EnsembleTable& table, const std::vector<ModePolicy>& modes) {
  using nlohmann::ordered_json;
  ordered_json doc = ordered_json::object();
  for (const auto& mode : modes) {
    std::vector<double> t_fd, loss, size, eff, vol;
    long censored = 0, failed = 0;
    for (const auto& row : table) {
      const auto& r = row.record;
      if (!(r.policy == mode)) continue;
      if (r.failed) {
        ++failed;
        continue;
      }
      if (r.t_fd) {
        t_fd.push_back(*r.t_fd);
        loss.push_back(r.losses);
        size.push_back(r.cascade_size);
      } else {
        ++censored;
      }
      if (r.efficiency) eff.push_back(*r.efficiency);
      if (r.volume) vol.push_back(*r.volume);
    }
    auto stats = [](const std::vector<double>& v) {
      ordered_json j;
      j["n"] = v.size();
      if (v.size() < 2) {
        j["mean"] = v.empty() ? ordered_json(nullptr) : ordered_json(v.front());
        j["sd"] = j["skewness"] = j["kurtosis"] = nullptr;
        return j;
      }
      const auto s = summary_stats(v);
      j["mean"] = s.mean;
      j["sd"] = s.sd;
      j["skewness"] = s.skewness ? ordered_json(*s.skewness) : ordered_json(nullptr);
      j["kurtosis"] = s.kurtosis ? ordered_json(*s.kurtosis) : ordered_json(nullptr);
      return j;
    };
    ordered_json m;
    m["censored"] = censored;
    m["failed"] = failed;
    m["t_fd"] = stats(t_fd);
    m["losses"] = stats(loss);
    m["cascade_size"] = stats(size);
    m["efficiency"] = stats(eff);
    m["volume"] = stats(vol);
    doc[to_string(mode)] = m;
  }
  out << doc.dump(2) << '\n';
}

}  // namespace ibnet
