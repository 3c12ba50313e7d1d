#include "ibnet/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ibnet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw std::invalid_argument("not a finite number: '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using Setter = std::function<void(SimParams&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n_banks", [](SimParams& p, const std::string& v) { p.n_banks = parse_int(v); }},
      {"n_firms", [](SimParams& p, const std::string& v) { p.n_firms = parse_int(v); }},
      {"max_timesteps", [](SimParams& p, const std::string& v) { p.max_timesteps = parse_int(v); }},
      {"tau", [](SimParams& p, const std::string& v) { p.tau = parse_int(v); }},
      {"r_ib", [](SimParams& p, const std::string& v) { p.r_ib = parse_double(v); }},
      {"r_floan", [](SimParams& p, const std::string& v) { p.r_floan = parse_double(v); }},
      {"r_h", [](SimParams& p, const std::string& v) { p.r_h = parse_double(v); }},
      {"r_fdeposit", [](SimParams& p, const std::string& v) { p.r_fdeposit = parse_double(v); }},
      {"loan_request_max",
       [](SimParams& p, const std::string& v) { p.loan_request_max = parse_double(v); }},
      {"invest_fraction",
       [](SimParams& p, const std::string& v) { p.invest_fraction = parse_double(v); }},
      {"deposit_fraction",
       [](SimParams& p, const std::string& v) { p.deposit_fraction = parse_double(v); }},
      {"consumption_dispersion",
       [](SimParams& p, const std::string& v) { p.consumption_dispersion = parse_double(v); }},
      {"firm_return_mean",
       [](SimParams& p, const std::string& v) {
         // scalar, or a comma-separated list with one entry per firm
         if (v.find(',') == std::string::npos) {
           p.firm_return_mean = parse_double(v);
           p.firm_return_means.clear();
           return;
         }
         std::vector<double> values;
         std::stringstream ss(v);
         for (std::string item; std::getline(ss, item, ',');) values.push_back(parse_double(trim(item)));
         p.firm_return_means = std::move(values);
       }},
      {"firm_return_spread",
       [](SimParams& p, const std::string& v) { p.firm_return_spread = parse_double(v); }},
      {"firm_return_sd", [](SimParams& p, const std::string& v) { p.firm_return_sd = parse_double(v); }},
      {"firm_default_threshold",
       [](SimParams& p, const std::string& v) { p.firm_default_threshold = parse_double(v); }},
      {"initial_bank_cash",
       [](SimParams& p, const std::string& v) { p.initial_bank_cash = parse_double(v); }},
      {"initial_firm_cash",
       [](SimParams& p, const std::string& v) { p.initial_firm_cash = parse_double(v); }},
      {"initial_household_cash",
       [](SimParams& p, const std::string& v) { p.initial_household_cash = parse_double(v); }},
      {"mode", [](SimParams& p, const std::string& v) { p.mode = parse_mode(v); }},
      {"rank_metric", [](SimParams& p, const std::string& v) { p.rank_metric = parse_rank_metric(v); }},
      {"network_kind", [](SimParams& p, const std::string& v) { p.network_kind = parse_network_kind(v); }},
  };
  return table;
}

struct Problem {
  std::string field;
  std::string message;
};

std::vector<Problem> check(const SimParams& p) {
  std::vector<Problem> out;
  auto require = [&](bool ok, const char* field, const std::string& msg) {
    if (!ok) out.push_back({field, msg});
  };
  require(p.n_banks >= 2, "n_banks", "must be at least 2");
  require(p.n_firms == p.n_banks, "n_firms", "must equal n_banks");
  require(p.max_timesteps >= 1, "max_timesteps", "must be positive");
  require(p.tau >= 1, "tau", "must be at least 1");
  require(p.r_ib > 0.0, "r_ib", "must be positive");
  require(p.r_floan > p.r_ib, "r_floan", "must exceed r_ib");
  require(p.r_h >= 0.0, "r_h", "must be nonnegative");
  require(p.r_fdeposit >= 0.0, "r_fdeposit", "must be nonnegative");
  require(p.loan_request_max >= 0.0, "loan_request_max", "must be nonnegative");
  require(p.invest_fraction >= 0.0 && p.invest_fraction <= 1.0, "invest_fraction",
          "must lie in [0,1]");
  require(p.deposit_fraction >= 0.0 && p.deposit_fraction <= 1.0, "deposit_fraction",
          "must lie in [0,1]");
  require(p.consumption_dispersion >= 0.0, "consumption_dispersion", "must be nonnegative");
  require(p.firm_return_spread >= 0.0, "firm_return_spread", "must be nonnegative");
  require(p.firm_return_sd >= 0.0, "firm_return_sd", "must be nonnegative");
  require(p.firm_return_means.empty() ||
              p.firm_return_means.size() == static_cast<std::size_t>(p.n_firms),
          "firm_return_mean", "per-firm list must have n_firms entries");
  require(p.firm_default_threshold < 0.0, "firm_default_threshold", "must be negative");
  require(p.initial_bank_cash >= 0.0, "initial_bank_cash", "must be nonnegative");
  require(p.initial_firm_cash >= 0.0, "initial_firm_cash", "must be nonnegative");
  require(p.initial_household_cash >= 0.0, "initial_household_cash", "must be nonnegative");
  switch (p.network_kind.type) {
    case NetworkKind::Type::ER:
      require(p.network_kind.edge_prob >= 0.0 && p.network_kind.edge_prob <= 1.0, "network_kind",
              "ER edge probability must lie in [0,1]");
      break;
    case NetworkKind::Type::BA:
      require(p.network_kind.attach >= 1 && p.network_kind.attach < p.n_banks, "network_kind",
              "BA attachment count must satisfy 1 <= m < n_banks");
      break;
    case NetworkKind::Type::Complete:
      break;
  }
  return out;
}

[[noreturn]] void raise(const std::vector<Problem>& problems) {
  std::vector<std::string> fields;
  std::string msg = "invalid configuration:";
  for (const auto& pr : problems) {
    fields.push_back(pr.field);
    msg += "\n  " + pr.field + ": " + pr.message;
  }
  throw ConfigError(std::move(fields), msg);
}

}  // namespace

void validate(const SimParams& p) {
  if (auto problems = check(p); !problems.empty()) raise(problems);
}

SimParams parse_config(std::istream& in) {
  SimParams p;
  std::vector<Problem> problems;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find_first_of("=:");
    if (eq == std::string::npos) {
      problems.push_back({"line " + std::to_string(lineno), "expected 'key = value'"});
      continue;
    }
    // `network_kind = er:0.115` contains a colon in the value; split on the first separator only
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
      problems.push_back({key, "unknown key"});
      continue;
    }
    if (++seen[key] > 1) {
      problems.push_back({key, "duplicate key"});
      continue;
    }
    try {
      it->second(p, value);
    } catch (const std::exception& e) {
      problems.push_back({key, e.what()});
    }
  }
  for (auto& pr : check(p)) {
    const bool already = std::any_of(problems.begin(), problems.end(),
                                     [&](const Problem& q) { return q.field == pr.field; });
    if (!already) problems.push_back(std::move(pr));
  }
  if (!problems.empty()) raise(problems);
  return p;
}

SimParams load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config"}, "cannot read config file '" + path + "'");
  return parse_config(in);
}

std::string to_config(const SimParams& p) {
  std::ostringstream os;
  os << "n_banks = " << p.n_banks << '\n'
     << "n_firms = " << p.n_firms << '\n'
     << "max_timesteps = " << p.max_timesteps << '\n'
     << "tau = " << p.tau << '\n'
     << "r_ib = " << fmt(p.r_ib) << '\n'
     << "r_floan = " << fmt(p.r_floan) << '\n'
     << "r_h = " << fmt(p.r_h) << '\n'
     << "r_fdeposit = " << fmt(p.r_fdeposit) << '\n'
     << "loan_request_max = " << fmt(p.loan_request_max) << '\n'
     << "invest_fraction = " << fmt(p.invest_fraction) << '\n'
     << "deposit_fraction = " << fmt(p.deposit_fraction) << '\n'
     << "consumption_dispersion = " << fmt(p.consumption_dispersion) << '\n';
  if (p.firm_return_means.empty()) {
    os << "firm_return_mean = " << fmt(p.firm_return_mean) << '\n'
       << "firm_return_spread = " << fmt(p.firm_return_spread) << '\n';
  } else {
    os << "firm_return_mean = ";
    for (std::size_t i = 0; i < p.firm_return_means.size(); ++i)
      os << (i ? "," : "") << fmt(p.firm_return_means[i]);
    os << '\n';
  }
  os << "firm_return_sd = " << fmt(p.firm_return_sd) << '\n'
     << "firm_default_threshold = " << fmt(p.firm_default_threshold) << '\n'
     << "initial_bank_cash = " << fmt(p.initial_bank_cash) << '\n'
     << "initial_firm_cash = " << fmt(p.initial_firm_cash) << '\n'
     << "initial_household_cash = " << fmt(p.initial_household_cash) << '\n'
     << "mode = " << to_string(p.mode) << '\n'
     << "rank_metric = " << to_string(p.rank_metric) << '\n'
     << "network_kind = " << to_string(p.network_kind) << '\n';
  return os.str();
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Normal: return "normal";
    case Mode::Transparent: return "transparent";
    case Mode::Fast: return "fast";
  }
  return "?";
}

std::string to_string(RankMetric m) { return m == RankMetric::DebtRank ? "debtrank" : "katz"; }

std::string to_string(const NetworkKind& k) {
  switch (k.type) {
    case NetworkKind::Type::Complete: return "complete";
    case NetworkKind::Type::ER: return "er:" + fmt(k.edge_prob);
    case NetworkKind::Type::BA: return "ba:" + std::to_string(k.attach);
  }
  return "?";
}

std::string to_string(const ModePolicy& p) {
  std::string s = to_string(p.mode);
  if (p.mode != Mode::Normal && p.metric == RankMetric::Katz) s += "-katz";
  return s;
}

ModePolicy parse_policy(const std::string& s) {
  constexpr std::string_view suffix = "-katz";
  if (s.size() > suffix.size() && s.ends_with(suffix))
    return {parse_mode(s.substr(0, s.size() - suffix.size())), RankMetric::Katz};
  return {parse_mode(s), RankMetric::DebtRank};
}

Mode parse_mode(const std::string& s) {
  if (s == "normal") return Mode::Normal;
  if (s == "transparent") return Mode::Transparent;
  if (s == "fast") return Mode::Fast;
  throw std::invalid_argument("unknown mode '" + s + "' (normal|transparent|fast)");
}

RankMetric parse_rank_metric(const std::string& s) {
  if (s == "debtrank") return RankMetric::DebtRank;
  if (s == "katz") return RankMetric::Katz;
  throw std::invalid_argument("unknown rank metric '" + s + "' (debtrank|katz)");
}

NetworkKind parse_network_kind(const std::string& s) {
  if (s == "complete") return NetworkKind::complete();
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  if (colon != std::string::npos) {
    const std::string arg = s.substr(colon + 1);
    if (head == "er") return NetworkKind::er(parse_double(arg));
    if (head == "ba") return NetworkKind::ba(parse_int(arg));
  }
  throw std::invalid_argument("unknown network kind '" + s + "' (complete|er:GAMMA|ba:M)");
}

}  // namespace ibnet
