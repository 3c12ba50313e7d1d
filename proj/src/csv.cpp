#include "ibnet/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "ibnet/centrality.hpp"

namespace ibnet {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end;
}

bool parse_id(const std::string& s, int& v) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end && v >= 0;
}

// Calls row(cells, line_no) for each data row. The first non-blank line is
// treated as a header when its first cell is not numeric.
template <typename F>
void for_each_row(std::istream& in, std::size_t width, F row) {
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (first) {
      first = false;
      double probe;
      if (!cells.empty() && !parse_double(cells[0], probe)) continue;
    }
    if (cells.size() != width)
      throw CsvError(line_no, "expected " + std::to_string(width) + " fields, got " + std::to_string(cells.size()));
    row(cells, line_no);
  }
}

}  // namespace

Eigen::VectorXd read_capital_csv(std::istream& in) {
  std::vector<std::pair<int, double>> rows;
  for_each_row(in, 2, [&](const std::vector<std::string>& c, int line) {
    int id;
    double cap;
    if (!parse_id(c[0], id)) throw CsvError(line, "bad bank id '" + c[0] + "'");
    if (!parse_double(c[1], cap)) throw CsvError(line, "bad capital '" + c[1] + "'");
    rows.emplace_back(id, cap);
  });
  int n = 0;
  for (const auto& [id, cap] : rows) n = std::max(n, id + 1);
  Eigen::VectorXd C = Eigen::VectorXd::Zero(n);
  for (const auto& [id, cap] : rows) C(id) = cap;
  return C;
}

Eigen::MatrixXd read_liability_csv(std::istream& in, int n) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for_each_row(in, 3, [&](const std::vector<std::string>& c, int line) {
    int i, j;
    double amount;
    if (!parse_id(c[0], i) || i >= n) throw CsvError(line, "bad borrower id '" + c[0] + "'");
    if (!parse_id(c[1], j) || j >= n) throw CsvError(line, "bad lender id '" + c[1] + "'");
    if (!parse_double(c[2], amount) || amount < 0.0) throw CsvError(line, "bad amount '" + c[2] + "'");
    L(i, j) += amount;
  });
  return L;
}

void write_centrality_csv(std::ostream& out, const Eigen::MatrixXd& L, const Eigen::VectorXd& C,
                          std::uint64_t tie_seed) {
  const Eigen::VectorXd dr = debtrank_all(L, C, 1.0);
  const Eigen::VectorXd katz = katz_scores(L).K;
  const auto rank_d = rank_banks(dr, tie_seed);
  const auto rank_k = rank_banks(katz, tie_seed);
  std::ostringstream s;
  s.precision(17);
  s << "bank_id,debtrank,katz,rank_debt,rank_katz\n";
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    s << i << ',' << dr(i) << ',' << katz(i) << ',' << rank_d[k] << ',' << rank_k[k] << '\n';
  }
  out << s.str();
}

}  // namespace ibnet
