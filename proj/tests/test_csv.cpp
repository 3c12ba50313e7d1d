#include <doctest.h>

#include <sstream>

#include "ibnet/csv.hpp"

using namespace ibnet;

namespace {

std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("capital and liability readers") {
  std::istringstream cap("bank,capital\n0,5\n1,5\n");
  const auto C = read_capital_csv(cap);
  REQUIRE(C.size() == 2);
  CHECK(C(1) == 5.0);

  std::istringstream liab("borrower,lender,amount\n0,1,4\n0,1,6\n\n1,0,2.5\n");
  const auto L = read_liability_csv(liab, 2);
  CHECK(L(0, 1) == 10.0);
  CHECK(L(1, 0) == 2.5);
}

TEST_CASE("malformed rows name their line") {
  std::istringstream bad_amount("0,1,4\n0,1,-3\n");
  try {
    read_liability_csv(bad_amount, 2);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream out_of_range("0,7,1\n");
  CHECK_THROWS_AS(read_liability_csv(out_of_range, 2), CsvError);
  std::istringstream short_row("bank,capital\n0\n");
  CHECK_THROWS_AS(read_capital_csv(short_row), CsvError);
  std::istringstream bad_id("x1,5\n0,3\n");  // header-like first line is skipped
  CHECK(read_capital_csv(bad_id).size() == 1);
}

TEST_CASE("centrality snapshot") {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2, 2);
  L(0, 1) = 10;
  const Eigen::VectorXd C = Eigen::VectorXd::Constant(2, 5.0);
  std::ostringstream out;
  write_centrality_csv(out, L, C);
  const auto rows = rows_of(out.str());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"bank_id", "debtrank", "katz", "rank_debt", "rank_katz"});
  CHECK(std::stod(rows[1][1]) == 1.0);
  CHECK(std::stod(rows[2][1]) == 0.0);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(2.0));
  CHECK(rows[1][3] == "1");
  CHECK(rows[2][4] == "2");

  std::ostringstream empty;
  write_centrality_csv(empty, Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Constant(3, 1.0));
  for (std::size_t i = 1; i < 4; ++i) CHECK(std::stod(rows_of(empty.str())[i][2]) == 1.0);
}
