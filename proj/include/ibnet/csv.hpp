#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ibnet {

/// Malformed input row; line() is 1-based.
class CsvError : public std::runtime_error {
 public:
  CsvError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// `bank,capital` rows with 0-based ids; an optional header line is skipped.
/// The bank count is the largest id + 1 (missing banks get capital 0).
Eigen::VectorXd read_capital_csv(std::istream& in);

/// `borrower,lender,amount` rows into an n x n matrix; duplicate pairs are
/// summed. Ids must be below n and amounts nonnegative.
Eigen::MatrixXd read_liability_csv(std::istream& in, int n);

/// Writes bank_id,debtrank,katz,rank_debt,rank_katz for a snapshot.
void write_centrality_csv(std::ostream& out, const Eigen::MatrixXd& L, const Eigen::VectorXd& C,
                          std::uint64_t tie_seed = 0);

}  // namespace ibnet
