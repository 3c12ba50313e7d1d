#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace ibnet {

using Adjacency = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Symmetric interbank relation network A with zero diagonal. A_ij = 1 when
/// banks i and j are willing to trade interbank loans.
class RelationNetwork {
 public:
  RelationNetwork() = default;
  explicit RelationNetwork(int size);

  int size() const { return static_cast<int>(adj_.rows()); }
  bool linked(int i, int j) const { return adj_(i, j) != 0; }
  void link(int i, int j);

  const Adjacency& adjacency() const { return adj_; }
  const std::vector<int>& neighbors(int i) const { return neighbors_[static_cast<std::size_t>(i)]; }

  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  long edge_count() const;
  double mean_degree() const;

  friend bool operator==(const RelationNetwork& a, const RelationNetwork& b) { return a.adj_ == b.adj_; }

 private:
  Adjacency adj_;
  std::vector<std::vector<int>> neighbors_;  // ascending
};

RelationNetwork gen_complete(int n);
RelationNetwork gen_er(int n, double gamma, std::uint64_t seed);
/// Barabasi-Albert preferential attachment grown from an m-clique.
RelationNetwork gen_ba(int n, int m, std::uint64_t seed);

/// One "i j" line per undirected edge (i < j), 0-indexed.
void write_edge_list(std::ostream& out, const RelationNetwork& net);

}  // namespace ibnet
