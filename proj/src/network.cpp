#include "ibnet/network.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ibnet/rng.hpp"

namespace ibnet {

RelationNetwork::RelationNetwork(int size)
    : adj_(Adjacency::Zero(size, size)), neighbors_(static_cast<std::size_t>(size)) {}

void RelationNetwork::link(int i, int j) {
  if (i == j) throw std::invalid_argument("relation network has no self-links");
  if (adj_(i, j)) return;
  adj_(i, j) = adj_(j, i) = 1;
  auto insert = [](std::vector<int>& v, int x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); };
  insert(neighbors_[static_cast<std::size_t>(i)], j);
  insert(neighbors_[static_cast<std::size_t>(j)], i);
}

long RelationNetwork::edge_count() const {
  long twice = 0;
  for (const auto& nb : neighbors_) twice += static_cast<long>(nb.size());
  return twice / 2;
}

double RelationNetwork::mean_degree() const {
  return size() == 0 ? 0.0 : 2.0 * static_cast<double>(edge_count()) / size();
}

RelationNetwork gen_complete(int n) {
  if (n < 2) throw std::invalid_argument("gen_complete: need at least 2 banks, got " + std::to_string(n));
  RelationNetwork net(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) net.link(i, j);
  return net;
}

RelationNetwork gen_er(int n, double gamma, std::uint64_t seed) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("gen_er: edge probability must lie in [0,1]");
  if (n < 1) throw std::invalid_argument("gen_er: need at least 1 bank");
  RelationNetwork net(n);
  Rng rng(seed);
  std::bernoulli_distribution coin(gamma);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) net.link(i, j);
  return net;
}

RelationNetwork gen_ba(int n, int m, std::uint64_t seed) {
  if (m < 1 || m >= n)
    throw std::invalid_argument("gen_ba: need 1 <= m < n, got m=" + std::to_string(m) +
                                " n=" + std::to_string(n));
  RelationNetwork net(n);
  Rng rng(seed);
  // every edge endpoint appears once here, so uniform sampling is degree-proportional
  std::vector<int> endpoints;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      net.link(i, j);
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  std::vector<int> targets;
  for (int v = m; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      int t;
      if (endpoints.empty()) {
        t = std::uniform_int_distribution<int>(0, v - 1)(rng);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
        t = endpoints[pick(rng)];
      }
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (int t : targets) {
      net.link(v, t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return net;
}

void write_edge_list(std::ostream& out, const RelationNetwork& net) {
  for (int i = 0; i < net.size(); ++i)
    for (int j : net.neighbors(i))
      if (i < j) out << i << ' ' << j << '\n';
}

}  // namespace ibnet
