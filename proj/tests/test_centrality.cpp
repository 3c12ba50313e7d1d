#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ibnet/centrality.hpp"
#include "oracles.hpp"

using namespace ibnet;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd to_eigen(const oracle::Table& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

MatrixXd two_bank() {
  MatrixXd L = MatrixXd::Zero(2, 2);
  L(0, 1) = 10.0;  // bank 0 owes bank 1
  return L;
}

}  // namespace

TEST_CASE("impact matrix") {
  MatrixXd L = MatrixXd::Zero(3, 3);
  L(0, 1) = 50;
  L(1, 2) = 200;
  L(2, 0) = 10;
  VectorXd C(3);
  C << 0, 100, 100;
  const MatrixXd W = impact_matrix(L, C);
  CHECK(W(0, 1) == doctest::Approx(0.5));
  CHECK(W(1, 2) == 1.0);
  CHECK(W(2, 0) == 1.0);  // zero capital
  CHECK(W(0, 2) == 0.0);
  CHECK((W.array() >= 0).all());
  CHECK((W.array() <= 1).all());
}

TEST_CASE("economic value") {
  const auto ev = economic_value(two_bank());
  CHECK(ev.v(0) == 0.0);
  CHECK(ev.v(1) == 1.0);
  MatrixXd all = MatrixXd::Constant(4, 4, 3.0);
  all.diagonal().setZero();
  for (int i = 0; i < 4; ++i) CHECK(economic_value(all).v(i) == doctest::Approx(0.25));
  CHECK(economic_value(MatrixXd::Zero(3, 3)).degenerate);
}

TEST_CASE("DebtRank hand examples") {
  VectorXd C(2);
  C << 5, 5;
  const MatrixXd W = impact_matrix(two_bank(), C);
  const VectorXd v = economic_value(two_bank()).v;
  const int first = 0, second = 1;
  CHECK(debtrank(W, v, std::span<const int>(&first, 1), 1.0).value == doctest::Approx(1.0));
  CHECK(debtrank(W, v, std::span<const int>(&second, 1), 1.0).value == 0.0);

  // star: the center owes each of three leaves half their capital
  MatrixXd S = MatrixXd::Zero(4, 4);
  for (int leaf = 1; leaf < 4; ++leaf) S(0, leaf) = 5.0;
  VectorXd Cs = VectorXd::Constant(4, 10.0);
  const auto star = debtrank(impact_matrix(S, Cs), economic_value(S).v, std::span<const int>(&first, 1), 1.0);
  CHECK(star.value == doctest::Approx(0.5));
  for (int leaf = 1; leaf < 4; ++leaf) CHECK(star.h(leaf) == doctest::Approx(0.5));

  const VectorXd all = debtrank_all(two_bank(), C, 1.0);
  CHECK(all(0) == doctest::Approx(1.0));
  CHECK(all(1) == 0.0);
}

TEST_CASE("DebtRank agrees with the state-table oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 5;
    const auto Lt = oracle::random_liabilities(rng, n, 0.5, 20.0);
    std::vector<double> Ct(static_cast<std::size_t>(n));
    for (auto& c : Ct) c = std::uniform_real_distribution<double>(-2.0, 30.0)(rng);
    const auto Wt = oracle::impact(Lt, Ct);
    const auto vt = oracle::value(Lt);
    const MatrixXd W = impact_matrix(to_eigen(Lt), Eigen::Map<const VectorXd>(Ct.data(), n));
    CHECK(W.isApprox(to_eigen(Wt), 0.0));
    const VectorXd v = economic_value(to_eigen(Lt)).v;
    for (int i = 0; i < n; ++i) {
      const auto expect = oracle::debtrank(Wt, vt, i, 1.0);
      const auto got = debtrank(W, v, std::span<const int>(&i, 1), 1.0);
      CHECK(got.value == doctest::Approx(expect.value).epsilon(1e-12));
      CHECK(got.rounds == expect.rounds);
      CHECK(got.rounds <= n);
      CHECK(got.value >= -1e-15);
      CHECK(got.value <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("DebtRank with partial initial distress") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 4;
    const auto Lt = oracle::random_liabilities(rng, n, 0.6, 10.0);
    std::vector<double> Ct(static_cast<std::size_t>(n), 8.0);
    const auto Wt = oracle::impact(Lt, Ct);
    const auto vt = oracle::value(Lt);
    const double psi = 0.3;
    const int seed = trial % n;
    const auto got = debtrank(to_eigen(Wt), economic_value(to_eigen(Lt)).v, std::span<const int>(&seed, 1), psi);
    CHECK(got.value == doctest::Approx(oracle::debtrank(Wt, vt, seed, psi).value).epsilon(1e-12));
  }
}

TEST_CASE("banks without lenders propagate nothing") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto Lt = oracle::random_liabilities(rng, 5, 0.5, 10.0);
    std::fill(Lt[2].begin(), Lt[2].end(), 0.0);
    const VectorXd R = debtrank_all(to_eigen(Lt), VectorXd::Constant(5, 3.0), 1.0);
    CHECK(R(2) == 0.0);
  }
}

TEST_CASE("dead banks are masked out") {
  MatrixXd L = MatrixXd::Zero(3, 3);
  L(0, 1) = 10;
  L(1, 2) = 10;
  const VectorXd C = VectorXd::Constant(3, 5.0);
  const bool alive[] = {true, false, true};
  const VectorXd R = debtrank_all(L, C, 1.0, std::span<const bool>(alive, 3));
  CHECK(R(0) == 0.0);
  CHECK(R(1) == 0.0);
}

TEST_CASE("normalized DebtRank") {
  VectorXd R(3);
  R << 1, 3, 0;
  const auto n = normalize_debtrank(R);
  CHECK(n.values.sum() == doctest::Approx(1.0));
  CHECK(n.values(1) == doctest::Approx(0.75));
  const auto z = normalize_debtrank(VectorXd::Zero(4));
  CHECK(z.degenerate);
  CHECK(z.values(0) == doctest::Approx(0.25));
}

TEST_CASE("recursive impact") {
  MatrixXd W = MatrixXd::Zero(2, 2);
  VectorXd v(2);
  v << 0, 1;
  W(0, 1) = 1;
  CHECK(recursive_impact(W, v, 0.0)(0) == doctest::Approx(1.0));
  CHECK(recursive_impact(MatrixXd::Zero(3, 3), VectorXd::Constant(3, 1.0 / 3), 0.5).isZero());
  W(1, 0) = 1;
  v << 0.5, 0.5;
  const VectorXd I = recursive_impact(W, v, 0.5);
  CHECK(I.allFinite());
  CHECK(I(0) == doctest::Approx(1.0));  // I = 0.5 + 0.5 I
  CHECK_THROWS_AS(recursive_impact(W, v, 1.0, 1e-10, 2000), ConvergenceError);
}

TEST_CASE("Katz hand examples") {
  const auto k = katz_scores(two_bank());
  CHECK(k.kappa == 0.0);
  CHECK(k.alpha == doctest::Approx(katz_alpha_fallback));
  CHECK(k.K(0) == doctest::Approx(2.0));
  CHECK(k.K(1) == doctest::Approx(1.0));
  CHECK(k.K(0) > k.K(1));
  const auto zero = katz_scores(MatrixXd::Zero(4, 4));
  CHECK(zero.K.isApprox(VectorXd::Ones(4)));
  CHECK_THROWS_AS(katz_scores(-two_bank()), std::invalid_argument);
}

TEST_CASE("Katz fixpoint on random matrices") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 19;
    const MatrixXd L = to_eigen(oracle::random_liabilities(rng, n, trial % 3 == 0 ? 0.1 : 0.4, 50.0));
    const auto k = katz_scores(L);
    const double residual = (k.K - (k.alpha * L * k.K + VectorXd::Ones(n))).cwiseAbs().maxCoeff();
    CHECK(residual <= 1e-10);
    CHECK((k.K.array() >= 1.0).all());
    if (k.kappa > 0) {
      Eigen::EigenSolver<MatrixXd> es(L, false);
      CHECK(k.kappa == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-7));
    }
  }
}

TEST_CASE("ranks") {
  VectorXd s(4);
  s << 0.2, 0.9, 0.1, 0.4;
  const auto r = rank_banks(s, 1);
  CHECK(r == std::vector<int>{3, 1, 4, 2});

  const VectorXd ties = VectorXd::Zero(6);
  std::set<std::vector<int>> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto t = rank_banks(ties, seed);
    CHECK(t == rank_banks(ties, seed));
    seen.insert(t);
    std::sort(t.begin(), t.end());
    CHECK(t == std::vector<int>{1, 2, 3, 4, 5, 6});
  }
  CHECK(seen.size() > 1);
}

TEST_CASE("single precision instantiation") {
  Eigen::MatrixXf L = Eigen::MatrixXf::Zero(2, 2);
  L(0, 1) = 10.0f;
  const Eigen::VectorXf C = Eigen::VectorXf::Constant(2, 5.0f);
  CHECK(debtrank_all(L, C, 1.0f)(0) == doctest::Approx(1.0));
  CHECK(katz_scores(L).K(0) == doctest::Approx(2.0));
}
