#include <doctest.h>

#include <random>

#include "ibnet/metrics.hpp"

using namespace ibnet;

TEST_CASE("losses and cascade size") {
  CascadeReport r;
  r.defaulted_banks = {2, 0};
  r.capital_before = Eigen::Vector3d(10, 10, 10);
  r.capital_after = Eigen::Vector3d(-5, 10, 2);
  CHECK(losses(r) == doctest::Approx(23.0));
  CHECK(cascade_size(r) == 2);
  r.capital_after = Eigen::Vector2d(1, 1);
  CHECK_THROWS_AS(losses(r), std::invalid_argument);
}

TEST_CASE("efficiency") {
  const std::vector<double> req{0, 10, 20, 5}, got{0, 10, 10, 0};
  CHECK(*efficiency(req, got) == doctest::Approx(0.5));
  const std::vector<double> none{0, 0};
  CHECK_FALSE(efficiency(none, none).has_value());
}

TEST_CASE("volume from the event log") {
  std::vector<Event> ev{{100, EventKind::IbLoan, 0, 1, 4.0, 0}, {90, EventKind::IbLoan, 1, 0, 3.0, 0},
                        {95, EventKind::IbLoan, 1, 0, 9.0, 0}, {100, EventKind::FirmLoan, 0, 0, 7.0, 0}};
  CHECK(*transaction_volume(ev, 100, 10) == doctest::Approx(7.0));
  CHECK_FALSE(transaction_volume(ev, 100, 10, false).has_value());
}

TEST_CASE("moments") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = summary_stats(v);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.sd == doctest::Approx(1.2909944));
  CHECK(*s.skewness == doctest::Approx(0.0));
  CHECK(*s.kurtosis == doctest::Approx(1.64));
  const std::vector<double> flat{2, 2, 2};
  CHECK_FALSE(summary_stats(flat).kurtosis.has_value());

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(5, 2);
  std::vector<double> big(200000);
  for (auto& x : big) x = g(rng);
  CHECK(*summary_stats(big).kurtosis == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("quantile and KS") {
  CHECK(quantile({3, 1, 2, 4, 5}, 0.5) == 3.0);
  CHECK(quantile({0, 10}, 0.99) == doctest::Approx(9.9));
  CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_statistic({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
}
