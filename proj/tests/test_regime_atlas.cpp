#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "netregime/error.hpp"
#include "netregime/regime_atlas.hpp"

using namespace netregime;

namespace {

// Independent table: each row's membership test written out on its own.
int table_regime(double a, double b) {
  const bool row1 = b >= a / 2 - 1;
  const bool row2 = b < a / 2 - 1 && a >= 2 && a <= 3;
  const bool row3 = b <= 0 && a > 3;
  const bool row4 = b > 0 && b < a / 2 - 1 && a > 3;
  REQUIRE(row1 + row2 + row3 + row4 == 1);
  return row1 ? 1 : row2 ? 2 : row3 ? 3 : 4;
}

}  // namespace

TEST_CASE("classifier examples") {
  auto p = classify(3, 2);
  CHECK(p.regime == Regime::I);
  CHECK(p.exponent == 1.0);
  p = classify(2.5, 0);
  CHECK(p.regime == Regime::II);
  CHECK(p.exponent == doctest::Approx(0.75));
  p = classify(4, -0.5);
  CHECK(p.regime == Regime::III);
  CHECK(p.exponent == doctest::Approx(0.0));
  p = classify(4, 0.5);
  CHECK(p.regime == Regime::IV);
  CHECK(p.exponent == doctest::Approx(0.75));
  CHECK_THROWS_AS(classify(1.9, 0), InvalidArgument);
}

TEST_CASE("classifier agrees with the inequality table") {
  for (int i = 0; i < 150; ++i)
    for (int j = 0; j < 150; ++j) {
      const double a = 2 + 4.0 * i / 149, b = -1 + 4.0 * j / 149;
      CHECK(static_cast<int>(classify(a, b).regime) == table_regime(a, b));
    }
}

TEST_CASE("boundary closures and flags") {
  CHECK(classify(4, 1).regime == Regime::I);
  CHECK(classify(4, 1).boundary.hc_edge);
  CHECK(classify(4, 0).regime == Regime::III);
  CHECK(classify(4, 0).boundary.zero_beta);
  CHECK(classify(3, 0.2).regime == Regime::II);
  CHECK(classify(3, 0.2).boundary.alpha_three);
  CHECK_FALSE(classify(4.5, 0.3).boundary.any());
}

TEST_CASE("special cases") {
  for (double a = 2; a <= 6; a += 0.1) {
    CHECK(classify(a, a / 2).exponent == 1.0);
    const double e0 = classify(a, 0).exponent;
    if (a <= 3)
      CHECK(e0 == doctest::Approx(2 - a / 2));
    else
      CHECK(e0 == doctest::Approx(0.5));
  }
}

TEST_CASE("capacity estimate rows and homogeneity") {
  PhysicalParams p;
  p.alpha = 4;
  p.power_P = 1;
  p.noise_N0 = 1;
  p.bandwidth_W = 1;
  // snr_s = 1 at A = n: snr_l = 1/n -> row III
  auto c = capacity_estimate(p, 100, 100);
  CHECK(c.regime == Regime::III);
  CHECK(c.bits_per_second == doctest::Approx(10.0 * c.received_power / p.noise_N0));
  p.power_P = 0.5;
  CHECK(capacity_estimate(p, 100, 100).bits_per_second == doctest::Approx(0.5 * c.bits_per_second));
  // dense: snr_l = 100
  p.alpha = 2;
  p.power_P = 100;
  c = capacity_estimate(p, 50, 50);
  CHECK(c.snr_l == doctest::Approx(100));
  CHECK(c.regime == Regime::I);
  CHECK(c.bits_per_second == doctest::Approx(50 * p.bandwidth_W));
  p.bandwidth_W = 2;
  p.power_P = 200;
  CHECK(capacity_estimate(p, 50, 50).bits_per_second == doctest::Approx(100));
  // row II and IV
  p = PhysicalParams{};
  p.alpha = 2.5;
  CHECK(capacity_estimate(p, 10000, 10000).regime == Regime::II);
  p.alpha = 4;
  p.power_P = 50;
  c = capacity_estimate(p, 10000, 10000);
  CHECK(c.regime == Regime::IV);
  CHECK(c.bits_per_second == doctest::Approx(100 * std::pow(1.0, 0.5) * std::pow(50.0, 0.5)));
}

TEST_CASE("scheme exponents") {
  auto e = scheme_exponents(4, 1);
  CHECK(e.multihop == 0.5);
  CHECK(e.hierarchical == 1.0);
  REQUIRE(e.hybrid);
  CHECK(*e.hybrid == doctest::Approx(1.0));
  CHECK(scheme_exponents(4, -1).multihop == doctest::Approx(-0.5));
  CHECK(scheme_exponents(2, 0).hierarchical == 1.0);
  CHECK_FALSE(scheme_exponents(4, -0.2).hybrid);
  CHECK_FALSE(scheme_exponents(4, 1.5).hybrid);
  CHECK(scheme_exponents(2.5, 0).optimal == Scheme::BurstyHierarchicalCooperation);
  CHECK(scheme_exponents(5, 0.5).optimal == Scheme::Hybrid);
  CHECK(scheme_exponents(5, -0.5).optimal == Scheme::Multihop);
  CHECK(scheme_exponents(3, 3).optimal == Scheme::HierarchicalCooperation);
}

TEST_CASE("best valid scheme reaches the capacity exponent at interior points") {
  for (int i = 0; i < 97; ++i)
    for (int j = 0; j < 97; ++j) {
      const double a = 2.01 + 3.98 * i / 96, b = -0.99 + 3.98 * j / 96;
      const auto p = classify(a, b);
      if (p.boundary.any()) continue;
      const auto e = scheme_exponents(a, b);
      const double best = std::max({e.multihop, e.hierarchical, e.hybrid.value_or(-1e9)});
      CHECK(best == doctest::Approx(p.exponent).epsilon(1e-12));
    }
}

TEST_CASE("phase diagram grid and outputs") {
  const auto d = phase_diagram({2, 6, 5}, {-1, 3, 5});
  REQUIRE(d.cells.size() == 25);
  CHECK(d.at(0, 0).beta == -1);
  CHECK(d.at(4, 4).alpha == 6);
  CHECK(d.at(2, 3).alpha == 5);
  CHECK(d.at(2, 3).beta == 1);
  std::set<Regime> seen;
  for (const auto& c : d.cells) seen.insert(c.regime);
  CHECK(seen.size() == 4);
  for (const auto& c : d.cells)
    if (c.regime == Regime::IV) CHECK(c.alpha > 3);

  std::ostringstream csv;
  write_phase_diagram_csv(csv, phase_diagram({4, 4, 1}, {0.5, 0.5, 1}));
  CHECK(csv.str() ==
        "alpha,beta,regime,exponent,e_multihop,e_hc,e_hybrid,optimal_scheme\n"
        "4,0.5,IV,0.75,0.5,0.5,0.75,hybrid\n");
  std::ostringstream plot;
  write_phase_diagram_plot(plot, d);
  std::string first, line;
  std::istringstream in(plot.str());
  std::getline(in, first);
  std::getline(in, line);
  CHECK(line == "1 1 1 1 1");  // beta = 3
  CHECK_THROWS_AS(phase_diagram({1, 6, 5}, {-1, 3, 5}), InvalidArgument);
}
