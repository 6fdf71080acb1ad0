#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "netregime/error.hpp"
#include "netregime/network_model.hpp"

using namespace netregime;

TEST_CASE("generated networks satisfy the model invariants") {
  for (std::size_t n : {1u, 2u, 17u, 300u}) {
    const double A = 3.5 * static_cast<double>(n);
    const auto inst = generate_network(n, A, 1000 + n);
    REQUIRE(inst.node_count() == 2 * n);
    const double side = std::sqrt(A);
    for (const auto& p : inst.positions) {
      CHECK(p.x >= 0.0);
      CHECK(p.x <= 2 * side);
      CHECK(p.y >= 0.0);
      CHECK(p.y <= side);
    }
    const auto sources = std::count(inst.roles.begin(), inst.roles.end(), Role::Source);
    CHECK(static_cast<std::size_t>(sources) == n);
    REQUIRE(inst.pairs.size() == n);
    std::set<std::size_t> srcs, dsts;
    for (std::size_t k = 0; k < n; ++k) {
      const auto [s, d] = inst.pairs[k];
      CHECK(inst.roles[s] == Role::Source);
      CHECK(inst.roles[d] == Role::Destination);
      srcs.insert(s);
      dsts.insert(d);
      if (k) CHECK(inst.pairs[k - 1].first < s);
    }
    CHECK(srcs.size() == n);
    CHECK(dsts.size() == n);
    CHECK_NOTHROW(inst.validate());
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = generate_network(64, 64, 5);
  const auto b = generate_network(64, 64, 5);
  const auto c = generate_network(64, 64, 6);
  CHECK(nlohmann::json(a) == nlohmann::json(b));
  CHECK(nlohmann::json(a) != nlohmann::json(c));
}

TEST_CASE("positions look uniform") {
  const auto inst = generate_network(4000, 4000, 77);
  const double side = inst.side();
  double mx = 0, my = 0;
  for (const auto& p : inst.positions) {
    mx += p.x / (2 * side);
    my += p.y / side;
  }
  const double N = static_cast<double>(inst.node_count());
  CHECK(std::abs(mx / N - 0.5) < 4 * std::sqrt(1.0 / 12 / N));
  CHECK(std::abs(my / N - 0.5) < 4 * std::sqrt(1.0 / 12 / N));
}

TEST_CASE("json round trip") {
  const auto inst = generate_network(10, 20.0, 3);
  const nlohmann::json j = inst;
  CHECK(j.at("n") == 10);
  CHECK(j.at("roles").size() == 20);
  CHECK(j.at("pairing").size() == 10);
  const auto back = j.get<NetworkInstance>();
  CHECK(nlohmann::json(back) == j);
  for (std::size_t i = 0; i < inst.node_count(); ++i) {
    CHECK(back.positions[i].x == inst.positions[i].x);
    CHECK(back.positions[i].y == inst.positions[i].y);
  }
}

TEST_CASE("make_instance rejects broken data") {
  std::vector<Point> pts{{0.1, 0.1}, {0.5, 0.5}};
  std::vector<Role> roles{Role::Source, Role::Destination};
  CHECK_NOTHROW(make_instance(1, 1.0, pts, roles, {{0, 1}}));
  CHECK_THROWS_AS(make_instance(1, 1.0, pts, roles, {{1, 0}}), InvalidArgument);
  CHECK_THROWS_AS(make_instance(1, 1.0, {{0.1, 0.1}, {5.0, 0.5}}, roles, {{0, 1}}),
                  InvalidArgument);
  CHECK_THROWS_AS(make_instance(1, 1.0, pts, {Role::Source, Role::Source}, {{0, 1}}),
                  InvalidArgument);
  CHECK_THROWS_AS(make_instance(1, -1.0, pts, roles, {{0, 1}}), InvalidArgument);
  CHECK_THROWS_AS(generate_network(0, 1.0, 1), InvalidArgument);
}

TEST_CASE("link budget formulas") {
  PhysicalParams p;
  p.power_P = 2.0;
  p.noise_N0 = 0.5;
  p.bandwidth_W = 4.0;
  p.alpha = 3.0;
  p.gain_G = 1.5;
  const double n = 100, A = 400;
  const double expected = 1.5 * 2.0 / (0.5 * 4.0 * std::pow(A / n, 1.5));
  CHECK(snr_short(p, 100, A) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(snr_long(8.0, 100, 3.0) == doctest::Approx(std::pow(n, -0.5) * 8.0).epsilon(1e-14));
  CHECK(beta_of(std::pow(n, 0.3), 100) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(beta_of(2.0, 1), InvalidArgument);
  p.alpha = 1.5;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("channel entries match the path-loss model") {
  const auto inst = generate_network(12, 30.0, 8);
  PhysicalParams p;
  p.alpha = 3.0;
  p.gain_G = 2.0;
  const std::vector<std::size_t> tx{0, 2, 5}, rx{1, 7};
  const auto raw = channel_matrix(inst, p, tx, rx, 44, false);
  const auto res = channel_matrix(inst, p, tx, rx, 44, true);
  REQUIRE(raw.entries.rows() == 2);
  REQUIRE(raw.entries.cols() == 3);
  const double u = std::sqrt(30.0 / 12.0);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) {
      const auto& a = inst.positions[rx[r]];
      const auto& b = inst.positions[tx[c]];
      const double d = std::hypot(a.x - b.x, a.y - b.y);
      CHECK(std::abs(raw.entries(r, c)) == doctest::Approx(std::sqrt(2.0) * std::pow(d, -1.5)));
      CHECK(std::abs(res.entries(r, c)) == doctest::Approx(std::pow(d / u, -1.5)));
      const double theta = channel_phase(44, rx[r], tx[c]);
      CHECK(std::arg(raw.entries(r, c)) == doctest::Approx(std::remainder(theta, 2 * std::numbers::pi)));
    }
  // phases depend only on the node pair, not on the chosen subsets
  const auto sub = channel_matrix(inst, p, std::vector<std::size_t>{5}, std::vector<std::size_t>{7}, 44, true);
  CHECK(sub.entries(0, 0) == res.entries(1, 2));
  CHECK_THROWS_AS(channel_matrix(inst, p, tx, std::vector<std::size_t>{2}, 44, true), InvalidArgument);
  CHECK_THROWS_AS(channel_matrix(inst, p, std::vector<std::size_t>{}, rx, 44, true), InvalidArgument);
}

TEST_CASE("phases are uniform: Kolmogorov-Smirnov") {
  std::vector<double> u;
  for (std::size_t r = 0; r < 100; ++r)
    for (std::size_t t = 0; t < 100; ++t)
      u.push_back(channel_phase(trial_phase_seed(9, 3), r, t) / (2 * std::numbers::pi));
  std::sort(u.begin(), u.end());
  double d = 0;
  const double N = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, (i + 1) / N - u[i], u[i] - i / N});
  // 1% critical value 1.63 / sqrt(N)
  CHECK(d < 1.63 / std::sqrt(N));
  CHECK(trial_phase_seed(9, 3) != trial_phase_seed(9, 4));
}

TEST_CASE("minimum separation matches brute force") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = generate_network(150, 75.0, seed);
    double best = INFINITY;
    for (std::size_t i = 0; i < inst.node_count(); ++i)
      for (std::size_t k = i + 1; k < inst.node_count(); ++k)
        best = std::min(best, rescaled_distance(inst, i, k));
    CHECK(min_rescaled_separation(inst) == doctest::Approx(best).epsilon(1e-12));
  }
}
