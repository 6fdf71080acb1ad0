#include "netregime/network_model.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "netregime/error.hpp"
#include "netregime/rng.hpp"

namespace netregime {
namespace {

// Purpose tags keep the position, role and pairing streams independent.
constexpr std::uint64_t kTagPositions = 1;
constexpr std::uint64_t kTagRoles = 2;
constexpr std::uint64_t kTagPairing = 3;
constexpr std::uint64_t kTagPhase = 4;
constexpr std::uint64_t kRetryStride = 0x9E3779B97F4A7C15ull;
constexpr unsigned kMaxRetries = 64;

template <typename T>
void shuffle(std::vector<T>& v, RandomStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

bool has_coincident(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].x == pts[i - 1].x && pts[i].y == pts[i - 1].y) return true;
  return false;
}

NetworkInstance draw(std::size_t n, double area, std::uint64_t draw_seed) {
  NetworkInstance inst;
  inst.n_pairs = n;
  inst.area_A = area;
  const double h = std::sqrt(area);
  const std::size_t nodes = 2 * n;

  const std::uint64_t pos_key = mix_seed(draw_seed, {kTagPositions});
  inst.positions.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    inst.positions[i].x = 2.0 * h * uniform_at(pos_key, i, 0);
    inst.positions[i].y = h * uniform_at(pos_key, i, 1);
  }

  std::vector<std::size_t> order(nodes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream role_rng(mix_seed(draw_seed, {kTagRoles}));
  shuffle(order, role_rng);
  inst.roles.assign(nodes, Role::Destination);
  std::vector<std::size_t> sources(order.begin(), order.begin() + n);
  std::vector<std::size_t> dests(order.begin() + n, order.end());
  for (std::size_t s : sources) inst.roles[s] = Role::Source;
  std::sort(sources.begin(), sources.end());
  std::sort(dests.begin(), dests.end());

  RandomStream pair_rng(mix_seed(draw_seed, {kTagPairing}));
  shuffle(dests, pair_rng);
  inst.pairs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) inst.pairs.emplace_back(sources[j], dests[j]);
  return inst;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace

void PhysicalParams::validate() const {
  require(std::isfinite(power_P) && power_P > 0, "power_P must be positive");
  require(std::isfinite(noise_N0) && noise_N0 > 0, "noise_N0 must be positive");
  require(std::isfinite(bandwidth_W) && bandwidth_W > 0, "bandwidth_W must be positive");
  require(std::isfinite(gain_G) && gain_G > 0, "gain_G must be positive");
  require(std::isfinite(alpha) && alpha >= 2.0, "alpha must be >= 2");
}

double NetworkInstance::side() const { return std::sqrt(area_A); }

double NetworkInstance::unit_distance() const {
  return std::sqrt(area_A / static_cast<double>(n_pairs));
}

void NetworkInstance::validate() const {
  require(n_pairs >= 1, "n_pairs must be >= 1");
  require(std::isfinite(area_A) && area_A > 0, "area_A must be positive");
  const std::size_t nodes = 2 * n_pairs;
  require(positions.size() == nodes, "expected exactly 2n positions");
  require(roles.size() == nodes, "expected exactly 2n roles");
  require(pairs.size() == n_pairs, "expected exactly n pairs");
  const double h = side();
  for (const Point& p : positions)
    require(p.x >= 0 && p.x <= 2 * h && p.y >= 0 && p.y <= h,
            "position outside the 2*sqrt(A) x sqrt(A) rectangle");
  std::size_t n_src = 0;
  for (Role r : roles) n_src += r == Role::Source;
  require(n_src == n_pairs, "expected exactly n sources");
  std::vector<char> seen_s(nodes, 0), seen_d(nodes, 0);
  for (const auto& [s, d] : pairs) {
    require(s < nodes && d < nodes, "pair index out of range");
    require(roles[s] == Role::Source && roles[d] == Role::Destination,
            "pair must join a source to a destination");
    require(!seen_s[s] && !seen_d[d], "pairing is not a bijection");
    seen_s[s] = seen_d[d] = 1;
  }
}

NetworkInstance generate_network(std::size_t n_pairs, double area_A,
                                 std::uint64_t seed) {
  require(n_pairs >= 1, "n_pairs must be >= 1");
  require(std::isfinite(area_A) && area_A > 0, "area_A must be positive");
  for (unsigned attempt = 0; attempt <= kMaxRetries; ++attempt) {
    NetworkInstance inst = draw(n_pairs, area_A, seed + attempt * kRetryStride);
    if (has_coincident(inst.positions)) continue;
    inst.seed = seed;
    inst.retries = attempt;
    return inst;
  }
  throw DegenerateInstance("coincident node positions after repeated redraws");
}

NetworkInstance make_instance(std::size_t n_pairs, double area_A,
                              std::vector<Point> positions,
                              std::vector<Role> roles,
                              std::vector<std::pair<std::size_t, std::size_t>> pairs,
                              std::uint64_t seed) {
  NetworkInstance inst;
  inst.n_pairs = n_pairs;
  inst.area_A = area_A;
  inst.seed = seed;
  inst.positions = std::move(positions);
  inst.roles = std::move(roles);
  inst.pairs = std::move(pairs);
  std::sort(inst.pairs.begin(), inst.pairs.end());
  inst.validate();
  return inst;
}

double snr_short(const PhysicalParams& params, std::size_t n, double area_A) {
  params.validate();
  require(n >= 1, "n must be >= 1");
  require(area_A > 0, "area_A must be positive");
  const double nn = area_A / static_cast<double>(n);
  return params.gain_G * params.power_P /
         (params.noise_N0 * params.bandwidth_W * std::pow(nn, params.alpha / 2.0));
}

double snr_long(double snr_s, std::size_t n, double alpha) {
  require(n >= 1, "n must be >= 1");
  return std::pow(static_cast<double>(n), 1.0 - alpha / 2.0) * snr_s;
}

double beta_of(double snr_s, std::size_t n) {
  require(n >= 2, "beta_of needs n >= 2");
  require(snr_s > 0, "snr_s must be positive");
  return std::log(snr_s) / std::log(static_cast<double>(n));
}

double distance(const Point& a, const Point& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double rescaled_distance(const NetworkInstance& instance, std::size_t i,
                         std::size_t k) {
  return distance(instance.positions.at(i), instance.positions.at(k)) /
         instance.unit_distance();
}

std::uint64_t trial_phase_seed(std::uint64_t phase_seed, std::uint64_t trial) noexcept {
  return mix_seed(phase_seed, {kTagPhase, trial});
}

double channel_phase(std::uint64_t phase_seed, std::size_t rx,
                     std::size_t tx) noexcept {
  return 2.0 * std::numbers::pi * uniform_at(phase_seed, rx, tx);
}

ChannelMatrix channel_matrix(const NetworkInstance& instance,
                             const PhysicalParams& params,
                             std::span<const std::size_t> tx_set,
                             std::span<const std::size_t> rx_set,
                             std::uint64_t phase_seed, bool rescaled) {
  params.validate();
  require(!tx_set.empty() && !rx_set.empty(), "tx and rx sets must be non-empty");
  const std::size_t nodes = instance.node_count();
  std::vector<char> in_tx(nodes, 0);
  for (std::size_t k : tx_set) {
    require(k < nodes, "tx index out of range");
    in_tx[k] = 1;
  }
  for (std::size_t i : rx_set) {
    require(i < nodes, "rx index out of range");
    require(!in_tx[i], "tx and rx sets must be disjoint");
  }

  ChannelMatrix h;
  h.phase_seed = phase_seed;
  h.rescaled = rescaled;
  h.tx_nodes.assign(tx_set.begin(), tx_set.end());
  h.rx_nodes.assign(rx_set.begin(), rx_set.end());
  h.entries.resize(static_cast<Eigen::Index>(rx_set.size()),
                   static_cast<Eigen::Index>(tx_set.size()));

  const double scale = rescaled ? 1.0 / instance.unit_distance() : 1.0;
  const double amp = rescaled ? 1.0 : std::sqrt(params.gain_G);
  const double half_alpha = params.alpha / 2.0;
  for (std::size_t r = 0; r < rx_set.size(); ++r) {
    const Point& pr = instance.positions[rx_set[r]];
    for (std::size_t c = 0; c < tx_set.size(); ++c) {
      const double d = distance(pr, instance.positions[tx_set[c]]) * scale;
      if (!(d > 0))
        throw DegenerateInstance("coincident transmitter and receiver positions");
      const double theta = channel_phase(phase_seed, rx_set[r], tx_set[c]);
      h.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::polar(amp * std::pow(d, -half_alpha), theta);
    }
  }
  return h;
}

double min_rescaled_separation(const NetworkInstance& instance) {
  // Bucket grid with unit-distance cells; the nearest pair is found by
  // scanning neighbouring buckets and widening until a candidate is certain.
  const std::size_t nodes = instance.node_count();
  if (nodes < 2) return std::numeric_limits<double>::infinity();
  const double u = instance.unit_distance();
  const double h = instance.side();
  const auto cols = static_cast<std::size_t>(std::ceil(2 * h / u)) + 1;
  const auto rows = static_cast<std::size_t>(std::ceil(h / u)) + 1;
  std::vector<std::vector<std::size_t>> bucket(cols * rows);
  auto cell = [&](const Point& p) {
    return std::pair<std::size_t, std::size_t>{
        std::min(cols - 1, static_cast<std::size_t>(p.x / u)),
        std::min(rows - 1, static_cast<std::size_t>(p.y / u))};
  };
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto [cx, cy] = cell(instance.positions[i]);
    bucket[cy * cols + cx].push_back(i);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto [cx, cy] = cell(instance.positions[i]);
    for (std::size_t ring = 1;; ++ring) {
      const std::size_t x0 = cx >= ring ? cx - ring : 0;
      const std::size_t y0 = cy >= ring ? cy - ring : 0;
      const std::size_t x1 = std::min(cols - 1, cx + ring);
      const std::size_t y1 = std::min(rows - 1, cy + ring);
      double local = std::numeric_limits<double>::infinity();
      for (std::size_t y = y0; y <= y1; ++y)
        for (std::size_t x = x0; x <= x1; ++x)
          for (std::size_t k : bucket[y * cols + x])
            if (k != i)
              local = std::min(local, distance(instance.positions[i], instance.positions[k]));
      // Anything outside the scanned square is at least ring*u away.
      if (local <= static_cast<double>(ring) * u ||
          (x0 == 0 && y0 == 0 && x1 == cols - 1 && y1 == rows - 1)) {
        best = std::min(best, local);
        break;
      }
    }
  }
  return best / u;
}

void to_json(nlohmann::json& j, const NetworkInstance& instance) {
  nlohmann::json pos = nlohmann::json::array();
  for (const Point& p : instance.positions) pos.push_back({p.x, p.y});
  nlohmann::json roles = nlohmann::json::array();
  for (Role r : instance.roles) roles.push_back(r == Role::Source ? "S" : "D");
  nlohmann::json pairing = nlohmann::json::array();
  for (const auto& [s, d] : instance.pairs) pairing.push_back({s, d});
  j = nlohmann::json{{"n", instance.n_pairs},   {"area_A", instance.area_A},
                     {"seed", instance.seed},   {"positions", std::move(pos)},
                     {"roles", std::move(roles)}, {"pairing", std::move(pairing)}};
  if (instance.retries != 0) j["retries"] = instance.retries;
}

void from_json(const nlohmann::json& j, NetworkInstance& instance) {
  try {
    std::vector<Point> pos;
    for (const auto& p : j.at("positions")) pos.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    std::vector<Role> roles;
    for (const auto& r : j.at("roles")) {
      const auto s = r.get<std::string>();
      require(s == "S" || s == "D", "role must be \"S\" or \"D\"");
      roles.push_back(s == "S" ? Role::Source : Role::Destination);
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& p : j.at("pairing"))
      pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
    instance = make_instance(j.at("n").get<std::size_t>(), j.at("area_A").get<double>(),
                             std::move(pos), std::move(roles), std::move(pairs),
                             j.value("seed", std::uint64_t{0}));
    instance.retries = j.value("retries", 0u);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed network JSON: ") + e.what());
  }
}

}  // namespace netregime
