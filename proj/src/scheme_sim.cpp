#include "netregime/scheme_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "netregime/csv.hpp"
#include "netregime/error.hpp"
#include "netregime/parallel.hpp"
#include "netregime/rng.hpp"

namespace netregime {
namespace {

constexpr std::uint64_t kRelayTag = 0x72656c6179ULL;

void check_n(std::size_t n) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
}

std::size_t clamp_cell(double coord, double side, std::size_t count) {
  if (!(coord > 0.0)) return 0;
  const double k = std::floor(coord / side);
  if (k >= static_cast<double>(count)) return count - 1;
  return static_cast<std::size_t>(k);
}

// Each empty cell takes the non-empty cell that reaches it first in a
// multi-source 4-neighbour BFS seeded in cell order.
std::vector<std::size_t> donor_cells(const CellGrid& grid) {
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> donor(grid.cell_count(), none);
  std::deque<std::size_t> queue;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell)
    if (!grid.nodes_of_cell[cell].empty()) {
      donor[cell] = cell;
      queue.push_back(cell);
    }
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const std::size_t r = grid.row_of(cur), c = grid.col_of(cur);
    auto push = [&](std::size_t rr, std::size_t cc) {
      const std::size_t id = grid.index(rr, cc);
      if (donor[id] == none) {
        donor[id] = donor[cur];
        queue.push_back(id);
      }
    };
    if (c > 0) push(r, c - 1);
    if (c + 1 < grid.columns) push(r, c + 1);
    if (r > 0) push(r - 1, c);
    if (r + 1 < grid.rows) push(r + 1, c);
  }
  return donor;
}

}  // namespace

ThroughputEstimate multihop_throughput(std::size_t n, double snr_s, double K2) {
  check_n(n);
  if (!(snr_s > 0)) throw InvalidArgument("snr_s must be positive");
  if (!(K2 > 0)) throw InvalidArgument("K2 must be positive");
  ThroughputEstimate t;
  t.scheme = Scheme::Multihop;
  t.constants_used.K2 = K2;
  t.aggregate_T = std::sqrt(static_cast<double>(n)) * std::log2(1.0 + snr_s / (1.0 + K2 * snr_s));
  t.per_pair_R = t.aggregate_T / static_cast<double>(n);
  return t;
}

ThroughputEstimate hc_throughput(std::size_t n, double snr_s, double alpha, double epsilon,
                                 double K3, bool bursty) {
  check_n(n);
  if (!(snr_s > 0)) throw InvalidArgument("snr_s must be positive");
  if (!(epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (!(K3 > 0)) throw InvalidArgument("K3 must be positive");
  if (!(alpha >= 2.0)) throw InvalidArgument("alpha must be >= 2");
  const double nn = static_cast<double>(n);
  const double snr_l = snr_long(snr_s, n, alpha);
  const double scale = K3 * std::pow(nn, 1.0 - epsilon);
  ThroughputEstimate t;
  t.scheme = bursty ? Scheme::BurstyHierarchicalCooperation : Scheme::HierarchicalCooperation;
  t.constants_used.K3 = K3;
  t.constants_used.K4 = K3 / 4.0;
  t.constants_used.epsilon = epsilon;
  t.M = n;
  if (bursty && snr_l < 1.0)
    t.aggregate_T = scale * snr_l;
  else
    t.aggregate_T = scale * std::log2(1.0 + snr_l);
  t.per_pair_R = t.aggregate_T / nn;
  return t;
}

CellSizing hybrid_cell_size(double snr_s, double alpha, std::size_t n) {
  check_n(n);
  if (!(alpha > 2.0)) throw RegimeError("hybrid scheme needs alpha > 2");
  const double ceiling = std::pow(static_cast<double>(n), alpha / 2.0 - 1.0);
  if (!(snr_s > 1.0)) throw RegimeError("hybrid scheme needs snr_s > 1 (beta > 0); use multihop");
  if (snr_s > ceiling * (1.0 + 1e-12))
    throw RegimeError("hybrid scheme needs snr_s <= n^{alpha/2-1}; use hierarchical cooperation");
  CellSizing s;
  s.exact = std::pow(snr_s, 1.0 / (alpha / 2.0 - 1.0));
  const double rounded = std::round(s.exact);
  s.M = static_cast<std::size_t>(std::clamp(rounded, 1.0, static_cast<double>(n)));
  return s;
}

double CellGrid::mean_occupancy() const {
  return static_cast<double>(cell_of_node.size()) / static_cast<double>(cell_count());
}

std::size_t CellGrid::empty_cells() const {
  return static_cast<std::size_t>(std::count_if(nodes_of_cell.begin(), nodes_of_cell.end(),
                                                [](const auto& v) { return v.empty(); }));
}

CellGrid build_cell_grid(const NetworkInstance& instance, std::size_t M) {
  const std::size_t n = instance.n_pairs;
  if (M < 1 || M > n) throw InvalidArgument("M must lie in [1, n]");
  CellGrid g;
  g.M_target = M;
  const double side = instance.side();
  g.cell_side = std::sqrt(static_cast<double>(M) * instance.area_A / static_cast<double>(n));
  g.columns = static_cast<std::size_t>(std::ceil(2.0 * side / g.cell_side - 1e-9));
  g.rows = static_cast<std::size_t>(std::ceil(side / g.cell_side - 1e-9));
  g.columns = std::max<std::size_t>(g.columns, 1);
  g.rows = std::max<std::size_t>(g.rows, 1);
  g.nodes_of_cell.assign(g.cell_count(), {});
  g.cell_of_node.resize(instance.node_count());
  for (std::size_t i = 0; i < instance.node_count(); ++i) {
    const Point& p = instance.positions[i];
    const std::size_t cell = g.index(clamp_cell(p.y, g.cell_side, g.rows),
                                     clamp_cell(p.x, g.cell_side, g.columns));
    g.cell_of_node[i] = cell;
    g.nodes_of_cell[cell].push_back(i);
  }
  return g;
}

std::vector<std::size_t> supercover_path(const CellGrid& grid, const Point& a, const Point& b) {
  const double s = grid.cell_side;
  long col = static_cast<long>(clamp_cell(a.x, s, grid.columns));
  long row = static_cast<long>(clamp_cell(a.y, s, grid.rows));
  const long col_end = static_cast<long>(clamp_cell(b.x, s, grid.columns));
  const long row_end = static_cast<long>(clamp_cell(b.y, s, grid.rows));
  const long step_c = col_end > col ? 1 : -1;
  const long step_r = row_end > row ? 1 : -1;
  long left_c = std::abs(col_end - col);
  long left_r = std::abs(row_end - row);
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double inf = std::numeric_limits<double>::infinity();
  auto next_x = [&](long c) {
    if (dx == 0.0) return inf;
    const double edge = step_c > 0 ? static_cast<double>(c + 1) * s : static_cast<double>(c) * s;
    return (edge - a.x) / dx;
  };
  auto next_y = [&](long r) {
    if (dy == 0.0) return inf;
    const double edge = step_r > 0 ? static_cast<double>(r + 1) * s : static_cast<double>(r) * s;
    return (edge - a.y) / dy;
  };
  std::vector<std::size_t> path;
  path.reserve(static_cast<std::size_t>(left_c + left_r + 1));
  path.push_back(grid.index(static_cast<std::size_t>(row), static_cast<std::size_t>(col)));
  while (left_c > 0 || left_r > 0) {
    bool horizontal;
    if (left_c == 0)
      horizontal = false;
    else if (left_r == 0)
      horizontal = true;
    else
      horizontal = next_x(col) <= next_y(row);
    if (horizontal) {
      col += step_c;
      --left_c;
    } else {
      row += step_r;
      --left_r;
    }
    path.push_back(grid.index(static_cast<std::size_t>(row), static_cast<std::size_t>(col)));
  }
  return path;
}

std::size_t RelayPlan::max_cell_load() const {
  return cell_load.empty() ? 0 : *std::max_element(cell_load.begin(), cell_load.end());
}

std::size_t RelayPlan::bottleneck_cell() const {
  return static_cast<std::size_t>(std::max_element(cell_load.begin(), cell_load.end()) -
                                  cell_load.begin());
}

RelayPlan route_sd_lines(const CellGrid& grid, const NetworkInstance& instance,
                         std::uint64_t seed) {
  if (grid.cell_of_node.size() != instance.node_count())
    throw InvalidArgument("grid was not built from this instance");
  const std::vector<std::size_t> donor = donor_cells(grid);
  RelayPlan plan;
  plan.cell_load.assign(grid.cell_count(), 0);
  plan.node_lines.assign(instance.node_count(), 0);
  plan.paths.reserve(instance.pairs.size());
  plan.relays.reserve(instance.pairs.size());
  for (std::size_t k = 0; k < instance.pairs.size(); ++k) {
    const auto [src, dst] = instance.pairs[k];
    auto path = supercover_path(grid, instance.positions[src], instance.positions[dst]);
    std::vector<std::size_t> relay(path.size());
    RandomStream stream(mix_seed(seed, {kRelayTag, k}));
    for (std::size_t h = 0; h < path.size(); ++h) {
      const std::size_t cell = path[h];
      ++plan.cell_load[cell];
      if (h == 0) {
        relay[h] = src;
      } else if (h + 1 == path.size()) {
        relay[h] = dst;
      } else {
        std::size_t from = cell;
        if (grid.nodes_of_cell[cell].empty()) {
          from = donor[cell];
          if (from == std::numeric_limits<std::size_t>::max())
            throw DegenerateInstance("no node available to relay");
          ++plan.reroutes;
        }
        const auto& members = grid.nodes_of_cell[from];
        relay[h] = members[stream.below(members.size())];
      }
    }
    if (path.size() == 1) relay[0] = src;
    const std::size_t transmitting = path.size() == 1 ? 1 : path.size() - 1;
    for (std::size_t h = 0; h < transmitting; ++h) ++plan.node_lines[relay[h]];
    plan.paths.push_back(std::move(path));
    plan.relays.push_back(std::move(relay));
  }
  return plan;
}

ThroughputEstimate hybrid_throughput(const RelayPlan& plan, std::size_t M, std::size_t n,
                                     double snr_s, double alpha,
                                     const SchemeConstants& constants) {
  check_n(n);
  if (M < 1 || M > n) throw InvalidArgument("M must lie in [1, n]");
  if (!(snr_s > 0)) throw InvalidArgument("snr_s must be positive");
  if (!(constants.epsilon > 0) || !(constants.K3 > 0))
    throw InvalidArgument("epsilon and K3 must be positive");
  const double m = static_cast<double>(M);
  const double node_rate = constants.K3 / 4.0 * std::pow(m, -constants.epsilon) *
                           std::log2(1.0 + std::pow(m, 1.0 - alpha / 2.0) * snr_s);
  std::vector<double> rates(plan.relays.size());
  for (std::size_t k = 0; k < plan.relays.size(); ++k) {
    const auto& relay = plan.relays[k];
    const std::size_t transmitting = relay.size() == 1 ? 1 : relay.size() - 1;
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < transmitting; ++h)
      r = std::min(r, node_rate / static_cast<double>(plan.node_lines[relay[h]]));
    rates[k] = r;
  }
  ThroughputEstimate t;
  t.scheme = Scheme::Hybrid;
  t.constants_used = constants;
  t.M = M;
  t.aggregate_T = compensated_sum(rates);
  t.per_pair_R = t.aggregate_T / static_cast<double>(n);
  t.max_cell_load = plan.max_cell_load();
  if (!plan.cell_load.empty()) t.bottleneck_cell = plan.bottleneck_cell();
  t.reroutes = plan.reroutes;
  t.analytic_per_pair = constants.K4 * std::sqrt(m) *
                        std::pow(static_cast<double>(n), -0.5 - constants.epsilon);
  return t;
}

ThroughputEstimate simulate_hybrid(const NetworkInstance& instance, double snr_s, double alpha,
                                   const SchemeConstants& constants, std::uint64_t seed,
                                   std::optional<std::size_t> forced_M) {
  const std::size_t n = instance.n_pairs;
  const std::size_t M = forced_M ? *forced_M : hybrid_cell_size(snr_s, alpha, n).M;
  const CellGrid grid = build_cell_grid(instance, M);
  const RelayPlan plan = route_sd_lines(grid, instance, seed);
  return hybrid_throughput(plan, M, n, snr_s, alpha, constants);
}

std::optional<Scheme> scheme_from_string(const std::string& name) {
  for (Scheme s : {Scheme::Multihop, Scheme::HierarchicalCooperation,
                   Scheme::BurstyHierarchicalCooperation, Scheme::Hybrid})
    if (to_string(s) == name) return s;
  if (name == "hc") return Scheme::HierarchicalCooperation;
  if (name == "bursty") return Scheme::BurstyHierarchicalCooperation;
  return std::nullopt;
}

std::string scheme_csv_header() {
  return "n,alpha,beta,scheme,M,aggregate_T,per_pair_R,max_cell_load,reroutes,seed";
}

std::string scheme_csv_row(std::size_t n, double alpha, double beta,
                           const ThroughputEstimate& e, std::uint64_t seed) {
  return std::to_string(n) + ',' + csv_double(alpha) + ',' + csv_double(beta) + ',' +
         to_string(e.scheme) + ',' + std::to_string(e.M) + ',' + csv_double(e.aggregate_T) + ',' +
         csv_double(e.per_pair_R) + ',' + std::to_string(e.max_cell_load) + ',' +
         std::to_string(e.reroutes) + ',' + std::to_string(seed);
}

}  // namespace netregime
