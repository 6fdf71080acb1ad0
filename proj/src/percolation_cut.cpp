#include "netregime/percolation_cut.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "netregime/error.hpp"
#include "netregime/parallel.hpp"
#include "netregime/rng.hpp"

namespace netregime {
namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
constexpr std::uint64_t kTagCrossing = 0x70657263ull;  // "perc"

// Half-open (lo, hi] index along one axis; -1 means at or below lo.
long half_open_index(double offset, double side) {
  if (offset <= 0.0) return -1;
  return static_cast<long>(std::ceil(offset / side)) - 1;
}

}  // namespace

Point PercolationGrid::center(const CellIndex& cell) const {
  return {x_left + (static_cast<double>(cell.col) + 0.5) * cell_side,
          (static_cast<double>(cell.row) + 0.5) * cell_side};
}

double PercolationGrid::closed_fraction() const {
  if (counts.empty()) return 0.0;
  std::size_t closed_cells = 0;
  for (auto v : counts) closed_cells += v != 0;
  return static_cast<double>(closed_cells) / static_cast<double>(counts.size());
}

std::optional<CellIndex> PercolationGrid::locate(const Point& p) const {
  const long col = half_open_index(p.x - x_left, cell_side);
  if (col < 0 || col >= static_cast<long>(slab_columns)) return std::nullopt;
  long row = half_open_index(p.y, cell_side);
  row = std::clamp(row, 0L, static_cast<long>(total_rows) - 1);
  return CellIndex{static_cast<std::size_t>(row), static_cast<std::size_t>(col)};
}

PercolationGrid make_grid(double c, double cell_side, double x_left,
                          std::size_t columns, std::size_t rows,
                          std::vector<std::uint32_t> counts) {
  if (columns == 0 || rows == 0) throw InvalidArgument("grid must have at least one cell");
  if (counts.size() != columns * rows) throw InvalidArgument("counts size must be rows*columns");
  if (!(cell_side > 0)) throw InvalidArgument("cell_side must be positive");
  PercolationGrid g;
  g.c = c;
  g.cell_side = cell_side;
  g.x_left = x_left;
  g.slab_columns = columns;
  g.total_rows = rows;
  g.counts = std::move(counts);
  return g;
}

PercolationGrid build_occupancy_grid(const NetworkInstance& instance, double c) {
  if (!(c > 0.0 && c < 1.0)) throw InvalidArgument("c must lie in (0, 1)");
  const double n = static_cast<double>(instance.n_pairs);
  const double side = c * instance.unit_distance();
  const auto columns = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(n))));
  const auto rows = static_cast<std::size_t>(std::ceil(std::sqrt(n) / c));
  const double x_left = instance.side() - static_cast<double>(columns / 2) * side;

  PercolationGrid g = make_grid(c, side, x_left, columns, rows,
                                std::vector<std::uint32_t>(columns * rows, 0));
  for (const Point& p : instance.positions)
    if (auto cell = g.locate(p)) ++g.counts[cell->row * columns + cell->col];
  return g;
}

std::optional<CutPolyline> find_open_crossing(const PercolationGrid& grid) {
  const std::size_t rows = grid.total_rows;
  const std::size_t cols = grid.slab_columns;
  // BFS distance to the bottom row over open cells.
  std::vector<std::size_t> dist(rows * cols, kUnreached);
  std::deque<CellIndex> queue;
  for (std::size_t col = 0; col < cols; ++col)
    if (grid.open(0, col)) {
      dist[col] = 0;
      queue.push_back({0, col});
    }
  while (!queue.empty()) {
    const CellIndex cur = queue.front();
    queue.pop_front();
    const std::size_t d = dist[cur.row * cols + cur.col];
    auto visit = [&](std::size_t r, std::size_t c) {
      const std::size_t k = r * cols + c;
      if (grid.open(r, c) && dist[k] == kUnreached) {
        dist[k] = d + 1;
        queue.push_back({r, c});
      }
    };
    if (cur.row > 0) visit(cur.row - 1, cur.col);
    if (cur.row + 1 < rows) visit(cur.row + 1, cur.col);
    if (cur.col > 0) visit(cur.row, cur.col - 1);
    if (cur.col + 1 < cols) visit(cur.row, cur.col + 1);
  }

  const std::size_t top = rows - 1;
  std::size_t best = kUnreached;
  std::size_t start = 0;
  for (std::size_t col = 0; col < cols; ++col) {
    const std::size_t d = dist[top * cols + col];
    if (d < best) {
      best = d;
      start = col;
    }
  }
  if (best == kUnreached) return std::nullopt;

  // Greedy descent: neighbours tried in lexicographic (row, col) order, so
  // the first one on a shortest path yields the smallest sequence.
  CutPolyline cut;
  CellIndex cur{top, start};
  cut.cells.push_back(cur);
  for (std::size_t d = best; d > 0; --d) {
    CellIndex candidates[4];
    int m = 0;
    if (cur.row > 0) candidates[m++] = {cur.row - 1, cur.col};
    if (cur.col > 0) candidates[m++] = {cur.row, cur.col - 1};
    if (cur.col + 1 < cols) candidates[m++] = {cur.row, cur.col + 1};
    if (cur.row + 1 < rows) candidates[m++] = {cur.row + 1, cur.col};
    bool moved = false;
    for (int i = 0; i < m && !moved; ++i) {
      if (dist[candidates[i].row * cols + candidates[i].col] == d - 1) {
        cur = candidates[i];
        moved = true;
      }
    }
    if (!moved) throw Defect("open crossing descent lost the shortest path");
    cut.cells.push_back(cur);
  }
  cut.clearance = std::numeric_limits<double>::quiet_NaN();
  cut.vertices.reserve(cut.cells.size() + 2);
  cut.vertices.push_back({grid.center(cut.cells.front()).x, grid.y_top()});
  for (const auto& cell : cut.cells) cut.vertices.push_back(grid.center(cell));
  cut.vertices.push_back({grid.center(cut.cells.back()).x, 0.0});
  return cut;
}

bool exists_closed_lr_crossing(const PercolationGrid& grid) {
  const std::size_t rows = grid.total_rows;
  const std::size_t cols = grid.slab_columns;
  std::vector<char> seen(rows * cols, 0);
  std::vector<CellIndex> stack;
  for (std::size_t r = 0; r < rows; ++r)
    if (grid.closed(r, 0)) {
      seen[r * cols] = 1;
      stack.push_back({r, 0});
    }
  while (!stack.empty()) {
    const CellIndex cur = stack.back();
    stack.pop_back();
    if (cur.col == cols - 1) return true;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const long r = static_cast<long>(cur.row) + dr;
        const long c = static_cast<long>(cur.col) + dc;
        if (r < 0 || c < 0 || r >= static_cast<long>(rows) || c >= static_cast<long>(cols))
          continue;
        const auto ur = static_cast<std::size_t>(r);
        const auto uc = static_cast<std::size_t>(c);
        if (grid.closed(ur, uc) && !seen[ur * cols + uc]) {
          seen[ur * cols + uc] = 1;
          stack.push_back({ur, uc});
        }
      }
  }
  return false;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) noexcept {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

CutPolyline extract_cut(std::span<const CellIndex> path, const PercolationGrid& grid,
                        const NetworkInstance& instance) {
  if (path.empty()) throw InvalidArgument("cut path is empty");
  if (path.front().row != grid.top_row() || path.back().row != 0)
    throw InvalidArgument("cut path must run from the top row to the bottom row");
  for (std::size_t i = 0; i < path.size(); ++i) {
    const CellIndex& cell = path[i];
    if (cell.row >= grid.total_rows || cell.col >= grid.slab_columns)
      throw InvalidArgument("cut path leaves the slab");
    if (!grid.open(cell.row, cell.col)) throw InvalidArgument("cut path crosses a closed cell");
    if (i > 0) {
      const CellIndex& prev = path[i - 1];
      const std::size_t manhattan = (prev.row > cell.row ? prev.row - cell.row : cell.row - prev.row) +
                                    (prev.col > cell.col ? prev.col - cell.col : cell.col - prev.col);
      if (manhattan != 1) throw InvalidArgument("cut path cells must be 4-adjacent");
    }
  }

  CutPolyline cut;
  cut.cells.assign(path.begin(), path.end());
  cut.vertices.push_back({grid.center(path.front()).x, grid.y_top()});
  for (const auto& cell : path) cut.vertices.push_back(grid.center(cell));
  cut.vertices.push_back({grid.center(path.back()).x, 0.0});

  double xmin = cut.vertices.front().x, xmax = xmin;
  for (const auto& v : cut.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
  }
  double clearance = std::numeric_limits<double>::infinity();
  auto scan = [&](const Point& p) {
    // The polyline lies in the strip [xmin, xmax]; a node whose horizontal gap
    // to it is already larger than the best distance cannot improve it.
    const double gap = std::max({xmin - p.x, p.x - xmax, 0.0});
    if (gap >= clearance) return;
    for (std::size_t s = 0; s + 1 < cut.vertices.size(); ++s)
      clearance = std::min(clearance, point_segment_distance(p, cut.vertices[s], cut.vertices[s + 1]));
  };
  // Slab nodes first so the pruning bound tightens early.
  for (const Point& p : instance.positions)
    if (p.x >= grid.x_left && p.x <= grid.x_right()) scan(p);
  for (const Point& p : instance.positions)
    if (p.x < grid.x_left || p.x > grid.x_right()) scan(p);

  cut.clearance = clearance;
  const double required = 0.5 * grid.c * instance.unit_distance();
  // One ulp-scale allowance for nodes sitting exactly on a cell edge.
  cut.certified = clearance >= required * (1.0 - 1e-12);
  if (!cut.certified)
    throw Defect("cut clearance " + std::to_string(clearance) + " below required " +
                 std::to_string(required));
  return cut;
}

SideSplit split_by_cut(const PercolationGrid& grid, const CutPolyline& cut,
                       const NetworkInstance& instance) {
  const std::size_t rows = grid.total_rows;
  const std::size_t cols = grid.slab_columns;
  std::vector<char> on_path(rows * cols, 0), left(rows * cols, 0);
  for (const auto& cell : cut.cells) on_path[cell.row * cols + cell.col] = 1;
  std::vector<CellIndex> stack;
  for (std::size_t r = 0; r < rows; ++r)
    if (!on_path[r * cols]) {
      left[r * cols] = 1;
      stack.push_back({r, 0});
    }
  while (!stack.empty()) {
    const CellIndex cur = stack.back();
    stack.pop_back();
    auto visit = [&](std::size_t r, std::size_t c) {
      const std::size_t k = r * cols + c;
      if (!on_path[k] && !left[k]) {
        left[k] = 1;
        stack.push_back({r, c});
      }
    };
    if (cur.row > 0) visit(cur.row - 1, cur.col);
    if (cur.row + 1 < rows) visit(cur.row + 1, cur.col);
    if (cur.col > 0) visit(cur.row, cur.col - 1);
    if (cur.col + 1 < cols) visit(cur.row, cur.col + 1);
  }

  SideSplit split;
  const std::size_t nodes = instance.node_count();
  split.side.resize(nodes);
  split.in_slab.assign(nodes, 0);
  for (std::size_t i = 0; i < nodes; ++i) {
    const Point& p = instance.positions[i];
    if (auto cell = grid.locate(p)) {
      const std::size_t k = cell->row * cols + cell->col;
      if (on_path[k]) throw Defect("node located inside an open cut cell");
      split.in_slab[i] = 1;
      split.side[i] = left[k] ? CutSide::Left : CutSide::Right;
    } else {
      split.side[i] = p.x <= grid.x_left ? CutSide::Left : CutSide::Right;
    }
  }
  return split;
}

double analytic_failure_bound(std::size_t n, double c) {
  const double nn = static_cast<double>(n);
  return 5.0 / (7.0 * c) * std::sqrt(nn) * std::pow(7.0 * c * c, std::log(nn));
}

bool decay_condition_holds(double c) noexcept {
  return c * c < 1.0 / (7.0 * std::sqrt(std::exp(1.0)));
}

CrossingStudy crossing_probability(std::size_t n, double c, std::size_t trials,
                                   std::uint64_t seed, unsigned threads) {
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  if (n == 0) throw InvalidArgument("n must be >= 1");
  std::vector<char> crossed(trials, 0);
  std::vector<double> ratio(trials, std::numeric_limits<double>::infinity());
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto inst = generate_network(n, static_cast<double>(n), mix_seed(seed, {kTagCrossing, n, t}));
    const auto grid = build_occupancy_grid(inst, c);
    if (auto path = find_open_crossing(grid)) {
      const auto cut = extract_cut(path->cells, grid, inst);
      crossed[t] = 1;
      ratio[t] = cut.clearance / (0.5 * c * inst.unit_distance());
    }
  });

  CrossingStudy s;
  s.n = n;
  s.c = c;
  s.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    s.crossings += crossed[t] != 0;
    s.min_clearance_ratio = t == 0 ? ratio[t] : std::min(s.min_clearance_ratio, ratio[t]);
  }
  s.certified_cuts = s.crossings;
  const double tr = static_cast<double>(trials);
  s.empirical_rate = static_cast<double>(s.crossings) / tr;
  s.failure_rate = 1.0 - s.empirical_rate;
  s.failure_stderr = std::sqrt(s.failure_rate * (1.0 - s.failure_rate) / tr);
  s.analytic_bound = analytic_failure_bound(n, c);
  s.flag = !decay_condition_holds(c);
  s.crossing_per_trial = std::move(crossed);
  return s;
}

nlohmann::json cut_to_json(const PercolationGrid& grid, const CutPolyline& cut) {
  nlohmann::json path = nlohmann::json::array();
  for (const auto& cell : cut.cells) path.push_back({cell.row, cell.col});
  return nlohmann::json{{"c", grid.c},
                        {"cell_side", grid.cell_side},
                        {"path", std::move(path)},
                        {"clearance", cut.clearance}};
}

}  // namespace netregime
