#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netregime/network_model.hpp"

namespace netregime {

/// (row, col) of a slab cell. Row 0 is the bottom row, col 0 the leftmost
/// slab column. Ordering is lexicographic.
struct CellIndex {
  std::size_t row = 0;
  std::size_t col = 0;
  auto operator<=>(const CellIndex&) const = default;
};

/// Occupancy grid over the vertical slab in the middle of the network.
/// Cells are half-open, (lo, hi] along each axis, so a node on an edge
/// belongs to the cell with the smaller index (the row-0 floor is closed).
struct PercolationGrid {
  double c = 0.0;
  double cell_side = 0.0;
  double x_left = 0.0;  ///< x-coordinate of the slab's left edge
  std::size_t slab_columns = 0;
  std::size_t total_rows = 0;
  /// Node count per cell, row-major from the bottom row.
  std::vector<std::uint32_t> counts;

  bool closed(std::size_t row, std::size_t col) const {
    return counts[row * slab_columns + col] != 0;
  }
  bool open(std::size_t row, std::size_t col) const { return !closed(row, col); }
  std::size_t top_row() const { return total_rows - 1; }
  double x_right() const { return x_left + cell_side * static_cast<double>(slab_columns); }
  double y_top() const { return cell_side * static_cast<double>(total_rows); }
  Point center(const CellIndex& cell) const;
  double closed_fraction() const;
  /// Cell containing p, or nullopt when p is outside the slab.
  std::optional<CellIndex> locate(const Point& p) const;
};

/// A node-free cut: open cells from the top row to the bottom row, and the
/// polyline through their centres extended to the top and bottom edges.
struct CutPolyline {
  std::vector<CellIndex> cells;
  std::vector<Point> vertices;
  /// Minimum node-to-polyline distance; NaN until certified.
  double clearance = 0.0;
  bool certified = false;
};

/// Slab of max(1, ceil(ln n)) columns of side c*sqrt(A/n) around x = sqrt(A);
/// floor(K/2) columns lie left of the midline and the rest to the right.
/// Rows: ceil(sqrt(n)/c), covering the full height. Requires 0 < c < 1.
PercolationGrid build_occupancy_grid(const NetworkInstance& instance, double c);

/// Grid with explicit states, for tests and hand-built scenarios.
PercolationGrid make_grid(double c, double cell_side, double x_left,
                          std::size_t columns, std::size_t rows,
                          std::vector<std::uint32_t> counts);

/// Shortest open 4-connected top-to-bottom crossing; the lexicographically
/// smallest cell sequence among the shortest ones. Clearance is not computed.
std::optional<CutPolyline> find_open_crossing(const PercolationGrid& grid);

/// True iff closed cells, with 8-adjacency, connect the slab's left column
/// to its right column.
bool exists_closed_lr_crossing(const PercolationGrid& grid);

/// Builds the polyline for an open spanning path and certifies its clearance
/// against every node: clearance >= (c/2) sqrt(A/n). Throws InvalidArgument
/// for a malformed path and Defect when certification fails.
CutPolyline extract_cut(std::span<const CellIndex> path,
                        const PercolationGrid& grid,
                        const NetworkInstance& instance);

/// Exact Euclidean distance from p to segment [a, b].
double point_segment_distance(const Point& p, const Point& a, const Point& b) noexcept;

enum class CutSide : std::uint8_t { Left, Right };

struct SideSplit {
  std::vector<CutSide> side;   ///< per node
  std::vector<char> in_slab;   ///< per node
};

/// Assigns each node to a side of the cut: slab cells are flood-filled from
/// the left column without crossing the path; nodes outside the slab go by
/// their x-coordinate.
SideSplit split_by_cut(const PercolationGrid& grid, const CutPolyline& cut,
                       const NetworkInstance& instance);

/// (5/(7c)) sqrt(n) (7c^2)^{ln n}: upper bound on the probability that the
/// slab holds a closed left-right crossing.
double analytic_failure_bound(std::size_t n, double c);

/// c^2 < 1/(7 sqrt(e)): the bound above decays in n.
bool decay_condition_holds(double c) noexcept;

struct CrossingStudy {
  std::size_t n = 0;
  double c = 0.0;
  std::size_t trials = 0;
  std::size_t crossings = 0;
  double empirical_rate = 0.0;  ///< fraction of draws with an open crossing
  double failure_rate = 0.0;
  double failure_stderr = 0.0;
  double analytic_bound = 0.0;
  /// Raised when c^2 >= 1/(7 sqrt(e)).
  bool flag = false;
  std::size_t certified_cuts = 0;
  /// Smallest clearance / ((c/2) sqrt(A/n)) over returned cuts.
  double min_clearance_ratio = 0.0;
  std::vector<char> crossing_per_trial;
};

/// Monte-Carlo crossing study over `trials` networks of n pairs (A = n).
CrossingStudy crossing_probability(std::size_t n, double c, std::size_t trials,
                                   std::uint64_t seed, unsigned threads = 1);

/// Cut export: {c, cell_side, path: [[row, col], ...], clearance}.
nlohmann::json cut_to_json(const PercolationGrid& grid, const CutPolyline& cut);

}  // namespace netregime
