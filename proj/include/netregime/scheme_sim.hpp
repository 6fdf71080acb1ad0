#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netregime/network_model.hpp"
#include "netregime/regime_atlas.hpp"

namespace netregime {

struct SchemeConstants {
  double K2 = 1.0;   ///< interference-to-signal factor of nearest-neighbour hops
  double K3 = 1.0;
  double K4 = 0.25;  ///< defaults to K3 / 4
  double epsilon = 0.05;
};

struct ThroughputEstimate {
  Scheme scheme = Scheme::Multihop;
  double aggregate_T = 0.0;  ///< bits/s/Hz
  double per_pair_R = 0.0;
  std::optional<std::size_t> bottleneck_cell;
  SchemeConstants constants_used;
  std::size_t M = 1;
  std::size_t max_cell_load = 0;
  std::size_t reroutes = 0;
  /// Hybrid only: K4 sqrt(M) n^{-1/2-epsilon}.
  std::optional<double> analytic_per_pair;
};

/// sqrt(n) log2(1 + snr_s / (1 + K2 snr_s)).
ThroughputEstimate multihop_throughput(std::size_t n, double snr_s, double K2);

/// K3 n^{1-eps} log2(1 + n^{1-alpha/2} snr_s). The bursty variant duty-cycles
/// the scheme with fraction SNR_l when SNR_l < 1, which gives
/// K3 n^{1-eps} SNR_l.
ThroughputEstimate hc_throughput(std::size_t n, double snr_s, double alpha, double epsilon,
                                 double K3, bool bursty);

struct CellSizing {
  std::size_t M = 1;
  double exact = 1.0;  ///< snr_s^{1/(alpha/2-1)} before rounding
};

/// Nodes per cell of the hybrid scheme. Throws RegimeError unless alpha > 2
/// and 1 < snr_s <= n^{alpha/2-1}.
CellSizing hybrid_cell_size(double snr_s, double alpha, std::size_t n);

struct CellGrid {
  double cell_side = 0.0;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::size_t M_target = 1;
  std::vector<std::size_t> cell_of_node;  ///< linear index row * columns + col
  std::vector<std::vector<std::size_t>> nodes_of_cell;

  std::size_t cell_count() const { return columns * rows; }
  std::size_t index(std::size_t row, std::size_t col) const { return row * columns + col; }
  std::size_t row_of(std::size_t cell) const { return cell / columns; }
  std::size_t col_of(std::size_t cell) const { return cell % columns; }
  double mean_occupancy() const;
  std::size_t empty_cells() const;
};

/// Square cells of side sqrt(M A / n) from the lower-left corner. The last
/// column and row are partial when the side does not divide the rectangle.
CellGrid build_cell_grid(const NetworkInstance& instance, std::size_t M);

/// Cell sequence of the segment a -> b: one horizontal or vertical step at a
/// time, horizontal first when the segment passes exactly through a corner.
std::vector<std::size_t> supercover_path(const CellGrid& grid, const Point& a, const Point& b);

struct RelayPlan {
  std::vector<std::vector<std::size_t>> paths;      ///< per pair, cell sequence
  std::vector<std::vector<std::size_t>> relays;     ///< per pair, node per path cell
  std::vector<std::size_t> cell_load;               ///< lines through each cell
  std::vector<std::size_t> node_lines;              ///< transmitting assignments per node
  std::size_t reroutes = 0;

  std::size_t max_cell_load() const;
  std::size_t bottleneck_cell() const;
};

/// Routes every S-D line along its supercover. Endpoint cells use the
/// line's own source and destination; other cells draw a uniform node from
/// the cell (stream keyed by seed and pair). An empty cell borrows a node
/// from the nearest non-empty cell and counts a reroute.
RelayPlan route_sd_lines(const CellGrid& grid, const NetworkInstance& instance,
                         std::uint64_t seed);

/// Per-node rate (K3/4) M^{-eps} log2(1 + M^{1-alpha/2} snr_s) shared over the
/// node's realized line count; each pair gets the smallest share on its path.
ThroughputEstimate hybrid_throughput(const RelayPlan& plan, std::size_t M, std::size_t n,
                                     double snr_s, double alpha,
                                     const SchemeConstants& constants);

/// Generates the grid and plan for one instance and evaluates the hybrid
/// scheme. M comes from hybrid_cell_size unless forced.
ThroughputEstimate simulate_hybrid(const NetworkInstance& instance, double snr_s, double alpha,
                                   const SchemeConstants& constants, std::uint64_t seed,
                                   std::optional<std::size_t> forced_M = std::nullopt);

std::optional<Scheme> scheme_from_string(const std::string& name);

/// CSV columns: n, alpha, beta, scheme, M, aggregate_T, per_pair_R,
/// max_cell_load, reroutes, seed.
std::string scheme_csv_header();
std::string scheme_csv_row(std::size_t n, double alpha, double beta,
                           const ThroughputEstimate& estimate, std::uint64_t seed);

}  // namespace netregime
