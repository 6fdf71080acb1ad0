#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace netregime {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Link-budget constants of the channel model. Powers in Watts, noise
/// density in W/Hz, bandwidth in Hz; alpha and G are dimensionless.
struct PhysicalParams {
  double power_P = 1.0;
  double noise_N0 = 1.0;
  double bandwidth_W = 1.0;
  double alpha = 2.0;
  double gain_G = 1.0;

  void validate() const;
};

enum class Role : std::uint8_t { Source, Destination };

/// One random network draw: 2n nodes in the 2*sqrt(A) x sqrt(A) rectangle,
/// n sources and n destinations paired one-to-one.
struct NetworkInstance {
  std::size_t n_pairs = 0;
  double area_A = 0.0;
  std::uint64_t seed = 0;
  std::vector<Point> positions;
  std::vector<Role> roles;
  /// (source node, destination node), ordered by source node index.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  /// Redraws needed because of coincident positions (normally 0).
  unsigned retries = 0;

  std::size_t node_count() const noexcept { return positions.size(); }
  /// sqrt(A): height of the rectangle and x-coordinate of the midline cut.
  double side() const;
  /// sqrt(A/n): the typical nearest-neighbour distance used for rescaling.
  double unit_distance() const;
  double width() const { return 2.0 * side(); }

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;
};

/// Channel gains, indexed (receiver, transmitter).
struct ChannelMatrix {
  Eigen::MatrixXcd entries;
  std::uint64_t phase_seed = 0;
  bool rescaled = false;
  std::vector<std::size_t> rx_nodes;
  std::vector<std::size_t> tx_nodes;
};

/// Draws 2n i.i.d. uniform positions, a uniformly random set of n sources and
/// a uniformly random source-to-destination bijection. Deterministic in seed.
/// Coincident positions trigger a redraw with a shifted seed (see retries).
NetworkInstance generate_network(std::size_t n_pairs, double area_A,
                                 std::uint64_t seed);

/// Builds and validates an instance from explicit data (tests, JSON).
NetworkInstance make_instance(std::size_t n_pairs, double area_A,
                              std::vector<Point> positions,
                              std::vector<Role> roles,
                              std::vector<std::pair<std::size_t, std::size_t>> pairs,
                              std::uint64_t seed = 0);

/// Nearest-neighbour SNR: G P / (N0 W (A/n)^{alpha/2}).
double snr_short(const PhysicalParams& params, std::size_t n, double area_A);

/// Long-distance SNR: n^{1 - alpha/2} * snr_s.
double snr_long(double snr_s, std::size_t n, double alpha);

/// Finite-n exponent surrogate ln(snr_s) / ln(n). Requires n >= 2.
double beta_of(double snr_s, std::size_t n);

double distance(const Point& a, const Point& b) noexcept;

/// Distance between nodes i and k divided by sqrt(A/n).
double rescaled_distance(const NetworkInstance& instance, std::size_t i,
                         std::size_t k);

/// Uniform phase in [0, 2*pi) of the (rx, tx) entry for one fading draw.
double channel_phase(std::uint64_t phase_seed, std::size_t rx,
                     std::size_t tx) noexcept;

/// Phase seed of Monte-Carlo trial `trial` derived from a base phase seed.
std::uint64_t trial_phase_seed(std::uint64_t phase_seed, std::uint64_t trial) noexcept;

/// Channel matrix between disjoint, non-empty node subsets. Raw entries are
/// sqrt(G) r^{-alpha/2} e^{j theta}; rescaled entries use r/sqrt(A/n) and no G.
/// Phases depend only on (phase_seed, rx node, tx node).
ChannelMatrix channel_matrix(const NetworkInstance& instance,
                             const PhysicalParams& params,
                             std::span<const std::size_t> tx_set,
                             std::span<const std::size_t> rx_set,
                             std::uint64_t phase_seed, bool rescaled);

/// Smallest pairwise distance in rescaled units. Compare against
/// n^{-(1/2 + delta)} for the minimum-separation diagnostic.
double min_rescaled_separation(const NetworkInstance& instance);

void to_json(nlohmann::json& j, const NetworkInstance& instance);
void from_json(const nlohmann::json& j, NetworkInstance& instance);

}  // namespace netregime
