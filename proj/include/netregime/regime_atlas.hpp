#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "netregime/network_model.hpp"

namespace netregime {

/// The four operating regimes of the (alpha, beta) plane.
///   I   bandwidth-limited, long-distance SNR >= 0 dB
///   II  power-limited, alpha <= 3
///   III power-limited, alpha > 3, nearest-neighbour SNR <= 0 dB
///   IV  power- and bandwidth-limited, alpha > 3
enum class Regime { I = 1, II = 2, III = 3, IV = 4 };

enum class Scheme { Multihop, HierarchicalCooperation, BurstyHierarchicalCooperation, Hybrid };

std::string to_string(Regime r);
std::string to_string(Scheme s);

struct BoundaryFlags {
  bool hc_edge = false;      ///< beta == alpha/2 - 1
  bool zero_beta = false;    ///< beta == 0
  bool alpha_three = false;  ///< alpha == 3
  bool any() const { return hc_edge || zero_beta || alpha_three; }
};

struct RegimePoint {
  double alpha = 0.0;
  double beta = 0.0;
  Regime regime = Regime::I;
  double exponent = 0.0;
  BoundaryFlags boundary;
};

/// Regime and capacity scaling exponent e(alpha, beta). Regime I includes
/// beta = alpha/2 - 1, regime II includes alpha = 3, regime III includes beta = 0. Flags mark points within 1e-12.
RegimePoint classify(double alpha, double beta);

/// Order-of-magnitude total capacity in bits/s, with the row picked by the
/// 0 dB thresholds on SNR_l and SNR_s.
struct CapacityEstimate {
  double bits_per_second = 0.0;
  Regime regime = Regime::I;
  double snr_s = 0.0;
  double snr_l = 0.0;
  double received_power = 0.0;  ///< P_r at the nearest-neighbour distance
};

CapacityEstimate capacity_estimate(const PhysicalParams& params, std::size_t n, double area_A);

struct SchemeExponents {
  double multihop = 0.0;
  double hierarchical = 0.0;  ///< bursty operation below the HC edge
  std::optional<double> hybrid;  ///< only for 0 < beta <= alpha/2 - 1
  Scheme optimal = Scheme::HierarchicalCooperation;
};

SchemeExponents scheme_exponents(double alpha, double beta);

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 1;
  double at(std::size_t i) const;
};

/// Row-major grid: one row per beta value (ascending), columns over alpha.
struct PhaseDiagram {
  AxisRange alpha;
  AxisRange beta;
  std::vector<RegimePoint> cells;
  const RegimePoint& at(std::size_t beta_index, std::size_t alpha_index) const {
    return cells[beta_index * alpha.points + alpha_index];
  }
};

PhaseDiagram phase_diagram(const AxisRange& alpha, const AxisRange& beta);

/// Columns: alpha, beta, regime, exponent, e_multihop, e_hc, e_hybrid, optimal_scheme.
void write_phase_diagram_csv(std::ostream& os, const PhaseDiagram& diagram);

/// Plot data: one line per beta row (top line is the largest beta), regime ids 1-4.
void write_phase_diagram_plot(std::ostream& os, const PhaseDiagram& diagram);

}  // namespace netregime
