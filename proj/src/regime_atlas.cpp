#include "netregime/regime_atlas.hpp"

#include <algorithm>
#include <cmath>

#include "netregime/csv.hpp"
#include "netregime/error.hpp"

namespace netregime {
namespace {

constexpr double kBoundaryTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kBoundaryTol; }

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::I: return "I";
    case Regime::II: return "II";
    case Regime::III: return "III";
    case Regime::IV: return "IV";
  }
  return "?";
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Multihop: return "multihop";
    case Scheme::HierarchicalCooperation: return "hierarchical";
    case Scheme::BurstyHierarchicalCooperation: return "bursty_hierarchical";
    case Scheme::Hybrid: return "hybrid";
  }
  return "?";
}

RegimePoint classify(double alpha, double beta) {
  if (!(alpha >= 2.0)) throw InvalidArgument("alpha must be >= 2");
  if (!std::isfinite(beta)) throw InvalidArgument("beta must be finite");
  RegimePoint p;
  p.alpha = alpha;
  p.beta = beta;
  const double edge = alpha / 2.0 - 1.0;
  if (beta >= edge) {
    p.regime = Regime::I;
    p.exponent = 1.0;
  } else if (alpha <= 3.0) {
    p.regime = Regime::II;
    p.exponent = 2.0 - alpha / 2.0 + beta;
  } else if (beta <= 0.0) {
    p.regime = Regime::III;
    p.exponent = 0.5 + beta;
  } else {
    p.regime = Regime::IV;
    p.exponent = 0.5 + beta / (alpha - 2.0);
  }
  p.boundary.hc_edge = near(beta, edge);
  p.boundary.zero_beta = near(beta, 0.0);
  p.boundary.alpha_three = near(alpha, 3.0);
  return p;
}

CapacityEstimate capacity_estimate(const PhysicalParams& params, std::size_t n, double area_A) {
  params.validate();
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (!(area_A > 0)) throw InvalidArgument("area_A must be positive");
  const double nn = static_cast<double>(n);
  const double a = params.alpha;
  CapacityEstimate c;
  c.received_power = params.gain_G * params.power_P * std::pow(area_A / nn, -a / 2.0);
  c.snr_s = snr_short(params, n, area_A);
  c.snr_l = snr_long(c.snr_s, n, a);
  const double pr_over_n0 = c.received_power / params.noise_N0;
  if (c.snr_l >= 1.0) {
    c.regime = Regime::I;
    c.bits_per_second = nn * params.bandwidth_W;
  } else if (a <= 3.0) {
    c.regime = Regime::II;
    c.bits_per_second = std::pow(nn, 2.0 - a / 2.0) * pr_over_n0;
  } else if (c.snr_s <= 1.0) {
    c.regime = Regime::III;
    c.bits_per_second = std::sqrt(nn) * pr_over_n0;
  } else {
    c.regime = Regime::IV;
    c.bits_per_second = std::sqrt(nn) * std::pow(params.bandwidth_W, (a - 3.0) / (a - 2.0)) *
                        std::pow(pr_over_n0, 1.0 / (a - 2.0));
  }
  return c;
}

SchemeExponents scheme_exponents(double alpha, double beta) {
  const RegimePoint p = classify(alpha, beta);
  const double edge = alpha / 2.0 - 1.0;
  SchemeExponents e;
  e.multihop = beta > 0.0 ? 0.5 : 0.5 + beta;
  e.hierarchical = beta >= edge ? 1.0 : 2.0 - alpha / 2.0 + beta;
  if (alpha > 2.0 && beta > 0.0 && beta <= edge) e.hybrid = 0.5 + beta / (alpha - 2.0);
  switch (p.regime) {
    case Regime::I: e.optimal = Scheme::HierarchicalCooperation; break;
    case Regime::II: e.optimal = Scheme::BurstyHierarchicalCooperation; break;
    case Regime::III: e.optimal = Scheme::Multihop; break;
    case Regime::IV: e.optimal = Scheme::Hybrid; break;
  }
  return e;
}

double AxisRange::at(std::size_t i) const {
  if (points <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

PhaseDiagram phase_diagram(const AxisRange& alpha, const AxisRange& beta) {
  if (alpha.points == 0 || beta.points == 0) throw InvalidArgument("resolution must be >= 1");
  if (!(std::min(alpha.lo, alpha.hi) >= 2.0)) throw InvalidArgument("alpha range must lie in [2, inf)");
  PhaseDiagram d;
  d.alpha = alpha;
  d.beta = beta;
  d.cells.reserve(alpha.points * beta.points);
  for (std::size_t b = 0; b < beta.points; ++b)
    for (std::size_t a = 0; a < alpha.points; ++a) d.cells.push_back(classify(alpha.at(a), beta.at(b)));
  return d;
}

void write_phase_diagram_csv(std::ostream& os, const PhaseDiagram& diagram) {
  os << "alpha,beta,regime,exponent,e_multihop,e_hc,e_hybrid,optimal_scheme\n";
  for (const auto& cell : diagram.cells) {
    const auto e = scheme_exponents(cell.alpha, cell.beta);
    os << csv_double(cell.alpha) << ',' << csv_double(cell.beta) << ',' << to_string(cell.regime)
       << ',' << csv_double(cell.exponent) << ',' << csv_double(e.multihop) << ','
       << csv_double(e.hierarchical) << ',' << csv_double(e.hybrid) << ',' << to_string(e.optimal)
       << '\n';
  }
}

void write_phase_diagram_plot(std::ostream& os, const PhaseDiagram& diagram) {
  os << "# regime id per cell; rows: beta from " << csv_double(diagram.beta.hi) << " down to "
     << csv_double(diagram.beta.lo) << "; columns: alpha from " << csv_double(diagram.alpha.lo)
     << " to " << csv_double(diagram.alpha.hi) << '\n';
  for (std::size_t b = diagram.beta.points; b-- > 0;) {
    for (std::size_t a = 0; a < diagram.alpha.points; ++a) {
      if (a) os << ' ';
      os << static_cast<int>(diagram.at(b, a).regime);
    }
    os << '\n';
  }
}

}  // namespace netregime
