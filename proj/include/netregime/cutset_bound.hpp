#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "netregime/network_model.hpp"
#include "netregime/percolation_cut.hpp"

namespace netregime {

/// Idealized: the straight midline cut with the unit-width strip E to its
/// right set aside. Percolation: the node-free cut found in the middle slab.
enum class CutMode { Idealized, Percolation };

struct CutsetConstants {
  double delta = 0.05;
  double epsilon = 0.05;
  double K1 = 1.0;
};

/// Node sets of the left-to-right cut. All horizontal distances x_hat are
/// rescaled by sqrt(A/n) and measured from the midline x = sqrt(A).
struct CutPartition {
  CutMode mode = CutMode::Idealized;
  double cut_x = 0.0;
  double w_hat = 1.0;
  std::vector<std::size_t> left_S;
  std::vector<std::size_t> strip_VD;
  std::vector<std::size_t> far_D;
  /// Idealized mode: right nodes with x_hat < 1, left out of the evaluation.
  std::vector<std::size_t> excluded_E;
  /// Percolation mode: right-of-cut nodes inside the slab.
  std::vector<std::size_t> b_set;
  std::vector<double> x_hat;  ///< per node, signed

  /// Receivers of the cutset MIMO channel: strip_VD, far_D and b_set.
  std::vector<std::size_t> receivers() const;
  /// Receivers accounted by the power (trace) term: far_D and b_set.
  std::vector<std::size_t> power_limited() const;
};

/// Rescaled strip width: sqrt(n) when snr_s >= n^{alpha/2-1}; 1 when
/// snr_s < 1; otherwise sqrt(n) for alpha = 2 and snr_s^{1/(alpha-2)} above.
double select_cut_width(double snr_s, std::size_t n, double alpha);

/// Idealized-mode partition around the midline. w_hat in [1, sqrt(n)].
CutPartition partition_nodes(const NetworkInstance& instance, double w_hat);

/// Percolation-mode partition using a certified cut over `grid`.
CutPartition partition_nodes(const NetworkInstance& instance, double w_hat,
                             const PercolationGrid& grid, const CutPolyline& cut);

struct PowerProfileEntry {
  std::size_t node = 0;
  double x_hat = 0.0;
  double d_hat = 0.0;         ///< sum over left nodes of r_hat^{-alpha}
  double d_hat_approx = 0.0;  ///< x_hat^{2 - alpha}
};

/// Received power profile of `target` nodes from `left` transmitters.
std::vector<PowerProfileEntry> power_profile(const NetworkInstance& instance, double alpha,
                                             std::span<const std::size_t> left,
                                             std::span<const std::size_t> target);

/// SNR_s times the sum of d_hat over the power-limited receivers.
double snr_total(const NetworkInstance& instance, const CutPartition& partition,
                 double snr_s, double alpha);

/// SNR_s times the sum of d_hat over the B set (percolation mode).
double b_set_snr(const NetworkInstance& instance, const CutPartition& partition,
                 double snr_s, double alpha);

/// Closed-form upper bound on snr_total, one row per alpha range, natural
/// log polylog factors. Not defined for w_hat = sqrt(n).
double closed_form_snr_total_bound(double snr_s, std::size_t n, double alpha,
                                   double w_hat, double K1);

struct DofTerm {
  /// (w_hat - 1) sqrt(n) ln n log2(1 + n^{1+alpha(1/2+delta)} snr_s)
  double whp_bound = 0.0;
  /// |V_D| log2(1 + n^{1+alpha(1/2+delta)} snr_s)
  double realized = 0.0;
  std::size_t size_VD = 0;
};

DofTerm dof_term(const CutPartition& partition, double snr_s, std::size_t n,
                 double alpha, double delta);

/// n^epsilon * snr_total / ln 2, in bits/s/Hz.
double power_term(double snr_total_value, std::size_t n, double epsilon);

struct LogDetEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t used = 0;
  std::size_t discarded = 0;
  std::vector<double> per_trial;  ///< NaN for discarded trials
};

/// log2 det(I + snr_s H H^*) for one fading draw of the rescaled channel
/// from the left set to the receivers. NaN when not finite.
double cutset_logdet(const NetworkInstance& instance, const CutPartition& partition,
                     double alpha, double snr_s, std::uint64_t phase_seed);

/// Monte-Carlo average of cutset_logdet with identity input covariance over
/// `trials` phase draws. Trial t uses trial_phase_seed(phase_seed, t).
LogDetEstimate mc_cutset_logdet(const NetworkInstance& instance,
                                const CutPartition& partition, double alpha,
                                double snr_s, std::size_t trials,
                                std::uint64_t phase_seed, unsigned threads = 1);

LogDetEstimate mc_cutset_logdet(const NetworkInstance& instance,
                                const CutPartition& partition,
                                const PhysicalParams& params, std::size_t trials,
                                std::uint64_t phase_seed, unsigned threads = 1);

/// Upper bound on the scaling exponent, by alpha/beta row.
double upper_bound_exponent(double alpha, double beta);

struct CutsetReport {
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double w_hat = 0.0;
  std::size_t size_VD = 0;
  double dof_term = 0.0;     ///< realized |V_D| form
  double dof_whp = 0.0;
  double snr_total = 0.0;
  double power_term = 0.0;
  double mc_logdet = 0.0;
  double mc_stderr = 0.0;
  std::optional<double> closed_form_bound;
  std::size_t trials = 0;
  std::size_t discarded = 0;
  std::uint64_t seed = 0;
  std::size_t size_B = 0;
  double b_snr = 0.0;
};

struct CutsetOptions {
  CutMode mode = CutMode::Idealized;
  CutsetConstants constants;
  double c = 0.25;  ///< percolation cell constant
  std::size_t trials = 20;
  unsigned threads = 1;
};

/// Full evaluation for one instance at SNR_s = n^beta.
CutsetReport evaluate_cutset(const NetworkInstance& instance, double alpha, double beta,
                             const CutsetOptions& options, std::uint64_t phase_seed);

/// CSV columns: n, alpha, beta, w_hat, size_VD, dof_term, snr_total,
/// power_term, mc_logdet, mc_stderr, closed_form_bound, trials, seed.
std::string cutset_csv_header();
std::string cutset_csv_row(const CutsetReport& report);

}  // namespace netregime
