#include "netregime/cutset_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "netregime/csv.hpp"
#include "netregime/error.hpp"
#include "netregime/parallel.hpp"

namespace netregime {
namespace {

constexpr double kRelTol = 1e-12;

double log_n(std::size_t n) { return std::log(static_cast<double>(n)); }

CutPartition base_partition(const NetworkInstance& instance, double w_hat, CutMode mode) {
  instance.validate();
  const double root_n = std::sqrt(static_cast<double>(instance.n_pairs));
  if (!(w_hat >= 1.0 - kRelTol && w_hat <= root_n * (1.0 + kRelTol)))
    throw InvalidArgument("w_hat must lie in [1, sqrt(n)]");
  CutPartition p;
  p.mode = mode;
  p.cut_x = instance.side();
  p.w_hat = w_hat;
  const double u = instance.unit_distance();
  p.x_hat.resize(instance.node_count());
  for (std::size_t i = 0; i < instance.node_count(); ++i)
    p.x_hat[i] = (instance.positions[i].x - p.cut_x) / u;
  return p;
}

bool in_strip(double x_hat, double w_hat) { return w_hat > 1.0 && x_hat >= 1.0 && x_hat <= w_hat; }

void require_both_sides(const CutPartition& p) {
  if (p.left_S.empty()) throw DegenerateInstance("no nodes left of the cut");
  if (p.receivers().empty()) throw DegenerateInstance("no receivers right of the cut");
}

double d_hat(const NetworkInstance& instance, double alpha, std::span<const std::size_t> left,
             std::size_t i) {
  const double u = instance.unit_distance();
  const Point& pi = instance.positions[i];
  std::vector<double> terms;
  terms.reserve(left.size());
  for (std::size_t k : left) {
    const double r = distance(pi, instance.positions[k]) / u;
    if (!(r > 0)) throw DegenerateInstance("coincident nodes across the cut");
    terms.push_back(std::pow(r, -alpha));
  }
  return compensated_sum(terms);
}

double sum_d_hat(const NetworkInstance& instance, double alpha, std::span<const std::size_t> left,
                 std::span<const std::size_t> targets) {
  std::vector<double> terms;
  terms.reserve(targets.size());
  for (std::size_t i : targets) terms.push_back(d_hat(instance, alpha, left, i));
  return compensated_sum(terms);
}

}  // namespace

std::vector<std::size_t> CutPartition::receivers() const {
  std::vector<std::size_t> out;
  out.reserve(strip_VD.size() + far_D.size() + b_set.size());
  out.insert(out.end(), strip_VD.begin(), strip_VD.end());
  out.insert(out.end(), far_D.begin(), far_D.end());
  out.insert(out.end(), b_set.begin(), b_set.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> CutPartition::power_limited() const {
  std::vector<std::size_t> out(far_D.begin(), far_D.end());
  out.insert(out.end(), b_set.begin(), b_set.end());
  std::sort(out.begin(), out.end());
  return out;
}

double select_cut_width(double snr_s, std::size_t n, double alpha) {
  if (n < 2) throw InvalidArgument("select_cut_width needs n >= 2");
  if (!(alpha >= 2.0)) throw InvalidArgument("alpha must be >= 2");
  const double nn = static_cast<double>(n);
  const double root_n = std::sqrt(nn);
  if (snr_s >= std::pow(nn, alpha / 2.0 - 1.0)) return root_n;
  if (snr_s < 1.0) return 1.0;
  if (alpha == 2.0) return root_n;
  return std::pow(snr_s, 1.0 / (alpha - 2.0));
}

CutPartition partition_nodes(const NetworkInstance& instance, double w_hat) {
  CutPartition p = base_partition(instance, w_hat, CutMode::Idealized);
  for (std::size_t i = 0; i < instance.node_count(); ++i) {
    if (instance.positions[i].x < p.cut_x) {
      p.left_S.push_back(i);
    } else if (p.x_hat[i] < 1.0) {
      p.excluded_E.push_back(i);
    } else if (in_strip(p.x_hat[i], w_hat)) {
      p.strip_VD.push_back(i);
    } else {
      p.far_D.push_back(i);
    }
  }
  require_both_sides(p);
  return p;
}

CutPartition partition_nodes(const NetworkInstance& instance, double w_hat,
                             const PercolationGrid& grid, const CutPolyline& cut) {
  CutPartition p = base_partition(instance, w_hat, CutMode::Percolation);
  const SideSplit split = split_by_cut(grid, cut, instance);
  for (std::size_t i = 0; i < instance.node_count(); ++i) {
    if (split.side[i] == CutSide::Left) {
      p.left_S.push_back(i);
    } else if (split.in_slab[i]) {
      p.b_set.push_back(i);
    } else if (in_strip(p.x_hat[i], w_hat)) {
      p.strip_VD.push_back(i);
    } else {
      p.far_D.push_back(i);
    }
  }
  require_both_sides(p);
  return p;
}

std::vector<PowerProfileEntry> power_profile(const NetworkInstance& instance, double alpha,
                                             std::span<const std::size_t> left,
                                             std::span<const std::size_t> target) {
  const double cut_x = instance.side();
  const double u = instance.unit_distance();
  std::vector<PowerProfileEntry> out;
  out.reserve(target.size());
  for (std::size_t i : target) {
    if (i >= instance.node_count()) throw InvalidArgument("target index out of range");
    PowerProfileEntry e;
    e.node = i;
    e.x_hat = (instance.positions[i].x - cut_x) / u;
    if (e.x_hat < 0) throw InvalidArgument("power_profile target must lie right of the cut");
    e.d_hat = d_hat(instance, alpha, left, i);
    e.d_hat_approx = std::pow(e.x_hat, 2.0 - alpha);
    out.push_back(e);
  }
  return out;
}

double snr_total(const NetworkInstance& instance, const CutPartition& partition,
                 double snr_s, double alpha) {
  const auto targets = partition.power_limited();
  if (targets.empty()) return 0.0;
  return snr_s * sum_d_hat(instance, alpha, partition.left_S, targets);
}

double b_set_snr(const NetworkInstance& instance, const CutPartition& partition,
                 double snr_s, double alpha) {
  if (partition.b_set.empty()) return 0.0;
  return snr_s * sum_d_hat(instance, alpha, partition.left_S, partition.b_set);
}

double closed_form_snr_total_bound(double snr_s, std::size_t n, double alpha,
                                   double w_hat, double K1) {
  if (n < 2) throw InvalidArgument("closed-form bound needs n >= 2");
  if (!(K1 > 0)) throw InvalidArgument("K1 must be positive");
  if (!(alpha >= 2.0)) throw InvalidArgument("alpha must be >= 2");
  const double nn = static_cast<double>(n);
  const double root_n = std::sqrt(nn);
  if (std::abs(w_hat - root_n) <= kRelTol * root_n)
    throw InvalidArgument("closed-form bound does not apply at w_hat = sqrt(n)");
  const double L = log_n(n);
  if (alpha == 2.0) return K1 * snr_s * nn * L * L * L;
  if (alpha < 3.0) return K1 * snr_s * std::pow(nn, 2.0 - alpha / 2.0) * L * L;
  if (alpha == 3.0) return K1 * snr_s * root_n * L * L * L;
  return K1 * snr_s * std::pow(w_hat, 3.0 - alpha) * root_n * L * L;
}

DofTerm dof_term(const CutPartition& partition, double snr_s, std::size_t n,
                 double alpha, double delta) {
  if (!(delta > 0)) throw InvalidArgument("delta must be positive");
  if (n < 2) throw InvalidArgument("dof_term needs n >= 2");
  const double nn = static_cast<double>(n);
  const double per_node =
      std::log2(1.0 + std::pow(nn, 1.0 + alpha * (0.5 + delta)) * snr_s);
  DofTerm d;
  d.size_VD = partition.strip_VD.size();
  d.realized = static_cast<double>(d.size_VD) * per_node;
  d.whp_bound = (partition.w_hat - 1.0) * std::sqrt(nn) * log_n(n) * per_node;
  if (d.size_VD == 0) d.realized = 0.0;
  return d;
}

double power_term(double snr_total_value, std::size_t n, double epsilon) {
  return std::pow(static_cast<double>(n), epsilon) * snr_total_value / std::numbers::ln2;
}

double cutset_logdet(const NetworkInstance& instance, const CutPartition& partition,
                     double alpha, double snr_s, std::uint64_t phase_seed) {
  PhysicalParams params;
  params.alpha = alpha;
  const auto rx = partition.receivers();
  const ChannelMatrix h = channel_matrix(instance, params, partition.left_S, rx, phase_seed, true);
  const Eigen::MatrixXcd& H = h.entries;
  // det(I + s H H^*) = det(I + s H^* H); factor the smaller Gram matrix.
  Eigen::MatrixXcd gram = H.rows() <= H.cols() ? Eigen::MatrixXcd(H * H.adjoint())
                                               : Eigen::MatrixXcd(H.adjoint() * H);
  gram *= snr_s;
  gram.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  const auto diag = llt.matrixLLT().diagonal();
  std::vector<double> logs(static_cast<std::size_t>(diag.size()));
  for (Eigen::Index i = 0; i < diag.size(); ++i) logs[static_cast<std::size_t>(i)] = std::log2(diag(i).real());
  const double v = 2.0 * compensated_sum(logs);
  return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
}

LogDetEstimate mc_cutset_logdet(const NetworkInstance& instance,
                                const CutPartition& partition, double alpha,
                                double snr_s, std::size_t trials,
                                std::uint64_t phase_seed, unsigned threads) {
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  LogDetEstimate est;
  est.per_trial.assign(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    est.per_trial[t] =
        cutset_logdet(instance, partition, alpha, snr_s, trial_phase_seed(phase_seed, t));
  });
  std::vector<double> good;
  for (double v : est.per_trial)
    if (std::isnan(v))
      ++est.discarded;
    else
      good.push_back(v);
  est.used = good.size();
  if (good.empty()) {
    est.mean = std::numeric_limits<double>::quiet_NaN();
    est.stderr_ = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  const double m = static_cast<double>(good.size());
  est.mean = compensated_sum(good) / m;
  if (good.size() > 1) {
    std::vector<double> sq;
    sq.reserve(good.size());
    for (double v : good) sq.push_back((v - est.mean) * (v - est.mean));
    est.stderr_ = std::sqrt(compensated_sum(sq) / (m - 1.0) / m);
  }
  return est;
}

LogDetEstimate mc_cutset_logdet(const NetworkInstance& instance,
                                const CutPartition& partition,
                                const PhysicalParams& params, std::size_t trials,
                                std::uint64_t phase_seed, unsigned threads) {
  const double s = snr_short(params, instance.n_pairs, instance.area_A);
  return mc_cutset_logdet(instance, partition, params.alpha, s, trials, phase_seed, threads);
}

double upper_bound_exponent(double alpha, double beta) {
  if (!(alpha >= 2.0)) throw InvalidArgument("alpha must be >= 2");
  const double edge = alpha / 2.0 - 1.0;
  if (beta >= edge) return 1.0;
  if (alpha < 3.0) return 2.0 - alpha / 2.0 + beta;
  if (beta <= 0.0) return 0.5 + beta;
  return 0.5 + beta / (alpha - 2.0);
}

CutsetReport evaluate_cutset(const NetworkInstance& instance, double alpha, double beta,
                             const CutsetOptions& options, std::uint64_t phase_seed) {
  const std::size_t n = instance.n_pairs;
  const double snr_s = std::pow(static_cast<double>(n), beta);
  const double w_hat = select_cut_width(snr_s, n, alpha);

  CutPartition part;
  if (options.mode == CutMode::Idealized) {
    part = partition_nodes(instance, w_hat);
  } else {
    const auto grid = build_occupancy_grid(instance, options.c);
    const auto crossing = find_open_crossing(grid);
    if (!crossing) throw DegenerateInstance("slab has no open top-bottom crossing");
    const auto cut = extract_cut(crossing->cells, grid, instance);
    part = partition_nodes(instance, w_hat, grid, cut);
  }

  CutsetReport r;
  r.n = n;
  r.alpha = alpha;
  r.beta = beta;
  r.w_hat = w_hat;
  r.seed = instance.seed;
  const DofTerm dof = dof_term(part, snr_s, n, alpha, options.constants.delta);
  r.size_VD = dof.size_VD;
  r.dof_term = dof.realized;
  r.dof_whp = dof.whp_bound;
  r.snr_total = snr_total(instance, part, snr_s, alpha);
  r.power_term = power_term(r.snr_total, n, options.constants.epsilon);
  r.size_B = part.b_set.size();
  r.b_snr = b_set_snr(instance, part, snr_s, alpha);
  const auto est = mc_cutset_logdet(instance, part, alpha, snr_s, options.trials, phase_seed,
                                    options.threads);
  r.mc_logdet = est.mean;
  r.mc_stderr = est.stderr_;
  r.trials = est.used;
  r.discarded = est.discarded;
  const double root_n = std::sqrt(static_cast<double>(n));
  if (std::abs(w_hat - root_n) > kRelTol * root_n)
    r.closed_form_bound = closed_form_snr_total_bound(snr_s, n, alpha, w_hat, options.constants.K1);
  return r;
}

std::string cutset_csv_header() {
  return "n,alpha,beta,w_hat,size_VD,dof_term,snr_total,power_term,mc_logdet,mc_stderr,"
         "closed_form_bound,trials,seed";
}

std::string cutset_csv_row(const CutsetReport& r) {
  std::ostringstream os;
  os << r.n << ',' << csv_double(r.alpha) << ',' << csv_double(r.beta) << ','
     << csv_double(r.w_hat) << ',' << r.size_VD << ',' << csv_double(r.dof_term) << ','
     << csv_double(r.snr_total) << ',' << csv_double(r.power_term) << ','
     << csv_double(r.mc_logdet) << ',' << csv_double(r.mc_stderr) << ','
     << csv_double(r.closed_form_bound) << ',' << r.trials << ',' << r.seed;
  return os.str();
}

}  // namespace netregime
