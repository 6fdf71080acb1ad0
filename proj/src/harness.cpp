#include "netregime/harness.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "netregime/csv.hpp"
#include "netregime/error.hpp"
#include "netregime/parallel.hpp"
#include "netregime/percolation_cut.hpp"
#include "netregime/rng.hpp"

namespace netregime {
namespace {

constexpr std::uint64_t kTagPoint = 0x706f696e74ULL;
constexpr std::uint64_t kTagPhase = 0x7068617365ULL;
constexpr std::uint64_t kTagRelay = 0x68796272ULL;
constexpr std::uint64_t kTagStudy = 0x7374756479ULL;

struct TrialOutcome {
  bool ok = false;
  double metric = std::numeric_limits<double>::quiet_NaN();
  std::string row;
};

double mean_of(const std::vector<double>& v) {
  return compensated_sum(v) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq;
  sq.reserve(v.size());
  for (double x : v) sq.push_back((x - mean) * (x - mean));
  const double var = compensated_sum(sq) / static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

double scheme_theory(Scheme scheme, double alpha, double beta) {
  const SchemeExponents e = scheme_exponents(alpha, beta);
  switch (scheme) {
    case Scheme::Multihop: return e.multihop;
    case Scheme::HierarchicalCooperation:
    case Scheme::BurstyHierarchicalCooperation: return e.hierarchical;
    case Scheme::Hybrid: return e.hybrid ? *e.hybrid : e.multihop;
  }
  return 0.0;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t trial) {
  TrialOutcome out;
  const std::uint64_t seed = point_seed(cfg.seed, n, trial);
  const double nn = static_cast<double>(n);
  const double snr_s = std::pow(nn, cfg.beta);
  try {
    if (cfg.kind == ExperimentKind::Cutset) {
      const auto inst = generate_network(n, nn, seed);
      const auto report = evaluate_cutset(inst, cfg.alpha, cfg.beta, cfg.cutset_options(),
                                          mix_seed(seed, {kTagPhase}));
      if (report.trials == 0 || !std::isfinite(report.mc_logdet)) return out;
      out.metric = report.mc_logdet;
      out.row = cutset_csv_row(report);
    } else {
      const SchemeConstants k = cfg.scheme_constants();
      ThroughputEstimate est;
      switch (cfg.scheme) {
        case Scheme::Multihop: est = multihop_throughput(n, snr_s, k.K2); break;
        case Scheme::HierarchicalCooperation:
          est = hc_throughput(n, snr_s, cfg.alpha, k.epsilon, k.K3, false);
          break;
        case Scheme::BurstyHierarchicalCooperation:
          est = hc_throughput(n, snr_s, cfg.alpha, k.epsilon, k.K3, true);
          break;
        case Scheme::Hybrid: {
          const auto inst = generate_network(n, nn, seed);
          est = simulate_hybrid(inst, snr_s, cfg.alpha, k, mix_seed(seed, {kTagRelay}),
                                cfg.forced_M);
          break;
        }
      }
      out.metric = est.aggregate_T;
      out.row = scheme_csv_row(n, cfg.alpha, cfg.beta, est, seed);
    }
  } catch (const DegenerateInstance&) {
    return out;
  }
  out.ok = std::isfinite(out.metric);
  return out;
}

nlohmann::json axis_json(const AxisRange& r) {
  return {{"lo", r.lo}, {"hi", r.hi}, {"points", r.points}};
}

AxisRange axis_from_json(const nlohmann::json& j) {
  AxisRange r;
  for (const auto& [key, value] : j.items())
    if (key != "lo" && key != "hi" && key != "points")
      throw InvalidArgument("unknown range key: " + key);
  r.lo = j.at("lo").get<double>();
  r.hi = j.at("hi").get<double>();
  r.points = j.at("points").get<std::size_t>();
  return r;
}

std::string hex(const unsigned char* bytes, std::size_t len) {
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (std::size_t i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(bytes[i]);
  return os.str();
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Cutset: return "cutset";
    case ExperimentKind::Scheme: return "scheme";
    case ExperimentKind::Percolation: return "percolation";
    case ExperimentKind::PhaseDiagram: return "phase-diagram";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (!(alpha >= 2.0)) throw InvalidArgument("alpha must be >= 2");
  if (!std::isfinite(beta)) throw InvalidArgument("beta must be finite");
  if (kind == ExperimentKind::PhaseDiagram) {
    if (alpha_range.points == 0 || beta_range.points == 0)
      throw InvalidArgument("phase diagram resolution must be >= 1");
    if (!(std::min(alpha_range.lo, alpha_range.hi) >= 2.0))
      throw InvalidArgument("alpha range must lie in [2, inf)");
    return;
  }
  if (n_list.empty()) throw InvalidArgument("n_list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2) throw InvalidArgument("every n must be >= 2");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw InvalidArgument("n_list must be strictly increasing");
  }
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  if (kind == ExperimentKind::Cutset && phase_trials == 0)
    throw InvalidArgument("phase_trials must be >= 1");
  const auto& k = constants;
  if (!(k.K1 > 0 && k.K2 > 0 && k.K3 > 0 && k.K4 > 0 && k.epsilon > 0 && k.delta > 0))
    throw InvalidArgument("constants must be positive");
  if (!(k.c > 0 && k.c < 1)) throw InvalidArgument("c must lie in (0, 1)");
  if (forced_M && *forced_M == 0) throw InvalidArgument("M must be >= 1");
}

SchemeConstants ExperimentConfig::scheme_constants() const {
  return SchemeConstants{constants.K2, constants.K3, constants.K4, constants.epsilon};
}

CutsetOptions ExperimentConfig::cutset_options() const {
  CutsetOptions o;
  o.mode = mode;
  o.constants = CutsetConstants{constants.delta, constants.epsilon, constants.K1};
  o.c = constants.c;
  o.trials = phase_trials;
  o.threads = 1;
  return o;
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{
      {"kind", to_string(c.kind)},
      {"n_list", c.n_list},
      {"alpha", c.alpha},
      {"beta", c.beta},
      {"constants",
       {{"K1", c.constants.K1},
        {"K2", c.constants.K2},
        {"K3", c.constants.K3},
        {"K4", c.constants.K4},
        {"epsilon", c.constants.epsilon},
        {"delta", c.constants.delta},
        {"c", c.constants.c}}},
      {"trials", c.trials},
      {"phase_trials", c.phase_trials},
      {"seed", c.seed},
      {"output", c.output},
      {"scheme", to_string(c.scheme)},
      {"mode", c.mode == CutMode::Idealized ? "idealized" : "percolation"},
      {"alpha_range", axis_json(c.alpha_range)},
      {"beta_range", axis_json(c.beta_range)},
  };
  if (c.forced_M) j["M"] = *c.forced_M;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  try {
    c = ExperimentConfig{};
    bool k4_given = false;
    for (const auto& [key, v] : j.items()) {
      if (key == "kind") {
        const auto s = v.get<std::string>();
        if (s == "cutset") c.kind = ExperimentKind::Cutset;
        else if (s == "scheme") c.kind = ExperimentKind::Scheme;
        else if (s == "percolation") c.kind = ExperimentKind::Percolation;
        else if (s == "phase-diagram") c.kind = ExperimentKind::PhaseDiagram;
        else throw InvalidArgument("unknown experiment kind: " + s);
      } else if (key == "n_list") {
        c.n_list = v.get<std::vector<std::size_t>>();
      } else if (key == "alpha") {
        c.alpha = v.get<double>();
      } else if (key == "beta") {
        c.beta = v.get<double>();
      } else if (key == "constants") {
        for (const auto& [ck, cv] : v.items()) {
          const double x = cv.get<double>();
          if (ck == "K1") c.constants.K1 = x;
          else if (ck == "K2") c.constants.K2 = x;
          else if (ck == "K3") c.constants.K3 = x;
          else if (ck == "K4") { c.constants.K4 = x; k4_given = true; }
          else if (ck == "epsilon") c.constants.epsilon = x;
          else if (ck == "delta") c.constants.delta = x;
          else if (ck == "c") c.constants.c = x;
          else throw InvalidArgument("unknown constant: " + ck);
        }
      } else if (key == "trials") {
        c.trials = v.get<std::size_t>();
      } else if (key == "phase_trials") {
        c.phase_trials = v.get<std::size_t>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "output") {
        c.output = v.get<std::string>();
      } else if (key == "scheme") {
        const auto s = scheme_from_string(v.get<std::string>());
        if (!s) throw InvalidArgument("unknown scheme: " + v.get<std::string>());
        c.scheme = *s;
      } else if (key == "mode") {
        const auto s = v.get<std::string>();
        if (s == "idealized") c.mode = CutMode::Idealized;
        else if (s == "percolation") c.mode = CutMode::Percolation;
        else throw InvalidArgument("unknown cut mode: " + s);
      } else if (key == "M") {
        c.forced_M = v.get<std::size_t>();
      } else if (key == "alpha_range") {
        c.alpha_range = axis_from_json(v);
      } else if (key == "beta_range") {
        c.beta_range = axis_from_json(v);
      } else {
        throw InvalidArgument("unknown config key: " + key);
      }
    }
    if (!k4_given) c.constants.K4 = c.constants.K3 / 4.0;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  return j.get<ExperimentConfig>();
}

std::uint64_t point_seed(std::uint64_t master, std::size_t n, std::size_t trial) noexcept {
  return mix_seed(master, {kTagPoint, n, trial});
}

ScalingTable run_scaling_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  if (config.kind == ExperimentKind::PhaseDiagram)
    throw InvalidArgument("phase diagrams are not scaling experiments");
  ScalingTable table;
  std::ostringstream detail;

  if (config.kind == ExperimentKind::Percolation) {
    detail << crossing_csv_header() << '\n';
    for (std::size_t n : config.n_list) {
      const auto study = crossing_probability(n, config.constants.c, config.trials,
                                              mix_seed(config.seed, {kTagStudy, n}), threads);
      detail << crossing_csv_row(study) << '\n';
      ScalingRow row;
      row.n = n;
      row.metric = study.empirical_rate;
      row.stderr_ = study.failure_stderr;
      row.trials_ok = study.trials;
      table.rows.push_back(row);
    }
    table.detail_csv = detail.str();
    table.theory_exponent = 0.0;
    return table;
  }

  const bool closed_form = config.kind == ExperimentKind::Scheme && config.scheme != Scheme::Hybrid;
  const std::size_t per_point = closed_form ? 1 : config.trials;
  const std::size_t points = config.n_list.size();
  std::vector<TrialOutcome> outcomes(points * per_point);
  parallel_for(outcomes.size(), threads, [&](std::size_t i) {
    outcomes[i] = run_trial(config, config.n_list[i / per_point], i % per_point);
  });

  detail << (config.kind == ExperimentKind::Cutset ? cutset_csv_header() : scheme_csv_header())
         << '\n';
  for (std::size_t p = 0; p < points; ++p) {
    ScalingRow row;
    row.n = config.n_list[p];
    std::vector<double> values;
    for (std::size_t t = 0; t < per_point; ++t) {
      const auto& o = outcomes[p * per_point + t];
      if (o.ok) {
        values.push_back(o.metric);
        detail << o.row << '\n';
      } else {
        ++row.failures;
      }
    }
    row.trials_ok = values.size();
    row.skipped = values.empty() || 10 * row.failures > per_point;
    if (!values.empty()) {
      row.metric = mean_of(values);
      row.stderr_ = stderr_of(values, row.metric);
    } else {
      row.metric = std::numeric_limits<double>::quiet_NaN();
      row.stderr_ = std::numeric_limits<double>::quiet_NaN();
    }
    table.rows.push_back(row);
  }
  table.detail_csv = detail.str();
  table.theory_exponent = config.kind == ExperimentKind::Cutset
                              ? classify(config.alpha, config.beta).exponent
                              : scheme_theory(config.scheme, config.alpha, config.beta);
  return table;
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points,
                       double theory_exponent) {
  if (points.size() < 3) throw InvalidArgument("fit needs at least 3 points");
  std::vector<double> xs, ys;
  for (const auto& [n, m] : points) {
    if (!(n > 0)) throw InvalidArgument("fit: n must be positive");
    if (!(m > 0) || !std::isfinite(m)) throw InvalidArgument("fit: metric must be positive");
    xs.push_back(std::log(n));
    ys.push_back(std::log(m));
  }
  const double k = static_cast<double>(xs.size());
  const double mx = compensated_sum(xs) / k;
  const double my = compensated_sum(ys) / k;
  std::vector<double> sxx, sxy, syy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx.push_back((xs[i] - mx) * (xs[i] - mx));
    sxy.push_back((xs[i] - mx) * (ys[i] - my));
    syy.push_back((ys[i] - my) * (ys[i] - my));
  }
  const double Sxx = compensated_sum(sxx);
  if (!(Sxx > 0)) throw InvalidArgument("fit: n values must not all be equal");
  FitResult f;
  f.points = xs.size();
  f.theory_exponent = theory_exponent;
  f.slope = compensated_sum(sxy) / Sxx;
  f.intercept = my - f.slope * mx;
  std::vector<double> ss_res;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    f.residuals.push_back(r);
    ss_res.push_back(r * r);
  }
  const double Syy = compensated_sum(syy);
  const double scale = std::max(1.0, std::abs(my));
  if (Syy <= 1e-24 * scale * scale * k) {
    f.r_squared = 1.0;
  } else {
    f.r_squared = std::clamp(1.0 - compensated_sum(ss_res) / Syy, 0.0, 1.0);
  }
  return f;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       double theory_exponent) {
  ScalingFit fit;
  fit.full = fit_exponent(points, theory_exponent);
  if (points.size() >= 6) {
    const std::size_t keep = std::max<std::size_t>(4, (points.size() + 1) / 2);
    std::vector<std::pair<double, double>> tail(points.end() - static_cast<std::ptrdiff_t>(keep),
                                                points.end());
    fit.tail = fit_exponent(tail, theory_exponent);
  }
  return fit;
}

ScalingFit fit_scaling(const ScalingTable& table) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : table.rows)
    if (!r.skipped && r.metric > 0) pts.emplace_back(static_cast<double>(r.n), r.metric);
  return fit_scaling(pts, table.theory_exponent);
}

nlohmann::json to_json(const FitResult& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"theory_exponent", f.theory_exponent},
          {"points", f.points},
          {"residuals", f.residuals}};
}

nlohmann::json to_json(const ScalingFit& f) {
  nlohmann::json j{{"full", to_json(f.full)}};
  j["tail"] = f.tail ? to_json(*f.tail) : nlohmann::json(nullptr);
  return j;
}

std::string scaling_csv(const ScalingTable& table) {
  std::ostringstream os;
  os << "n,metric,stderr,trials_ok,failures,skipped\n";
  for (const auto& r : table.rows)
    os << r.n << ',' << csv_double(r.metric) << ',' << csv_double(r.stderr_) << ',' << r.trials_ok
       << ',' << r.failures << ',' << (r.skipped ? 1 : 0) << '\n';
  return os.str();
}

std::string crossing_csv_header() { return "n,c,trials,empirical_rate,analytic_bound,flag"; }

std::string crossing_csv_row(const CrossingStudy& s) {
  return std::to_string(s.n) + ',' + csv_double(s.c) + ',' + std::to_string(s.trials) + ',' +
         csv_double(s.empirical_rate) + ',' + csv_double(s.analytic_bound) + ',' +
         (s.flag ? "1" : "0");
}

std::vector<std::filesystem::path> emit_phase_diagram(const ExperimentConfig& config,
                                                      const std::filesystem::path& dir) {
  const PhaseDiagram d = phase_diagram(config.alpha_range, config.beta_range);
  std::ostringstream csv, plot;
  write_phase_diagram_csv(csv, d);
  write_phase_diagram_plot(plot, d);
  const auto csv_path = dir / "phase_diagram.csv";
  const auto plot_path = dir / "phase_diagram_plot.txt";
  write_text_file(csv_path, csv.str());
  write_text_file(plot_path, plot.str());
  return {csv_path, plot_path};
}

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  SHA_CTX ctx;
  SHA1_Init(&ctx);
  SHA1_Update(&ctx, header.data(), header.size());
  SHA1_Update(&ctx, content.data(), content.size());
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1_Final(digest, &ctx);
  return hex(digest, SHA_DIGEST_LENGTH);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                  unsigned threads) {
  config.validate();
  const std::filesystem::path dir(config.output);
  std::vector<std::filesystem::path> written;
  if (config.kind == ExperimentKind::PhaseDiagram) {
    written = emit_phase_diagram(config, dir);
  } else {
    const ScalingTable table = run_scaling_experiment(config, threads);
    write_text_file(dir / "results.csv", table.detail_csv);
    write_text_file(dir / "summary.csv", scaling_csv(table));
    written = {dir / "results.csv", dir / "summary.csv"};
    std::size_t usable = 0;
    for (const auto& r : table.rows) usable += !r.skipped && r.metric > 0;
    if (usable >= 3) {
      write_text_file(dir / "fit.json", to_json(fit_scaling(table)).dump(2) + '\n');
      written.push_back(dir / "fit.json");
    }
  }
  nlohmann::json manifest{{"version", kVersion}, {"config", config}};
  manifest["config"].erase("output");
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : written)
    files.push_back({{"file", p.filename().string()}, {"sha1", git_blob_sha1(read_text_file(p))}});
  manifest["outputs"] = files;
  const auto manifest_path = dir / "manifest.json";
  write_text_file(manifest_path, manifest.dump(2) + '\n');
  written.push_back(manifest_path);
  return written;
}

}  // namespace netregime
