#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "netregime/cutset_bound.hpp"
#include "netregime/regime_atlas.hpp"
#include "netregime/scheme_sim.hpp"

namespace netregime {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { Cutset, Scheme, Percolation, PhaseDiagram };

std::string to_string(ExperimentKind kind);

struct ExperimentConstants {
  double K1 = 1.0;
  double K2 = 1.0;
  double K3 = 1.0;
  double K4 = 0.25;
  double epsilon = 0.05;
  double delta = 0.05;
  double c = 0.25;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Scheme;
  std::vector<std::size_t> n_list;
  double alpha = 2.0;
  double beta = 0.0;
  ExperimentConstants constants;
  std::size_t trials = 1;         ///< network draws per point
  std::size_t phase_trials = 20;  ///< fading draws per network (cutset)
  std::uint64_t seed = 0;
  std::string output = "out";     ///< output directory
  Scheme scheme = Scheme::Multihop;
  CutMode mode = CutMode::Idealized;
  std::optional<std::size_t> forced_M;  ///< hybrid cell size override
  AxisRange alpha_range{2.0, 6.0, 81};
  AxisRange beta_range{-1.0, 3.0, 81};

  /// Throws InvalidArgument on a broken invariant.
  void validate() const;
  SchemeConstants scheme_constants() const;
  CutsetOptions cutset_options() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& config);
/// Strict: unknown keys and wrong types throw InvalidArgument.
void from_json(const nlohmann::json& j, ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Seed of trial `trial` at size n.
std::uint64_t point_seed(std::uint64_t master, std::size_t n, std::size_t trial) noexcept;

struct ScalingRow {
  std::size_t n = 0;
  double metric = 0.0;
  double stderr_ = 0.0;
  std::size_t trials_ok = 0;
  std::size_t failures = 0;
  bool skipped = false;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  /// Module CSV (cutset, scheme or percolation study), header included.
  std::string detail_csv;
  double theory_exponent = 0.0;
};

/// Evaluates every (n, trial) of a cutset, scheme or percolation config.
/// Degenerate draws are counted; a point with more than 10% failures is
/// marked skipped. Output does not depend on `threads`.
ScalingTable run_scaling_experiment(const ExperimentConfig& config, unsigned threads = 1);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theory_exponent = 0.0;
  std::vector<double> residuals;
  std::size_t points = 0;
};

/// OLS of ln(metric) on ln(n). Needs >= 3 points with metric > 0.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points,
                       double theory_exponent = 0.0);

struct ScalingFit {
  FitResult full;
  /// Largest max(4, ceil(N/2)) points, only when N >= 6.
  std::optional<FitResult> tail;
  const FitResult& preferred() const { return tail ? *tail : full; }
};

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       double theory_exponent = 0.0);
ScalingFit fit_scaling(const ScalingTable& table);

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const ScalingFit& fit);

std::string scaling_csv(const ScalingTable& table);
std::string crossing_csv_header();
std::string crossing_csv_row(const CrossingStudy& study);

/// Writes phase_diagram.csv and phase_diagram_plot.txt into `dir`.
std::vector<std::filesystem::path> emit_phase_diagram(const ExperimentConfig& config,
                                                      const std::filesystem::path& dir);

/// Git blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string git_blob_sha1(const std::string& content);

/// Runs the experiment described by `config` and writes its files into
/// config.output: results.csv, summary.csv and fit.json for sweeps, the
/// two phase-diagram files otherwise, plus manifest.json. Returns the
/// written paths, manifest last.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                  unsigned threads = 1);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace netregime
