#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "netregime/error.hpp"
#include "netregime/harness.hpp"
#include "netregime/network_model.hpp"

using namespace netregime;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitExperiment = 3;

struct CommonFlags {
  std::vector<std::size_t> n;
  double alpha = 2.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::size_t phase_trials = 20;
  std::string out = "out";
  std::string config;
  unsigned threads = 1;
  ExperimentConstants k;
  std::string mode = "idealized";
  std::string scheme = "multihop";
  std::size_t M = 0;
};

void add_common(CLI::App* app, CommonFlags& f, bool constants) {
  app->add_option("--n", f.n, "network sizes (pairs)")->delimiter(',');
  app->add_option("--alpha", f.alpha, "path-loss exponent");
  app->add_option("--beta", f.beta, "SNR_s = n^beta");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--trials", f.trials, "draws per point");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--config", f.config, "JSON experiment config");
  app->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  if (!constants) return;
  app->add_option("--K1", f.k.K1);
  app->add_option("--K2", f.k.K2);
  app->add_option("--K3", f.k.K3);
  app->add_option("--K4", f.k.K4, "defaults to K3/4");
  app->add_option("--epsilon", f.k.epsilon);
  app->add_option("--delta", f.k.delta);
  app->add_option("--c", f.k.c, "percolation cell constant");
}

ExperimentConfig config_from(const CLI::App* app, const CommonFlags& f, ExperimentKind kind) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
  } else {
    c.kind = kind;
    c.n_list = f.n;
    c.alpha = f.alpha;
    c.beta = f.beta;
    c.seed = f.seed;
    c.trials = f.trials;
    c.phase_trials = f.phase_trials;
    c.constants = f.k;
    if (app->count("--K4") == 0) c.constants.K4 = c.constants.K3 / 4.0;
    if (f.mode == "percolation") c.mode = CutMode::Percolation;
    else if (f.mode != "idealized") throw InvalidArgument("unknown cut mode: " + f.mode);
    const auto s = scheme_from_string(f.scheme);
    if (!s) throw InvalidArgument("unknown scheme: " + f.scheme);
    c.scheme = *s;
    if (f.M > 0) c.forced_M = f.M;
  }
  if (app->count("--out") > 0 || f.config.empty()) c.output = f.out;
  c.validate();
  return c;
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& p : files) std::cout << p.string() << '\n';
}

int run_fit(const std::string& input, const std::string& column, double theory) {
  std::ifstream in(input);
  if (!in) throw InvalidArgument("cannot read " + input);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty table " + input);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto find = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InvalidArgument("column not found: " + name);
  };
  const std::size_t n_col = find("n");
  const std::size_t m_col = find(column);
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() <= std::max(n_col, m_col)) throw InvalidArgument("short row in " + input);
    if (cells[m_col] == "NA") continue;
    pts.emplace_back(std::stod(cells[n_col]), std::stod(cells[m_col]));
  }
  std::cout << to_json(fit_scaling(pts, theory)).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity-scaling experiments for random wireless networks"};
  app.require_subcommand(1);

  CommonFlags f;

  auto* gen = app.add_subcommand("gen", "draw one network and write it as JSON");
  std::size_t gen_n = 0;
  double gen_area = 0.0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "pairs")->required();
  gen->add_option("--area", gen_area, "area A (default n)");
  gen->add_option("--seed", f.seed);
  gen->add_option("--out", gen_out, "output file (default stdout)");

  auto* cutset = app.add_subcommand("cutset", "cutset bound sweep over n");
  add_common(cutset, f, true);
  cutset->add_option("--mode", f.mode, "idealized or percolation");
  cutset->add_option("--phase-trials", f.phase_trials, "fading draws per network");

  auto* scheme = app.add_subcommand("scheme", "scheme throughput sweep over n");
  add_common(scheme, f, true);
  scheme->add_option("--scheme", f.scheme, "multihop, hierarchical, bursty_hierarchical, hybrid");

  auto* hybrid = app.add_subcommand("hybrid", "simulated hybrid scheme sweep over n");
  add_common(hybrid, f, true);
  hybrid->add_option("--M", f.M, "force nodes per cell");

  auto* perc = app.add_subcommand("percolation", "open-crossing probability study");
  add_common(perc, f, true);

  auto* phase = app.add_subcommand("phase-diagram", "regime map over (alpha, beta)");
  std::vector<double> alpha_range{2.0, 6.0, 81}, beta_range{-1.0, 3.0, 81};
  phase->add_option("--alpha-range", alpha_range, "lo hi points")->expected(3);
  phase->add_option("--beta-range", beta_range, "lo hi points")->expected(3);
  phase->add_option("--out", f.out, "output directory");
  phase->add_option("--config", f.config, "JSON experiment config");

  auto* fit = app.add_subcommand("fit", "log-log fit of a CSV column against n");
  std::string fit_in, fit_column = "metric";
  double fit_theory = 0.0;
  fit->add_option("--in", fit_in, "CSV with an n column")->required();
  fit->add_option("--column", fit_column, "metric column");
  fit->add_option("--theory", fit_theory, "theory exponent to report");

  auto* sweep = app.add_subcommand("sweep", "run the experiment described by a config");
  sweep->add_option("--config", f.config, "JSON experiment config")->required();
  sweep->add_option("--out", f.out, "output directory (overrides config)");
  sweep->add_option("--threads", f.threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      const double area = gen_area > 0 ? gen_area : static_cast<double>(gen_n);
      const auto inst = generate_network(gen_n, area, f.seed);
      const std::string text = nlohmann::json(inst).dump() + '\n';
      if (gen_out.empty())
        std::cout << text;
      else
        write_text_file(gen_out, text);
      return 0;
    }
    if (*fit) return run_fit(fit_in, fit_column, fit_theory);

    ExperimentConfig config;
    if (*cutset) config = config_from(cutset, f, ExperimentKind::Cutset);
    if (*scheme) config = config_from(scheme, f, ExperimentKind::Scheme);
    if (*hybrid) {
      f.scheme = "hybrid";
      config = config_from(hybrid, f, ExperimentKind::Scheme);
    }
    if (*perc) config = config_from(perc, f, ExperimentKind::Percolation);
    if (*sweep) config = config_from(sweep, f, ExperimentKind::Scheme);
    if (*phase) {
      if (!f.config.empty()) {
        config = load_config(f.config);
        if (phase->count("--out") > 0) config.output = f.out;
      } else {
        config.kind = ExperimentKind::PhaseDiagram;
        config.alpha_range = AxisRange{alpha_range[0], alpha_range[1],
                                       static_cast<std::size_t>(alpha_range[2])};
        config.beta_range = AxisRange{beta_range[0], beta_range[1],
                                      static_cast<std::size_t>(beta_range[2])};
        config.output = f.out;
      }
      if (config.kind != ExperimentKind::PhaseDiagram)
        throw InvalidArgument("config kind must be phase-diagram");
      config.validate();
    }
    report(run_experiment(config, f.threads));
    return 0;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RegimeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << '\n';
    return kExitExperiment;
  }
}
