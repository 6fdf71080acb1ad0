// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netregime/csv.hpp"
#include "netregime/error.hpp"
#include "netregime/harness.hpp"
#include "netregime/parallel.hpp"
#include "netregime/percolation_cut.hpp"
#include "netregime/rng.hpp"

using namespace netregime;
namespace fs = std::filesystem;

namespace {

struct Context {
  fs::path dir;
  unsigned threads = 1;
  std::uint64_t seed = 2024;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int table_regime(double a, double b) {
  if (b >= a / 2 - 1) return 1;
  if (a >= 2 && a <= 3) return 2;
  if (b <= 0) return 3;
  return 4;
}

double row_exponent(int row, double a, double b) {
  switch (row) {
    case 1: return 1.0;
    case 2: return 2 - a / 2 + b;
    case 3: return 0.5 + b;
    default: return 0.5 + b / (a - 2);
  }
}

Outcome classifier_exactness(const Context& ctx) {
  std::size_t agree = 0, total = 0;
  std::ostringstream csv;
  csv << "alpha,beta,regime,table\n";
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      const double a = 2 + 4.0 * i / 199, b = -1 + 4.0 * j / 199;
      const int got = static_cast<int>(classify(a, b).regime);
      const int want = table_regime(a, b);
      agree += got == want;
      ++total;
      if (got != want) csv << csv_double(a) << ',' << csv_double(b) << ',' << got << ',' << want << '\n';
    }
  write_text_file(ctx.dir / "c01_classifier.csv", csv.str());
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree"};
}

Outcome boundary_continuity(const Context& ctx) {
  RandomStream rng(mix_seed(ctx.seed, {2}));
  struct Boundary {
    const char* name;
    std::function<std::pair<double, double>(double)> point;
    int row_a, row_b;
  };
  const std::vector<Boundary> boundaries{
      {"I|II", [](double u) { const double a = 2 + u; return std::pair{a, a / 2 - 1}; }, 1, 2},
      {"I|IV", [](double u) { const double a = 3 + 3 * u; return std::pair{a, a / 2 - 1}; }, 1, 4},
      {"II|III", [](double u) { return std::pair{3.0, -1 + u}; }, 2, 3},
      {"II|IV", [](double u) { return std::pair{3.0, 0.5 * u}; }, 2, 4},
      {"III|IV", [](double u) { return std::pair{3 + 3 * u, 0.0}; }, 3, 4},
  };
  double worst = 0;
  std::ostringstream csv;
  csv << "boundary,max_gap\n";
  for (const auto& bd : boundaries) {
    double gap = 0;
    for (int k = 0; k < 10000; ++k) {
      const auto [a, b] = bd.point(rng.uniform());
      const double ea = row_exponent(bd.row_a, a, b), eb = row_exponent(bd.row_b, a, b);
      gap = std::max(gap, std::abs(ea - eb));
      // classifier is continuous across the boundary too
      const double e0 = classify(a, b).exponent;
      for (double db : {-1e-11, 1e-11})
        for (double da : {-1e-11, 1e-11})
          if (a + da >= 2) gap = std::max(gap, std::abs(classify(a + da, b + db).exponent - e0) - 1e-10);
    }
    csv << bd.name << ',' << csv_double(gap) << '\n';
    worst = std::max(worst, gap);
  }
  write_text_file(ctx.dir / "c02_boundaries.csv", csv.str());
  return {worst < 1e-9, "max gap " + fmt("%.3g", worst)};
}

struct SmallInstance {
  std::size_t n = 0;
  double alpha = 0, beta = 0;
  std::uint64_t seed = 0;
};

SmallInstance small_instance(const Context& ctx, std::size_t i) {
  static const double alphas[] = {2, 2.5, 3, 4};
  static const double betas[] = {-0.5, 0, 0.5, 1};
  RandomStream rng(mix_seed(ctx.seed, {3, i}));
  SmallInstance s;
  s.n = 2 + rng.below(63);
  s.alpha = alphas[i % 4];
  s.beta = betas[(i / 4) % 4];
  s.seed = rng.next();
  return s;
}

Outcome inequality_chain(const Context& ctx) {
  constexpr std::size_t kInstances = 1000, kPhases = 5;
  const CutsetConstants k;
  std::vector<std::string> rows(kInstances);
  std::vector<std::size_t> violations(kInstances, 0), trials(kInstances, 0);
  std::vector<char> degenerate(kInstances, 0);
  parallel_for(kInstances, ctx.threads, [&](std::size_t i) {
    const auto s = small_instance(ctx, i);
    const auto inst = generate_network(s.n, static_cast<double>(s.n), s.seed);
    const double snr = std::pow(static_cast<double>(s.n), s.beta);
    std::ostringstream os;
    try {
      const auto part = partition_nodes(inst, select_cut_width(snr, s.n, s.alpha));
      const double bound = dof_term(part, snr, s.n, s.alpha, k.delta).realized +
                           power_term(snr_total(inst, part, snr, s.alpha), s.n, k.epsilon);
      const auto est = mc_cutset_logdet(inst, part, s.alpha, snr, kPhases, mix_seed(s.seed, {33}));
      for (std::size_t t = 0; t < est.per_trial.size(); ++t) {
        const double v = est.per_trial[t];
        ++trials[i];
        if (!(v <= bound)) ++violations[i];
        os << i << ',' << s.n << ',' << csv_double(s.alpha) << ',' << csv_double(s.beta) << ','
           << t << ',' << csv_double(v) << ',' << csv_double(bound) << '\n';
      }
    } catch (const DegenerateInstance&) {
      degenerate[i] = 1;
      os << i << ',' << s.n << ',' << csv_double(s.alpha) << ',' << csv_double(s.beta)
         << ",NA,NA,NA\n";
    }
    rows[i] = os.str();
  });
  std::string csv = "instance,n,alpha,beta,trial,logdet,bound\n";
  std::size_t bad = 0, total = 0, skipped = 0;
  for (std::size_t i = 0; i < kInstances; ++i) {
    csv += rows[i];
    bad += violations[i];
    total += trials[i];
    skipped += degenerate[i];
  }
  write_text_file(ctx.dir / "c03_chain.csv", csv);
  return {bad == 0 && total > 0,
          std::to_string(bad) + " violations in " + std::to_string(total) + " trials (" +
              std::to_string(skipped) + " degenerate draws)"};
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

Outcome oracle_equivalence(const Context& ctx) {
  constexpr std::size_t kInstances = 1000;
  std::vector<double> worst(kInstances, 0.0);
  std::vector<char> checked(kInstances, 0);
  parallel_for(kInstances, ctx.threads, [&](std::size_t i) {
    const auto s = small_instance(ctx, i);
    if (2 * s.n > 64) return;
    const auto inst = generate_network(s.n, static_cast<double>(s.n), s.seed);
    const double snr = std::pow(static_cast<double>(s.n), s.beta);
    CutPartition part;
    try {
      part = partition_nodes(inst, select_cut_width(snr, s.n, s.alpha));
    } catch (const DegenerateInstance&) {
      return;
    }
    checked[i] = 1;
    const double u = inst.unit_distance();
    auto brute = [&](std::size_t j) {
      double sum = 0;
      for (std::size_t l : part.left_S) {
        const double dx = inst.positions[l].x - inst.positions[j].x;
        const double dy = inst.positions[l].y - inst.positions[j].y;
        sum += std::pow(std::sqrt(dx * dx + dy * dy) / u, -s.alpha);
      }
      return sum;
    };
    double total = 0;
    for (std::size_t j : part.power_limited()) total += brute(j);
    double w = rel_err(snr_total(inst, part, snr, s.alpha), snr * total);
    const auto rx = part.receivers();
    for (const auto& e : power_profile(inst, s.alpha, part.left_S, rx)) {
      w = std::max(w, rel_err(e.d_hat, brute(e.node)));
      const double xh = (inst.positions[e.node].x - inst.side()) / u;
      w = std::max(w, rel_err(e.d_hat_approx, std::pow(xh, 2 - s.alpha)));
    }
    worst[i] = w;
  });
  std::string csv = "instance,max_rel_err\n";
  double w = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < kInstances; ++i) {
    if (!checked[i]) continue;
    ++count;
    w = std::max(w, worst[i]);
    csv += std::to_string(i) + ',' + csv_double(worst[i]) + '\n';
  }
  write_text_file(ctx.dir / "c04_oracle.csv", csv);
  return {w <= 1e-9 && count > 0,
          std::to_string(count) + " instances, max rel err " + fmt("%.3g", w)};
}

std::vector<std::size_t> powers_of_two(int lo, int hi) {
  std::vector<std::size_t> out;
  for (int k = lo; k <= hi; ++k) out.push_back(std::size_t{1} << k);
  return out;
}

Outcome dense_slope(const Context& ctx) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Cutset;
  c.alpha = 2;
  c.beta = 1;
  c.n_list = {16, 32, 64, 128, 256};
  c.trials = 5;
  c.phase_trials = 20;
  c.output = (ctx.dir / "c05_dense").string();
  c.seed = mix_seed(ctx.seed, {5});
  run_experiment(c, ctx.threads);
  const auto fit = fit_scaling(run_scaling_experiment(c, ctx.threads)).preferred();
  return {fit.slope >= 0.8 && fit.slope <= 1.15, "slope " + fmt("%.4f", fit.slope) + " (band [0.8, 1.15])"};
}

Outcome multihop_slope(const Context& ctx) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Scheme;
  c.scheme = Scheme::Multihop;
  c.alpha = 4;
  c.n_list = powers_of_two(6, 14);
  c.seed = mix_seed(ctx.seed, {6});
  c.beta = 0.5;
  c.output = (ctx.dir / "c06_multihop_pos").string();
  run_experiment(c, ctx.threads);
  const double s1 = fit_scaling(run_scaling_experiment(c, ctx.threads)).preferred().slope;
  c.beta = -0.25;
  c.output = (ctx.dir / "c06_multihop_neg").string();
  run_experiment(c, ctx.threads);
  const double s2 = fit_scaling(run_scaling_experiment(c, ctx.threads)).preferred().slope;
  const bool ok = std::abs(s1 - 0.5) <= 0.02 && std::abs(s2 - 0.25) <= 0.02;
  return {ok, "beta 0.5: " + fmt("%.4f", s1) + " (0.5), beta -0.25: " + fmt("%.4f", s2) + " (0.25)"};
}

ExperimentConfig hybrid_config(const Context& ctx, double beta, std::uint64_t tag) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Scheme;
  c.scheme = Scheme::Hybrid;
  c.alpha = 4;
  c.beta = beta;
  c.n_list = powers_of_two(8, 13);
  c.trials = 20;
  c.seed = mix_seed(ctx.seed, {tag});
  return c;
}

Outcome hybrid_slope(const Context& ctx) {
  auto c = hybrid_config(ctx, 0.5, 7);
  c.output = (ctx.dir / "c07_hybrid").string();
  run_experiment(c, ctx.threads);
  const double sim = fit_scaling(run_scaling_experiment(c, ctx.threads)).preferred().slope;
  std::vector<std::pair<double, double>> analytic;
  std::string csv = "n,M,analytic_T\n";
  for (std::size_t n : c.n_list) {
    const double nn = static_cast<double>(n);
    const auto M = hybrid_cell_size(std::pow(nn, c.beta), c.alpha, n).M;
    const double T = nn * c.constants.K4 * std::sqrt(static_cast<double>(M)) *
                     std::pow(nn, -0.5 - c.constants.epsilon);
    analytic.push_back({nn, T});
    csv += std::to_string(n) + ',' + std::to_string(M) + ',' + csv_double(T) + '\n';
  }
  write_text_file(ctx.dir / "c07_analytic.csv", csv);
  const double an = fit_scaling(analytic).preferred().slope;
  const bool ok = sim >= 0.6 && sim <= 0.9 && std::abs(an - 0.75) <= 0.05 + c.constants.epsilon;
  return {ok, "simulated " + fmt("%.4f", sim) + " (band [0.6, 0.9]), analytic " + fmt("%.4f", an)};
}

Outcome hybrid_degenerate(const Context& ctx) {
  auto c = hybrid_config(ctx, 0.0, 8);
  c.forced_M = 1;
  c.output = (ctx.dir / "c08_hybrid_m1").string();
  run_experiment(c, ctx.threads);
  const double h = fit_scaling(run_scaling_experiment(c, ctx.threads)).preferred().slope;
  c.scheme = Scheme::Multihop;
  c.forced_M.reset();
  c.trials = 1;
  c.output = (ctx.dir / "c08_multihop").string();
  run_experiment(c, ctx.threads);
  const double m = fit_scaling(run_scaling_experiment(c, ctx.threads)).preferred().slope;
  return {std::abs(h - m) < 0.05,
          "M=1 hybrid " + fmt("%.4f", h) + ", multihop " + fmt("%.4f", m) + ", gap " + fmt("%.4f", std::abs(h - m))};
}

Outcome load_concentration(const Context& ctx) {
  constexpr std::size_t kSeeds = 50, n = 4096, M = 16;
  std::vector<std::size_t> load(kSeeds), reroutes(kSeeds);
  parallel_for(kSeeds, ctx.threads, [&](std::size_t s) {
    const auto inst = generate_network(n, static_cast<double>(n), mix_seed(ctx.seed, {9, s}));
    const auto grid = build_cell_grid(inst, M);
    const auto plan = route_sd_lines(grid, inst, mix_seed(ctx.seed, {90, s}));
    load[s] = plan.max_cell_load();
    reroutes[s] = plan.reroutes;
  });
  const double cap = 4 * std::sqrt(static_cast<double>(n * M));
  std::size_t ok = 0;
  std::string csv = "seed,max_cell_load,reroutes\n";
  for (std::size_t s = 0; s < kSeeds; ++s) {
    ok += load[s] <= cap;
    csv += std::to_string(s) + ',' + std::to_string(load[s]) + ',' + std::to_string(reroutes[s]) + '\n';
  }
  write_text_file(ctx.dir / "c09_load.csv", csv);
  const auto mx = *std::max_element(load.begin(), load.end());
  return {ok * 100 >= 95 * kSeeds,
          std::to_string(ok) + "/50 within " + fmt("%.0f", cap) + " (max " + std::to_string(mx) + ")"};
}

Outcome percolation_duality(const Context& ctx) {
  constexpr std::size_t kSlabs = 10000, n = 1024;
  std::vector<char> open(kSlabs), closed(kSlabs);
  parallel_for(kSlabs, ctx.threads, [&](std::size_t i) {
    const double c = i < kSlabs / 2 ? 0.15 : 0.25;
    const auto inst = generate_network(n, static_cast<double>(n), mix_seed(ctx.seed, {10, i}));
    const auto grid = build_occupancy_grid(inst, c);
    open[i] = find_open_crossing(grid).has_value();
    closed[i] = exists_closed_lr_crossing(grid);
  });
  std::size_t bad = 0, open_015 = 0, open_025 = 0;
  for (std::size_t i = 0; i < kSlabs; ++i) {
    bad += open[i] == closed[i];
    (i < kSlabs / 2 ? open_015 : open_025) += open[i];
  }
  write_text_file(ctx.dir / "c10_duality.csv",
                  "c,slabs,open_crossings,violations\n0.15,5000," + std::to_string(open_015) +
                      ",NA\n0.25,5000," + std::to_string(open_025) + ",NA\nall,10000,NA," +
                      std::to_string(bad) + "\n");
  return {bad == 0, std::to_string(bad) + " violations in 10000 slabs"};
}

Outcome percolation_probability(const Context& ctx) {
  const auto s = crossing_probability(10000, 0.25, 500, mix_seed(ctx.seed, {11}), ctx.threads);
  write_text_file(ctx.dir / "c11_crossing.csv", crossing_csv_header() + "\n" + crossing_csv_row(s) + "\n");
  const bool rate_ok = s.failure_rate <= s.analytic_bound + 3 * s.failure_stderr;
  const bool cuts_ok = s.certified_cuts == s.crossings && s.min_clearance_ratio >= 1 - 1e-12;
  return {rate_ok && cuts_ok && !s.flag,
          "failure " + fmt("%.4f", s.failure_rate) + " vs bound " + fmt("%.4f", s.analytic_bound) +
              ", " + std::to_string(s.certified_cuts) + "/" + std::to_string(s.crossings) +
              " cuts certified, min clearance ratio " + fmt("%.3f", s.min_clearance_ratio)};
}

Outcome percolation_cutset(const Context& ctx) {
  constexpr std::size_t kSeeds = 100, n = 4096;
  const double alpha = 4, snr = 1, K1 = 8, c = 0.25;
  const double nn = static_cast<double>(n);
  std::vector<long> size_b(kSeeds, -1);
  std::vector<double> b_snr(kSeeds, std::nan(""));
  parallel_for(kSeeds, ctx.threads, [&](std::size_t s) {
    const auto inst = generate_network(n, nn, mix_seed(ctx.seed, {12, s}));
    const auto grid = build_occupancy_grid(inst, c);
    const auto crossing = find_open_crossing(grid);
    if (!crossing) return;
    const auto cut = extract_cut(crossing->cells, grid, inst);
    try {
      const auto part = partition_nodes(inst, select_cut_width(snr, n, alpha), grid, cut);
      size_b[s] = static_cast<long>(part.b_set.size());
      b_snr[s] = b_set_snr(inst, part, snr, alpha);
    } catch (const DegenerateInstance&) {
    }
  });
  const double count_cap = std::sqrt(nn) * std::log(nn);
  const double snr_cap = K1 * snr * std::sqrt(nn) * std::log(nn) * std::log(nn);
  std::size_t ok_count = 0, ok_snr = 0;
  std::string csv = "seed,size_B,b_snr\n";
  for (std::size_t s = 0; s < kSeeds; ++s) {
    ok_count += size_b[s] >= 0 && size_b[s] <= count_cap;
    ok_snr += size_b[s] >= 0 && b_snr[s] <= snr_cap;
    csv += std::to_string(s) + ',' + (size_b[s] < 0 ? "NA" : std::to_string(size_b[s])) + ',' +
           csv_double(b_snr[s]) + '\n';
  }
  write_text_file(ctx.dir / "c12_bset.csv", csv);
  return {ok_count >= 95 && ok_snr >= 95,
          "|B| ok in " + std::to_string(ok_count) + "/100, B-set SNR ok in " + std::to_string(ok_snr) + "/100"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  Outcome (*run)(const Context&);
};

const std::vector<Criterion> kCriteria{
    {1, "classifier exactness", 1, classifier_exactness},
    {2, "boundary continuity", 1, boundary_continuity},
    {3, "cutset inequality chain", 600, inequality_chain},
    {4, "oracle equivalence", 60, oracle_equivalence},
    {5, "dense-regime slope", 600, dense_slope},
    {6, "multihop slope", 1, multihop_slope},
    {7, "hybrid-regime slope", 600, hybrid_slope},
    {8, "hybrid degenerate check", 60, hybrid_degenerate},
    {9, "load concentration", 60, load_concentration},
    {10, "percolation duality", 60, percolation_duality},
    {11, "percolation probability", 120, percolation_probability},
    {12, "percolation-mode cutset", 300, percolation_cutset},
};

std::vector<std::pair<fs::path, std::string>> snapshot(const fs::path& root) {
  std::vector<std::pair<fs::path, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back({fs::relative(e.path(), root), read_text_file(e.path())});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance"};
  std::string out = "acceptance_out";
  unsigned threads = 1, rerun_threads = 4;
  std::uint64_t seed = 2024;
  std::vector<int> only;
  app.add_option("--out", out);
  app.add_option("--threads", threads);
  app.add_option("--rerun-threads", rerun_threads);
  app.add_option("--seed", seed);
  app.add_option("--only", only, "criterion ids to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  if (rerun_threads == threads) ++rerun_threads;

  const fs::path root(out);
  fs::remove_all(root);
  Context first{root / "primary", threads, seed};
  Context second{root / "rerun", rerun_threads, seed};
  fs::create_directories(first.dir);
  fs::create_directories(second.dir);

  bool all = true;
  auto report = [&](int id, const char* name, const Outcome& o, double secs) {
    std::printf("%s  %2d  %-26s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  };

  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(first);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += " (over " + fmt("%.0f", c.budget_s) + " s budget)";
    }
    report(c.id, c.name, o, secs);
  }

  if (only.empty() || std::find(only.begin(), only.end(), 13) != only.end()) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{true, ""};
    try {
      for (const auto& c : kCriteria)
        if (only.empty() || std::find(only.begin(), only.end(), c.id) != only.end()) c.run(second);
      const auto a = snapshot(first.dir), b = snapshot(second.dir);
      std::size_t differ = a.size() == b.size() ? 0 : 1;
      for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        if (a[i] != b[i]) {
          ++differ;
          o.detail += a[i].first.string() + " differs; ";
        }
      o.pass = differ == 0 && !a.empty();
      o.detail += std::to_string(a.size()) + " files compared at " + std::to_string(threads) +
                  " vs " + std::to_string(rerun_threads) + " threads";
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    report(13, "reproducibility", o,
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
