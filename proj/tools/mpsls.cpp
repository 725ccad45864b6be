// Command-line front end: data generation, score comparison, sampled
// least-squares benchmarks, Puiseux slope studies and phase ensembles.
// Every subcommand writes CSV files plus a run.json manifest into --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mpsls/mpsls.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string regime = "coherent";
  std::size_t n = 10000;
  std::size_t d = 21;
  std::uint64_t seed = 1;
  std::string out = "out";
  bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool data_flags) {
  cmd->add_option("--seed", o.seed, "Base random seed")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  if (!data_flags) return;
  cmd->add_option("--regime", o.regime, "Row distribution")
      ->check(CLI::IsMember({"incoherent", "semi-coherent", "coherent"}))
      ->capture_default_str();
  cmd->add_option("--n", o.n, "Rows")->capture_default_str();
  cmd->add_option("--d", o.d, "Columns")->capture_default_str();
  cmd->add_flag("--full-scale", o.full_scale, "Use n = 100000 and d = 51");
}

mpsls::ExperimentConfig make_config(const CommonOptions& o) {
  mpsls::ExperimentConfig c;
  c.regime = mpsls::parse_regime(o.regime);
  c.n = o.n;
  c.d = o.d;
  c.seed = o.seed;
  if (o.full_scale) c.use_full_scale();
  c.validate();
  return c;
}

json config_json(const mpsls::ExperimentConfig& c) {
  return {{"regime", std::string(mpsls::to_string(c.regime))},
          {"n", c.n},
          {"d", c.d},
          {"seed", c.seed},
          {"sigma_base", c.sigma_base},
          {"sigma_decay", c.sigma_decay}};
}

fs::path prepare(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::ofstream open(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw mpsls::Error("cannot write '" + p.string() + "'");
  return out;
}

void write_manifest(const fs::path& dir, const std::string& command, json body) {
  body["tool"] = "mpsls";
  body["version"] = mpsls::kVersion;
  body["command"] = command;
  auto out = open(dir / "run.json");
  out << body.dump(2) << '\n';
}

void write_column(const fs::path& p, const std::vector<double>& v) {
  auto out = open(p);
  mpsls::write_scores_csv(out, v);
}

int cmd_gen(const CommonOptions& o) {
  const auto c = make_config(o);
  const fs::path dir = prepare(o.out);
  mpsls::save_market_numeric((dir / "matrix.mtx").string(), mpsls::generate(c).cast<std::complex<double>>());
  write_manifest(dir, "gen",
                 {{"config", config_json(c)},
                  {"seeds", {{"generate", mpsls::derive_seed(c.seed, "generate/" + std::string(mpsls::to_string(c.regime)))}}},
                  {"files", {"matrix.mtx"}}});
  std::cout << "wrote " << (dir / "matrix.mtx").string() << " (" << c.n << " x " << c.d << ")\n";
  return 0;
}

int cmd_scores(const CommonOptions& o, const std::string& matrix_path) {
  json manifest;
  mpsls::RealMatrix a;
  if (matrix_path.empty()) {
    const auto c = make_config(o);
    a = mpsls::generate(c);
    manifest["config"] = config_json(c);
  } else {
    const mpsls::NumericMatrix m = mpsls::load_market_numeric(matrix_path);
    if ((m.array().imag() != 0.0).any()) throw mpsls::DomainError("scores expects a real matrix");
    a = m.real();
    manifest["input"] = matrix_path;
  }
  const auto start = std::chrono::steady_clock::now();
  const auto r = mpsls::run_scores(a);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  const fs::path dir = prepare(o.out);
  write_column(dir / "scores_exact.csv", r.exact);
  write_column(dir / "scores_maxplus.csv", r.maxplus_log);
  write_column(dir / "scores_maxplus_softmax.csv", r.maxplus_softmax);
  write_column(dir / "scores_cnrn.csv", r.cnrn);
  write_column(dir / "scores_uniform.csv", r.uniform);
  {
    auto out = open(dir / "comparison.csv");
    mpsls::write_indexed_columns(
        out, {"exact", "maxplus_softmax", "cnrn", "uniform", "log10_maxplus_ratio", "log10_cnrn_ratio"},
        {r.exact, r.maxplus_softmax, r.cnrn, r.uniform, mpsls::ScoresRecord::log10_ratio(r.maxplus_softmax, r.exact),
         mpsls::ScoresRecord::log10_ratio(r.cnrn, r.exact)});
  }
  const double within = mpsls::ScoresRecord::fraction_within(r.maxplus_softmax, r.exact, 1.0);
  manifest["rows"] = a.rows();
  manifest["cols"] = a.cols();
  manifest["rank"] = r.rank;
  manifest["maxplus_within_one_decade"] = within;
  manifest["files"] = {"scores_exact.csv", "scores_maxplus.csv", "scores_maxplus_softmax.csv", "scores_cnrn.csv",
                       "scores_uniform.csv", "comparison.csv"};
  write_manifest(dir, "scores", manifest);
  std::cout << "scores: " << a.rows() << " x " << a.cols() << " rank " << r.rank << " in " << elapsed.count()
            << " s; maxplus within one decade of exact on " << within * 100.0 << "% of rows\n";
  return 0;
}

int cmd_lsq_bench(const CommonOptions& o, const std::vector<std::size_t>& r_grid, std::size_t trials,
                  unsigned workers) {
  auto c = make_config(o);
  c.r_grid = r_grid;
  c.trials = trials;
  c.workers = workers;
  const auto b = mpsls::run_lsq_benchmark(c);
  const fs::path dir = prepare(o.out);
  {
    auto out = open(dir / "trials.csv");
    mpsls::write_trials_csv(out, b.curve.trials);
  }
  {
    auto out = open(dir / "curve.csv");
    mpsls::write_curve_csv(out, b.curve.points);
  }
  json cfg = config_json(c);
  cfg["r_grid"] = c.r_grid;
  cfg["trials"] = c.trials;
  write_manifest(dir, "lsq-bench",
                 {{"config", cfg},
                  {"score_basis", "[B, y]"},
                  {"methods", {"exact", "maxplus", "cnrn", "uniform"}},
                  {"seeds", {{"curve", b.curve_seed}}},
                  {"files", {"trials.csv", "curve.csv"}}});
  for (const auto& p : b.curve.points) {
    std::cout << p.method << " r=" << p.r << " geomean=" << p.geomean << " q05=" << p.q05 << " q95=" << p.q95 << '\n';
  }
  return 0;
}

int cmd_puiseux(const CommonOptions& o, const std::string& path, const mpsls::PuiseuxConvergenceConfig& c,
                const std::string& mode) {
  std::ifstream in(path);
  if (!in) throw mpsls::ParseError("cannot open '" + path + "'");
  const auto m = mpsls::read_puiseux(in);
  const auto s = mpsls::run_puiseux_convergence(m, c);
  const fs::path dir = prepare(o.out);
  {
    auto out = open(dir / "slopes.csv");
    mpsls::write_slopes_csv(out, s);
  }
  {
    auto out = open(dir / "slope_curves.csv");
    mpsls::write_slope_curves_csv(out, s);
  }
  write_manifest(dir, "puiseux-converge",
                 {{"input", path},
                  {"z_max", c.z_max},
                  {"z_min", c.z_min},
                  {"points", c.points},
                  {"coefficients", mode},
                  {"seeds", {{"coefficients", mpsls::derive_seed(c.seed, "puiseux-coefficients")}}},
                  {"files", {"slopes.csv", "slope_curves.csv"}}});
  for (std::size_t i = 0; i < s.estimate.size(); ++i) {
    std::cout << "row " << i + 1 << ": slope " << s.estimate[i] << " target " << s.target[i] << '\n';
  }
  return 0;
}

int cmd_phase(const CommonOptions& o, const std::string& path, std::size_t row, std::size_t trials) {
  const mpsls::NumericMatrix a = mpsls::load_market_numeric(path);
  if (row == 0) throw mpsls::DomainError("--row is 1-based");
  const auto e = mpsls::random_phase_ensemble(a.cwiseAbs(), trials, o.seed, row - 1);
  const auto s = mpsls::summarise(e);
  const fs::path dir = prepare(o.out);
  {
    auto out = open(dir / "ensemble.csv");
    out << "trial,log10_p\n";
    for (std::size_t t = 0; t < e.samples.size(); ++t) {
      out << t << ',' << mpsls::detail::format_double(e.samples[t]) << '\n';
    }
  }
  write_manifest(dir, "phase-ensemble",
                 {{"input", path},
                  {"row", row},
                  {"trials", trials},
                  {"seed", o.seed},
                  {"prediction", e.prediction},
                  {"within_band", s.within},
                  {"band", "prediction +/- 0.5 decades"},
                  {"more_than_one_decade_below", s.below},
                  {"files", {"ensemble.csv"}}});
  std::cout << "prediction " << e.prediction << "; inside the one-decade band " << s.within * 100.0
            << "%; more than one decade below " << s.below * 100.0 << "%\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-plus leverage scores and leverage-score sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mpsls::kVersion);

  CommonOptions gen_o, scores_o, bench_o, pux_o, phase_o;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic matrix (Matrix Market)");
  add_common(gen, gen_o, true);

  auto* scores = app.add_subcommand("scores", "Exact, max-plus, CNRN and uniform row distributions");
  add_common(scores, scores_o, true);
  std::string scores_matrix;
  scores->add_option("--matrix", scores_matrix, "Matrix Market input (default: generate)")->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("lsq-bench", "Sampled least-squares error curves");
  add_common(bench, bench_o, true);
  std::vector<std::size_t> r_grid = {250, 500, 1000, 2000};
  std::size_t bench_trials = 50;
  unsigned workers = 1;
  bench->add_option("--r-grid", r_grid, "Sample counts")->delimiter(',')->capture_default_str();
  bench->add_option("--trials", bench_trials, "Trials per (method, r)")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  auto* pux = app.add_subcommand("puiseux-converge", "Slopes of log p_i(A(z)) against log z");
  add_common(pux, pux_o, false);
  std::string pux_matrix, mode = "random-gaussian";
  mpsls::PuiseuxConvergenceConfig pc;
  pux->add_option("--matrix", pux_matrix, "Puiseux matrix text file")->required()->check(CLI::ExistingFile);
  pux->add_option("--z-max", pc.z_max, "Largest z")->capture_default_str();
  pux->add_option("--z-min", pc.z_min, "Smallest z")->capture_default_str();
  pux->add_option("--points", pc.points, "Grid points (at least 3)")->capture_default_str();
  pux->add_option("--coefficients", mode, "Leading coefficients")
      ->check(CLI::IsMember({"as-given", "random-gaussian"}))
      ->capture_default_str();

  auto* phase = app.add_subcommand("phase-ensemble", "Random-phase ensemble of one row's exact score");
  add_common(phase, phase_o, false);
  std::string phase_matrix;
  std::size_t row = 3, phase_trials = 10000;
  phase->add_option("--matrix", phase_matrix, "Matrix Market input")->required()->check(CLI::ExistingFile);
  phase->add_option("--row", row, "Row (1-based)")->capture_default_str();
  phase->add_option("--trials", phase_trials, "Samples")->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(gen_o);
    if (*scores) return cmd_scores(scores_o, scores_matrix);
    if (*bench) return cmd_lsq_bench(bench_o, r_grid, bench_trials, workers);
    if (*pux) {
      pc.mode = mpsls::parse_coefficient_mode(mode);
      pc.seed = pux_o.seed;
      return cmd_puiseux(pux_o, pux_matrix, pc, mode);
    }
    if (*phase) return cmd_phase(phase_o, phase_matrix, row, phase_trials);
  } catch (const mpsls::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const mpsls::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
