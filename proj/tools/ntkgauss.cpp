// CLI over the library's experiment harness: trains ensembles, evaluates
// the limiting process, sweeps W2 against width, and runs the hypothesis
// checks. Every subcommand reads an optional JSON config plus flag
// overrides and writes deterministic outputs into --out.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ntkgauss/harness.hpp"

namespace {

using namespace ntkgauss;
using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> widths_csv;
  std::optional<long> replicas;
  std::optional<double> lr;
  std::optional<long> steps;
  std::optional<std::string> activation_name;
  bool ack_undersampled = false;
  std::optional<int> workers;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration");
  cmd->add_option("--preset", f.preset_name,
                  "named preset (desk-sweep, paper-fig1-right, desk-bands, "
                  "paper-fig1-left)");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--widths", f.widths_csv, "comma-separated width list");
  cmd->add_option("--replicas", f.replicas, "replica count");
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_option("--steps", f.steps, "gradient-descent steps");
  cmd->add_option("--activation", f.activation_name,
                  "activation (tanh|sigmoid|erf|relu)");
  cmd->add_flag("--ack-undersampled", f.ack_undersampled,
                "acknowledge replica counts below the sample-size rule");
  cmd->add_option("--workers", f.workers,
                  "worker threads (default: NTKGAUSS_WORKERS, then hardware)");
}

std::vector<long> parse_widths(const std::string& csv) {
  std::vector<long> widths;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok = csv.substr(pos, comma == std::string::npos
                                                ? std::string::npos
                                                : comma - pos);
    if (tok.empty()) throw ConfigError("--widths: empty list entry");
    try {
      widths.push_back(std::stol(tok));
    } catch (const std::exception&) {
      throw ConfigError("--widths: '" + tok + "' is not an integer");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return widths;
}

RunConfig resolve_config(const CommonFlags& f, const std::string& default_preset) {
  RunConfig cfg;
  if (!f.config_path.empty())
    cfg = load_config(f.config_path);
  else
    cfg = preset(f.preset_name.empty() ? default_preset : f.preset_name);
  if (!f.preset_name.empty() && !f.config_path.empty())
    throw ConfigError("--config and --preset are mutually exclusive");
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.widths_csv) cfg.widths = parse_widths(*f.widths_csv);
  if (f.replicas) cfg.replicas = *f.replicas;
  if (f.lr) cfg.lr = *f.lr;
  if (f.steps) cfg.steps = *f.steps;
  if (f.activation_name) cfg.activation = *f.activation_name;
  if (f.ack_undersampled) cfg.ack_undersampled = true;
  if (f.workers) cfg.workers = *f.workers;
  return cfg;
}

int cmd_train(const CommonFlags& f) {
  const RunConfig cfg = resolve_config(f, "desk-bands");
  const ActivationSpec& act = activation(cfg.activation);
  const Dataset ds = gen_dataset(cfg);
  const long width = cfg.widths.front();
  const NetworkParams p0 = init_params(cfg.n0, width, cfg.seed);
  const Trajectory traj =
      train_gd(p0, act, ds, cfg.lr, cfg.steps,
               std::max<long>(1, cfg.steps / 100));
  std::filesystem::create_directories(cfg.out_dir);
  CsvWriter csv(cfg.out_dir + "/trajectory.csv");
  std::vector<std::string> header = {"t", "loss"};
  for (Index i = 0; i < ds.n(); ++i) header.push_back("f_" + std::to_string(i + 1));
  csv.row(header);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<std::string> row = {format_double(traj.times[k]),
                                    format_double(traj.loss_at[k])};
    for (Index i = 0; i < ds.n(); ++i)
      row.push_back(format_double(traj.train_outputs_at[k][i]));
    csv.row(row);
  }
  detail::write_meta(cfg.out_dir + "/meta.json", cfg,
                     json{{"experiment", "train"},
                          {"width", width},
                          {"final_time", traj.times.back()},
                          {"final_loss", traj.loss_at.back()}});
  std::cout << "trained width " << width << " for " << cfg.steps
            << " steps (t = " << format_double(traj.times.back())
            << "), final loss " << format_double(traj.loss_at.back()) << "\n";
  return 0;
}

int cmd_gp_moments(const CommonFlags& f) {
  const RunConfig cfg = resolve_config(f, "desk-bands");
  const ActivationSpec& act = activation(cfg.activation);
  const QuadratureRule rule =
      gauss_hermite(act.bounded ? cfg.quad_order : 2 * cfg.quad_order);
  const Dataset ds = gen_dataset(cfg);
  const Matrix grid = test_grid(cfg.test_points);
  const double t = time_of(cfg.lr, cfg.steps);
  const GpMoments m = gp_moments(grid, ds, act, rule, t);
  const Band band = gp_band(m, cfg.band_level);
  std::filesystem::create_directories(cfg.out_dir);
  CsvWriter csv(cfg.out_dir + "/moments.csv");
  csv.row({"x", "mu", "var", "lo", "hi"});
  for (Index i = 0; i < grid.cols(); ++i)
    csv.row({format_double(grid(0, i)), format_double(m.mean[i]),
             format_double(m.cov(i, i)), format_double(band.lo[i]),
             format_double(band.hi[i])});
  detail::write_meta(cfg.out_dir + "/meta.json", cfg,
                     json{{"experiment", "gp-moments"}, {"t", t}});
  std::cout << "limiting-process moments on " << grid.cols() << " points at t = "
            << format_double(t) << " written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_bands(const CommonFlags& f) {
  const RunConfig cfg = resolve_config(f, "desk-bands");
  const BandsResult r = experiment_bands(cfg);
  std::cout << "bands at t = " << format_double(r.t) << ": " << r.trainings
            << " networks, coverage " << format_double(r.coverage) << ", outputs in "
            << cfg.out_dir << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& f) {
  const RunConfig cfg = resolve_config(f, "desk-sweep");
  if (cfg.replicas_rule == "fixed" && cfg.replicas >= 10000)
    std::cerr << "note: paper-scale sweep (" << cfg.replicas
              << " replicas per width) takes hours on a laptop\n";
  const SweepResult r = experiment_sweep(cfg);
  for (const SweepRow& row : r.rows)
    std::cout << "width " << row.width << ": W2 = " << format_double(row.w2_hat)
              << " (" << row.replicas << " replicas)\n";
  if (r.fit)
    std::cout << "power-law fit: exponent " << format_double(r.fit->exponent)
              << ", prefactor " << format_double(r.fit->prefactor) << ", r2 "
              << format_double(r.fit->r2) << "\n";
  else
    std::cout << "power-law fit skipped (need >= 3 widths)\n";
  return 0;
}

int cmd_check_assumptions(const CommonFlags& f) {
  const RunConfig cfg = resolve_config(f, "desk-sweep");
  const ActivationSpec& act = activation(cfg.activation);
  const QuadratureRule rule =
      gauss_hermite(act.bounded ? cfg.quad_order : 2 * cfg.quad_order);
  const Dataset ds = gen_dataset(cfg);
  if (ds.has_duplicate_columns())
    std::cout << "warning: duplicate training inputs; limiting kernel is singular\n";

  const SymMatrix kinf = gram(ds.x, KernelKind::ntk_limit, act, rule);
  const PdReport pd = check_pd(kinf, 1e-10);
  std::cout << "limiting kernel min eigenvalue: " << format_double(pd.min_eig)
            << (pd.pd ? "  (positive definite)" : "  (NOT positive definite)") << "\n";

  if (!act.bounded) {
    std::cout << "activation '" << act.name
              << "': regularity hypotheses not satisfied (unbounded); width "
                 "hypothesis check skipped\n";
    return 0;
  }
  activation_norms(act);  // audits the declared constants
  bool all_hold = true;
  for (long w : cfg.widths) {
    const TheoryInputs ti = make_theory_inputs(ds, act, pd.min_eig, w);
    const double lhs = assumption_r_lhs(ti);
    const bool holds = pd.pd && lhs < pd.min_eig;
    all_hold = all_hold && holds;
    std::cout << "width " << w << ": hypothesis LHS = " << format_double(lhs)
              << (holds ? "  < min eig  -> holds" : "  -> FAILS") << "\n";
  }
  if (pd.pd) {
    long n1 = 2;
    while (n1 < (1L << 40)) {
      const TheoryInputs ti = make_theory_inputs(ds, act, pd.min_eig, n1);
      if (assumption_r_lhs(ti) < pd.min_eig) break;
      n1 *= 2;
    }
    std::cout << "smallest power-of-two width satisfying the hypothesis: " << n1
              << "\n";
  }
  std::cout << (all_hold ? "all configured widths pass\n"
                         : "some configured widths fail\n");
  return 0;
}

int cmd_min_samples(long width, long samples) {
  if (width > 0) {
    const long need = min_samples_for_width(width);
    std::cout << "width " << width << ": requires N >= " << need
              << " replicas (rule: N >= 10*(w/ln w)^2)\n";
  }
  if (samples > 0) {
    const long w = max_width_for_samples(samples);
    std::cout << "N = " << samples << ": maximum admissible width " << w
              << " (boundary (w/ln w)^2 <= N)\n";
  }
  std::cout << "anchor: at N = 10000 samples the admissible width boundary is "
            << max_width_for_samples(10000) << "\n";
  return 0;
}

int cmd_rate_envelope(const CommonFlags& f, double a1, double a2, double r_const,
                      double t) {
  const RunConfig cfg = resolve_config(f, "desk-sweep");
  const ActivationSpec& act = activation(cfg.activation);
  if (!act.bounded)
    throw InvalidArgument("rate-envelope: activation '" + act.name +
                          "' does not satisfy the regularity hypotheses");
  const QuadratureRule rule = gauss_hermite(cfg.quad_order);
  const Dataset ds = gen_dataset(cfg);
  const SymMatrix kinf = gram(ds.x, KernelKind::ntk_limit, act, rule);
  const PdReport pd = check_pd(kinf, 1e-10);
  if (!pd.pd)
    throw KernelDegenerate("rate-envelope: limiting kernel min eig " +
                               format_double(pd.min_eig),
                           pd.min_eig);
  std::filesystem::create_directories(cfg.out_dir);
  CsvWriter csv(cfg.out_dir + "/envelope.csv");
  csv.row({"width", "rate_bound"});
  std::vector<double> xs, ys;
  for (long w : cfg.widths) {
    TheoryInputs ti = make_theory_inputs(ds, act, pd.min_eig, w, r_const);
    const double rate = theorem_rate(ti, t, a1, a2);
    csv.row({std::to_string(w), format_double(rate)});
    xs.push_back(static_cast<double>(w));
    ys.push_back(rate);
  }
  if (xs.size() >= 2) {
    SvgPlot plot(cfg.out_dir + "/envelope.svg", xs.front() / 1.5, xs.back() * 1.5,
                 *std::min_element(ys.begin(), ys.end()) / 2.0,
                 *std::max_element(ys.begin(), ys.end()) * 2.0, true, true);
    plot.polyline(xs, ys, "firebrick", 1.5);
    plot.label("squared-W2 rate envelope, up to unknown constants (a1=" +
               format_double(a1) + ", a2=" + format_double(a2) + ")");
  }
  std::cout << "rate envelope (up to unknown constants a1, a2) written to "
            << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shallow-network tangent-kernel dynamics and limiting-process "
               "experiments"};
  app.require_subcommand(1);

  CommonFlags train_f, gpm_f, bands_f, sweep_f, check_f, rate_f;
  long ms_width = 0, ms_samples = 0;
  double rate_a1 = 1.0, rate_a2 = 1.0, rate_r = 5.0, rate_t = 0.0;

  add_common_flags(app.add_subcommand("train", "train one network and dump its "
                                               "trajectory"),
                   train_f);
  add_common_flags(app.add_subcommand("gp-moments",
                                      "limiting-process mean/covariance on the "
                                      "test grid"),
                   gpm_f);
  add_common_flags(app.add_subcommand("bands",
                                      "ensemble overlay against the "
                                      "limiting-process band"),
                   bands_f);
  add_common_flags(app.add_subcommand("sweep", "W2-vs-width sweep with power-law "
                                               "fit"),
                   sweep_f);
  add_common_flags(app.add_subcommand("check-assumptions",
                                      "kernel positive-definiteness and width "
                                      "hypothesis report"),
                   check_f);

  CLI::App* ms = app.add_subcommand("min-samples",
                                    "sample-size rule for W2 estimates");
  ms->add_option("--width", ms_width, "report the replica budget for this width");
  ms->add_option("--samples", ms_samples,
                 "report the maximum admissible width for this budget");

  CLI::App* rate = app.add_subcommand("rate-envelope",
                                      "squared-W2 rate template over the "
                                      "configured widths");
  add_common_flags(rate, rate_f);
  rate->add_option("--a1", rate_a1, "first envelope constant (unknown in theory)");
  rate->add_option("--a2", rate_a2, "second envelope constant (unknown in theory)");
  rate->add_option("--r", rate_r, "hypothesis exponent r >= 5");
  rate->add_option("--t", rate_t, "training time");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("train")) return cmd_train(train_f);
    if (app.got_subcommand("gp-moments")) return cmd_gp_moments(gpm_f);
    if (app.got_subcommand("bands")) return cmd_bands(bands_f);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_f);
    if (app.got_subcommand("check-assumptions")) return cmd_check_assumptions(check_f);
    if (app.got_subcommand("min-samples")) return cmd_min_samples(ms_width, ms_samples);
    if (app.got_subcommand("rate-envelope"))
      return cmd_rate_envelope(rate_f, rate_a1, rate_a2, rate_r, rate_t);
  } catch (const ntkgauss::Error& e) {
    std::cerr << nlohmann::json{{"error", {{"code", e.code()}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error",
                                 {{"code", "Internal"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 3;
  }
  return 1;
}
