#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ntkgauss/bounds.hpp"
#include "ntkgauss/errors.hpp"
#include "ntkgauss/gp.hpp"
#include "ntkgauss/io.hpp"
#include "ntkgauss/kernels.hpp"
#include "ntkgauss/lindyn.hpp"
#include "ntkgauss/network.hpp"
#include "ntkgauss/ot.hpp"

namespace ntkgauss {

using nlohmann::json;

struct DatasetSpec {
  double lo = -10.0, hi = 10.0;
  long n = 2;
  double noise_sd = 0.1;
};

struct TestPointsSpec {
  long count = 200;
  double lo = -10.0, hi = 10.0;
};

/// One experiment run, loadable from a JSON config file. Flag overrides are
/// applied on top by the CLI.
struct RunConfig {
  std::string activation = "sigmoid";
  long n0 = 1;
  DatasetSpec dataset;
  std::vector<long> widths = {16, 32, 64, 128, 256};
  long replicas = 2000;
  std::string replicas_rule = "min-samples-capped";  // or "fixed"
  double lr = 0.1;
  long steps = 10;
  TestPointsSpec test_points;
  double band_level = 0.95;
  std::uint64_t seed = 1;
  int quad_order = 64;
  std::string out_dir = "out";
  bool ack_undersampled = false;
  int workers = 0;  // 0 → NTKGAUSS_WORKERS env var, then hardware
};

namespace detail {

template <class T>
T get_field(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

inline void parse_interval(const json& j, const std::string& key, double& lo,
                           double& hi) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2)
    throw ConfigError("config field '" + key + "' must be a [lo, hi] pair");
  lo = v[0].get<double>();
  hi = v[1].get<double>();
  if (!(lo <= hi)) throw ConfigError("config field '" + key + "': empty interval");
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool found = false;
    for (const char* k : known)
      if (it.key() == k) {
        found = true;
        break;
      }
    if (!found)
      throw ConfigError("unknown config field '" + scope + it.key() + "'");
  }
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  detail::reject_unknown(
      j,
      {"config_version", "activation", "n0", "dataset", "widths", "replicas",
       "replicas_rule", "lr", "steps", "test_points", "band_level", "seed",
       "quad_order", "out_dir", "ack_undersampled", "workers"},
      "");
  RunConfig c;
  c.activation = detail::get_field<std::string>(j, "activation", c.activation);
  c.n0 = detail::get_field<long>(j, "n0", c.n0);
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    detail::reject_unknown(d, {"interval", "n", "noise_sd"}, "dataset.");
    detail::parse_interval(d, "interval", c.dataset.lo, c.dataset.hi);
    c.dataset.n = detail::get_field<long>(d, "n", c.dataset.n);
    c.dataset.noise_sd = detail::get_field<double>(d, "noise_sd", c.dataset.noise_sd);
  }
  c.widths = detail::get_field<std::vector<long>>(j, "widths", c.widths);
  c.replicas = detail::get_field<long>(j, "replicas", c.replicas);
  c.replicas_rule = detail::get_field<std::string>(j, "replicas_rule", c.replicas_rule);
  c.lr = detail::get_field<double>(j, "lr", c.lr);
  c.steps = detail::get_field<long>(j, "steps", c.steps);
  if (j.contains("test_points")) {
    const auto& tp = j.at("test_points");
    detail::reject_unknown(tp, {"count", "interval"}, "test_points.");
    c.test_points.count = detail::get_field<long>(tp, "count", c.test_points.count);
    detail::parse_interval(tp, "interval", c.test_points.lo, c.test_points.hi);
  }
  c.band_level = detail::get_field<double>(j, "band_level", c.band_level);
  c.seed = detail::get_field<std::uint64_t>(j, "seed", c.seed);
  c.quad_order = detail::get_field<int>(j, "quad_order", c.quad_order);
  c.out_dir = detail::get_field<std::string>(j, "out_dir", c.out_dir);
  c.ack_undersampled = detail::get_field<bool>(j, "ack_undersampled", c.ack_undersampled);
  c.workers = detail::get_field<int>(j, "workers", c.workers);
  return c;
}

inline json config_to_json(const RunConfig& c) {
  return json{{"config_version", 1},
              {"activation", c.activation},
              {"n0", c.n0},
              {"dataset",
               {{"interval", {c.dataset.lo, c.dataset.hi}},
                {"n", c.dataset.n},
                {"noise_sd", c.dataset.noise_sd}}},
              {"widths", c.widths},
              {"replicas", c.replicas},
              {"replicas_rule", c.replicas_rule},
              {"lr", c.lr},
              {"steps", c.steps},
              {"test_points",
               {{"count", c.test_points.count},
                {"interval", {c.test_points.lo, c.test_points.hi}}}},
              {"band_level", c.band_level},
              {"seed", c.seed},
              {"quad_order", c.quad_order},
              {"out_dir", c.out_dir},
              {"ack_undersampled", c.ack_undersampled},
              {"workers", c.workers}};
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

/// Named presets. The paper-scale sweep trains 10⁴ networks per width up to
/// width 256 — hours of CPU — so the CLI warns before running it.
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "desk-sweep") {
    c.dataset.n = 1;
    c.test_points = {1, 2.0, 2.0};
    c.widths = {16, 32, 64, 128, 256};
    c.replicas = 2000;
    c.replicas_rule = "min-samples-capped";
    c.lr = 0.1;
    c.steps = 10;
    c.ack_undersampled = true;
    return c;
  }
  if (name == "paper-fig1-right") {
    c.dataset.n = 1;
    c.test_points = {1, 2.0, 2.0};
    c.widths = {2, 4, 8, 16, 32, 64, 128, 256};
    c.replicas = 10000;
    c.replicas_rule = "fixed";
    c.lr = 0.1;
    c.steps = 100;
    c.ack_undersampled = true;
    return c;
  }
  if (name == "desk-bands") {
    c.dataset.n = 2;
    c.widths = {512};
    c.replicas = 100;
    c.replicas_rule = "fixed";
    c.lr = 1.0 / 512.0;
    c.steps = 5120;
    c.ack_undersampled = true;
    return c;
  }
  if (name == "paper-fig1-left") {
    c.dataset.n = 2;
    c.widths = {700};
    c.replicas = 100;
    c.replicas_rule = "fixed";
    c.lr = 1.0 / 700.0;
    c.steps = 20000;
    c.ack_undersampled = true;
    return c;
  }
  throw ConfigError("unknown preset: " + name);
}

inline std::uint64_t config_hash(const RunConfig& c) {
  return detail::fnv1a64(config_to_json(c).dump());
}

/// Training inputs uniform on [lo,hi], labels sin(x) plus Gaussian noise;
/// all draws come from streams keyed by the seed, so the dataset is a pure
/// function of (spec, seed).
inline Dataset gen_dataset(long n0, long n, double lo, double hi, double noise_sd,
                           std::uint64_t seed) {
  if (n0 != 1)
    throw InvalidShape("gen_dataset: sine-labelled datasets are 1-dimensional");
  if (n < 1) throw InvalidArgument("gen_dataset: need at least one point");
  if (!(lo <= hi)) throw InvalidArgument("gen_dataset: empty interval");
  if (noise_sd < 0.0) throw InvalidArgument("gen_dataset: negative noise_sd");
  Dataset ds;
  ds.x.resize(1, n);
  ds.y.resize(n);
  RandomStream xs(seed, "dataset_x");
  RandomStream noise(seed, "dataset_noise");
  for (long i = 0; i < n; ++i) {
    ds.x(0, i) = xs.uniform(lo, hi);
    ds.y[i] = std::sin(ds.x(0, i)) + noise_sd * noise.normal();
  }
  return ds;
}

inline Dataset gen_dataset(const RunConfig& c) {
  return gen_dataset(c.n0, c.dataset.n, c.dataset.lo, c.dataset.hi,
                     c.dataset.noise_sd, c.seed);
}

/// Equally spaced test grid, endpoints inclusive; a single point sits at
/// the midpoint.
inline Matrix test_grid(const TestPointsSpec& spec) {
  if (spec.count < 1) throw InvalidArgument("test grid: need at least one point");
  Matrix g(1, spec.count);
  if (spec.count == 1) {
    g(0, 0) = 0.5 * (spec.lo + spec.hi);
    return g;
  }
  for (long i = 0; i < spec.count; ++i)
    g(0, i) = spec.lo + (spec.hi - spec.lo) * static_cast<double>(i) /
                            static_cast<double>(spec.count - 1);
  return g;
}

struct PowerLawFit {
  double exponent;
  double prefactor;
  double r2;
  std::vector<double> residuals;  // log-space, per point
};

/// Least squares of log y on log x.
inline PowerLawFit power_law_fit(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw InvalidFitInput("power_law_fit: coordinate counts differ");
  if (xs.size() < 3)
    throw TooFewPoints("power_law_fit: need at least 3 points, got " +
                       std::to_string(xs.size()));
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw InvalidFitInput("power_law_fit: coordinates must be strictly positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0)
    throw InvalidFitInput("power_law_fit: all x coordinates coincide");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  double ss_res = 0.0;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = ly[i] - (intercept + fit.exponent * lx[i]);
    ss_res += fit.residuals[i] * fit.residuals[i];
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

inline int resolve_workers(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("NTKGAUSS_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Bounded worker pool over `count` independent tasks. Each task writes
/// only its own slot, so execution order is observationally irrelevant; the
/// first exception wins and is rethrown after join.
template <class F>
void parallel_for(long count, int workers, F&& body) {
  workers = static_cast<int>(std::max<long>(1, std::min<long>(workers, count)));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline long effective_replicas(const RunConfig& c, long width) {
  if (c.replicas_rule == "fixed") return c.replicas;
  if (c.replicas_rule == "min-samples-capped")
    return std::min(c.replicas, min_samples_for_width(width));
  throw ConfigError("replicas_rule must be 'fixed' or 'min-samples-capped', got '" +
                    c.replicas_rule + "'");
}

/// The §-rule validity guard: every width must meet its sample budget
/// unless the run explicitly acknowledges undersampling.
inline void check_sampling(const RunConfig& c) {
  if (c.widths.empty()) throw ConfigError("widths must be nonempty");
  if (c.ack_undersampled) return;
  for (long w : c.widths) {
    const long need = min_samples_for_width(w);
    const long have = effective_replicas(c, w);
    if (have < need)
      throw UndersampledError(
          "width " + std::to_string(w) + " needs " + std::to_string(need) +
          " replicas for a noise-free W2 estimate but the run provides " +
          std::to_string(have) + "; pass ack_undersampled to proceed");
  }
}

struct SweepRow {
  long width;
  double t;
  double w2_hat;
  long replicas;
  double wall_time_s;    // recorded in meta.json, not in the CSV
  double fit_residual;   // log-space residual of the power-law fit
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<PowerLawFit> fit;
  long trainings = 0;
  double test_point = 0.0;
  double t = 0.0;
};

namespace detail {

inline void write_meta(const std::string& path, const RunConfig& cfg, json extra) {
  json meta{{"version", kVersion},
            {"config", config_to_json(cfg)},
            {"config_hash", config_hash(cfg)},
            {"seed", cfg.seed}};
  meta.update(extra);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << meta.dump(2) << "\n";
}

inline double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace detail

/// Width sweep of the empirical W2 between the trained-network ensemble and
/// matched-count samples of the limiting process at the same time, at one
/// test point, followed by a power-law fit. Writes sweep.csv, sweep.svg and
/// meta.json under cfg.out_dir.
inline SweepResult experiment_sweep(const RunConfig& cfg) {
  check_sampling(cfg);
  const ActivationSpec& act = activation(cfg.activation);
  const QuadratureRule rule =
      gauss_hermite(act.bounded ? cfg.quad_order : 2 * cfg.quad_order);
  const Dataset ds = gen_dataset(cfg);
  const Matrix grid = test_grid(cfg.test_points);
  const Matrix probe = grid.col(0);  // sweep evaluates at the first grid point
  const double t = time_of(cfg.lr, cfg.steps);

  const GpContext ctx = make_gp_context(probe, ds, act, rule);
  const GpMoments moments = gp_moments(ctx, t);

  const int workers = resolve_workers(cfg.workers);
  SweepResult result;
  result.t = t;
  result.test_point = probe(0, 0);

  std::vector<double> widths_d, w2s;
  for (std::size_t wi = 0; wi < cfg.widths.size(); ++wi) {
    const long width = cfg.widths[wi];
    const long replicas = effective_replicas(cfg, width);
    const double t0 = detail::now_s();

    Vector net_samples(replicas);
    parallel_for(replicas, workers, [&](long r) {
      const std::uint64_t replica_id =
          (static_cast<std::uint64_t>(wi) << 32) | static_cast<std::uint64_t>(r);
      const NetworkParams p0 = init_params(cfg.n0, width, cfg.seed, replica_id);
      const Trajectory traj = train_gd(p0, act, ds, cfg.lr, cfg.steps,
                                       std::max<long>(cfg.steps, 1));
      net_samples[r] = forward(traj.params_at.back(), act, Vector(probe.col(0)));
    });
    result.trainings += replicas;

    const Matrix gp_samples =
        sample_gp(moments, replicas, derive_seed(cfg.seed, "gp-sweep", wi));
    const double w2 = w2_1d(EmpiricalDist{net_samples, cfg.seed},
                            EmpiricalDist{gp_samples, cfg.seed});

    result.rows.push_back(SweepRow{width, t, w2, replicas,
                                   detail::now_s() - t0, 0.0});
    widths_d.push_back(static_cast<double>(width));
    w2s.push_back(w2);
  }

  bool fit_ok = widths_d.size() >= 3;
  for (double v : w2s)
    if (!(v > 0.0)) fit_ok = false;
  if (fit_ok) {
    result.fit = power_law_fit(widths_d, w2s);
    for (std::size_t i = 0; i < result.rows.size(); ++i)
      result.rows[i].fit_residual = result.fit->residuals[i];
  }

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  {
    CsvWriter csv(cfg.out_dir + "/sweep.csv");
    csv.row({"width", "t", "w2_hat", "replicas", "fit_residual"});
    for (const SweepRow& row : result.rows)
      csv.row({std::to_string(row.width), format_double(row.t),
               format_double(row.w2_hat), std::to_string(row.replicas),
               result.fit ? format_double(row.fit_residual) : std::string()});
  }
  {
    double y_min = w2s.empty() ? 1e-3 : *std::min_element(w2s.begin(), w2s.end());
    double y_max = w2s.empty() ? 1.0 : *std::max_element(w2s.begin(), w2s.end());
    y_min = std::max(y_min / 2.0, 1e-12);
    y_max = std::max(y_max * 2.0, y_min * 10.0);
    SvgPlot plot(cfg.out_dir + "/sweep.svg", widths_d.front() / 1.5,
                 widths_d.back() * 1.5, y_min, y_max, true, true);
    for (const SweepRow& row : result.rows)
      plot.comment("data: width=" + std::to_string(row.width) +
                   " w2=" + format_double(row.w2_hat));
    plot.scatter(widths_d, w2s, "steelblue", 4.0);
    if (result.fit) {
      std::vector<double> fx = widths_d, fy;
      for (double x : fx)
        fy.push_back(result.fit->prefactor * std::pow(x, result.fit->exponent));
      plot.polyline(fx, fy, "firebrick", 1.5);
      plot.label("W2 vs width, fit exponent " + format_double(result.fit->exponent));
    } else {
      plot.label("W2 vs width");
    }
  }
  json extra{{"experiment", "sweep"},
             {"t", t},
             {"test_point", result.test_point},
             {"trainings", result.trainings},
             {"undersampled_ack", cfg.ack_undersampled},
             {"rows", json::array()}};
  for (const SweepRow& row : result.rows)
    extra["rows"].push_back(json{{"width", row.width},
                                 {"replicas", row.replicas},
                                 {"w2_hat", row.w2_hat},
                                 {"wall_time_s", row.wall_time_s}});
  if (result.fit)
    extra["fit"] = json{{"exponent", result.fit->exponent},
                        {"prefactor", result.fit->prefactor},
                        {"r2", result.fit->r2}};
  detail::write_meta(cfg.out_dir + "/meta.json", cfg, extra);
  return result;
}

struct BandsResult {
  Vector grid;        // test inputs
  Vector mean, lo, hi;
  Matrix nets;        // replicas × grid points, outputs at final time
  double t = 0.0;
  long trainings = 0;
  double coverage = 0.0;  // fraction of (replica, point) values inside the band
};

/// Ensemble-versus-band overlay: trains `replicas` networks of the first
/// configured width, evaluates them on the test grid at the final time, and
/// overlays the limiting-process mean and central band at the same time.
/// Writes bands.csv, bands.svg and meta.json under cfg.out_dir.
inline BandsResult experiment_bands(const RunConfig& cfg) {
  check_sampling(cfg);
  const ActivationSpec& act = activation(cfg.activation);
  const QuadratureRule rule =
      gauss_hermite(act.bounded ? cfg.quad_order : 2 * cfg.quad_order);
  const Dataset ds = gen_dataset(cfg);
  if (ds.has_duplicate_columns())
    std::fprintf(stderr,
                 "warning: dataset has duplicate training inputs; the limiting "
                 "kernel will be singular\n");
  const Matrix grid = test_grid(cfg.test_points);
  const long width = cfg.widths.front();
  const long replicas = cfg.replicas;
  const double t = time_of(cfg.lr, cfg.steps);

  const GpContext ctx = make_gp_context(grid, ds, act, rule);
  // The positive-definiteness hypothesis must hold before any training.
  if (t > 0.0) {
    const PdReport pd = check_pd(ctx.kinf_train, 1e-10);
    if (!pd.pd)
      throw KernelDegenerate("experiment_bands: limiting train kernel min eig " +
                                 std::to_string(pd.min_eig),
                             pd.min_eig);
  }
  const GpMoments moments = gp_moments(ctx, t);
  const Band band = gp_band(moments, cfg.band_level);

  BandsResult result;
  result.grid = grid.row(0).transpose();
  result.mean = moments.mean;
  result.lo = band.lo;
  result.hi = band.hi;
  result.t = t;
  result.nets.resize(replicas, grid.cols());

  const int workers = resolve_workers(cfg.workers);
  parallel_for(replicas, workers, [&](long r) {
    const NetworkParams p0 =
        init_params(cfg.n0, width, cfg.seed, static_cast<std::uint64_t>(r));
    const Trajectory traj =
        train_gd(p0, act, ds, cfg.lr, cfg.steps, std::max<long>(cfg.steps, 1));
    result.nets.row(r) = forward(traj.params_at.back(), act, grid).transpose();
  });
  result.trainings = replicas;

  if (replicas > 0) {
    long inside = 0;
    for (long r = 0; r < replicas; ++r)
      for (Index i = 0; i < grid.cols(); ++i)
        if (result.nets(r, i) >= band.lo[i] && result.nets(r, i) <= band.hi[i])
          ++inside;
    result.coverage = static_cast<double>(inside) /
                      (static_cast<double>(replicas) * grid.cols());
  }

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  {
    CsvWriter csv(cfg.out_dir + "/bands.csv");
    std::vector<std::string> header = {"x", "mu", "lo", "hi"};
    for (long r = 0; r < replicas; ++r) header.push_back("net_" + std::to_string(r + 1));
    csv.row(header);
    for (Index i = 0; i < grid.cols(); ++i) {
      std::vector<std::string> row = {format_double(grid(0, i)),
                                      format_double(moments.mean[i]),
                                      format_double(band.lo[i]),
                                      format_double(band.hi[i])};
      for (long r = 0; r < replicas; ++r)
        row.push_back(format_double(result.nets(r, i)));
      csv.row(row);
    }
  }
  {
    double y_lo = band.lo.minCoeff(), y_hi = band.hi.maxCoeff();
    if (replicas > 0) {
      y_lo = std::min(y_lo, result.nets.minCoeff());
      y_hi = std::max(y_hi, result.nets.maxCoeff());
    }
    const double pad = 0.1 * std::max(1e-6, y_hi - y_lo);
    SvgPlot plot(cfg.out_dir + "/bands.svg", grid(0, 0), grid(0, grid.cols() - 1),
                 y_lo - pad, y_hi + pad);
    plot.comment("data: t=" + format_double(t) + " width=" + std::to_string(width) +
                 " replicas=" + std::to_string(replicas));
    std::vector<double> xs(grid.data(), grid.data() + grid.cols());
    plot.band(xs, std::vector<double>(band.lo.data(), band.lo.data() + band.lo.size()),
              std::vector<double>(band.hi.data(), band.hi.data() + band.hi.size()),
              "grey");
    for (long r = 0; r < replicas; ++r) {
      std::vector<double> ys(grid.cols());
      for (Index i = 0; i < grid.cols(); ++i) ys[i] = result.nets(r, i);
      plot.polyline(xs, ys, "steelblue", 0.6, 0.35);
    }
    plot.polyline(xs,
                  std::vector<double>(moments.mean.data(),
                                      moments.mean.data() + moments.mean.size()),
                  "black", 1.8);
    plot.label("ensemble vs limiting-process band, t=" + format_double(t));
  }
  detail::write_meta(cfg.out_dir + "/meta.json", cfg,
                     json{{"experiment", "bands"},
                          {"t", t},
                          {"width", width},
                          {"replicas", replicas},
                          {"trainings", result.trainings},
                          {"band_level", cfg.band_level},
                          {"coverage", result.coverage},
                          {"undersampled_ack", cfg.ack_undersampled}});
  return result;
}

}  // namespace ntkgauss
