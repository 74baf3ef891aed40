#ifndef LATNEG_EXPERIMENTS_HPP
#define LATNEG_EXPERIMENTS_HPP

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "latneg/errors.hpp"
#include "latneg/fock_oracle.hpp"
#include "latneg/negativity.hpp"

namespace latneg {

using nlohmann::json;

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Region grammar: "left-half", "box:(lo..hi)^d", or an explicit array of
/// site indices.
inline Region parse_region(const LatticeBox& box, const json& spec) {
  if (spec.is_array()) {
    std::vector<std::int64_t> members;
    for (const auto& v : spec) {
      require(v.is_number_integer(), errc::invalid_region,
              "region index list must hold integers");
      members.push_back(v.get<std::int64_t>());
    }
    return Region(box, members);
  }
  require(spec.is_string(), errc::invalid_region,
          "region must be a string or an index list");
  const std::string s = spec.get<std::string>();
  if (s == "left-half") {
    const int side = box.hi() - box.lo() + 1;
    const int cut = box.lo() + side / 2;  // first floor(side/2) coordinates
    std::vector<std::int64_t> members;
    for (std::int64_t i = 0; i < box.size(); ++i)
      if (box.site(i)[0] < cut) members.push_back(i);
    return Region(box, members);
  }
  int lo = 0, hi = 0, d = 0;
  if (std::sscanf(s.c_str(), "box:(%d..%d)^%d", &lo, &hi, &d) == 3) {
    require(d == box.dim(), errc::invalid_region,
            "region box dimension does not match the lattice");
    require(lo <= hi, errc::invalid_region, "region box needs lo <= hi");
    std::vector<std::int64_t> members;
    for (std::int64_t i = 0; i < box.size(); ++i) {
      bool inside = true;
      for (int c = 0; c < box.dim(); ++c)
        inside = inside && box.site(i)[c] >= lo && box.site(i)[c] <= hi;
      if (inside) members.push_back(i);
    }
    return Region(box, members);
  }
  fail(errc::invalid_region, "unrecognized region spec: " + s);
}

enum class RunMode { exact, bounds_only, oracle_check, decay_fit, sweep, energy };

inline RunMode parse_mode(const std::string& s) {
  if (s == "exact") return RunMode::exact;
  if (s == "bounds-only") return RunMode::bounds_only;
  if (s == "oracle-check") return RunMode::oracle_check;
  if (s == "decay-fit") return RunMode::decay_fit;
  if (s == "sweep") return RunMode::sweep;
  if (s == "energy") return RunMode::energy;
  fail(errc::invalid_config, "unknown mode: " + s);
}

struct ExperimentConfig {
  int d = 1, lo = 0, hi = 1;
  DisorderSpec disorder;
  int realizations = 1;
  std::optional<double> constant_k;  // deterministic springs when set
  json region = "left-half";
  EnsembleSpec ensemble;
  TruncationPolicy truncation;
  RunMode mode = RunMode::exact;
  std::string output = "latneg_out";
  double budget = 1e8;
  bool timings = false;
  std::vector<int> sweep_volumes;
  std::vector<int> sweep_N;
  int oracle_n_cut = 24;
  int energy_n_max = 6;
};

namespace detail {

inline void check_keys(const json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  require(obj.is_object(), errc::invalid_config, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    require(ok, errc::invalid_config, "unknown key " + where + "." + key);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(errc::invalid_config, std::string("bad value for ") + key + ": " +
                                   e.what());
  }
}

template <typename T>
T need(const json& obj, const char* key, const std::string& where) {
  require(obj.contains(key), errc::invalid_config,
          "missing key " + where + "." + key);
  return get_or<T>(obj, key, T{});
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& doc) {
  using detail::check_keys;
  using detail::get_or;
  using detail::need;
  check_keys(doc, "config",
             {"geometry", "disorder", "region", "ensemble", "truncation",
              "mode", "output", "budget", "timings", "sweep", "oracle",
              "energy"});
  ExperimentConfig cfg;

  const json& geo = doc.contains("geometry") ? doc.at("geometry") : json::object();
  check_keys(geo, "geometry", {"d", "lo", "hi"});
  cfg.d = get_or(geo, "d", 1);
  cfg.lo = get_or(geo, "lo", 0);
  cfg.hi = need<int>(geo, "hi", "geometry");
  require(cfg.d >= 1 && cfg.lo < cfg.hi, errc::invalid_config,
          "geometry needs d >= 1 and lo < hi");

  const json& dis = doc.contains("disorder") ? doc.at("disorder") : json::object();
  check_keys(dis, "disorder",
             {"lambda", "k_max", "seed", "realizations", "constant_k"});
  cfg.disorder.lambda = get_or(dis, "lambda", 1.0);
  cfg.disorder.k_max = get_or(dis, "k_max", 1.0);
  cfg.disorder.seed = get_or<std::uint64_t>(dis, "seed", 0);
  cfg.realizations = get_or(dis, "realizations", 1);
  if (dis.contains("constant_k"))
    cfg.constant_k = get_or(dis, "constant_k", 1.0);
  require(cfg.realizations >= 1, errc::invalid_config,
          "disorder.realizations must be >= 1");
  require(cfg.disorder.lambda > 0.0 && cfg.disorder.k_max > 0.0,
          errc::invalid_config, "disorder.lambda and k_max must be positive");

  if (doc.contains("region")) cfg.region = doc.at("region");

  const json& ens = doc.contains("ensemble") ? doc.at("ensemble") : json::object();
  check_keys(ens, "ensemble", {"N", "weights"});
  cfg.ensemble.N = get_or(ens, "N", 0);
  if (ens.contains("weights")) {
    cfg.ensemble.weights = get_or(ens, "weights", std::vector<double>{});
    cfg.ensemble.N = static_cast<int>(cfg.ensemble.weights->size()) - 1;
  }
  try {
    cfg.ensemble.validate();
  } catch (const error& e) {
    fail(errc::invalid_config, std::string("ensemble: ") + e.what());
  }

  const json& tr = doc.contains("truncation") ? doc.at("truncation") : json::object();
  check_keys(tr, "truncation", {"n_max", "tail_eps"});
  cfg.truncation.n_max = get_or(tr, "n_max", 40);
  cfg.truncation.tail_eps = get_or(tr, "tail_eps", 1e-9);
  require(cfg.truncation.n_max >= cfg.ensemble.N &&
              cfg.truncation.tail_eps > 0.0,
          errc::invalid_config, "truncation needs n_max >= N and tail_eps > 0");

  cfg.mode = parse_mode(detail::need<std::string>(doc, "mode", "config"));
  cfg.output = get_or<std::string>(doc, "output", cfg.output);
  cfg.budget = get_or(doc, "budget", 1e8);
  cfg.timings = get_or(doc, "timings", false);

  const json& sw = doc.contains("sweep") ? doc.at("sweep") : json::object();
  check_keys(sw, "sweep", {"volumes", "N_values"});
  cfg.sweep_volumes = get_or(sw, "volumes", std::vector<int>{});
  cfg.sweep_N = get_or(sw, "N_values", std::vector<int>{});
  if (cfg.mode == RunMode::sweep) {
    require(!cfg.sweep_volumes.empty() && !cfg.sweep_N.empty(),
            errc::invalid_config,
            "sweep mode needs sweep.volumes and sweep.N_values");
    for (int v : cfg.sweep_volumes)
      require(v >= 2, errc::invalid_config, "sweep volumes must be >= 2");
    for (int n : cfg.sweep_N)
      require(n >= 0 && n <= cfg.truncation.n_max, errc::invalid_config,
              "sweep N values must lie in [0, n_max]");
  }

  const json& orc = doc.contains("oracle") ? doc.at("oracle") : json::object();
  check_keys(orc, "oracle", {"n_cut"});
  cfg.oracle_n_cut = get_or(orc, "n_cut", 24);
  require(cfg.oracle_n_cut >= 2, errc::invalid_config, "oracle.n_cut >= 2");

  const json& en = doc.contains("energy") ? doc.at("energy") : json::object();
  check_keys(en, "energy", {"N_max"});
  cfg.energy_n_max = get_or(en, "N_max", 6);
  require(cfg.energy_n_max >= 0, errc::invalid_config, "energy.N_max >= 0");

  return cfg;
}

struct SweepRow {
  std::int64_t realization = 0;
  std::int64_t volume = 0;
  std::int64_t boundary = 0;
  int N = 0;
  std::string value_kind;
  double value = 0.0;
  double trace_check = 0.0;
  double tail_bound = 0.0;
  double seconds = 0.0;
};

inline constexpr const char* kCsvHeader =
    "realization,volume,boundary,N,value_kind,value,trace_check,tail_bound,"
    "seconds";

inline void write_csv(const std::string& path,
                      const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::bad_input, "cannot open " + path);
  out << kCsvHeader << "\n";
  for (const auto& r : rows)
    out << r.realization << ',' << r.volume << ',' << r.boundary << ','
        << r.N << ',' << r.value_kind << ',' << fmt17(r.value) << ','
        << fmt17(r.trace_check) << ',' << fmt17(r.tail_bound) << ','
        << fmt17(r.seconds) << "\n";
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t count = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr m;
  m.count = static_cast<std::int64_t>(xs.size());
  if (xs.empty()) return m;
  KahanSum s;
  for (double x : xs) s += x;
  m.mean = s.value() / m.count;
  if (m.count > 1) {
    KahanSum v;
    for (double x : xs) v += (x - m.mean) * (x - m.mean);
    m.stderr_ = std::sqrt(v.value() / (m.count - 1) / m.count);
  }
  return m;
}

namespace detail {

/// Worker pool over [0, count); per-index results land in a preallocated
/// slot vector, so the merged output is independent of scheduling.
template <typename F>
inline void pool_for(int count, F&& fn) {
  const unsigned workers =
      std::min<unsigned>(worker_count(), static_cast<unsigned>(count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

inline Eigen::VectorXd springs(const ExperimentConfig& cfg,
                               const LatticeBox& box, std::uint64_t r) {
  if (cfg.constant_k)
    return Eigen::VectorXd::Constant(box.size(), *cfg.constant_k);
  return sample_springs(cfg.disorder, box, r);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct PointResult {
  std::vector<SweepRow> rows;
  double log_negativity = std::numeric_limits<double>::quiet_NaN();
  double trace_norm = std::numeric_limits<double>::quiet_NaN();
  double trace_check = std::numeric_limits<double>::quiet_NaN();
  double tail_bound = std::numeric_limits<double>::quiet_NaN();
  double product_bound = 0.0;
  double h_bound_ = 0.0;
};

/// One (geometry, region, N, realization) evaluation. `want_exact` enables
/// the enumeration; bounds are always produced.
inline PointResult evaluate_point(const ExperimentConfig& cfg,
                                  const LatticeBox& box, const Region& region,
                                  int N, std::uint64_t r, bool want_exact,
                                  bool skip_over_budget) {
  PointResult out;
  Timer timer;
  SpectralFrame frame(
      build_single_particle(box, cfg.disorder.lambda, springs(cfg, box, r)));
  CorrelationFrame cf(frame, region);
  auto symp = symplectic_eigenvalues(cf);
  EnsembleSpec spec = cfg.ensemble;
  spec.N = N;
  if (spec.weights && static_cast<int>(spec.weights->size()) != N + 1)
    spec.weights.reset();
  out.product_bound = product_bound(spec, symp);
  out.h_bound_ = h_bound(frame, region, N);

  const double width = static_cast<double>(cfg.truncation.n_max) + 1.0;
  const bool in_budget =
      std::pow(width, static_cast<double>(box.size())) <= cfg.budget;
  if (want_exact && (in_budget || !skip_over_budget)) {
    PartialTransposeSpectrum pts(symp, spec, cfg.truncation);
    NegativityReport rep = pts.report(cfg.budget);
    out.log_negativity = rep.log_negativity;
    out.trace_norm = rep.trace_norm;
    out.trace_check = rep.trace_check;
    out.tail_bound = rep.tail_bound;
  }
  const double secs = cfg.timings ? timer.elapsed() : 0.0;
  const std::int64_t bnd = static_cast<std::int64_t>(boundary(box, region).size());
  auto push = [&](const char* kind, double value, double tc, double tb) {
    out.rows.push_back({static_cast<std::int64_t>(r), box.size(), bnd, N, kind,
                        value, tc, tb, secs});
  };
  if (!std::isnan(out.log_negativity))
    push("log_negativity", out.log_negativity, out.trace_check,
         out.tail_bound);
  push("product_bound", out.product_bound, 0.0, 0.0);
  push("h_bound", out.h_bound_, 0.0, 0.0);
  return out;
}

}  // namespace detail

struct RunResult {
  std::vector<SweepRow> rows;
  json summary = json::object();
};

inline RunResult run_negativity(const ExperimentConfig& cfg, bool exact) {
  LatticeBox box(cfg.d, cfg.lo, cfg.hi);
  Region region = parse_region(box, cfg.region);
  std::vector<detail::PointResult> results(cfg.realizations);
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  detail::pool_for(cfg.realizations, [&](int r) {
    if (failed.load()) return;
    try {
      results[r] = detail::evaluate_point(cfg, box, region, cfg.ensemble.N,
                                          static_cast<std::uint64_t>(r), exact,
                                          /*skip_over_budget=*/false);
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  RunResult out;
  std::vector<double> ln, tn, tc, tb, pb, hb;
  for (const auto& res : results) {
    out.rows.insert(out.rows.end(), res.rows.begin(), res.rows.end());
    if (!std::isnan(res.log_negativity)) {
      ln.push_back(res.log_negativity);
      tn.push_back(res.trace_norm);
      tc.push_back(res.trace_check);
      tb.push_back(res.tail_bound);
    }
    pb.push_back(res.product_bound);
    hb.push_back(res.h_bound_);
  }
  auto put = [&](const char* key, const std::vector<double>& xs) {
    if (xs.empty()) return;
    const MeanStderr m = mean_stderr(xs);
    out.summary[key] = m.mean;
    out.summary["stderr"][key] = m.stderr_;
  };
  put("log_negativity", ln);
  put("trace_norm", tn);
  put("trace_check", tc);
  put("product_bound", pb);
  put("h_bound", hb);
  if (!tb.empty())
    out.summary["tail_bound"] = *std::max_element(tb.begin(), tb.end());
  out.summary["n_max"] = cfg.truncation.n_max;
  out.summary["N"] = cfg.ensemble.N;
  out.summary["seed"] = cfg.disorder.seed;
  out.summary["realizations"] = cfg.realizations;
  return out;
}

inline RunResult run_sweep(const ExperimentConfig& cfg) {
  struct Point {
    int volume, N;
  };
  std::vector<Point> points;
  for (int v : cfg.sweep_volumes)
    for (int n : cfg.sweep_N) points.push_back({v, n});

  RunResult out;
  json point_summaries = json::array();
  for (const auto& pt : points) {
    LatticeBox box(cfg.d, cfg.lo, cfg.lo + pt.volume - 1);
    Region region = parse_region(box, cfg.region);
    std::vector<detail::PointResult> results(cfg.realizations);
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    detail::pool_for(cfg.realizations, [&](int r) {
      if (failed.load()) return;
      try {
        results[r] = detail::evaluate_point(cfg, box, region, pt.N,
                                            static_cast<std::uint64_t>(r),
                                            /*want_exact=*/true,
                                            /*skip_over_budget=*/true);
      } catch (...) {
        if (!failed.exchange(true)) first_error = std::current_exception();
      }
    });
    if (first_error) std::rethrow_exception(first_error);

    std::vector<double> ln, pb, hb;
    for (const auto& res : results) {
      out.rows.insert(out.rows.end(), res.rows.begin(), res.rows.end());
      if (!std::isnan(res.log_negativity)) ln.push_back(res.log_negativity);
      pb.push_back(res.product_bound);
      hb.push_back(res.h_bound_);
    }
    const std::int64_t bnd =
        static_cast<std::int64_t>(boundary(box, region).size());
    const MeanStderr mpb = mean_stderr(pb);
    json p;
    p["volume"] = pt.volume;
    p["N"] = pt.N;
    p["boundary"] = bnd;
    p["product_bound_mean"] = mpb.mean;
    p["product_bound_stderr"] = mpb.stderr_;
    const MeanStderr mhb = mean_stderr(hb);
    p["h_bound_mean"] = mhb.mean;
    p["h_bound_stderr"] = mhb.stderr_;
    if (!ln.empty()) {
      const MeanStderr mln = mean_stderr(ln);
      p["log_negativity_mean"] = mln.mean;
      p["log_negativity_stderr"] = mln.stderr_;
    }
    const double denom = (2.0 * pt.N + 1.0) * static_cast<double>(bnd);
    p["ratio"] = denom > 0.0 ? mpb.mean / denom : 0.0;
    point_summaries.push_back(p);
  }
  out.summary["points"] = point_summaries;
  out.summary["seed"] = cfg.disorder.seed;
  out.summary["realizations"] = cfg.realizations;
  return out;
}

inline RunResult run_energy(const ExperimentConfig& cfg) {
  LatticeBox box(cfg.d, cfg.lo, cfg.hi);
  RunResult out;
  std::vector<std::vector<SweepRow>> per_real(cfg.realizations);
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  detail::pool_for(cfg.realizations, [&](int r) {
    if (failed.load()) return;
    try {
      detail::Timer timer;
      SpectralFrame frame(build_single_particle(
          box, cfg.disorder.lambda,
          detail::springs(cfg, box, static_cast<std::uint64_t>(r))));
      const Eigen::VectorXd g = frame.gamma();
      const int vol = static_cast<int>(box.size());
      for (int N = 0; N <= cfg.energy_n_max; ++N) {
        const double closed = ensemble_energy(frame, N);
        // brute-force sector average of sum_k gamma_k (2 alpha_k + 1)
        KahanSum brute;
        std::uint64_t count = 0;
        for (SectorIterator it(vol, N); it.valid(); it.advance()) {
          const auto& alpha = it.value();
          double e = 0.0;
          for (int k = 0; k < vol; ++k) e += g[k] * (2.0 * alpha[k] + 1.0);
          brute += e;
          ++count;
        }
        const double secs = cfg.timings ? timer.elapsed() : 0.0;
        per_real[r].push_back({r, box.size(), 0, N, "energy_closed_form",
                               closed, 0.0, 0.0, secs});
        per_real[r].push_back({r, box.size(), 0, N, "energy_brute",
                               brute.value() / static_cast<double>(count), 0.0,
                               0.0, secs});
      }
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);
  for (auto& rows : per_real)
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  out.summary["N_max"] = cfg.energy_n_max;
  out.summary["seed"] = cfg.disorder.seed;
  out.summary["realizations"] = cfg.realizations;
  return out;
}

inline RunResult run_decay_fit(const ExperimentConfig& cfg) {
  LatticeBox box(cfg.d, cfg.lo, cfg.hi);
  DecayFit fit;
  if (cfg.constant_k) {
    fit = eigencorrelator_decay(box, cfg.disorder, cfg.realizations,
                                [&](std::uint64_t r) {
                                  return detail::springs(cfg, box, r);
                                });
  } else {
    fit = eigencorrelator_decay(box, cfg.disorder, cfg.realizations);
  }
  RunResult out;
  auto push = [&](const char* kind, double value) {
    out.rows.push_back({0, box.size(), 0, 0, kind, value, 0.0, 0.0, 0.0});
  };
  push("decay_C", fit.C);
  push("decay_mu", fit.mu);
  push("decay_residual", fit.residual);
  json profile = json::array();
  for (std::size_t r = 1; r < fit.mean_by_distance.size(); ++r)
    if (fit.mean_by_distance[r] > 0.0)
      profile.push_back({r, fit.mean_by_distance[r]});
  out.summary["profile"] = profile;
  out.summary["C"] = fit.C;
  out.summary["mu"] = fit.mu;
  out.summary["residual"] = fit.residual;
  out.summary["ok"] = fit.ok;
  out.summary["seed"] = cfg.disorder.seed;
  out.summary["realizations"] = cfg.realizations;
  if (fit.ok) {
    const double area = effective_area_constant(fit, cfg.d, cfg.disorder.lambda,
                                                cfg.disorder.k_max);
    push("area_constant", area);
    out.summary["area_constant"] = area;
  }
  return out;
}

inline RunResult run_oracle_check(const ExperimentConfig& cfg) {
  LatticeBox box(cfg.d, cfg.lo, cfg.hi);
  Region region = parse_region(box, cfg.region);
  Eigen::MatrixXd h = build_single_particle(box, cfg.disorder.lambda,
                                            detail::springs(cfg, box, 0));
  SpectralFrame frame(h);
  auto symp = symplectic_eigenvalues(CorrelationFrame(frame, region));
  EnsembleSpec spec = cfg.ensemble;
  auto analytic = exact_log_negativity(spec, symp, cfg.truncation, cfg.budget);
  FockOracle oracle(box, region, h, cfg.oracle_n_cut);
  const double brute = oracle.log_negativity(spec.N);
  const double delta = std::abs(analytic.log_negativity - brute);
  RunResult out;
  out.rows.push_back({0, box.size(),
                      static_cast<std::int64_t>(boundary(box, region).size()),
                      spec.N, "log_negativity", analytic.log_negativity,
                      analytic.trace_check, analytic.tail_bound, 0.0});
  out.rows.push_back({0, box.size(),
                      static_cast<std::int64_t>(boundary(box, region).size()),
                      spec.N, "oracle_log_negativity", brute, 0.0, 0.0, 0.0});
  out.summary["log_negativity"] = analytic.log_negativity;
  out.summary["oracle_log_negativity"] = brute;
  out.summary["difference"] = delta;
  out.summary["n_cut"] = cfg.oracle_n_cut;
  out.summary["N"] = spec.N;
  out.summary["seed"] = cfg.disorder.seed;
  out.summary["ok"] = delta <= 1e-5;
  return out;
}

/// Full run: dispatch on mode, write {output}.csv, {output}.json, and for
/// sweep/decay-fit a gnuplot-friendly {output}.dat. Returns the summary.
inline json run_experiment(const ExperimentConfig& cfg) {
  RunResult res;
  switch (cfg.mode) {
    case RunMode::exact:
      res = run_negativity(cfg, /*exact=*/true);
      break;
    case RunMode::bounds_only:
      res = run_negativity(cfg, /*exact=*/false);
      break;
    case RunMode::sweep:
      res = run_sweep(cfg);
      break;
    case RunMode::energy:
      res = run_energy(cfg);
      break;
    case RunMode::decay_fit:
      res = run_decay_fit(cfg);
      break;
    case RunMode::oracle_check:
      res = run_oracle_check(cfg);
      break;
  }
  write_csv(cfg.output + ".csv", res.rows);
  {
    std::ofstream out(cfg.output + ".json", std::ios::binary);
    require(out.good(), errc::bad_input, "cannot open " + cfg.output + ".json");
    out << res.summary.dump(2) << "\n";
  }
  if (cfg.mode == RunMode::sweep) {
    std::ofstream dat(cfg.output + ".dat", std::ios::binary);
    // blocks per N: volume vs product-bound ratio
    int current_n = std::numeric_limits<int>::min();
    for (const auto& p : res.summary["points"]) {
      const int n = p["N"].get<int>();
      if (n != current_n && current_n != std::numeric_limits<int>::min())
        dat << "\n";
      current_n = n;
      dat << p["volume"].get<int>() << ' '
          << fmt17(p["ratio"].get<double>()) << "\n";
    }
  } else if (cfg.mode == RunMode::decay_fit) {
    std::ofstream dat(cfg.output + ".dat", std::ios::binary);
    for (const auto& p : res.summary["profile"])
      dat << p[0].get<std::int64_t>() << ' '
          << fmt17(p[1].get<double>()) << "\n";
  }
  return res.summary;
}

/// Exit-code mapping shared by the CLI and tests: 2 invalid configuration,
/// 3 enumeration budget exceeded, 4 insufficient truncation.
inline int exit_code_for(const error& e) {
  switch (e.code()) {
    case errc::enumeration_too_large:
      return 3;
    case errc::insufficient_truncation:
      return 4;
    default:
      return 2;
  }
}

inline json error_json(const std::string& code, const std::string& message) {
  json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  return j;
}

}  // namespace latneg

#endif
