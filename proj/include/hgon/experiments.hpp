#pragma once

// Experiment runners: rate curves in n, k sweeps, misspecification grids and
// missing-entry prediction sweeps, configured from JSON and emitting
// plot-ready tables.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "hgon/error.hpp"
#include "hgon/estimator.hpp"
#include "hgon/hypergraphon.hpp"
#include "hgon/metrics.hpp"
#include "hgon/prediction.hpp"
#include "hgon/tensor_io.hpp"

namespace hgon {

using Json = nlohmann::ordered_json;

enum class Experiment { kFitOnce, kRateCurve, kKSweep, kMisspecGrid, kPredictSweep };

/// How k is chosen for a given n.
struct KRule {
  enum class Kind { kFixed, kTheoretical, kFraction, kLiteral };
  Kind kind = Kind::kFraction;
  double value = 0.6;  // k for kFixed, c for kFraction / kLiteral

  /// k for this n, or nullopt when the rule overshoots n (literal rule only).
  std::optional<std::size_t> resolve(std::size_t n, std::size_t m, double rho) const {
    switch (kind) {
      case Kind::kFixed: {
        const auto k = static_cast<std::size_t>(value);
        if (k > n) return std::nullopt;
        return k;
      }
      case Kind::kTheoretical:
        return theoretical_k(n, m, rho);
      case Kind::kFraction:
        return fraction_k(value, n, m);
      case Kind::kLiteral: {
        const double k = std::round(value * std::pow(static_cast<double>(n), static_cast<double>(m)));
        if (k > static_cast<double>(n)) return std::nullopt;
        return std::max<std::size_t>(1, static_cast<std::size_t>(k));
      }
    }
    return std::nullopt;
  }
};

struct ExperimentConfig {
  Experiment experiment = Experiment::kFitOnce;
  HypergraphonModel model = SlhModel::case1();
  std::vector<std::size_t> n_values{20};
  double rho = 1.0;
  KRule k_rule;
  std::vector<std::size_t> k_values;   // k sweep, explicit
  std::vector<double> k_fractions;     // k sweep, through k_rule's kind
  std::size_t trials = 50;
  std::size_t restarts = 10;
  std::size_t max_iters = 100;
  std::vector<InitKind> inits{InitKind::kSpectral};
  std::uint64_t seed = 0;
  std::vector<double> p2_grid;
  std::vector<double> q2_grid;
  std::vector<double> fractions{0.7, 0.8, 0.9};
  std::string input;  // optional hyperedge-list file
  std::string out;
  bool json = false;
  std::size_t threads = 1;
};

// ---------------------------------------------------------------------------
// Config parsing

namespace config_detail {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline void check(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

inline HypergraphonModel parse_model(const Json& j) {
  check(j.is_object(), "'model' must be an object");
  const auto name = get_or<std::string>(j, "model", "");
  if (name == "case1") return SlhModel::case1();
  if (name == "case2") {
    const auto c = get_or<std::vector<double>>(j, "c", {1.0, 1.0, 1.0});
    check(c.size() == 3, "case2 needs three coefficients in 'c'");
    return SlhModel::case2(c[0], c[1], c[2]);
  }
  if (name == "constant") {
    const auto v = get_or<double>(j, "value", -1.0);
    check(v >= 0.0 && v <= 1.0, "constant model needs 'value' in [0, 1]");
    return SlhModel::constant(v, get_or<std::size_t>(j, "m", 3));
  }
  if (name == "full") {
    FullHypergraphon3 h{get_or<double>(j, "p1", 0.0), get_or<double>(j, "q1", 0.0),
                        get_or<double>(j, "p2", 0.0), get_or<double>(j, "q2", 0.0),
                        get_or<std::size_t>(j, "k_comm", 2)};
    try {
      h.validate();
    } catch (const Rejection& e) {
      throw ConfigError(e.what());
    }
    return h;
  }
  throw ConfigError("unknown model '" + name + "' (expected case1, case2, constant, full)");
}

inline KRule parse_k_rule(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "theoretical") return {KRule::Kind::kTheoretical, 0.0};
    throw ConfigError("unknown k_rule '" + s + "'");
  }
  check(j.is_object(), "'k_rule' must be \"theoretical\" or an object");
  if (j.contains("fraction")) return {KRule::Kind::kFraction, get_or<double>(j, "fraction", 0.6)};
  if (j.contains("literal")) return {KRule::Kind::kLiteral, get_or<double>(j, "literal", 0.6)};
  throw ConfigError("'k_rule' object needs 'fraction' or 'literal'");
}

inline InitKind parse_init(const std::string& s) {
  if (s == "spectral") return InitKind::kSpectral;
  if (s == "random") return InitKind::kRandom;
  throw ConfigError("unknown init '" + s + "' (expected spectral or random)");
}

inline Experiment parse_experiment(const std::string& s) {
  if (s == "fit_once") return Experiment::kFitOnce;
  if (s == "rate_curve") return Experiment::kRateCurve;
  if (s == "k_sweep") return Experiment::kKSweep;
  if (s == "misspec_grid") return Experiment::kMisspecGrid;
  if (s == "predict_sweep") return Experiment::kPredictSweep;
  throw ConfigError("unknown experiment '" + s + "'");
}

}  // namespace config_detail

inline ExperimentConfig parse_config(const Json& j) {
  using namespace config_detail;
  check(j.is_object(), "config must be a JSON object");
  ExperimentConfig c;
  c.experiment = parse_experiment(get_or<std::string>(j, "experiment", "fit_once"));
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  if (j.contains("n")) {
    c.n_values = j.at("n").is_array() ? get_or<std::vector<std::size_t>>(j, "n", {})
                                      : std::vector<std::size_t>{get_or<std::size_t>(j, "n", 0)};
  }
  c.rho = get_or<double>(j, "rho", 1.0);
  if (j.contains("k")) {
    c.k_rule = {KRule::Kind::kFixed, static_cast<double>(get_or<std::size_t>(j, "k", 1))};
  }
  if (j.contains("k_rule")) c.k_rule = parse_k_rule(j.at("k_rule"));
  c.k_values = get_or<std::vector<std::size_t>>(j, "k_values", {});
  c.k_fractions = get_or<std::vector<double>>(j, "k_fractions", {});
  c.trials = get_or<std::size_t>(j, "trials", 50);
  c.restarts = get_or<std::size_t>(j, "restarts", 10);
  c.max_iters = get_or<std::size_t>(j, "max_iters", 100);
  if (j.contains("init")) {
    c.inits.clear();
    if (j.at("init").is_array()) {
      for (const auto& s : get_or<std::vector<std::string>>(j, "init", {})) c.inits.push_back(parse_init(s));
    } else {
      c.inits.push_back(parse_init(get_or<std::string>(j, "init", "spectral")));
    }
  }
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.p2_grid = get_or<std::vector<double>>(j, "p2_grid", {});
  c.q2_grid = get_or<std::vector<double>>(j, "q2_grid", {});
  c.fractions = get_or<std::vector<double>>(j, "fractions", c.fractions);
  c.input = get_or<std::string>(j, "input", "");
  c.out = get_or<std::string>(j, "out", "");
  c.json = get_or<std::string>(j, "format", "csv") == "json";
  c.threads = get_or<std::size_t>(j, "threads", 1);
  return c;
}

/// Structural checks shared by all runners; throws ConfigError.
inline void validate_config(const ExperimentConfig& c) {
  using config_detail::check;
  check(c.trials >= 1, "trials must be positive");
  check(c.restarts >= 1, "restarts must be positive");
  check(c.max_iters >= 1, "max_iters must be positive");
  check(c.threads >= 1, "threads must be positive");
  check(!c.inits.empty(), "at least one init is required");
  check(c.rho > 0.0 && c.rho <= 1.0, "rho must lie in (0, 1]");
  check(!c.n_values.empty(), "at least one n value is required");
  const auto m = model_order(c.model);
  for (auto n : c.n_values) check(n >= m, "every n must be at least m");
  if (c.k_rule.kind == KRule::Kind::kFixed) check(c.k_rule.value >= 1, "k must be positive");
  if (c.k_rule.kind == KRule::Kind::kFraction || c.k_rule.kind == KRule::Kind::kLiteral) {
    check(c.k_rule.value > 0.0, "k_rule coefficient must be positive");
  }
  switch (c.experiment) {
    case Experiment::kRateCurve:
      check(c.n_values.size() >= 2, "rate_curve needs at least two n values");
      break;
    case Experiment::kKSweep:
      check(!c.k_values.empty() || !c.k_fractions.empty(), "k_sweep needs k_values or k_fractions");
      for (auto k : c.k_values) check(k >= 1, "k values must be positive");
      for (auto f : c.k_fractions) check(f > 0.0, "k fractions must be positive");
      break;
    case Experiment::kMisspecGrid:
      check(std::holds_alternative<FullHypergraphon3>(c.model), "misspec_grid needs the full model");
      check(!c.p2_grid.empty() && !c.q2_grid.empty(), "misspec_grid needs p2_grid and q2_grid");
      for (double p : c.p2_grid) check(p >= 0.0 && p <= 1.0, "p2 grid values must lie in [0, 1]");
      for (double q : c.q2_grid) check(q >= 0.0 && q <= 1.0, "q2 grid values must lie in [0, 1]");
      break;
    case Experiment::kPredictSweep:
      check(!c.fractions.empty(), "predict_sweep needs observation fractions");
      for (double f : c.fractions) check(f > 0.0 && f <= 1.0, "fractions must lie in (0, 1]");
      break;
    case Experiment::kFitOnce:
      break;
  }
}

// ---------------------------------------------------------------------------
// Tables

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  void add(std::vector<Json> row) { rows.push_back(std::move(row)); }
};

inline std::string format_cell(const Json& v) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", d);
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "nan";
  return v.dump();
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
}

/// Array of row objects; NaN becomes null.
inline void write_json(std::ostream& out, const Table& t) {
  Json arr = Json::array();
  for (const auto& row : t.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& v = row[i];
      obj[t.columns[i]] = (v.is_number_float() && std::isnan(v.get<double>())) ? Json(nullptr) : v;
    }
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << '\n';
}

struct RunReport {
  Table results;
  std::optional<Table> timings;
};

// ---------------------------------------------------------------------------
// Runners

namespace run_detail {

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Summary {
  double mean;
  double std_error;
};

inline Summary summarize(const std::vector<double>& values) {
  if (values.size() == 1) return {values[0], std::nan("")};
  const auto s = aggregate(values);
  return {s.mean, s.std_error};
}

inline std::uint64_t trial_seed(const ExperimentConfig& c, std::size_t n, std::size_t trial) {
  return derive_seed(derive_seed(c.seed, Stream::kTrial, n), Stream::kTrial, trial);
}

inline FitOptions fit_options(const ExperimentConfig& c, std::size_t k, InitKind init,
                              std::uint64_t seed) {
  FitOptions o;
  o.k = k;
  o.init = init;
  o.restarts = c.restarts;
  o.max_iters = c.max_iters;
  o.seed = seed;
  return o;
}

inline const char* init_name(InitKind k) {
  switch (k) {
    case InitKind::kRandom: return "random";
    case InitKind::kSpectral: return "spectral";
    case InitKind::kGiven: return "given";
  }
  return "?";
}

inline std::size_t resolve_k(const ExperimentConfig& c, std::size_t n) {
  const auto k = c.k_rule.resolve(n, model_order(c.model), c.rho);
  if (!k) throw Rejection("k rule yields k > n = " + std::to_string(n));
  return *k;
}

}  // namespace run_detail

/// Mean normalized error per (n, init); wall-clock seconds go to the timing table.
inline RunReport run_rate_curve(const ExperimentConfig& c) {
  using namespace run_detail;
  validate_config(c);
  RunReport report;
  report.results.columns = {"n", "init", "k", "trials", "mean_error", "std_error"};
  Table timing;
  timing.columns = {"n", "init", "k", "mean_seconds"};

  for (auto n : c.n_values) {
    const auto k = resolve_k(c, n);
    std::vector<SampleResult> samples;
    samples.reserve(c.trials);
    for (std::size_t t = 0; t < c.trials; ++t) samples.push_back(sample(c.model, n, c.rho, trial_seed(c, n, t)));
    for (auto init : c.inits) {
      std::vector<double> errors(c.trials), seconds(c.trials);
      parallel_for(c.trials, c.threads, [&](std::size_t t) {
        const auto start = std::chrono::steady_clock::now();
        const auto fitted = fit(samples[t].adjacency, fit_options(c, k, init, trial_seed(c, n, t)));
        seconds[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        errors[t] = normalized_error(fitted.theta_hat, samples[t].theta);
      });
      const auto s = summarize(errors);
      report.results.add({n, init_name(init), k, c.trials, s.mean, s.std_error});
      double total = 0.0;
      for (double v : seconds) total += v;
      timing.add({n, init_name(init), k, total / static_cast<double>(c.trials)});
    }
  }
  report.timings = std::move(timing);
  return report;
}

/// Mean normalized error per k at the first n value.
inline RunReport run_k_sweep(const ExperimentConfig& c) {
  using namespace run_detail;
  validate_config(c);
  const auto n = c.n_values.front();
  const auto m = model_order(c.model);

  struct Point {
    std::string spec;
    std::optional<std::size_t> k;
  };
  std::vector<Point> points;
  for (auto k : c.k_values) {
    points.push_back({std::to_string(k), k <= n ? std::optional<std::size_t>(k) : std::nullopt});
  }
  for (double f : c.k_fractions) {
    KRule rule{c.k_rule.kind == KRule::Kind::kLiteral ? KRule::Kind::kLiteral : KRule::Kind::kFraction, f};
    points.push_back({format_cell(Json(f)), rule.resolve(n, m, c.rho)});
  }

  std::vector<SampleResult> samples;
  for (std::size_t t = 0; t < c.trials; ++t) samples.push_back(sample(c.model, n, c.rho, trial_seed(c, n, t)));

  RunReport report;
  report.results.columns = {"k_spec", "k", "init", "trials", "mean_error", "std_error", "note"};
  Table timing;
  timing.columns = {"k", "init", "mean_seconds"};
  for (const auto& p : points) {
    for (auto init : c.inits) {
      if (!p.k) {
        report.results.add({p.spec, nullptr, init_name(init), 0, std::nan(""), std::nan(""),
                            "skipped: k exceeds n"});
        continue;
      }
      std::vector<double> errors(c.trials), seconds(c.trials);
      parallel_for(c.trials, c.threads, [&](std::size_t t) {
        const auto start = std::chrono::steady_clock::now();
        const auto fitted = fit(samples[t].adjacency, fit_options(c, *p.k, init, trial_seed(c, n, t)));
        seconds[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        errors[t] = normalized_error(fitted.theta_hat, samples[t].theta);
      });
      const auto s = summarize(errors);
      report.results.add({p.spec, *p.k, init_name(init), c.trials, s.mean, s.std_error, ""});
      double total = 0.0;
      for (double v : seconds) total += v;
      timing.add({*p.k, init_name(init), total / static_cast<double>(c.trials)});
    }
  }
  report.timings = std::move(timing);
  return report;
}

/// Mean normalized error over the (p2, q2) grid of the full hypergraphon.
inline RunReport run_misspec_grid(const ExperimentConfig& c) {
  using namespace run_detail;
  validate_config(c);
  const auto n = c.n_values.front();
  const auto k = resolve_k(c, n);
  const auto base = std::get<FullHypergraphon3>(c.model);
  RunReport report;
  report.results.columns = {"p1", "q1", "p2", "q2", "k", "trials", "mean_error", "std_error"};
  for (double p2 : c.p2_grid) {
    for (double q2 : c.q2_grid) {
      auto h = base;
      h.p2 = p2;
      h.q2 = q2;
      std::vector<double> errors(c.trials);
      parallel_for(c.trials, c.threads, [&](std::size_t t) {
        const auto seed = trial_seed(c, n, t);
        const auto s = sample_full(h, n, c.rho, seed);
        const auto fitted = fit(s.adjacency, fit_options(c, k, c.inits.front(), seed));
        errors[t] = normalized_error(fitted.theta_hat, s.theta);
      });
      const auto s = summarize(errors);
      report.results.add({h.p1, h.q1, p2, q2, k, c.trials, s.mean, s.std_error});
    }
  }
  return report;
}

/// Mean held-out AUC per observation fraction.
inline RunReport run_predict_sweep(const ExperimentConfig& c) {
  using namespace run_detail;
  validate_config(c);
  for (double f : c.fractions) {
    if (f >= 1.0) throw Rejection("nothing to predict: observation fraction 1 leaves no held-out entries");
  }
  std::optional<LabeledHypergraph> loaded;
  if (!c.input.empty()) {
    std::ifstream in(c.input);
    if (!in) throw ConfigError("cannot open input file " + c.input);
    loaded = read_hyperedge_list(in);
  }
  const auto n = loaded ? loaded->adjacency.n() : c.n_values.front();
  const auto m = loaded ? loaded->adjacency.m() : model_order(c.model);
  const auto k = c.k_rule.resolve(n, m, c.rho);
  if (!k) throw Rejection("k rule yields k > n = " + std::to_string(n));

  RunReport report;
  report.results.columns = {"fraction", "n", "k", "trials", "mean_auc", "std_error"};
  for (double f : c.fractions) {
    std::vector<double> aucs(c.trials);
    parallel_for(c.trials, c.threads, [&](std::size_t t) {
      const auto seed = derive_seed(trial_seed(c, n, t), Stream::kMask, static_cast<std::uint64_t>(f * 1e6));
      const AdjacencyTensor a = loaded ? loaded->adjacency : sample(c.model, n, c.rho, trial_seed(c, n, t)).adjacency;
      auto omega = sample_mask(n, m, f, seed);
      if (loaded) {
        // Only entries known in the file can be trained on or scored.
        std::vector<std::uint8_t> flags(omega.slots());
        for (Count r = 0; r < omega.slots(); ++r) flags[r] = omega.observed(r) && loaded->observed.observed(r);
        omega = ObservationMask(n, m, std::move(flags));
      }
      const auto fitted = fit_missing(a, omega, fit_options(c, *k, c.inits.front(), seed));
      const auto pred = predict(fitted.theta_hat, omega);
      std::vector<double> scores;
      std::vector<std::uint8_t> truth;
      for (std::size_t i = 0; i < pred.hyperedges.size(); ++i) {
        const auto r = pred.hyperedges[i].rank();
        if (loaded && !loaded->observed.observed(r)) continue;
        scores.push_back(pred.scores[i]);
        truth.push_back(a.present_at_rank(r) ? 1 : 0);
      }
      aucs[t] = auc(scores, truth);
    });
    const auto s = summarize(aucs);
    report.results.add({f, n, *k, c.trials, s.mean, s.std_error});
  }
  return report;
}

/// One synthetic fit per trial at the first n value, one row per trial.
inline RunReport run_fit_once(const ExperimentConfig& c) {
  using namespace run_detail;
  validate_config(c);
  const auto n = c.n_values.front();
  const auto k = resolve_k(c, n);
  RunReport report;
  report.results.columns = {"trial", "n", "k", "init", "edges", "loss", "iterations", "converged",
                            "normalized_error"};
  for (auto init : c.inits) {
    for (std::size_t t = 0; t < c.trials; ++t) {
      const auto seed = trial_seed(c, n, t);
      const auto s = sample(c.model, n, c.rho, seed);
      const auto fitted = fit(s.adjacency, fit_options(c, k, init, seed));
      report.results.add({t, n, k, init_name(init), s.adjacency.edge_count(), fitted.loss,
                          fitted.iterations, fitted.converged,
                          normalized_error(fitted.theta_hat, s.theta)});
    }
  }
  return report;
}

inline RunReport run_experiment(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::kRateCurve: return run_rate_curve(c);
    case Experiment::kKSweep: return run_k_sweep(c);
    case Experiment::kMisspecGrid: return run_misspec_grid(c);
    case Experiment::kPredictSweep: return run_predict_sweep(c);
    case Experiment::kFitOnce: return run_fit_once(c);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace hgon
