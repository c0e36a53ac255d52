// hgon: sample hypergraphs from hypergraphons, fit block-model estimates and
// run the estimation / prediction experiments.
//
//   hgon <verb> --config cfg.json [--out path] [--seed s] [--trials t]
//                [--threads w] [--json] [--verbose]
//
// Verbs: fit, rate-curve, k-sweep, misspec-grid, predict.
// Exit codes: 0 success, 2 configuration error, 3 runtime rejection.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hgon/experiments.hpp"
#include "hgon/hgon.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRejected = 3;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  bool json = false;
  bool verbose = false;
};

hgon::Json load_json(const std::string& path) {
  if (path.empty()) return hgon::Json::object();
  std::ifstream in(path);
  if (!in) throw hgon::ConfigError("cannot open config file " + path);
  try {
    return hgon::Json::parse(in);
  } catch (const hgon::Json::parse_error& e) {
    throw hgon::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

hgon::ExperimentConfig build_config(const Flags& f, hgon::Experiment experiment) {
  auto cfg = hgon::parse_config(load_json(f.config));
  cfg.experiment = experiment;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.threads) cfg.threads = *f.threads;
  if (const char* env = std::getenv("HGON_THREADS")) {
    try {
      cfg.threads = std::stoul(env);
    } catch (const std::exception&) {
      throw hgon::ConfigError(std::string("HGON_THREADS is not a number: ") + env);
    }
  }
  if (f.json) cfg.json = true;
  return cfg;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hgon::ConfigError("cannot write output file " + path);
  out << text;
}

void emit_report(const hgon::ExperimentConfig& cfg, const hgon::RunReport& report) {
  std::ostringstream body;
  if (cfg.json) {
    hgon::write_json(body, report.results);
  } else {
    hgon::write_csv(body, report.results);
  }
  emit(cfg.out, body.str());
  if (report.timings) {
    std::ostringstream timing;
    hgon::write_csv(timing, *report.timings);
    if (cfg.out.empty()) {
      std::cerr << timing.str();
    } else {
      emit(cfg.out + ".timing.csv", timing.str());
    }
  }
}

hgon::FitOptions options_for(const hgon::ExperimentConfig& cfg, std::size_t n, std::size_t m,
                             bool verbose) {
  const auto k = cfg.k_rule.resolve(n, m, cfg.rho);
  if (!k) throw hgon::Rejection("k rule yields k > n");
  hgon::FitOptions o;
  o.k = *k;
  o.init = cfg.inits.front();
  o.restarts = cfg.restarts;
  o.max_iters = cfg.max_iters;
  o.seed = cfg.seed;
  if (verbose) {
    o.progress = [](std::size_t it, double loss) {
      std::cerr << "iteration " << it << " loss " << loss << '\n';
    };
  }
  return o;
}

int run_fit(const Flags& f) {
  const auto cfg = build_config(f, hgon::Experiment::kFitOnce);
  if (cfg.input.empty()) {
    emit_report(cfg, hgon::run_fit_once(cfg));
    return 0;
  }
  std::ifstream in(cfg.input);
  if (!in) throw hgon::ConfigError("cannot open input file " + cfg.input);
  const auto a = hgon::read_adjacency(in);
  const auto result = hgon::fit(a, options_for(cfg, a.n(), a.m(), f.verbose));
  std::cerr << "k=" << result.z_hat.k() << " loss=" << result.loss << " iterations=" << result.iterations
            << " converged=" << result.converged << '\n';
  std::ostringstream body;
  hgon::write_probability(body, result.theta_hat);
  emit(cfg.out, body.str());
  return 0;
}

int run_predict(const Flags& f) {
  const auto cfg = build_config(f, hgon::Experiment::kPredictSweep);
  if (cfg.input.empty()) {
    emit_report(cfg, hgon::run_predict_sweep(cfg));
    return 0;
  }
  std::ifstream in(cfg.input);
  if (!in) throw hgon::ConfigError("cannot open input file " + cfg.input);
  const auto data = hgon::read_hyperedge_list(in);
  if (data.observed.is_full()) throw hgon::Rejection("nothing to predict: input has no '?' entries");
  const auto result = hgon::fit_missing(data.adjacency, data.observed,
                                        options_for(cfg, data.adjacency.n(), data.adjacency.m(), f.verbose));
  std::ostringstream body;
  hgon::write_predictions_csv(body, hgon::predict(result.theta_hat, data.observed));
  emit(cfg.out, body.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypergraphon sampling, block-model estimation and experiments"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON experiment config");
    sub->add_option("--out", flags.out, "output path (stdout when omitted)");
    sub->add_option("--seed", flags.seed, "override the config seed");
    sub->add_option("--trials", flags.trials, "override the number of trials");
    sub->add_option("--threads", flags.threads, "worker threads (HGON_THREADS overrides)");
    sub->add_flag("--json", flags.json, "write JSON instead of CSV");
    sub->add_flag("--verbose", flags.verbose, "report per-iteration loss on stderr");
  };

  auto* fit = app.add_subcommand("fit", "fit a hyperedge-list file, or one synthetic fit per trial");
  auto* rate = app.add_subcommand("rate-curve", "normalized error as a function of n");
  auto* ksweep = app.add_subcommand("k-sweep", "normalized error as a function of k");
  auto* grid = app.add_subcommand("misspec-grid", "error grid over (p2, q2) of the full hypergraphon");
  auto* pred = app.add_subcommand("predict", "missing-hyperedge prediction (file or synthetic AUC sweep)");
  for (auto* sub : {fit, rate, ksweep, grid, pred}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (fit->parsed()) return run_fit(flags);
    if (pred->parsed()) return run_predict(flags);
    hgon::Experiment experiment = hgon::Experiment::kRateCurve;
    if (ksweep->parsed()) experiment = hgon::Experiment::kKSweep;
    if (grid->parsed()) experiment = hgon::Experiment::kMisspecGrid;
    const auto cfg = build_config(flags, experiment);
    emit_report(cfg, hgon::run_experiment(cfg));
    return 0;
  } catch (const hgon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hgon::Rejection& e) {
    std::cerr << "rejected: " << e.what() << '\n';
    return kExitRejected;
  }
}
