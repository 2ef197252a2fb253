#include "ergo/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include <json.hpp>

#include "ergo/version.hpp"

namespace ergo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Prepared {
  ExperimentConfig cfg;
  fs::path out;
  ExecPolicy exec;
};

Prepared prepare(const CliOptions& opts) {
  Prepared p{parse_config_file(opts.config_path), {}, {}};
  if (opts.seed_override) p.cfg.run.seed = opts.seed;
  const char* env_out = std::getenv("ERGO_OUT_DIR");
  p.out = !opts.out_dir.empty() ? fs::path(opts.out_dir)
          : env_out             ? fs::path(env_out)
                                : fs::path(p.cfg.out_dir);
  const char* env_workers = std::getenv("ERGO_WORKERS");
  p.exec.workers = opts.workers > 0 ? opts.workers : 1;
  if (env_workers && opts.workers <= 1) p.exec.workers = std::max(1, std::atoi(env_workers));
  fs::create_directories(p.out);
  return p;
}

void write_manifest(const Prepared& p, const std::string& command) {
  json m;
  m["artifact"] = std::string("ergo ") + kVersion;
  m["command"] = command;
  m["seed"] = p.cfg.run.seed;
  m["config_hash"] = fnv1a_hash(p.cfg.raw);
  m["config"] = json::parse(p.cfg.raw);
  std::ofstream out(p.out / "manifest.json");
  out << m.dump(2) << "\n";
}

Ensemble initial_ensemble(const Prepared& p) {
  return p.cfg.run.initial.build(p.cfg.model->dim(), p.cfg.run.particles, p.cfg.run.seed,
                                 p.cfg.model->constraint());
}

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const BlowupError& e) {
    std::cerr << "numeric blow-up: " << e.what() << "\n";
    return kExitBlowup;
  } catch (const BiasStarvation& e) {
    std::cerr << "bias starvation: " << e.what() << "\n";
    return kExitBiasStarvation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerdictFail;
  }
}

}  // namespace

int cmd_simulate(const CliOptions& opts) {
  return guard([&] {
    Prepared p = prepare(opts);
    const TimeGrid grid = p.cfg.grid.build();
    Ensemble mu0 = initial_ensemble(p);
    std::set<std::size_t> checkpoints(p.cfg.run.checkpoints.begin(),
                                      p.cfg.run.checkpoints.end());
    if (checkpoints.empty()) checkpoints.insert(p.cfg.run.n_steps);
    auto snaps = run_scheme(*p.cfg.model, mu0, grid, p.cfg.run.n_steps, p.cfg.run.seed,
                            checkpoints, p.exec);
    fs::create_directories(p.out / "checkpoints");
    for (const auto& [k, ens] : snaps) {
      char name[64];
      std::snprintf(name, sizeof name, "step_%08zu.bin", k);
      write_checkpoint(ens, 2.0, (p.out / "checkpoints" / name).string());
    }
    write_manifest(p, "simulate");
    return kExitPass;
  });
}

int cmd_rate(const CliOptions& opts) {
  return guard([&] {
    Prepared p = prepare(opts);
    if (!p.cfg.rate) throw ConfigError("pipeline.rate: missing");
    const RatePipeline& rp = *p.cfg.rate;
    if (p.cfg.run.checkpoints.empty()) throw ConfigError("run.checkpoints: missing");
    const TimeGrid grid = p.cfg.grid.build();
    Ensemble mu0 = initial_ensemble(p);

    ReferenceMeasure ref = rp.reference;
    if (rp.reference_is_empirical) {
      ref = empirical_invariant(*p.cfg.model, rp.empirical_gamma, rp.empirical_burn_in,
                                rp.empirical_collect, p.cfg.run.particles,
                                p.cfg.run.seed + 1, mu0, p.exec);
    }

    std::set<std::size_t> checkpoints(p.cfg.run.checkpoints.begin(),
                                      p.cfg.run.checkpoints.end());
    auto snaps = run_scheme(*p.cfg.model, mu0, grid, p.cfg.run.n_steps, p.cfg.run.seed,
                            checkpoints, p.exec);

    const bool moment_matched = rp.distance == "moment_gaussian";
    if (moment_matched && p.cfg.model->dim() != 1) {
      throw ConfigError("pipeline.rate.distance: moment_gaussian needs a 1-d model");
    }
    double floor = 0.0;
    if (ref.kind == ReferenceMeasure::Kind::kAnalyticGaussian) {
      floor = bias_floor_gaussian(ref, std::min<std::size_t>(p.cfg.run.particles, 100000),
                                  rp.bias_seeds, p.cfg.run.seed + 2, moment_matched);
    }

    std::vector<std::size_t> ns;
    std::vector<double> ws;
    for (const auto& [k, ens] : snaps) {
      double w = 0.0;
      if (moment_matched) {
        w = moment_matched_w2(ens, ref);
      } else {
        Ensemble ref_sample = ref.sample;
        if (ref.kind == ReferenceMeasure::Kind::kAnalyticGaussian) {
          ref_sample = Ensemble(ens.size(), ens.dim());
          NoiseStream s(p.cfg.run.seed + 3, k, 0, 0);
          const double sd = std::sqrt(ref.variance);
          for (auto& v : ref_sample.data()) v = ref.mean + sd * s.gaussian();
        } else if (ref_sample.size() != ens.size()) {
          ref_sample = resample(ref_sample, ens.size(), p.cfg.run.seed + 4);
        }
        const MetricConfig mc{rp.p};
        if (rp.distance == "sliced") {
          w = wp_sliced(ens, ref_sample, mc, 64, p.cfg.run.seed + 5);
        } else if (rp.distance == "assignment") {
          w = wp_exact_assignment(ens, ref_sample, mc);
        } else if (rp.distance == "exact_1d") {
          w = wp_exact_1d(ens, ref_sample, mc);
        } else {
          throw ConfigError("pipeline.rate.distance: unknown estimator '" + rp.distance +
                            "'");
        }
      }
      ns.push_back(k);
      ws.push_back(w);
    }

    RateReport report =
        fit_rate(ns, ws, rp.p, rp.predicted, floor, rp.log_corrected);

    std::ofstream csv(p.out / "report.csv");
    csv << "n,t,distance,usable\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      csv << ns[i] << ',' << fmt(grid.t(ns[i])) << ',' << fmt(ws[i]) << ','
          << (report.usable[i] ? 1 : 0) << "\n";
    }

    auto verdict = theorem_verdict(
        p.cfg.has_regime ? p.cfg.theorem_id : "rate",
        p.cfg.has_regime ? p.cfg.regime_condition : "none declared",
        p.cfg.has_regime ? p.cfg.regime_margin : 1.0, std::nullopt, std::nullopt, report);
    {
      json extra = json::parse(verdict_to_json(verdict));
      extra["slope"] = report.slope;
      extra["slope_std_error"] = report.slope_std_error;
      extra["bias_floor"] = report.bias_floor;
      extra["log_corrected"] = report.log_corrected;
      extra["usable_checkpoints"] = report.usable_count;
      std::ofstream vf(p.out / "verdict.json");
      vf << extra.dump(2) << "\n";
    }
    write_manifest(p, "rate");
    return verdict.overall == "PASS" ? kExitPass : kExitVerdictFail;
  });
}

int cmd_couple(const CliOptions& opts) {
  return guard([&] {
    Prepared p = prepare(opts);
    if (!p.cfg.couple) throw ConfigError("pipeline.couple: missing");
    const CouplePipeline& cp = *p.cfg.couple;
    Ensemble mu1 = initial_ensemble(p);
    // Second margin starts from a unit-shifted copy so the pair distance
    // is nonzero and the contraction response is identifiable.
    Ensemble mu2 = mu1;
    for (auto& v : mu2.data()) v += 1.0;
    const OneStepModel& m2 = p.cfg.model2 ? *p.cfg.model2 : *p.cfg.model;
    auto est = estimate_coupling(*p.cfg.model, m2, mu1, mu2, cp.gammas, cp.reps,
                                 p.cfg.run.seed, cp.eps_assumed, cp.p, cp.substeps1,
                                 cp.substeps2, p.exec);
    std::ofstream csv(p.out / "report.csv");
    csv << "gamma,response,response_se,residual\n";
    for (std::size_t i = 0; i < est.gammas.size(); ++i) {
      csv << fmt(est.gammas[i]) << ',' << fmt(est.responses[i]) << ','
          << fmt(est.response_std_errors[i]) << ','
          << fmt(est.degenerate ? 0.0 : est.residuals[i]) << "\n";
    }
    json out;
    out["b_star"] = est.b_star;
    out["c_star"] = est.c_star;
    out["b_std_error"] = est.b_std_error;
    out["c_std_error"] = est.c_std_error;
    out["eps"] = est.eps;
    out["degenerate"] = est.degenerate;
    out["smallness_condition"] = est.smallness_condition;
    std::ofstream vf(p.out / "verdict.json");
    vf << out.dump(2) << "\n";
    write_manifest(p, "couple");
    if (est.degenerate) return kExitVerdictFail;
    return est.b_star > 0.0 ? kExitPass : kExitVerdictFail;
  });
}

int cmd_sigma(const CliOptions& opts) {
  return guard([&] {
    Prepared p = prepare(opts);
    if (!p.cfg.sigma) throw ConfigError("pipeline.sigma: missing");
    const SigmaPipeline& sp = *p.cfg.sigma;
    const TimeGrid grid = p.cfg.grid.build();
    const SigmaParams params{sp.b, sp.eps};
    const auto series = sigma_series(grid, params, sp.n_max);
    const double decay = std::min(sp.b, sp.eps);
    const bool log_corr = sp.b == sp.eps;
    std::ofstream csv(p.out / "report.csv");
    csv << "n,gamma_n,t_n,sigma,bound_shape,ratio\n";
    for (std::size_t n = 1; n <= sp.n_max; ++n) {
      double shape = std::pow(double(n), -decay);
      if (log_corr) shape *= std::log1p(double(n));
      csv << n << ',' << fmt(grid.gamma(n)) << ',' << fmt(grid.t(n)) << ','
          << fmt(series[n]) << ',' << fmt(shape) << ',' << fmt(series[n] / shape) << "\n";
    }
    const auto report = check_sigma_bound(grid, params, sp.n_max, sp.lambda);
    json out;
    out["pass"] = report.pass;
    out["checks"] = json::array();
    for (const auto& c : report.checks) {
      out["checks"].push_back({{"shape", c.shape},
                               {"overall_max", c.overall_max},
                               {"early_max", c.early_max},
                               {"late_max", c.late_max},
                               {"pass", c.pass}});
    }
    std::ofstream vf(p.out / "verdict.json");
    vf << out.dump(2) << "\n";
    write_manifest(p, "sigma");
    return report.pass ? kExitPass : kExitVerdictFail;
  });
}

int cmd_flmonitor(const CliOptions& opts) {
  return guard([&] {
    Prepared p = prepare(opts);
    if (!p.cfg.fl) throw ConfigError("pipeline.flmonitor: missing");
    const TimeGrid grid = p.cfg.grid.build();
    Ensemble mu0 = initial_ensemble(p);
    auto report = fl_monitor(*p.cfg.model, mu0, grid, p.cfg.run.n_steps, p.cfg.run.seed,
                             p.cfg.fl->params, p.exec);
    std::ofstream csv(p.out / "report.csv");
    csv << "step,t,moment,bound,pass\n";
    for (const auto& row : report.rows) {
      csv << row.step << ',' << fmt(row.t) << ',' << fmt(row.moment) << ','
          << fmt(row.bound) << ',' << (row.pass ? 1 : 0) << "\n";
    }
    json out;
    out["pass"] = report.pass;
    out["first_violation"] = report.first_violation;
    std::ofstream vf(p.out / "verdict.json");
    vf << out.dump(2) << "\n";
    write_manifest(p, "flmonitor");
    return report.pass ? kExitPass : kExitVerdictFail;
  });
}

int cmd_wasserstein(const std::string& file_a, const std::string& file_b, double p,
                    const std::string& method, std::string* result_line) {
  return guard([&] {
    Ensemble a = load_ensemble(file_a);
    Ensemble b = load_ensemble(file_b);
    if (a.size() != b.size()) {
      const std::size_t n = std::max(a.size(), b.size());
      a = resample(a, n, 11);
      b = resample(b, n, 12);
    }
    const MetricConfig cfg{p};
    double w = 0.0;
    if (method == "exact_1d") {
      w = wp_exact_1d(a, b, cfg);
    } else if (method == "assignment") {
      w = wp_exact_assignment(a, b, cfg);
    } else if (method == "sliced") {
      w = wp_sliced(a, b, cfg, 64, 1);
    } else {
      throw ConfigError("unknown wasserstein method '" + method + "'");
    }
    if (result_line) *result_line = fmt(w);
    return kExitPass;
  });
}

}  // namespace ergo
