#include "ergo/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ergo/models/boltzmann.hpp"
#include "ergo/models/kinetic.hpp"
#include "ergo/models/langevin.hpp"
#include "ergo/models/neuronal.hpp"
#include "ergo/models/reflected.hpp"

namespace ergo {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

const json& need(const json& j, const std::string& key, const std::string& scope) {
  auto it = j.find(key);
  if (it == j.end()) fail(scope + "." + key, "missing");
  return *it;
}

double need_num(const json& j, const std::string& key, const std::string& scope) {
  const auto& v = need(j, key, scope);
  if (!v.is_number()) fail(scope + "." + key, "must be a number");
  return v.get<double>();
}

models::Drift parse_drift(const json& j, const std::string& scope) {
  const std::string kind = need(j, "kind", scope).get<std::string>();
  if (kind == "ou") return models::Drift::ou(need_num(j, "rate", scope));
  if (kind == "double_well") return models::Drift::double_well(need_num(j, "a", scope));
  if (kind == "affine") {
    return models::Drift::affine(need_num(j, "slope", scope),
                                 j.value("offset", 0.0));
  }
  if (kind == "zero") return models::Drift::affine(0.0, 0.0);
  fail(scope + ".kind", "unknown drift family '" + kind + "'");
}

std::unique_ptr<OneStepModel> parse_model(const json& j) {
  const std::string family = need(j, "family", "model").get<std::string>();
  if (family == "langevin") {
    models::LangevinSpec spec;
    spec.dim = int(j.value("dim", 1));
    spec.drift = parse_drift(need(j, "drift", "model"), "model.drift");
    spec.amplitude = j.value("noise_amplitude", 1.0);
    return std::make_unique<models::LangevinModel>(spec);
  }
  if (family == "kinetic_mv") {
    const int d = int(j.value("dim", 1));
    auto spec = models::KineticMVSpec::isotropic(
        d, need_num(j, "u", "model"), need_num(j, "gamma_damp", "model"),
        j.value("kappa", 1.0));
    if (j.contains("K_diagonal")) {
      const auto diag = j["K_diagonal"].get<std::vector<double>>();
      if (int(diag.size()) != d) fail("model.K_diagonal", "length must equal dim");
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) spec.K[std::size_t(r) * d + c] = r == c ? diag[r] : 0.0;
    }
    if (j.contains("K_matrix")) {
      const auto rows = j["K_matrix"];
      if (int(rows.size()) != d) fail("model.K_matrix", "needs dim rows");
      for (int r = 0; r < d; ++r) {
        const auto row = rows[r].get<std::vector<double>>();
        if (int(row.size()) != d) fail("model.K_matrix", "needs dim columns per row");
        for (int c = 0; c < d; ++c) spec.K[std::size_t(r) * d + c] = row[c];
      }
    }
    if (j.contains("g")) {
      const auto& g = j["g"];
      const std::string kind = need(g, "kind", "model.g").get<std::string>();
      if (kind == "tanh") {
        spec.g = {models::Perturbation::Kind::kTanh, need_num(g, "scale", "model.g")};
      } else if (kind != "zero") {
        fail("model.g.kind", "unknown perturbation '" + kind + "'");
      }
    }
    if (j.contains("interaction")) {
      const auto& bi = j["interaction"];
      const std::string kind = need(bi, "kind", "model.interaction").get<std::string>();
      if (kind == "attraction") {
        spec.interaction = {models::Interaction::Kind::kAttraction,
                            need_num(bi, "coeff", "model.interaction")};
      } else if (kind != "zero") {
        fail("model.interaction.kind", "unknown interaction '" + kind + "'");
      }
    }
    return std::make_unique<models::KineticMVModel>(spec);
  }
  if (family == "reflected") {
    models::ReflectedSpec spec;
    const auto& dr = need(j, "drift", "model");
    spec.drift = {need_num(dr, "a0", "model.drift"), need_num(dr, "a1", "model.drift")};
    const auto& sg = need(j, "sigma", "model");
    spec.sigma = {need_num(sg, "a0", "model.sigma"), sg.value("a1", 0.0)};
    const std::string flavor = j.value("flavor", std::string("exact_skorokhod"));
    if (flavor == "projected") {
      spec.flavor = models::ReflectedFlavor::kProjected;
    } else if (flavor == "exact_skorokhod") {
      spec.flavor = models::ReflectedFlavor::kExactSkorokhod;
    } else {
      fail("model.flavor", "unknown reflected flavor '" + flavor + "'");
    }
    return std::make_unique<models::ReflectedModel>(spec);
  }
  if (family == "neuronal") {
    models::NeuronalSpec spec;
    const auto& dr = need(j, "drift", "model");
    const std::string dk = need(dr, "kind", "model.drift").get<std::string>();
    if (dk == "constant") {
      spec.drift = {models::NeuronDrift::Kind::kConstant, need_num(dr, "c", "model.drift"), 0.0};
    } else if (dk == "decay") {
      spec.drift = {models::NeuronDrift::Kind::kDecay, need_num(dr, "c", "model.drift"),
                    need_num(dr, "k", "model.drift")};
    } else {
      fail("model.drift.kind", "unknown neuronal drift '" + dk + "'");
    }
    const auto& rt = need(j, "rate", "model");
    const std::string rk = need(rt, "kind", "model.rate").get<std::string>();
    if (rk == "constant") {
      spec.rate = {models::SpikeRate::Kind::kConstant, need_num(rt, "value", "model.rate")};
    } else if (rk == "linear") {
      spec.rate = {models::SpikeRate::Kind::kLinear, need_num(rt, "slope", "model.rate")};
    } else {
      fail("model.rate.kind", "unknown neuronal rate '" + rk + "'");
    }
    spec.coupling_j = j.value("J", 0.0);
    spec.rate_cap = need_num(j, "M", "model");
    spec.contraction_b = j.value("contraction_b", 0.0);
    return std::make_unique<models::NeuronalModel>(spec);
  }
  if (family == "boltzmann") {
    models::BoltzmannSpec spec;
    const std::string regime = need(j, "regime", "model").get<std::string>();
    if (regime == "finite_variation") {
      spec.regime = models::BoltzmannRegime::kFiniteVariation;
    } else if (regime == "martingale") {
      spec.regime = models::BoltzmannRegime::kMartingale;
    } else {
      fail("model.regime", "unknown regime '" + regime + "'");
    }
    spec.dim = int(j.value("dim", 1));
    for (const auto& a : need(j, "atoms", "model")) {
      spec.atoms.push_back({need_num(a, "z", "model.atoms"), need_num(a, "w", "model.atoms")});
    }
    const auto& amp = need(j, "amplitude", "model");
    const std::string ak = need(amp, "kind", "model.amplitude").get<std::string>();
    if (ak == "toward_v") {
      spec.amplitude.kind = models::JumpAmplitude::Kind::kTowardV;
    } else if (ak == "mark_times_v") {
      spec.amplitude.kind = models::JumpAmplitude::Kind::kMarkTimesV;
    } else if (ak == "mark_ones") {
      spec.amplitude.kind = models::JumpAmplitude::Kind::kMarkOnes;
    } else {
      fail("model.amplitude.kind", "unknown amplitude '" + ak + "'");
    }
    spec.amplitude.scale = amp.value("scale", 1.0);
    if (spec.regime == models::BoltzmannRegime::kFiniteVariation) {
      const auto& rt = need(j, "rate", "model");
      const std::string rk = need(rt, "kind", "model.rate").get<std::string>();
      if (rk == "constant") {
        spec.rate = {models::JumpRate::Kind::kConstant, need_num(rt, "level", "model.rate")};
      } else if (rk == "inverse_sq") {
        spec.rate = {models::JumpRate::Kind::kInverseSq, need_num(rt, "level", "model.rate")};
      } else {
        fail("model.rate.kind", "unknown jump rate '" + rk + "'");
      }
      spec.rate_cap = need_num(j, "gamma_max", "model");
    }
    if (j.contains("drift")) spec.drift = parse_drift(j["drift"], "model.drift");
    spec.running_state_amplitude = j.value("running_state_amplitude", false);
    return std::make_unique<models::BoltzmannModel>(spec);
  }
  fail("model.family", "unregistered model family '" + family + "'");
}

InitialLaw parse_initial(const json& j) {
  InitialLaw law;
  const std::string kind = need(j, "kind", "run.initial").get<std::string>();
  if (kind == "point") {
    law.kind = InitialLaw::Kind::kPoint;
    law.value = need(j, "value", "run.initial").get<std::vector<double>>();
  } else if (kind == "gaussian") {
    law.kind = InitialLaw::Kind::kGaussian;
    law.value = need(j, "mean", "run.initial").get<std::vector<double>>();
    law.spread = need_num(j, "stddev", "run.initial");
  } else if (kind == "uniform_box") {
    law.kind = InitialLaw::Kind::kUniformBox;
    law.value = need(j, "center", "run.initial").get<std::vector<double>>();
    law.spread = need_num(j, "half_width", "run.initial");
  } else if (kind == "file") {
    law.kind = InitialLaw::Kind::kFile;
    law.path = need(j, "path", "run.initial").get<std::string>();
  } else {
    fail("run.initial.kind", "unknown initial law '" + kind + "'");
  }
  return law;
}

}  // namespace

Ensemble InitialLaw::build(int dim, std::size_t n, uint64_t seed,
                           Constraint constraint) const {
  if (kind == Kind::kFile) {
    Ensemble e = load_ensemble(path);
    if (e.dim() != dim) throw ConfigError("run.initial.path: dimension mismatch");
    return e;
  }
  if (int(value.size()) != dim) throw ConfigError("run.initial: location length != dim");
  Ensemble e(n, dim, constraint);
  NoiseStream s(seed, 0xC0FFEEull, 0, 3);
  for (std::size_t i = 0; i < n; ++i) {
    auto pt = e.point(i);
    for (int j = 0; j < dim; ++j) {
      switch (kind) {
        case Kind::kPoint: pt[j] = value[j]; break;
        case Kind::kGaussian: pt[j] = value[j] + spread * s.gaussian(); break;
        case Kind::kUniformBox: pt[j] = value[j] + spread * (2.0 * s.uniform() - 1.0); break;
        case Kind::kFile: break;
      }
      if (constraint == Constraint::kNonnegativeOrthant) pt[j] = std::max(0.0, pt[j]);
    }
  }
  return e;
}

TimeGrid GridSection::build() const {
  return rule == GridRule::kHarmonic ? TimeGrid::harmonic(h, t0) : TimeGrid::uniform(h, t0);
}

std::unique_ptr<OneStepModel> build_model(const std::string& json_text) {
  return parse_model(json::parse(json_text));
}

uint64_t fnv1a_hash(const std::string& text) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.raw = j.dump(2);

  cfg.model = parse_model(need(j, "model", ""));
  if (j.contains("model2")) cfg.model2 = parse_model(j["model2"]);

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    const std::string rule = g.value("rule", std::string("harmonic"));
    if (rule == "harmonic") {
      cfg.grid.rule = GridRule::kHarmonic;
      cfg.grid.h = need_num(g, "h", "grid");
    } else if (rule == "uniform") {
      cfg.grid.rule = GridRule::kUniform;
      cfg.grid.h = need_num(g, "gamma", "grid");
    } else {
      fail("grid.rule", "unknown rule '" + rule + "'");
    }
    cfg.grid.t0 = g.value("t0", 0.0);
  }

  const auto& r = need(j, "run", "");
  cfg.run.particles = std::size_t(need_num(r, "particles", "run"));
  cfg.run.n_steps = std::size_t(r.value("n_steps", 0.0));
  if (!r.contains("seed")) fail("run.seed", "missing (a seed is mandatory)");
  cfg.run.seed = r["seed"].get<uint64_t>();
  cfg.run.seed_set = true;
  if (r.contains("checkpoints")) {
    for (const auto& c : r["checkpoints"]) cfg.run.checkpoints.push_back(c.get<std::size_t>());
    for (std::size_t i = 1; i < cfg.run.checkpoints.size(); ++i) {
      if (cfg.run.checkpoints[i] <= cfg.run.checkpoints[i - 1]) {
        fail("run.checkpoints", "must be sorted ascending");
      }
    }
    if (!cfg.run.checkpoints.empty() && cfg.run.checkpoints.back() > cfg.run.n_steps) {
      fail("run.checkpoints", "checkpoint beyond n_steps");
    }
  }
  cfg.run.initial = parse_initial(need(r, "initial", "run"));

  if (j.contains("pipeline")) {
    const auto& p = j["pipeline"];
    if (p.contains("rate")) {
      const auto& rp = p["rate"];
      RatePipeline rate;
      const auto& ref = need(rp, "reference", "pipeline.rate");
      const std::string rk = need(ref, "kind", "pipeline.rate.reference").get<std::string>();
      if (rk == "analytic_gaussian") {
        rate.reference.kind = ReferenceMeasure::Kind::kAnalyticGaussian;
        rate.reference.mean = need_num(ref, "mean", "pipeline.rate.reference");
        rate.reference.variance = need_num(ref, "variance", "pipeline.rate.reference");
      } else if (rk == "empirical") {
        rate.reference_is_empirical = true;
        rate.empirical_gamma = ref.value("gamma", 1e-3);
        rate.empirical_burn_in = std::size_t(ref.value("burn_in", 1000.0));
        rate.empirical_collect = std::size_t(ref.value("n_collect", 1000.0));
      } else {
        fail("pipeline.rate.reference.kind", "unknown reference '" + rk + "'");
      }
      rate.p = rp.value("p", 2.0);
      rate.predicted = need_num(rp, "predicted", "pipeline.rate");
      rate.log_corrected = rp.value("log_corrected", false);
      rate.distance = rp.value("distance", std::string("moment_gaussian"));
      rate.bias_seeds = int(rp.value("bias_seeds", 5.0));
      cfg.rate = rate;
    }
    if (p.contains("couple")) {
      const auto& cp = p["couple"];
      CouplePipeline couple;
      for (const auto& g : need(cp, "gammas", "pipeline.couple")) {
        couple.gammas.push_back(g.get<double>());
      }
      couple.reps = int(cp.value("reps", 4.0));
      // Default fit exponent follows the model's theory: 1/2 for the
      // martingale Boltzmann regime, 1 elsewhere.
      const double default_eps =
          cfg.model->name() == "boltzmann_martingale" ? 0.5 : 1.0;
      couple.eps_assumed = cp.value("eps", default_eps);
      couple.p = cp.value("p", 2.0);
      couple.substeps1 = int(cp.value("substeps1", 1.0));
      couple.substeps2 = int(cp.value("substeps2", 1.0));
      cfg.couple = couple;
    }
    if (p.contains("sigma")) {
      const auto& sp = p["sigma"];
      SigmaPipeline sig;
      sig.b = need_num(sp, "b", "pipeline.sigma");
      sig.eps = need_num(sp, "eps", "pipeline.sigma");
      sig.n_max = std::size_t(need_num(sp, "n_max", "pipeline.sigma"));
      sig.lambda = sp.value("lambda", 0.0);
      cfg.sigma = sig;
    }
    if (p.contains("flmonitor")) {
      const auto& fp = p["flmonitor"];
      FlPipeline fl;
      fl.params.b_bar = need_num(fp, "b_bar", "pipeline.flmonitor");
      fl.params.c_bar = need_num(fp, "c_bar", "pipeline.flmonitor");
      fl.params.h = fp.value("h", cfg.grid.h);
      fl.params.p = fp.value("p", 2.0);
      fl.params.slack_sigmas = fp.value("slack_sigmas", 3.0);
      cfg.fl = fl;
    }
    if (p.contains("verdict")) {
      const auto& vp = p["verdict"];
      cfg.theorem_id = vp.value("theorem", std::string("unnamed"));
      cfg.regime_condition = vp.value("condition", std::string(""));
      cfg.regime_margin = vp.value("margin", 0.0);
      cfg.has_regime = true;
    }
  }

  if (j.contains("output")) {
    cfg.out_dir = j["output"].value("directory", std::string("out"));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace ergo
