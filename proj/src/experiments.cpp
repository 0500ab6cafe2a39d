#include "ida/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ida/error.hpp"

namespace ida {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error("'" + where + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) config_error("unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    config_error(std::string("'") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) config_error(std::string("'") + key + "' must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) config_error(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

// [[U(+,+), U(+,-)], [U(-,+), U(-,-)]]
UtilityMatrix parse_utility(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_array() || !v[1].is_array() ||
      v[0].size() != 2 || v[1].size() != 2) {
    config_error("utility must be [[U(+,+), U(+,-)], [U(-,+), U(-,-)]]");
  }
  for (const auto& row : v) {
    for (const auto& x : row) {
      if (!x.is_number()) config_error("utility entries must be numbers");
    }
  }
  UtilityMatrix U{v[0][0].get<double>(), v[0][1].get<double>(), v[1][0].get<double>(),
                  v[1][1].get<double>()};
  return U;
}

// [[c(h=-1,y=-1), c(h=-1,y=+1)], [c(h=+1,y=-1), c(h=+1,y=+1)]]
TransitionMatrix parse_transition(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_array() || !v[1].is_array() ||
      v[0].size() != 2 || v[1].size() != 2) {
    config_error("c_hy must be a 2x2 array indexed [h][y]");
  }
  TransitionMatrix c{};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      if (!v[i][j].is_number()) config_error("c_hy entries must be numbers");
      c[i][j] = v[i][j].get<double>();
    }
  }
  return c;
}

CovariateAdaptMode parse_mode(const std::string& s) {
  if (s == "counterfactual") return CovariateAdaptMode::Counterfactual;
  if (s == "fresh-noise") return CovariateAdaptMode::FreshNoise;
  if (s == "freeze") return CovariateAdaptMode::Freeze;
  config_error("unknown covariate adaptation mode '" + s + "'");
}

const char* mode_name(CovariateAdaptMode m) {
  switch (m) {
    case CovariateAdaptMode::Counterfactual: return "counterfactual";
    case CovariateAdaptMode::FreshNoise: return "fresh-noise";
    case CovariateAdaptMode::Freeze: return "freeze";
  }
  return "counterfactual";
}

std::string kv(const std::string& key, double v) { return key + "=" + format_value(v); }

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::Strategic: return "strategic";
    case ExperimentKind::Replicator: return "replicator";
    case ExperimentKind::CovariateDag: return "covariate-dag";
    case ExperimentKind::TargetDag: return "target-dag";
    case ExperimentKind::Fico: return "fico";
    case ExperimentKind::Bandit: return "bandit";
    case ExperimentKind::Identity: return "identity";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from(const std::string& name) {
  for (auto k : {ExperimentKind::Strategic, ExperimentKind::Replicator,
                 ExperimentKind::CovariateDag, ExperimentKind::TargetDag, ExperimentKind::Fico,
                 ExperimentKind::Bandit, ExperimentKind::Identity}) {
    if (name == to_string(k)) return k;
  }
  config_error("unknown experiment '" + name + "'");
}

std::vector<UtilityCase> default_utility_sweep() {
  return {
      {"identity", UtilityMatrix{1.0, 0.0, 0.0, 1.0}},
      {"acceptance-bonus", UtilityMatrix{1.5, 0.5, 1.2, 0.8}},
      {"rejection-penalty", UtilityMatrix{1.0, 0.2, 1.0, 0.4}},
      {"qualified-favored", UtilityMatrix{2.0, 1.0, 0.5, 1.0}},
  };
}

void ExperimentConfig::validate() const {
  if (samples < 100) config_error("samples must be >= 100");
  if (steps < 1) config_error("steps must be >= 1");
  if (grid < 2) config_error("grid must hold at least 2 thresholds");
  if (feature_bins < 1) config_error("feature_bins must be >= 1");
  try {
    switch (kind) {
      case ExperimentKind::Strategic:
        if (!(strategic.B > 0.0 && strategic.B < 0.5)) config_error("strategic B must lie in (0, 0.5)");
        if (strategic.bins < 2) config_error("strategic bins must be >= 2");
        break;
      case ExperimentKind::Replicator:
        replicator.validate();
        if (oracle_grid < 2) config_error("oracle_grid must be >= 2");
        if (!(gd.lr > 0.0)) config_error("gd lr must be > 0");
        for (double p : p0_values) {
          if (!(p >= 0.0 && p <= 1.0)) config_error("p0 values must lie in [0,1]");
        }
        for (const auto& u : utilities) u.U.validate();
        break;
      case ExperimentKind::CovariateDag:
      case ExperimentKind::Identity:
        covariate.validate();
        break;
      case ExperimentKind::TargetDag:
        target.validate();
        break;
      case ExperimentKind::Fico:
        fico.validate();
        break;
      case ExperimentKind::Bandit:
        bandit.validate();
        if (!(toy.eps < 1.0) || !(toy.s >= 0.0)) config_error("toy needs eps < 1 and s >= 0");
        break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, "config",
             {"experiment", "seed", "grid", "samples", "steps", "output", "feature_bins",
              "training", "strategic", "replicator", "sweep", "covariate_dag", "target_dag",
              "fico", "bandit"});
  ExperimentConfig cfg;
  if (!root.contains("experiment")) config_error("missing 'experiment'");
  cfg.kind = experiment_kind_from(get_string(root, "experiment", ""));
  if (!root.contains("seed")) config_error("missing 'seed'");
  if (!root.at("seed").is_number_unsigned()) config_error("'seed' must be a nonnegative integer");
  cfg.seed = root.at("seed").get<std::uint64_t>();
  cfg.grid = get_count(root, "grid", cfg.grid);
  cfg.samples = get_count(root, "samples", cfg.samples);
  cfg.steps = get_count(root, "steps", cfg.steps);
  cfg.output = get_string(root, "output", cfg.output);
  cfg.feature_bins = get_count(root, "feature_bins", cfg.feature_bins);

  if (root.contains("training")) {
    const auto& t = root.at("training");
    check_keys(t, "training", {"epochs", "lr"});
    cfg.training.epochs = get_count(t, "epochs", cfg.training.epochs);
    cfg.training.lr = get_number(t, "lr", cfg.training.lr);
  }
  if (root.contains("strategic")) {
    const auto& s = root.at("strategic");
    check_keys(s, "strategic", {"B", "bins", "conditional"});
    cfg.strategic.B = get_number(s, "B", cfg.strategic.B);
    cfg.strategic.bins = get_count(s, "bins", cfg.strategic.bins);
    if (s.contains("conditional")) {
      const auto& c = s.at("conditional");
      check_keys(c, "conditional", {"shape", "slope", "center"});
      const auto shape = get_string(c, "shape", "linear");
      if (shape == "linear") {
        cfg.strategic.eta.shape = LabelConditional::Shape::Linear;
      } else if (shape == "logistic") {
        cfg.strategic.eta.shape = LabelConditional::Shape::Logistic;
      } else {
        config_error("conditional shape must be 'linear' or 'logistic'");
      }
      cfg.strategic.eta.slope = get_number(c, "slope", cfg.strategic.eta.slope);
      cfg.strategic.eta.center = get_number(c, "center", cfg.strategic.eta.center);
    }
  }
  if (root.contains("replicator")) {
    const auto& r = root.at("replicator");
    check_keys(r, "replicator", {"p0", "mu_plus", "mu_minus", "sigma", "bins", "U"});
    const double p0 = get_number(r, "p0", cfg.replicator.p0.p_plus);
    if (!(p0 >= 0.0 && p0 <= 1.0)) config_error("replicator p0 must lie in [0,1]");
    cfg.replicator.p0 = LabelMarginal(p0);
    cfg.replicator.mu_plus = get_number(r, "mu_plus", cfg.replicator.mu_plus);
    cfg.replicator.mu_minus = get_number(r, "mu_minus", cfg.replicator.mu_minus);
    cfg.replicator.sigma = get_number(r, "sigma", cfg.replicator.sigma);
    cfg.replicator.bins = get_count(r, "bins", cfg.replicator.bins);
    if (r.contains("U")) cfg.replicator.U = parse_utility(r.at("U"));
  }
  if (root.contains("sweep")) {
    const auto& s = root.at("sweep");
    check_keys(s, "sweep", {"utilities", "p0", "oracle_grid", "gd"});
    if (s.contains("utilities")) {
      const auto& us = s.at("utilities");
      if (!us.is_array()) config_error("'utilities' must be an array");
      for (const auto& u : us) {
        check_keys(u, "utility case", {"tag", "U"});
        if (!u.contains("U")) config_error("utility case needs 'U'");
        cfg.utilities.push_back({get_string(u, "tag", "case"), parse_utility(u.at("U"))});
      }
    }
    if (s.contains("p0")) {
      const auto& ps = s.at("p0");
      if (!ps.is_array()) config_error("'p0' must be an array");
      for (const auto& p : ps) {
        if (!p.is_number()) config_error("p0 entries must be numbers");
        cfg.p0_values.push_back(p.get<double>());
      }
    }
    cfg.oracle_grid = get_count(s, "oracle_grid", cfg.oracle_grid);
    if (s.contains("gd")) {
      const auto& g = s.at("gd");
      check_keys(g, "gd", {"lr", "iters", "backtracking"});
      cfg.gd.lr = get_number(g, "lr", cfg.gd.lr);
      cfg.gd.iters = get_count(g, "iters", cfg.gd.iters);
      cfg.gd.backtracking = get_bool(g, "backtracking", cfg.gd.backtracking);
    }
  }
  if (root.contains("covariate_dag")) {
    const auto& c = root.at("covariate_dag");
    check_keys(c, "covariate_dag", {"sigma2", "sigma3", "c", "mode"});
    cfg.covariate.sigma2 = get_number(c, "sigma2", cfg.covariate.sigma2);
    cfg.covariate.sigma3 = get_number(c, "sigma3", cfg.covariate.sigma3);
    cfg.covariate.c = get_number(c, "c", cfg.covariate.c);
    cfg.covariate.mode = parse_mode(get_string(c, "mode", mode_name(cfg.covariate.mode)));
  }
  if (root.contains("target_dag")) {
    const auto& t = root.at("target_dag");
    check_keys(t, "target_dag", {"alpha", "mu_pos", "mu_neg", "sigma", "sigma2", "sigma3", "c_hy"});
    cfg.target.alpha = get_number(t, "alpha", cfg.target.alpha);
    cfg.target.mu_pos = get_number(t, "mu_pos", cfg.target.mu_pos);
    cfg.target.mu_neg = get_number(t, "mu_neg", cfg.target.mu_neg);
    cfg.target.sigma = get_number(t, "sigma", cfg.target.sigma);
    cfg.target.sigma2 = get_number(t, "sigma2", cfg.target.sigma2);
    cfg.target.sigma3 = get_number(t, "sigma3", cfg.target.sigma3);
    if (t.contains("c_hy")) cfg.target.c_hy = parse_transition(t.at("c_hy"));
  }
  if (root.contains("fico")) {
    const auto& f = root.at("fico");
    check_keys(f, "fico", {"eps1", "eps2", "sigma", "alpha_D", "alpha_Y", "cdf_path"});
    cfg.fico.eps1 = get_number(f, "eps1", cfg.fico.eps1);
    cfg.fico.eps2 = get_number(f, "eps2", cfg.fico.eps2);
    cfg.fico.sigma = get_number(f, "sigma", cfg.fico.sigma);
    cfg.fico.alpha_D = get_number(f, "alpha_D", cfg.fico.alpha_D);
    cfg.fico.alpha_Y = get_number(f, "alpha_Y", cfg.fico.alpha_Y);
    if (f.contains("cdf_path")) cfg.cdf_path = get_string(f, "cdf_path", "");
  }
  if (root.contains("bandit")) {
    const auto& b = root.at("bandit");
    check_keys(b, "bandit", {"dim", "delta", "eta", "T", "theta_radius", "n_t", "mu0", "eps", "s"});
    cfg.bandit.dim = get_count(b, "dim", cfg.bandit.dim);
    cfg.bandit.delta = get_number(b, "delta", cfg.bandit.delta);
    cfg.bandit.eta = get_number(b, "eta", cfg.bandit.eta);
    cfg.bandit.T = get_count(b, "T", cfg.bandit.T);
    cfg.bandit.theta_radius = get_number(b, "theta_radius", cfg.bandit.theta_radius);
    cfg.bandit.n_t = get_count(b, "n_t", cfg.bandit.n_t);
    cfg.toy.mu0 = get_number(b, "mu0", cfg.toy.mu0);
    cfg.toy.eps = get_number(b, "eps", cfg.toy.eps);
    cfg.toy.s = get_number(b, "s", cfg.toy.s);
  }
  if (cfg.kind == ExperimentKind::Replicator) {
    if (cfg.utilities.empty()) cfg.utilities = default_utility_sweep();
    if (cfg.p0_values.empty()) cfg.p0_values = {0.2, 0.35, 0.5, 0.65, 0.8};
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<std::string> provenance(const ExperimentConfig& cfg) {
  std::vector<std::string> p;
  p.push_back(std::string("experiment=") + to_string(cfg.kind));
  p.push_back("seed=" + std::to_string(cfg.seed));
  p.push_back("grid=" + std::to_string(cfg.grid));
  switch (cfg.kind) {
    case ExperimentKind::Strategic:
      p.push_back(kv("B", cfg.strategic.B));
      p.push_back("bins=" + std::to_string(cfg.strategic.bins));
      p.push_back(std::string("conditional=") +
                  (cfg.strategic.eta.shape == LabelConditional::Shape::Linear ? "linear" : "logistic"));
      if (cfg.strategic.eta.shape == LabelConditional::Shape::Logistic) {
        p.push_back(kv("conditional_slope", cfg.strategic.eta.slope));
        p.push_back(kv("conditional_center", cfg.strategic.eta.center));
      }
      p.push_back("grid_range=[B,1-B]");
      break;
    case ExperimentKind::Replicator: {
      const auto& r = cfg.replicator;
      p.push_back(kv("p0", r.p0.p_plus));
      p.push_back(kv("mu_plus", r.mu_plus));
      p.push_back(kv("mu_minus", r.mu_minus));
      p.push_back(kv("sigma", r.sigma));
      p.push_back("bins=" + std::to_string(r.bins));
      p.push_back("U=[[" + format_value(r.U.pp) + "," + format_value(r.U.pm) + "],[" +
                  format_value(r.U.mp) + "," + format_value(r.U.mm) + "]]");
      p.push_back("oracle_grid=" + std::to_string(cfg.oracle_grid));
      p.push_back(kv("gd_lr", cfg.gd.lr));
      p.push_back("gd_iters=" + std::to_string(cfg.gd.iters));
      p.push_back(std::string("gd_backtracking=") + (cfg.gd.backtracking ? "true" : "false"));
      p.push_back("gd_step=1e-05");
      p.push_back("gd_starts=theta_source,0,0.25,0.5,0.75,1");
      break;
    }
    case ExperimentKind::CovariateDag:
    case ExperimentKind::Identity:
      p.push_back("samples=" + std::to_string(cfg.samples));
      p.push_back(kv("sigma2", cfg.covariate.sigma2));
      p.push_back(kv("sigma3", cfg.covariate.sigma3));
      p.push_back(kv("c", cfg.covariate.c));
      p.push_back(std::string("adapt_mode=") + mode_name(cfg.covariate.mode));
      p.push_back("feature_bins=" + std::to_string(cfg.feature_bins));
      p.push_back("train_epochs=" + std::to_string(cfg.training.epochs));
      p.push_back(kv("train_lr", cfg.training.lr));
      break;
    case ExperimentKind::TargetDag: {
      const auto& t = cfg.target;
      p.push_back("samples=" + std::to_string(cfg.samples));
      p.push_back(kv("alpha", t.alpha));
      p.push_back(kv("mu_pos", t.mu_pos));
      p.push_back(kv("mu_neg", t.mu_neg));
      p.push_back(kv("sigma", t.sigma));
      p.push_back(kv("sigma2", t.sigma2));
      p.push_back(kv("sigma3", t.sigma3));
      p.push_back("c_hy=[[" + format_value(t.c_hy[0][0]) + "," + format_value(t.c_hy[0][1]) +
                  "],[" + format_value(t.c_hy[1][0]) + "," + format_value(t.c_hy[1][1]) + "]]");
      p.push_back("feature_bins=" + std::to_string(cfg.feature_bins));
      p.push_back("train_epochs=" + std::to_string(cfg.training.epochs));
      p.push_back(kv("train_lr", cfg.training.lr));
      break;
    }
    case ExperimentKind::Fico:
      p.push_back("samples=" + std::to_string(cfg.samples));
      p.push_back("steps=" + std::to_string(cfg.steps));
      p.push_back(kv("eps1", cfg.fico.eps1));
      p.push_back(kv("eps2", cfg.fico.eps2));
      p.push_back(kv("sigma", cfg.fico.sigma));
      p.push_back(kv("alpha_D", cfg.fico.alpha_D));
      p.push_back(kv("alpha_Y", cfg.fico.alpha_Y));
      p.push_back("group_cdf=" + (cfg.cdf_path ? *cfg.cdf_path : std::string("synthetic-beta")));
      p.push_back("feature_bins=" + std::to_string(cfg.feature_bins));
      p.push_back("train_epochs=" + std::to_string(cfg.training.epochs));
      p.push_back(kv("train_lr", cfg.training.lr));
      break;
    case ExperimentKind::Bandit:
      p.push_back("dim=" + std::to_string(cfg.bandit.dim));
      p.push_back(kv("delta", cfg.bandit.delta));
      p.push_back(kv("eta", cfg.bandit.eta));
      p.push_back("T=" + std::to_string(cfg.bandit.T));
      p.push_back(kv("theta_radius", cfg.bandit.theta_radius));
      p.push_back("n_t=" + std::to_string(cfg.bandit.n_t));
      p.push_back(kv("toy_mu0", cfg.toy.mu0));
      p.push_back(kv("toy_eps", cfg.toy.eps));
      p.push_back(kv("toy_s", cfg.toy.s));
      break;
  }
  return p;
}

InvariantStatus check_record(const StepRecord& r, double tolerance) {
  InvariantStatus s;
  auto fail = [&](const std::string& what) {
    s.ok = false;
    s.violations.push_back("step " + std::to_string(r.k) + ": " + what);
  };
  if (!(r.diff >= -tolerance)) fail("diff " + format_value(r.diff) + " < 0");
  if (!(r.diff <= r.ub + tolerance)) {
    fail("diff " + format_value(r.diff) + " > ub " + format_value(r.ub));
  }
  if (!(r.lb <= r.max_pair + tolerance)) {
    fail("lb " + format_value(r.lb) + " > max " + format_value(r.max_pair));
  }
  return s;
}

// ---------------------------------------------------------------------------

HypothesisGrid strategic_grid(const StrategicConfig& cfg, std::size_t count) {
  // tau - B and tau + B must stay inside [0, 1].
  return HypothesisGrid::uniform(count, cfg.B, 1.0 - cfg.B, ThresholdMode::Raw);
}

namespace {

void copy_report(const BoundReport& rep, StepRecord& rec) {
  rec.diff = rep.diff;
  rec.max_pair = rep.max_pair;
  rec.lb = rep.lb_tradeoff;
  rec.components.set("ub_source_induced", rep.ub_source_induced);
  rec.components.set("ub_induced_optimal", rep.ub_induced_optimal);
  rec.components.set("lb_tradeoff_features", rep.lb_tradeoff_features);
  for (const auto& [name, value] : rep.components.items()) rec.components.set(name, value);
}

struct SampledSetup {
  EmpiricalDataset source;
  HypothesisGrid grid;
  FeaturePartition partition;
};

EmpiricalDataset sample_source(const ExperimentConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, 0));
  switch (cfg.kind) {
    case ExperimentKind::CovariateDag:
    case ExperimentKind::Identity:
      return covariate_dag_sample(cfg.samples, cfg.covariate, rng);
    case ExperimentKind::TargetDag:
      return target_dag_sample(cfg.samples, cfg.target, rng);
    default:
      config_error("experiment has no sampled source");
  }
}

FeaturePartition partition_for(const ExperimentConfig& cfg) {
  FeaturePartition part;
  part.coordinate = 0;
  part.bins = cfg.feature_bins;
  switch (cfg.kind) {
    case ExperimentKind::CovariateDag:
    case ExperimentKind::Identity:
      part.lo = -1.0 - 2.0 * cfg.covariate.c;
      part.hi = 1.0;
      break;
    case ExperimentKind::Fico:
      part.lo = -cfg.fico.eps1;
      part.hi = 1.5 + cfg.fico.eps1;
      break;
    default:
      part.lo = 0.0;
      part.hi = 1.0;
  }
  return part;
}

std::unique_ptr<SampledShiftModel> sampled_model(const ExperimentConfig& cfg,
                                                 EmpiricalDataset source) {
  switch (cfg.kind) {
    case ExperimentKind::CovariateDag:
      return std::make_unique<CovariateDagShift>(std::move(source), cfg.covariate);
    case ExperimentKind::TargetDag:
      return std::make_unique<TargetDagShift>(std::move(source), cfg.target);
    case ExperimentKind::Identity:
      return std::make_unique<IdentitySampledShift>(std::move(source));
    default:
      config_error("experiment has no sampled shift model");
  }
}

// Target-shift quantities added to sampled and replicator records.
void add_target_terms(StepRecord& rec, double p_src, double p_hS, double p_hT, const Rates& rS,
                      const Rates& rT, double err_hS, double err_hT) {
  const TargetShiftTerms t{p_src, p_hS, p_hT, rS, rT};
  rec.components.set("ts_ub", ts_ub(t));
  rec.components.set("ts_lb_hT", ts_lb(p_src, p_hT, rT.tpr, rT.fpr));
  rec.components.set("delta_p", std::abs(p_hS - p_hT));
  double prop = kNaN;
  try {
    prop = replicator_prop_bound(p_src, err_hS, err_hT, rS.tpr, rT.tpr);
  } catch (const Error&) {
  }
  rec.components.set("replicator_prop_bound", prop);
}

Rates rates_or_nan(const ThresholdClassifier& h, const EmpiricalDataset& d) {
  const auto prof = profile(h, d);
  if (!prof.has_both_classes()) return Rates{kNaN, kNaN};
  return Rates{prof.tpr(0), prof.fpr(0)};
}

double weight_variance_or_nan(const EmpiricalDataset& source, const EmpiricalDataset& induced,
                              const FeaturePartition& part) {
  try {
    const auto fs = histogram(source, part.coordinate, part.lo, part.hi, part.bins);
    const auto fi = histogram(induced, part.coordinate, part.lo, part.hi, part.bins);
    return weight_variance(importance_weights(fs, fi), fs);
  } catch (const Error&) {
    return kNaN;
  }
}

StepRecord strategic_record(const ExperimentConfig& cfg) {
  const StrategicShift model(cfg.strategic);
  const auto grid = strategic_grid(cfg.strategic, cfg.grid);
  const auto& src = model.source();
  const auto hS = source_optimal(grid, src);
  const auto hT = induced_optimal(grid, model);
  const auto dS = model.induce(hS);
  const auto dT = model.induce(hT);
  const auto rep = assemble_report(hS, hT, src, dS, dT, grid);
  StepRecord rec;
  copy_report(rep, rec);
  const auto wS = importance_weights(src.density, dS.density);
  const auto wT = importance_weights(src.density, dT.density);
  const double vS = weight_variance(wS, src.density);
  const double vT = weight_variance(wT, src.density);
  const double err_s_hT = rep.components.get("err_source_hT");
  rec.ub = strategic_ub(cfg.strategic.B, err_s_hT);
  rec.components.set("B", cfg.strategic.B);
  rec.components.set("var_omega_hS", vS);
  rec.components.set("var_omega_hT", vT);
  rec.components.set("cs_ub", cs_ub_suboptimality(err_s_hT, vS, vT));
  rec.components.set("strategic_ub", rec.ub);
  return rec;
}

StepRecord replicator_record(const ExperimentConfig& cfg) {
  const ReplicatorShift model(cfg.replicator);
  const auto grid = HypothesisGrid::uniform(cfg.grid, 0.0, 1.0, ThresholdMode::Raw);
  const auto& src = model.source();
  const auto hS = source_optimal(grid, src);
  const auto hT = induced_optimal(grid, model);
  const auto dS = model.induce(hS);
  const auto dT = model.induce(hT);
  const auto rep = assemble_report(hS, hT, src, dS, dT, grid);
  StepRecord rec;
  copy_report(rep, rec);
  const double p = label_marginal(src).p_plus;
  const double pS = label_marginal(dS).p_plus;
  const double pT = label_marginal(dT).p_plus;
  add_target_terms(rec, p, pS, pT, rates(hS, src), rates(hT, src),
                   rep.components.get("err_source_hS"), rep.components.get("err_source_hT"));
  rec.ub = rec.components.get("ts_ub");
  return rec;
}

StepRecord sampled_record(const ExperimentConfig& cfg) {
  auto source = sample_source(cfg);
  const auto scorer = train_base_scorer(source, cfg.training);
  const auto grid = HypothesisGrid::uniform(cfg.grid, 0.0, 1.0, ThresholdMode::Squashed, scorer);
  const auto part = partition_for(cfg);
  const auto model = sampled_model(cfg, std::move(source));
  const auto& src = model->source();
  const std::uint64_t induce_seed = derive_seed(cfg.seed, 1);
  const auto hS = source_optimal(grid, src);
  const auto hT = induced_optimal(grid, *model, induce_seed);
  const auto dS = model->induce(hS, induce_seed);
  const auto dT = model->induce(hT, induce_seed);
  const auto rep = assemble_report(hS, hT, src, dS, dT, grid, part);
  StepRecord rec;
  copy_report(rep, rec);
  rec.ub = rep.ub_induced_optimal;
  const double err_s_hT = rep.components.get("err_source_hT");
  if (cfg.kind == ExperimentKind::TargetDag) {
    add_target_terms(rec, label_marginal(src).p_plus, label_marginal(dS).p_plus,
                     label_marginal(dT).p_plus, rates_or_nan(hS, src), rates_or_nan(hT, src),
                     rep.components.get("err_source_hS"), err_s_hT);
  } else {
    const double vS = weight_variance_or_nan(src, dS, part);
    const double vT = weight_variance_or_nan(src, dT, part);
    rec.components.set("var_omega_x1_hS", vS);
    rec.components.set("var_omega_x1_hT", vT);
    rec.components.set("cs_ub_x1", std::isnan(vS) || std::isnan(vT)
                                       ? kNaN
                                       : cs_ub_suboptimality(err_s_hT, vS, vT));
  }
  return rec;
}

}  // namespace

std::vector<StepRecord> run_shift_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case ExperimentKind::Strategic: return {strategic_record(cfg)};
    case ExperimentKind::Replicator: return {replicator_record(cfg)};
    case ExperimentKind::CovariateDag:
    case ExperimentKind::TargetDag:
    case ExperimentKind::Identity: return {sampled_record(cfg)};
    default: config_error(std::string("'") + to_string(cfg.kind) + "' is not a shift experiment");
  }
}

// ---------------------------------------------------------------------------

namespace {

struct FicoState {
  std::vector<double> Q;
  std::vector<int> A;
  std::vector<std::string> group_names;
};

FicoState fico_initial_state(const ExperimentConfig& cfg) {
  const auto groups = cfg.cdf_path ? ingest_group_cdf(*cfg.cdf_path)
                                   : parse_group_cdf(synthetic_group_cdf_csv());
  const std::size_t G = groups.size();
  const std::size_t per_group = cfg.samples / G;
  if (per_group == 0) config_error("samples must be at least the number of groups");
  FicoState st;
  Rng rng(derive_seed(cfg.seed, 0));
  for (std::size_t g = 0; g < G; ++g) {
    st.group_names.push_back(groups[g].name);
    for (std::size_t i = 0; i < per_group; ++i) {
      double q = 0.0;
      while (!(q > 0.0)) q = sample_from_density(groups[g].density, rng);
      st.Q.push_back(std::min(q, 1.0));
      st.A.push_back(static_cast<int>(g));
    }
  }
  return st;
}

std::vector<FicoNoise> fico_step_noise(const ExperimentConfig& cfg, std::size_t step,
                                       std::size_t n) {
  Rng rng(derive_seed(cfg.seed, 1000 + step));
  std::vector<FicoNoise> noise(n);
  for (auto& z : noise) z = draw_fico_noise(rng);
  return noise;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<StepRecord> run_fico_sequence(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ExperimentKind::Fico) config_error("run_fico_sequence needs a fico config");
  auto st = fico_initial_state(cfg);
  const auto part = partition_for(cfg);
  std::vector<StepRecord> out;
  auto noise_now = fico_step_noise(cfg, 0, st.Q.size());
  for (std::size_t k = 0; k < cfg.steps; ++k) {
    auto noise_next = fico_step_noise(cfg, k + 1, st.Q.size());
    const FicoStepShift model(st.Q, st.A, cfg.fico, noise_now, noise_next);
    const auto& src = model.source();
    const auto scorer = train_base_scorer(src, cfg.training);
    const auto grid = HypothesisGrid::uniform(cfg.grid, 0.0, 1.0, ThresholdMode::Squashed, scorer);
    const auto hS = source_optimal(grid, src);
    const auto hT = induced_optimal(grid, model, 0);
    const auto dS = model.induce(hS, 0);
    const auto dT = model.induce(hT, 0);
    const auto rep = assemble_report(hS, hT, src, dS, dT, grid, part);
    StepRecord rec;
    rec.k = k;
    copy_report(rep, rec);
    rec.ub = rep.ub_induced_optimal;
    rec.components.set("mean_Q", mean(st.Q));
    const double vS = weight_variance_or_nan(src, dS, part);
    const double vT = weight_variance_or_nan(src, dT, part);
    rec.components.set("var_omega_x1_hS", vS);
    rec.components.set("var_omega_x1_hT", vT);
    rec.components.set("cs_ub_x1", std::isnan(vS) || std::isnan(vT)
                                       ? kNaN
                                       : cs_ub_suboptimality(rep.components.get("err_source_hT"),
                                                             vS, vT));
    out.push_back(std::move(rec));
    // deploy h_S*
    st.Q = model.next_scores(hS);
    noise_now = std::move(noise_next);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ReplicatorRow> run_replicator_improvement(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.utilities.empty() || cfg.p0_values.empty()) {
    config_error("replicator sweep needs at least one utility and one p0");
  }
  std::vector<ReplicatorRow> rows;
  const std::size_t N = cfg.oracle_grid;
  for (const auto& u : cfg.utilities) {
    for (double p0 : cfg.p0_values) {
      ReplicatorConfig rc = cfg.replicator;
      rc.U = u.U;
      rc.p0 = LabelMarginal(p0);
      std::vector<double> src_risk(N);
      std::vector<double> ind_risk(N);
      for (std::size_t i = 0; i < N; ++i) {
        const double th = static_cast<double>(i) / static_cast<double>(N - 1);
        const double tpr = 1.0 - truncated_normal_cdf(th, rc.mu_plus, rc.sigma);
        const double fpr = 1.0 - truncated_normal_cdf(th, rc.mu_minus, rc.sigma);
        src_risk[i] = 1.0 - (p0 * tpr + (1.0 - p0) * (1.0 - fpr));
        ind_risk[i] = replicator_closed_form_risk(th, rc);
      }
      const std::size_t is = argmin_smallest(src_risk);
      const std::size_t io = argmin_smallest(ind_risk);
      ReplicatorRow row{};
      row.tag = u.tag;
      row.p0 = p0;
      row.theta_source = static_cast<double>(is) / static_cast<double>(N - 1);
      row.theta_oracle = static_cast<double>(io) / static_cast<double>(N - 1);
      row.theta_gd = replicator_gd_multistart(
          rc, {row.theta_source, 0.0, 0.25, 0.5, 0.75, 1.0}, cfg.gd);
      row.source_accuracy = 1.0 - src_risk[is];
      row.induced_risk_source = ind_risk[is];
      row.induced_risk_gd = replicator_closed_form_risk(row.theta_gd, rc);
      row.induced_risk_oracle = ind_risk[io];
      row.improvement = improvement_metric(row.induced_risk_source, row.induced_risk_gd);
      rows.push_back(row);
    }
  }
  return rows;
}

BanditResult run_bandit(const ExperimentConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 0));
  return bandit_gd(cfg.toy.problem(), cfg.bandit, rng);
}

// ---------------------------------------------------------------------------

namespace {

template <DomainLike D, class InduceFn, class FeatureTvFn>
BoundSweep sweep_over(const HypothesisGrid& grid, const D& source, InduceFn induce,
                      FeatureTvFn feature_tv_of, bool target_shift) {
  const auto p_src = profile(grid, source);
  const double p = label_marginal(source).p_plus;
  std::vector<D> induced;
  induced.reserve(grid.size());
  std::vector<double> ind_risk(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    induced.push_back(induce(grid.at(j)));
    ind_risk[j] = risk(grid.at(j), induced.back());
  }
  const std::size_t jT = argmin_smallest(ind_risk);
  const auto p_T = profile(grid, induced[jT]);
  BoundSweep sweep;
  sweep.tau_T = grid.tau(jT);
  sweep.n_source = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto h = grid.at(j);
    const auto& dh = induced[j];
    const auto p_h = profile(grid, dh);
    SweepRow r{};
    r.tau = grid.tau(j);
    r.err_source = p_src.error(j);
    r.err_induced = ind_risk[j];
    const auto ce_s = combined_errors(p_src, p_h, r.err_source, r.err_induced);
    r.ub_source_induced = r.err_source + ce_s.lambda_min + 0.5 * h_divergence(p_src, p_h);
    r.gap_to_optimal = r.err_induced - ind_risk[jT];
    const auto ce_t = combined_errors(p_h, p_T, r.err_induced, p_T.error(j));
    r.ub_induced_optimal =
        0.5 * (ce_t.lambda_min + ce_t.lambda_max_of_h) + 0.5 * h_divergence(p_T, p_h);
    r.max_error = std::max(r.err_source, r.err_induced);
    const double tv_y = std::abs(p - p_h.p_plus);
    r.tv_predictions = std::abs(p_src.accept(j) - p_h.accept(j));
    r.tv_features = feature_tv_of(h, dh);
    r.lb_tradeoff = lb_from_tv(tv_y, r.tv_predictions);
    r.lb_tradeoff_features = lb_from_tv(tv_y, r.tv_features);
    r.ts_lb = kNaN;
    if (target_shift && p_src.has_both_classes()) {
      r.ts_lb = ts_lb(p, p_h.p_plus, p_src.tpr(j), p_src.fpr(j));
    }
    sweep.rows.push_back(r);
  }
  return sweep;
}

}  // namespace

BoundSweep run_bound_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case ExperimentKind::Strategic: {
      const StrategicShift model(cfg.strategic);
      const auto grid = strategic_grid(cfg.strategic, cfg.grid);
      return sweep_over(
          grid, model.source(), [&](const ThresholdClassifier& h) { return model.induce(h); },
          [&](const ThresholdClassifier&, const BinnedDomain& d) {
            return feature_tv(model.source(), d);
          },
          false);
    }
    case ExperimentKind::Replicator: {
      const ReplicatorShift model(cfg.replicator);
      const auto grid = HypothesisGrid::uniform(cfg.grid, 0.0, 1.0, ThresholdMode::Raw);
      return sweep_over(
          grid, model.source(), [&](const ThresholdClassifier& h) { return model.induce(h); },
          [&](const ThresholdClassifier&, const BinnedDomain& d) {
            return feature_tv(model.source(), d);
          },
          true);
    }
    case ExperimentKind::CovariateDag:
    case ExperimentKind::TargetDag:
    case ExperimentKind::Identity: {
      auto source = sample_source(cfg);
      const auto scorer = train_base_scorer(source, cfg.training);
      const auto grid =
          HypothesisGrid::uniform(cfg.grid, 0.0, 1.0, ThresholdMode::Squashed, scorer);
      const auto part = partition_for(cfg);
      const auto model = sampled_model(cfg, std::move(source));
      const std::uint64_t seed = derive_seed(cfg.seed, 1);
      auto sweep = sweep_over(
          grid, model->source(),
          [&](const ThresholdClassifier& h) { return model->induce(h, seed); },
          [&](const ThresholdClassifier& h, const EmpiricalDataset& d) {
            return feature_tv(model->source(), d, part, h);
          },
          cfg.kind == ExperimentKind::TargetDag);
      sweep.n_source = model->source().size();
      return sweep;
    }
    case ExperimentKind::Fico: {
      const auto st = fico_initial_state(cfg);
      const FicoStepShift model(st.Q, st.A, cfg.fico, fico_step_noise(cfg, 0, st.Q.size()),
                                fico_step_noise(cfg, 1, st.Q.size()));
      const auto scorer = train_base_scorer(model.source(), cfg.training);
      const auto grid =
          HypothesisGrid::uniform(cfg.grid, 0.0, 1.0, ThresholdMode::Squashed, scorer);
      const auto part = partition_for(cfg);
      auto sweep = sweep_over(
          grid, model.source(), [&](const ThresholdClassifier& h) { return model.induce(h, 0); },
          [&](const ThresholdClassifier& h, const EmpiricalDataset& d) {
            return feature_tv(model.source(), d, part, h);
          },
          false);
      sweep.n_source = model.source().size();
      return sweep;
    }
    case ExperimentKind::Bandit:
      break;
  }
  config_error("bandit experiments have no bound sweep");
}

InvariantStatus check_sweep(const BoundSweep& sweep, double tolerance) {
  InvariantStatus s;
  for (const auto& r : sweep.rows) {
    auto fail = [&](const std::string& what) {
      s.ok = false;
      s.violations.push_back("tau " + format_value(r.tau) + ": " + what);
    };
    if (!(r.err_induced <= r.ub_source_induced + tolerance)) fail("induced risk above source bound");
    if (!(r.gap_to_optimal <= r.ub_induced_optimal + tolerance)) fail("gap above optimal bound");
    if (!(r.lb_tradeoff <= r.max_error + tolerance)) fail("tradeoff bound above max error");
    if (!(r.lb_tradeoff_features <= r.max_error + tolerance)) fail("feature bound above max error");
    if (!(r.lb_tradeoff_features <= r.lb_tradeoff + tolerance)) fail("feature bound above tradeoff bound");
    if (!std::isnan(r.ts_lb) && !(r.ts_lb <= r.max_error + tolerance)) fail("label-shift bound above max error");
  }
  return s;
}

InvariantStatus check_replicator(const std::vector<ReplicatorRow>& rows, double tolerance) {
  InvariantStatus s;
  for (const auto& r : rows) {
    if (!(r.improvement >= -tolerance)) {
      s.ok = false;
      s.violations.push_back(r.tag + " p0=" + format_value(r.p0) + ": negative improvement " +
                             format_value(r.improvement));
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

CsvTable records_csv(const ExperimentConfig& cfg, const std::vector<StepRecord>& records) {
  std::vector<std::string> header{"k", "diff", "max_pair", "ub", "lb"};
  if (!records.empty()) {
    for (const auto& item : records.front().components.items()) header.push_back(item.first);
  }
  CsvTable table(header);
  for (const auto& line : provenance(cfg)) table.comment(line);
  for (const auto& r : records) {
    std::vector<double> v{static_cast<double>(r.k), r.diff, r.max_pair, r.ub, r.lb};
    for (std::size_t c = 5; c < header.size(); ++c) v.push_back(r.components.get(header[c]));
    table.row(v);
  }
  return table;
}

CsvTable replicator_csv(const ExperimentConfig& cfg, const std::vector<ReplicatorRow>& rows) {
  CsvTable table({"utility", "p0", "theta_source", "theta_gd", "theta_oracle", "source_accuracy",
                  "induced_risk_source", "induced_risk_gd", "induced_risk_oracle", "improvement"});
  for (const auto& line : provenance(cfg)) table.comment(line);
  for (const auto& u : cfg.utilities) {
    table.comment("utility " + u.tag + "=[[" + format_value(u.U.pp) + "," + format_value(u.U.pm) +
                  "],[" + format_value(u.U.mp) + "," + format_value(u.U.mm) + "]]");
  }
  for (const auto& r : rows) {
    table.row(std::vector<std::string>{
        r.tag, format_value(r.p0), format_value(r.theta_source), format_value(r.theta_gd),
        format_value(r.theta_oracle), format_value(r.source_accuracy),
        format_value(r.induced_risk_source), format_value(r.induced_risk_gd),
        format_value(r.induced_risk_oracle), format_value(r.improvement)});
  }
  return table;
}

CsvTable bandit_csv(const ExperimentConfig& cfg, const BanditResult& result) {
  CsvTable table = bandit_trace_csv(result);
  CsvTable out(table.header());
  for (const auto& line : provenance(cfg)) out.comment(line);
  std::string theta = "final_theta=";
  for (std::size_t i = 0; i < result.theta.size(); ++i) {
    if (i) theta += ' ';
    theta += format_value(result.theta[i]);
  }
  out.comment(theta);
  out.comment("toy_minimum=" + format_value(cfg.toy.minimum(cfg.bandit.dim)));
  for (const auto& r : result.trace) {
    out.row(std::vector<double>{static_cast<double>(r.round), r.ir_estimate, r.theta_norm});
  }
  return out;
}

CsvTable sweep_csv(const ExperimentConfig& cfg, const BoundSweep& sweep) {
  CsvTable table({"tau", "err_source", "err_induced", "ub_source_induced", "gap_to_optimal",
                  "ub_induced_optimal", "max_error", "lb_tradeoff", "lb_tradeoff_features",
                  "tv_predictions", "tv_features", "ts_lb"});
  for (const auto& line : provenance(cfg)) table.comment(line);
  table.comment("tau_T=" + format_value(sweep.tau_T));
  for (const auto& r : sweep.rows) {
    table.row(std::vector<double>{r.tau, r.err_source, r.err_induced, r.ub_source_induced,
                                  r.gap_to_optimal, r.ub_induced_optimal, r.max_error,
                                  r.lb_tradeoff, r.lb_tradeoff_features, r.tv_predictions,
                                  r.tv_features, r.ts_lb});
  }
  return table;
}

}  // namespace ida
