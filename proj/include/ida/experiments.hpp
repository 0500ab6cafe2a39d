#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ida/bounds.hpp"
#include "ida/csv.hpp"
#include "ida/optimizers.hpp"
#include "ida/shift_models.hpp"

namespace ida {

enum class ExperimentKind { Strategic, Replicator, CovariateDag, TargetDag, Fico, Bandit, Identity };

const char* to_string(ExperimentKind kind) noexcept;
ExperimentKind experiment_kind_from(const std::string& name);  // ConfigError if unknown

struct UtilityCase {
  std::string tag;
  UtilityMatrix U;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Strategic;
  std::uint64_t seed = 0;
  std::size_t grid = kDefaultGridSize;
  std::size_t samples = 40000;
  std::size_t steps = 15;
  std::string output;

  StrategicConfig strategic{};
  ReplicatorConfig replicator{};
  CovariateDagConfig covariate{};
  TargetDagConfig target{};
  FicoConfig fico{};
  std::optional<std::string> cdf_path;
  TrainingOptions training{};
  std::size_t feature_bins = 200;

  // replicator sweep
  std::vector<UtilityCase> utilities;
  std::vector<double> p0_values;
  std::size_t oracle_grid = 2001;
  GdOptions gd{};

  BanditConfig bandit{};
  QuadraticToy toy{};

  void validate() const;  // ConfigError on violations
};

// JSON with a top-level "experiment" discriminator. Missing "seed" is a
// ConfigError; every other field has a default.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Parameter echo for '#' provenance lines.
std::vector<std::string> provenance(const ExperimentConfig& cfg);

struct StepRecord {
  std::size_t k = 0;
  double diff = 0.0;
  double max_pair = 0.0;
  double ub = 0.0;
  double lb = 0.0;
  NamedValues components;
};

struct InvariantStatus {
  bool ok = true;
  std::vector<std::string> violations;
};

InvariantStatus check_record(const StepRecord& r, double tolerance = kBoundTolerance);

std::vector<StepRecord> run_shift_experiment(const ExperimentConfig& cfg);
std::vector<StepRecord> run_fico_sequence(const ExperimentConfig& cfg);

struct ReplicatorRow {
  std::string tag;
  double p0;
  double theta_source;
  double theta_gd;
  double theta_oracle;
  double source_accuracy;       // 1 - err_S(h_S) on the source
  double induced_risk_source;   // on D(h_S)
  double induced_risk_gd;       // on D(h_gd)
  double induced_risk_oracle;   // grid minimum
  double improvement;
};

std::vector<ReplicatorRow> run_replicator_improvement(const ExperimentConfig& cfg);
BanditResult run_bandit(const ExperimentConfig& cfg);

// Every grid classifier checked against the general bounds.
struct SweepRow {
  double tau;
  double err_source;
  double err_induced;
  double ub_source_induced;
  double gap_to_optimal;  // err_{D(h)}(h) - err_{D(h_T)}(h_T)
  double ub_induced_optimal;
  double max_error;       // max(err_S(h), err_{D(h)}(h))
  double lb_tradeoff;
  double lb_tradeoff_features;
  double tv_predictions;
  double tv_features;
  double ts_lb;           // nan outside target-shift models
};

struct BoundSweep {
  std::vector<SweepRow> rows;
  double tau_T;
  std::size_t n_source;  // 0 for binned laws
};

BoundSweep run_bound_sweep(const ExperimentConfig& cfg);

CsvTable records_csv(const ExperimentConfig& cfg, const std::vector<StepRecord>& records);
CsvTable replicator_csv(const ExperimentConfig& cfg, const std::vector<ReplicatorRow>& rows);
CsvTable bandit_csv(const ExperimentConfig& cfg, const BanditResult& result);
CsvTable sweep_csv(const ExperimentConfig& cfg, const BoundSweep& sweep);

InvariantStatus check_sweep(const BoundSweep& sweep, double tolerance = kBoundTolerance);
InvariantStatus check_replicator(const std::vector<ReplicatorRow>& rows,
                                 double tolerance = kBoundTolerance);

// Shared setup, exposed for tests.
HypothesisGrid strategic_grid(const StrategicConfig& cfg, std::size_t count);
std::vector<UtilityCase> default_utility_sweep();

}  // namespace ida
