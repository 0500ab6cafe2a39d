#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ida/classifiers.hpp"
#include "ida/csv.hpp"
#include "ida/dataset.hpp"
#include "ida/distributions.hpp"
#include "ida/shift_models.hpp"

namespace ida {

// Smallest index whose value is within 1e-12 of the minimum.
std::size_t argmin_smallest(const std::vector<double>& values);

ThresholdClassifier source_optimal(const HypothesisGrid& grid, const EmpiricalDataset& source);
ThresholdClassifier source_optimal(const HypothesisGrid& grid, const BinnedDomain& source);

struct InducedSearch {
  std::size_t index;                // argmin position in the grid
  std::vector<double> induced_risk; // err_{D(h_j)}(h_j) for every grid entry
};

InducedSearch induced_search(const HypothesisGrid& grid, const BinnedShiftModel& model);
// Every candidate is induced with the same seed (common random numbers).
InducedSearch induced_search(const HypothesisGrid& grid, const SampledShiftModel& model,
                             std::uint64_t seed);

ThresholdClassifier induced_optimal(const HypothesisGrid& grid, const BinnedShiftModel& model);
ThresholdClassifier induced_optimal(const HypothesisGrid& grid, const SampledShiftModel& model,
                                    std::uint64_t seed);

// Induced risk of the raw threshold theta under replicator dynamics with the
// continuous truncated-Gaussian class conditionals.
double replicator_closed_form_risk(double theta, const ReplicatorConfig& cfg);
double replicator_risk_gradient(double theta, const ReplicatorConfig& cfg, double step = 1e-5);

struct GdOptions {
  double lr = 0.05;
  std::size_t iters = 500;
  bool backtracking = true;  // halve lr and stay put when a step raises the risk
};

struct GdTrace {
  std::vector<double> theta;
  std::vector<double> risk;
};

double replicator_gd(const ReplicatorConfig& cfg, double theta0, const GdOptions& options = {},
                     GdTrace* trace = nullptr);

// replicator_gd from every start; the lowest final risk wins, earliest start on ties.
double replicator_gd_multistart(const ReplicatorConfig& cfg, const std::vector<double>& starts,
                                const GdOptions& options = {});

struct BanditConfig {
  std::size_t dim = 1;
  double delta = 0.1;
  double eta = 0.01;
  std::size_t T = 2000;
  double theta_radius = 5.0;
  std::size_t n_t = 64;

  void validate() const;
};

using Vector = std::vector<double>;

struct PerformativeProblem {
  std::function<double(const Vector& theta, const Vector& z)> loss;
  std::function<std::vector<Vector>(const Vector& theta, std::size_t count, Rng& rng)> sampler;
};

struct BanditTraceRow {
  std::size_t round;
  double ir_estimate;  // mean loss at the probe point
  double theta_norm;   // after the update
};

struct BanditResult {
  Vector theta;
  std::vector<BanditTraceRow> trace;
};

// One-point bandit gradient descent from theta = 0.
BanditResult bandit_gd(const PerformativeProblem& problem, const BanditConfig& cfg, Rng& rng);

CsvTable bandit_trace_csv(const BanditResult& result);
CsvTable gd_trace_csv(const GdTrace& trace);

// Location-shift quadratic: z ~ N(mu0 + eps theta, s^2 I), loss |theta - z|^2.
struct QuadraticToy {
  double mu0 = 1.0;
  double eps = 0.5;
  double s = 0.2;

  PerformativeProblem problem() const;
  double induced_risk(const Vector& theta) const;
  double minimum(std::size_t dim) const;
  Vector minimizer(std::size_t dim) const;
};

// Grid argmin of err(h) + alpha (TPR + FPR) / 2 on the source. InvalidAlpha
// when alpha < 0 or when the implied positive-class weight p - alpha/2 < 0.
ThresholdClassifier regularized_training(const EmpiricalDataset& source,
                                         const HypothesisGrid& grid, double alpha);
ThresholdClassifier regularized_training(const BinnedDomain& source, const HypothesisGrid& grid,
                                         double alpha);
std::vector<double> regularized_objective(const GridProfile& prof, double alpha);

// (acc_T - acc_S) / acc_S with acc = 1 - induced risk.
double improvement_metric(double induced_risk_hS, double induced_risk_hT);
double improvement_metric(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                          const BinnedShiftModel& model);
double improvement_metric(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                          const SampledShiftModel& model, std::uint64_t seed);

}  // namespace ida
