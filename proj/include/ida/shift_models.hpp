#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ida/classifiers.hpp"
#include "ida/dataset.hpp"
#include "ida/distributions.hpp"

namespace ida {

using Rng = std::mt19937_64;

// Independent stream seed from a root seed and a stream index (splitmix64).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept;

// ---------------------------------------------------------------------------
// Strategic response on [0,1]

// P(Y=+1 | x) for the strategic population.
struct LabelConditional {
  enum class Shape { Linear, Logistic };
  Shape shape = Shape::Linear;  // Linear: eta(x) = x
  double slope = 10.0;          // Logistic: sigmoid(slope (x - center))
  double center = 0.5;

  double operator()(double x) const;
  double average(double a, double b) const;  // mean of eta over [a, b]
};

struct StrategicConfig {
  double B = 0.2;
  LabelConditional eta{};
  std::size_t bins = 512;
};

double strategic_weight(double x, double tau, double B);
// Integral of the weight over [a, b] (0 <= a <= b <= 1).
double strategic_weight_integral(double a, double b, double tau, double B);
BinnedDensity1D strategic_induced_density(double tau, double B, std::size_t bins);
double strategic_agent_response(double x, double tau, double B, Rng& rng);

BinnedDomain strategic_source_domain(const LabelConditional& eta, std::size_t bins);

// x ~ U[0,1], y ~ Bernoulli(eta(x)).
EmpiricalDataset strategic_sample(std::size_t n, const LabelConditional& eta, Rng& rng);
// Every agent responds to the raw threshold; labels are redrawn from eta at
// the new feature so P(Y|X) is unchanged.
EmpiricalDataset strategic_respond(const EmpiricalDataset& source, double tau, double B,
                                   const LabelConditional& eta, Rng& rng);

// ---------------------------------------------------------------------------
// Replicator dynamics

struct Fitness {
  double plus;
  double minus;
};

// Indexed (y, y_hat).
struct UtilityMatrix {
  double pp = 1.0;  // U(+1, +1)
  double pm = 0.0;  // U(+1, -1)
  double mp = 0.0;  // U(-1, +1)
  double mm = 1.0;  // U(-1, -1)

  void validate() const;
};

Fitness fitness_accuracy(const Rates& r) noexcept;
Fitness fitness_utility(const Rates& r, const UtilityMatrix& U) noexcept;
Fitness fitness_accuracy(const ThresholdClassifier& h, const EmpiricalDataset& source);
Fitness fitness_accuracy(const ThresholdClassifier& h, const BinnedDomain& source);
Fitness fitness_utility(const ThresholdClassifier& h, const EmpiricalDataset& source,
                        const UtilityMatrix& U);
Fitness fitness_utility(const ThresholdClassifier& h, const BinnedDomain& source,
                        const UtilityMatrix& U);

LabelMarginal replicator_induce(LabelMarginal p_source, double F_plus, double F_minus);

struct ReplicatorConfig {
  LabelMarginal p0{0.5};
  double mu_plus = 0.7;
  double mu_minus = 0.3;
  double sigma = 0.15;
  UtilityMatrix U{};
  std::size_t bins = 2000;

  void validate() const;
};

// Gaussian N(mu, sigma^2) truncated to [0, 1].
double truncated_normal_cdf(double x, double mu, double sigma);
double truncated_normal_sample(double mu, double sigma, Rng& rng);
BinnedDensity1D truncated_normal_density(double mu, double sigma, std::size_t bins);

// Mixture with P(Y=+1) = p of fixed class-conditional densities.
BinnedDomain label_mixture(const BinnedDensity1D& f_plus, const BinnedDensity1D& f_minus,
                           double p);

// ---------------------------------------------------------------------------
// Synthetic DAGs

enum class CovariateAdaptMode {
  Counterfactual,  // keep each unit's structural noise, recompute X2, X3, Y
  FreshNoise,      // recompute X2, X3, Y with new noise draws
  Freeze,          // move X1 only, keep X2, X3, Y
};

struct CovariateDagConfig {
  double sigma2 = 0.1;
  double sigma3 = 0.1;
  double c = 0.1;
  CovariateAdaptMode mode = CovariateAdaptMode::Counterfactual;

  void validate() const;
};

EmpiricalDataset covariate_dag_sample(std::size_t n, const CovariateDagConfig& cfg, Rng& rng);
EmpiricalDataset covariate_dag_adapt(const EmpiricalDataset& data, const ThresholdClassifier& h,
                                     const CovariateDagConfig& cfg, Rng& rng);

// c[h][y] = P(Y' = +1 | h(X) = h, Y = y), index 0 for -1 and 1 for +1.
using TransitionMatrix = std::array<std::array<double, 2>, 2>;

struct TargetDagConfig {
  double alpha = 0.5;
  double mu_pos = 0.7;
  double mu_neg = 0.3;
  double sigma = 0.15;
  double sigma2 = 0.1;
  double sigma3 = 0.1;
  TransitionMatrix c_hy{{{0.2, 0.7}, {0.6, 0.9}}};

  void validate() const;
};

EmpiricalDataset target_dag_sample(std::size_t n, const TargetDagConfig& cfg, Rng& rng);
EmpiricalDataset target_dag_adapt(const EmpiricalDataset& data, const ThresholdClassifier& h,
                                  const TargetDagConfig& cfg, Rng& rng);

// ---------------------------------------------------------------------------
// Credit-score dynamics

struct FicoConfig {
  double eps1 = 0.1;
  double eps2 = 0.1;
  double sigma = 0.1;
  double alpha_D = 0.01;
  double alpha_Y = 0.005;

  void validate() const;
};

// Standardized per-individual draws for one step.
struct FicoNoise {
  double u1;     // U[-1, 1]
  double u2;     // U[-1, 1]
  double n3;     // N(0, 1)
  double label;  // U[0, 1); Y = +1 iff label < Q
};

FicoNoise draw_fico_noise(Rng& rng);
std::array<double, 3> fico_features(double Q, int A, const FicoConfig& cfg,
                                    const FicoNoise& noise);
std::array<double, 3> fico_features(double Q, int A, const FicoConfig& cfg, Rng& rng);
double fico_update(double Q, int decision, int outcome, const FicoConfig& cfg);

struct GroupDensity {
  std::string name;
  BinnedDensity1D density;
};

std::vector<GroupDensity> ingest_group_cdf(const std::string& path);
std::vector<GroupDensity> parse_group_cdf(const std::string& csv_text);
// Four beta-distribution CDFs on a regular score grid, as CSV text.
std::string synthetic_group_cdf_csv(std::size_t rows = 101);

double sample_from_density(const BinnedDensity1D& f, Rng& rng);

// ---------------------------------------------------------------------------
// h -> D(h)

class BinnedShiftModel {
 public:
  virtual ~BinnedShiftModel() = default;
  virtual const BinnedDomain& source() const = 0;
  virtual BinnedDomain induce(const ThresholdClassifier& h) const = 0;
  virtual std::string name() const = 0;
};

class SampledShiftModel {
 public:
  virtual ~SampledShiftModel() = default;
  virtual const EmpiricalDataset& source() const = 0;
  // The same seed must be reused across classifiers for common random numbers.
  virtual EmpiricalDataset induce(const ThresholdClassifier& h, std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
};

class IdentityBinnedShift final : public BinnedShiftModel {
 public:
  explicit IdentityBinnedShift(BinnedDomain source) : source_(std::move(source)) {}
  const BinnedDomain& source() const override { return source_; }
  BinnedDomain induce(const ThresholdClassifier&) const override { return source_; }
  std::string name() const override { return "identity"; }

 private:
  BinnedDomain source_;
};

class IdentitySampledShift final : public SampledShiftModel {
 public:
  explicit IdentitySampledShift(EmpiricalDataset source) : source_(std::move(source)) {}
  const EmpiricalDataset& source() const override { return source_; }
  EmpiricalDataset induce(const ThresholdClassifier&, std::uint64_t) const override;
  std::string name() const override { return "identity"; }

 private:
  EmpiricalDataset source_;
};

class StrategicShift final : public BinnedShiftModel {
 public:
  explicit StrategicShift(StrategicConfig cfg);
  const BinnedDomain& source() const override { return source_; }
  BinnedDomain induce(const ThresholdClassifier& h) const override;
  std::string name() const override { return "strategic"; }
  const StrategicConfig& config() const noexcept { return cfg_; }

 private:
  StrategicConfig cfg_;
  BinnedDomain source_;
};

class ReplicatorShift final : public BinnedShiftModel {
 public:
  explicit ReplicatorShift(ReplicatorConfig cfg);
  const BinnedDomain& source() const override { return source_; }
  BinnedDomain induce(const ThresholdClassifier& h) const override;
  std::string name() const override { return "replicator"; }
  LabelMarginal induced_prior(const ThresholdClassifier& h) const;
  const ReplicatorConfig& config() const noexcept { return cfg_; }

 private:
  ReplicatorConfig cfg_;
  BinnedDensity1D f_plus_;
  BinnedDensity1D f_minus_;
  BinnedDomain source_;
};

class CovariateDagShift final : public SampledShiftModel {
 public:
  CovariateDagShift(EmpiricalDataset source, CovariateDagConfig cfg);
  const EmpiricalDataset& source() const override { return source_; }
  EmpiricalDataset induce(const ThresholdClassifier& h, std::uint64_t seed) const override;
  std::string name() const override { return "covariate-dag"; }

 private:
  EmpiricalDataset source_;
  CovariateDagConfig cfg_;
};

class TargetDagShift final : public SampledShiftModel {
 public:
  TargetDagShift(EmpiricalDataset source, TargetDagConfig cfg);
  const EmpiricalDataset& source() const override { return source_; }
  EmpiricalDataset induce(const ThresholdClassifier& h, std::uint64_t seed) const override;
  std::string name() const override { return "target-dag"; }

 private:
  EmpiricalDataset source_;
  TargetDagConfig cfg_;
};

// One step of the credit-score dynamics. The source is the population at step
// t; D(h) is the population at t+1 after every individual receives h's
// decision. Noise for both steps is fixed up front, so the seed passed to
// induce is ignored.
class FicoStepShift final : public SampledShiftModel {
 public:
  FicoStepShift(std::vector<double> Q, std::vector<int> A, FicoConfig cfg,
                std::vector<FicoNoise> noise_now, std::vector<FicoNoise> noise_next);
  const EmpiricalDataset& source() const override { return source_; }
  EmpiricalDataset induce(const ThresholdClassifier& h, std::uint64_t seed) const override;
  std::string name() const override { return "fico"; }

  std::vector<double> next_scores(const ThresholdClassifier& h) const;
  const std::vector<double>& scores() const noexcept { return Q_; }

 private:
  std::vector<double> Q_;
  std::vector<int> A_;
  FicoConfig cfg_;
  std::vector<FicoNoise> noise_now_;
  std::vector<FicoNoise> noise_next_;
  EmpiricalDataset source_;
};

EmpiricalDataset fico_population(const std::vector<double>& Q, const std::vector<int>& A,
                                 const FicoConfig& cfg, const std::vector<FicoNoise>& noise,
                                 DomainTag tag);

}  // namespace ida
