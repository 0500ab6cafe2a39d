#pragma once

#include <cstddef>
#include <vector>

#include "ida/classifiers.hpp"
#include "ida/dataset.hpp"

namespace ida {

double tv_binary(LabelMarginal p, LabelMarginal q);
double tv_binned(const BinnedDensity1D& f, const BinnedDensity1D& g);

struct ClassRisks {
  double err_plus;   // P(h != Y | Y = +1)
  double err_minus;  // P(h != Y | Y = -1)
};

struct Rates {
  double tpr;  // P(h = +1 | Y = +1)
  double fpr;  // P(h = +1 | Y = -1)
};

// Risks on samples and on binned laws. A raw threshold splits the bin that
// contains it in proportion to the uniform within-bin density.
double risk(const ThresholdClassifier& h, const EmpiricalDataset& data);
double risk(const ThresholdClassifier& h, const BinnedDomain& domain);
inline double empirical_risk(const ThresholdClassifier& h, const EmpiricalDataset& data) {
  return risk(h, data);
}

ClassRisks class_conditional_risks(const ThresholdClassifier& h, const EmpiricalDataset& data);
ClassRisks class_conditional_risks(const ThresholdClassifier& h, const BinnedDomain& domain);
Rates rates(const ThresholdClassifier& h, const EmpiricalDataset& data);
Rates rates(const ThresholdClassifier& h, const BinnedDomain& domain);

LabelMarginal label_marginal(const EmpiricalDataset& data);
LabelMarginal label_marginal(const BinnedDomain& domain);
// P(h(X) = +1)
LabelMarginal prediction_marginal(const ThresholdClassifier& h, const EmpiricalDataset& data);
LabelMarginal prediction_marginal(const ThresholdClassifier& h, const BinnedDomain& domain);

// Joint masses of every grid classifier on one distribution. Thresholds are
// nested, so all grid quantities follow from cumulative rejection masses.
struct GridProfile {
  std::vector<double> reject_plus;   // P(h_j = -1, Y = +1)
  std::vector<double> reject_minus;  // P(h_j = -1, Y = -1)
  double p_plus = 0.0;

  std::size_t size() const noexcept { return reject_plus.size(); }
  double reject(std::size_t j) const { return reject_plus[j] + reject_minus[j]; }
  double accept(std::size_t j) const { return 1.0 - reject(j); }
  double error(std::size_t j) const { return reject_plus[j] + (1.0 - p_plus - reject_minus[j]); }
  bool has_both_classes() const noexcept { return p_plus > 0.0 && p_plus < 1.0; }
  double err_plus(std::size_t j) const;   // MissingClass without positives
  double err_minus(std::size_t j) const;  // MissingClass without negatives
  double tpr(std::size_t j) const { return 1.0 - err_plus(j); }
  double fpr(std::size_t j) const { return err_minus(j); }
};

GridProfile profile(const HypothesisGrid& grid, const EmpiricalDataset& data);
GridProfile profile(const HypothesisGrid& grid, const BinnedDomain& domain);

// Single-classifier profile (size 1).
GridProfile profile(const ThresholdClassifier& h, const EmpiricalDataset& data);
GridProfile profile(const ThresholdClassifier& h, const BinnedDomain& domain);

// 2 max over ordered grid pairs of the disagreement gap. For nested thresholds
// the disagreement of (h_i, h_j) is the mass between the thresholds, so the
// max reduces to the spread of the rejection-mass difference.
double h_divergence(const GridProfile& a, const GridProfile& b);
double h_divergence(const EmpiricalDataset& a, const EmpiricalDataset& b,
                    const HypothesisGrid& grid);
double h_divergence(const BinnedDomain& a, const BinnedDomain& b, const HypothesisGrid& grid);

class ImportanceWeightMap {
 public:
  // Validates alignment and the mean-one condition against the source.
  ImportanceWeightMap(const BinnedDensity1D& source, std::vector<double> omega);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::size_t bins() const noexcept { return omega_.size(); }
  double omega(std::size_t k) const { return omega_[k]; }
  const std::vector<double>& values() const noexcept { return omega_; }
  bool aligned_with(const BinnedDensity1D& density) const noexcept;
  double at(double x) const;  // OutOfDomain outside [lo, hi]

 private:
  double lo_;
  double hi_;
  std::vector<double> omega_;
};

ImportanceWeightMap importance_weights(const BinnedDensity1D& source,
                                       const BinnedDensity1D& induced);

// Variance of omega under the source masses.
double weight_variance(const ImportanceWeightMap& omega, const BinnedDensity1D& source);

// E_source[omega(x) 1(h(x) != y)]
double reweighted_risk(const ThresholdClassifier& h, const BinnedDomain& source,
                       const ImportanceWeightMap& omega);
double reweighted_risk(const ThresholdClassifier& h, const EmpiricalDataset& source,
                       const ImportanceWeightMap& omega);

// Cells of one feature coordinate for sample-based TV. Values outside
// [lo, hi] fall into an underflow or overflow cell.
struct FeaturePartition {
  std::size_t coordinate = 0;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bins = 512;
};

double feature_tv(const EmpiricalDataset& a, const EmpiricalDataset& b,
                  const FeaturePartition& partition);
// Same, with every cell further split by the prediction of h. The result is
// still a lower estimate of the feature TV and never falls below the TV of
// the prediction marginals.
double feature_tv(const EmpiricalDataset& a, const EmpiricalDataset& b,
                  const FeaturePartition& partition, const ThresholdClassifier& h);
double feature_tv(const BinnedDomain& a, const BinnedDomain& b);

}  // namespace ida
