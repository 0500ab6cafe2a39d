#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ida/classifiers.hpp"
#include "ida/dataset.hpp"
#include "ida/distributions.hpp"
#include "ida/error.hpp"
#include "ida/shift_models.hpp"

namespace ida {

template <class D>
concept DomainLike = std::same_as<D, EmpiricalDataset> || std::same_as<D, BinnedDomain>;

inline constexpr double kBoundTolerance = 1e-9;

struct CombinedErrors {
  double lambda_min;       // min over the grid of err_D(h') + err_D2(h')
  double lambda_max_of_h;  // err_D2(h) + err_D(h)
};

CombinedErrors combined_errors(const GridProfile& d, const GridProfile& d2, double err_d_of_h,
                               double err_d2_of_h);

template <DomainLike D>
CombinedErrors combined_errors(const ThresholdClassifier& h, const D& d, const D& d2,
                               const HypothesisGrid& grid) {
  return combined_errors(profile(grid, d), profile(grid, d2), risk(h, d), risk(h, d2));
}

// err_S(h) + lambda(S -> D(h)) + d_HH(S, D(h)) / 2
template <DomainLike D>
double ub_source_to_induced(const ThresholdClassifier& h, const D& source, const D& induced,
                            const HypothesisGrid& grid) {
  const auto ps = profile(grid, source);
  const auto pi = profile(grid, induced);
  const double err_s = risk(h, source);
  const auto ce = combined_errors(ps, pi, err_s, risk(h, induced));
  return err_s + ce.lambda_min + 0.5 * h_divergence(ps, pi);
}

// (lambda + Lambda(h)) / 2 + d_HH(D(h_T), D(h)) / 2, with both combined errors
// taken from D(h) to D(h_T).
template <DomainLike D>
double ub_induced_to_optimal(const ThresholdClassifier& h, const D& induced_h,
                             const ThresholdClassifier& /*h_T*/, const D& induced_t,
                             const HypothesisGrid& grid) {
  const auto ph = profile(grid, induced_h);
  const auto pt = profile(grid, induced_t);
  const auto ce = combined_errors(ph, pt, risk(h, induced_h), risk(h, induced_t));
  return 0.5 * (ce.lambda_min + ce.lambda_max_of_h) + 0.5 * h_divergence(pt, ph);
}

// (TV_Y - TV_sub) / 2
inline double lb_from_tv(double tv_labels, double tv_subtrahend) {
  return 0.5 * (tv_labels - tv_subtrahend);
}

template <DomainLike D>
double lb_tradeoff(const ThresholdClassifier& h, const D& source, const D& induced) {
  return lb_from_tv(tv_binary(label_marginal(source), label_marginal(induced)),
                    tv_binary(prediction_marginal(h, source), prediction_marginal(h, induced)));
}

double lb_tradeoff_features(const ThresholdClassifier& h, const BinnedDomain& source,
                            const BinnedDomain& induced);
// The feature TV is taken over the partition refined by h's prediction.
double lb_tradeoff_features(const ThresholdClassifier& h, const EmpiricalDataset& source,
                            const EmpiricalDataset& induced, const FeaturePartition& partition);

// sqrt(err_S(h_T)) (sd(omega(h_S)) + sd(omega(h_T)))
double cs_ub_suboptimality(double err_source_of_hT, double var_omega_S, double var_omega_T);
double cs_ub_suboptimality(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                           const BinnedDomain& source, const ImportanceWeightMap& omega_S,
                           const ImportanceWeightMap& omega_T);

struct AssumptionCheck {
  bool a1;
  bool a2;
  bool a3;
  double a1_upper;   // |E[(1 - omega) ; X+, Y=+1]|
  double a1_lower;   // |E[(1 - omega) ; X-, Y=+1]|
  double a2_upper;   // |E[(1 - omega) ; X+, h=+1]|
  double a2_lower;   // |E[(1 - omega) ; X-, h=+1]|
  double covariance; // Cov(P(Y=+1|x) - P(h=+1|x), omega)

  bool all() const noexcept { return a1 && a2 && a3; }
};

inline constexpr double kCovarianceFloor = 1e-12;

AssumptionCheck cs_assumption_check(const ThresholdClassifier& h, const BinnedDomain& source,
                                    const ImportanceWeightMap& omega);

// lb_tradeoff after the three assumptions pass; AssumptionsUnmet otherwise.
double cs_lb_positive(const ThresholdClassifier& h, const BinnedDomain& source,
                      const BinnedDomain& induced, const ImportanceWeightMap& omega);

double strategic_ub(double B, double err_source_of_hT);

struct TargetShiftTerms {
  double p_source;
  double p_hS;
  double p_hT;
  Rates rates_hS;  // on the source
  Rates rates_hT;
};

// |p(h_S) - p(h_T)| + (1 + p)(TV_+ + TV_-)
double ts_ub(const TargetShiftTerms& t);

template <DomainLike D>
TargetShiftTerms target_shift_terms(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                                    const D& source, LabelMarginal p_hS, LabelMarginal p_hT) {
  return TargetShiftTerms{label_marginal(source).p_plus, p_hS.p_plus, p_hT.p_plus,
                          rates(hS, source), rates(hT, source)};
}

template <DomainLike D>
double ts_ub(const ThresholdClassifier& hS, const ThresholdClassifier& hT, const D& source,
             LabelMarginal p_hS, LabelMarginal p_hT) {
  return ts_ub(target_shift_terms(hS, hT, source, p_hS, p_hT));
}

// |p - p_h| (1 - |TPR - FPR|) / 2
double ts_lb(double p, double p_h, double tpr_source, double fpr_source);

enum class PropDenominator {
  Accuracy,  // (1 - err)(1 - err)
  Error,     // err * err
};

double replicator_prop_bound(double p_source, double err_hS, double err_hT, double tpr_hS,
                             double tpr_hT, PropDenominator denom = PropDenominator::Accuracy);

template <DomainLike D>
double replicator_prop_bound(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                             const D& source, PropDenominator denom = PropDenominator::Accuracy) {
  return replicator_prop_bound(label_marginal(source).p_plus, risk(hS, source), risk(hT, source),
                               rates(hS, source).tpr, rates(hT, source).tpr, denom);
}

struct WorstCase {
  double ub;
  double lb;
};

// ub: max of ub_induced_to_optimal over candidate optimal classifiers and
// ordered pairs of candidate distributions (for D(h), D(h_T)).
// lb: min of lb_tradeoff over candidate distributions for D(h).
template <DomainLike D>
WorstCase worst_case_bounds(const ThresholdClassifier& probe, const D& source,
                            const std::vector<ThresholdClassifier>& candidate_classifiers,
                            const std::vector<D>& candidate_distributions,
                            const HypothesisGrid& grid) {
  if (candidate_classifiers.empty() || candidate_distributions.empty()) {
    throw Error(ErrorCode::InvalidConfig, "worst-case sets must be nonempty");
  }
  WorstCase out{0.0, 0.0};
  bool first = true;
  for (const auto& hT : candidate_classifiers) {
    for (const auto& dh : candidate_distributions) {
      for (const auto& dt : candidate_distributions) {
        const double v = ub_induced_to_optimal(probe, dh, hT, dt, grid);
        out.ub = first ? v : std::max(out.ub, v);
        first = false;
      }
    }
  }
  first = true;
  for (const auto& dh : candidate_distributions) {
    const double v = lb_tradeoff(probe, source, dh);
    out.lb = first ? v : std::min(out.lb, v);
    first = false;
  }
  return out;
}

// True iff (omega(h) - omega(h')) (loss(h) - loss(h')) >= -1e-12 for every
// checked classifier pair at every point. sample_pairs = 0 checks all pairs.
using PointFunction = std::function<double(std::size_t classifier, const LabeledPoint& z)>;
bool convexity_condition_check(std::size_t num_classifiers, const PointFunction& omega_of,
                               const PointFunction& loss_of,
                               const std::vector<LabeledPoint>& points, std::size_t sample_pairs,
                               Rng& rng);

// Named values kept in insertion order.
class NamedValues {
 public:
  void set(const std::string& name, double value);
  double get(const std::string& name) const;  // InvalidConfig when absent
  bool contains(const std::string& name) const;
  const std::vector<std::pair<std::string, double>>& items() const noexcept { return items_; }

 private:
  std::vector<std::pair<std::string, double>> items_;
};

struct BoundReport {
  double diff = 0.0;      // err_{D(h_S)}(h_S) - err_{D(h_T)}(h_T)
  double max_pair = 0.0;  // max(err_S(h_T), err_{D(h_T)}(h_T))
  double ub_source_induced = 0.0;   // source risk -> induced risk, at h_S
  double ub_induced_optimal = 0.0;  // induced risk -> minimum induced risk, at h_S
  double lb_tradeoff = 0.0;         // label/prediction TV bound, at h_T
  double lb_tradeoff_features = 0.0;  // label/feature TV bound, at h_T
  NamedValues components;

  std::vector<std::string> csv_header() const;
  std::vector<double> csv_values() const;
};

// Every inequality the report claims, with its slack (bound minus measured).
struct BoundCheck {
  std::string name;
  double slack;
};
std::vector<BoundCheck> report_checks(const BoundReport& r);

// Full report for a source-optimal / induced-optimal pair on a binned law.
BoundReport assemble_report(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                            const BinnedDomain& source, const BinnedDomain& induced_S,
                            const BinnedDomain& induced_T, const HypothesisGrid& grid);
// Same on samples; feature TV uses the given partition refined by h_T.
BoundReport assemble_report(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                            const EmpiricalDataset& source, const EmpiricalDataset& induced_S,
                            const EmpiricalDataset& induced_T, const HypothesisGrid& grid,
                            const FeaturePartition& partition);

}  // namespace ida
