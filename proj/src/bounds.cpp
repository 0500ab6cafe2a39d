#include "ida/bounds.hpp"

#include <cmath>
#include <limits>

namespace ida {

CombinedErrors combined_errors(const GridProfile& d, const GridProfile& d2, double err_d_of_h,
                               double err_d2_of_h) {
  if (d.size() == 0 || d.size() != d2.size()) {
    throw Error(ErrorCode::InvalidConfig, "profiles must come from the same nonempty grid");
  }
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d.size(); ++j) lambda = std::min(lambda, d.error(j) + d2.error(j));
  return CombinedErrors{lambda, err_d2_of_h + err_d_of_h};
}

double lb_tradeoff_features(const ThresholdClassifier& h, const BinnedDomain& source,
                            const BinnedDomain& induced) {
  (void)h;
  return lb_from_tv(tv_binary(label_marginal(source), label_marginal(induced)),
                    feature_tv(source, induced));
}

double lb_tradeoff_features(const ThresholdClassifier& h, const EmpiricalDataset& source,
                            const EmpiricalDataset& induced, const FeaturePartition& partition) {
  return lb_from_tv(tv_binary(label_marginal(source), label_marginal(induced)),
                    feature_tv(source, induced, partition, h));
}

double cs_ub_suboptimality(double err_source_of_hT, double var_omega_S, double var_omega_T) {
  if (!(err_source_of_hT >= 0.0) || !(var_omega_S >= 0.0) || !(var_omega_T >= 0.0)) {
    throw Error(ErrorCode::OutOfDomain, "error and variances must be nonnegative");
  }
  return std::sqrt(err_source_of_hT) * (std::sqrt(var_omega_S) + std::sqrt(var_omega_T));
}

double cs_ub_suboptimality(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                           const BinnedDomain& source, const ImportanceWeightMap& omega_S,
                           const ImportanceWeightMap& omega_T) {
  (void)hS;
  return cs_ub_suboptimality(risk(hT, source), weight_variance(omega_S, source.density),
                             weight_variance(omega_T, source.density));
}

AssumptionCheck cs_assumption_check(const ThresholdClassifier& h, const BinnedDomain& source,
                                    const ImportanceWeightMap& omega) {
  if (!source.has_conditional()) {
    throw Error(ErrorCode::MissingConditional, "assumption checks need P(Y=+1|x)");
  }
  source.validate();
  if (h.mode() != ThresholdMode::Raw) {
    throw Error(ErrorCode::InvalidConfig, "binned laws are evaluated with raw thresholds only");
  }
  const auto& f = source.density;
  if (!omega.aligned_with(f)) throw Error(ErrorCode::MismatchedBins, "weight alignment");
  double e1_up = 0.0, e1_lo = 0.0, e2_up = 0.0, e2_lo = 0.0;
  double mg = 0.0, mw = 0.0, mgw = 0.0;
  for (std::size_t k = 0; k < f.bins(); ++k) {
    const double m = f.mass(k);
    const double w = omega.omega(k);
    const double eta = source.p_plus_given_bin[k];
    const double l = f.edge(k);
    const double accept = 1.0 - std::clamp((h.tau() - l) / f.width(), 0.0, 1.0);
    if (w >= 1.0) {
      e1_up += m * eta * (1.0 - w);
      e2_up += m * accept * (1.0 - w);
    } else {
      e1_lo += m * eta * (1.0 - w);
      e2_lo += m * accept * (1.0 - w);
    }
    const double g = eta - accept;
    mg += m * g;
    mw += m * w;
    mgw += m * g * w;
  }
  AssumptionCheck c{};
  c.a1_upper = std::abs(e1_up);
  c.a1_lower = std::abs(e1_lo);
  c.a2_upper = std::abs(e2_up);
  c.a2_lower = std::abs(e2_lo);
  c.covariance = mgw - mg * mw;
  c.a1 = c.a1_upper >= c.a1_lower;
  c.a2 = c.a2_upper >= c.a2_lower;
  c.a3 = c.covariance > kCovarianceFloor;
  return c;
}

double cs_lb_positive(const ThresholdClassifier& h, const BinnedDomain& source,
                      const BinnedDomain& induced, const ImportanceWeightMap& omega) {
  const auto c = cs_assumption_check(h, source, omega);
  if (!c.all()) {
    throw Error(ErrorCode::AssumptionsUnmet,
                std::string("a1=") + (c.a1 ? "1" : "0") + " a2=" + (c.a2 ? "1" : "0") +
                    " a3=" + (c.a3 ? "1" : "0"));
  }
  return lb_tradeoff(h, source, induced);
}

double strategic_ub(double B, double err_source_of_hT) {
  if (!(B >= 0.0)) throw Error(ErrorCode::OutOfDomain, "budget must be >= 0");
  if (!(err_source_of_hT >= 0.0 && err_source_of_hT <= 1.0)) {
    throw Error(ErrorCode::OutOfDomain, "error must lie in [0,1]");
  }
  return std::sqrt(2.0 * B / 3.0 * err_source_of_hT);
}

double ts_ub(const TargetShiftTerms& t) {
  const double tv_plus = std::abs(t.rates_hS.tpr - t.rates_hT.tpr);
  const double tv_minus = std::abs(t.rates_hS.fpr - t.rates_hT.fpr);
  return std::abs(t.p_hS - t.p_hT) + (1.0 + t.p_source) * (tv_plus + tv_minus);
}

double ts_lb(double p, double p_h, double tpr_source, double fpr_source) {
  for (double v : {p, p_h, tpr_source, fpr_source}) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::OutOfDomain, "inputs must lie in [0,1]");
  }
  return std::abs(p - p_h) * (1.0 - std::abs(tpr_source - fpr_source)) / 2.0;
}

double replicator_prop_bound(double p_source, double err_hS, double err_hT, double tpr_hS,
                             double tpr_hT, PropDenominator denom) {
  const double a = denom == PropDenominator::Accuracy ? 1.0 - err_hS : err_hS;
  const double b = denom == PropDenominator::Accuracy ? 1.0 - err_hT : err_hT;
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::DegenerateAccuracy, "denominator of the replicator bound is zero");
  }
  return p_source * std::abs(err_hS - err_hT) * std::abs(tpr_hS - tpr_hT) / (a * b);
}

bool convexity_condition_check(std::size_t num_classifiers, const PointFunction& omega_of,
                               const PointFunction& loss_of,
                               const std::vector<LabeledPoint>& points, std::size_t sample_pairs,
                               Rng& rng) {
  if (num_classifiers < 2) throw Error(ErrorCode::InvalidConfig, "need at least 2 classifiers");
  auto pair_ok = [&](std::size_t i, std::size_t j) {
    for (const auto& z : points) {
      const double prod = (omega_of(i, z) - omega_of(j, z)) * (loss_of(i, z) - loss_of(j, z));
      if (prod < -1e-12) return false;
    }
    return true;
  };
  if (sample_pairs == 0) {
    for (std::size_t i = 0; i < num_classifiers; ++i) {
      for (std::size_t j = i + 1; j < num_classifiers; ++j) {
        if (!pair_ok(i, j)) return false;
      }
    }
    return true;
  }
  std::uniform_int_distribution<std::size_t> pick(0, num_classifiers - 1);
  for (std::size_t s = 0; s < sample_pairs; ++s) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    if (!pair_ok(i, j)) return false;
  }
  return true;
}

void NamedValues::set(const std::string& name, double value) {
  for (auto& item : items_) {
    if (item.first == name) {
      item.second = value;
      return;
    }
  }
  items_.emplace_back(name, value);
}

double NamedValues::get(const std::string& name) const {
  for (const auto& item : items_) {
    if (item.first == name) return item.second;
  }
  throw Error(ErrorCode::InvalidConfig, "no component named '" + name + "'");
}

bool NamedValues::contains(const std::string& name) const {
  for (const auto& item : items_) {
    if (item.first == name) return true;
  }
  return false;
}

std::vector<std::string> BoundReport::csv_header() const {
  std::vector<std::string> h{"diff",         "max_pair",    "ub_source_induced",
                             "ub_induced_optimal", "lb_tradeoff", "lb_tradeoff_features"};
  for (const auto& item : components.items()) h.push_back(item.first);
  return h;
}

std::vector<double> BoundReport::csv_values() const {
  std::vector<double> v{diff, max_pair, ub_source_induced, ub_induced_optimal, lb_tradeoff,
                        lb_tradeoff_features};
  for (const auto& item : components.items()) v.push_back(item.second);
  return v;
}

std::vector<BoundCheck> report_checks(const BoundReport& r) {
  std::vector<BoundCheck> out;
  out.push_back({"diff_nonnegative", r.diff});
  out.push_back({"induced_risk_le_ub_source_induced",
                 r.ub_source_induced - r.components.get("err_induced_hS")});
  out.push_back({"diff_le_ub_induced_optimal", r.ub_induced_optimal - r.diff});
  out.push_back({"lb_tradeoff_le_max", r.max_pair - r.lb_tradeoff});
  out.push_back({"lb_tradeoff_features_le_lb_tradeoff", r.lb_tradeoff - r.lb_tradeoff_features});
  return out;
}

namespace {

template <DomainLike D>
double rate_or_nan(const ThresholdClassifier& h, const D& d, bool tpr) {
  const auto m = label_marginal(d).p_plus;
  if (!(m > 0.0 && m < 1.0)) return std::numeric_limits<double>::quiet_NaN();
  const auto r = rates(h, d);
  return tpr ? r.tpr : r.fpr;
}

template <DomainLike D, class FeatureTv>
BoundReport assemble(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                     const D& source, const D& induced_S, const D& induced_T,
                     const HypothesisGrid& grid, FeatureTv feature_tv_of) {
  const auto p_src = profile(grid, source);
  const auto p_is = profile(grid, induced_S);
  const auto p_it = profile(grid, induced_T);

  const double err_s_hS = risk(hS, source);
  const double err_s_hT = risk(hT, source);
  const double err_is_hS = risk(hS, induced_S);
  const double err_it_hT = risk(hT, induced_T);
  const double err_it_hS = risk(hS, induced_T);

  BoundReport r;
  r.diff = err_is_hS - err_it_hT;
  r.max_pair = std::max(err_s_hT, err_it_hT);

  const auto ce_s = combined_errors(p_src, p_is, err_s_hS, err_is_hS);
  const double d_s = h_divergence(p_src, p_is);
  r.ub_source_induced = err_s_hS + ce_s.lambda_min + 0.5 * d_s;

  const auto ce_t = combined_errors(p_is, p_it, err_is_hS, err_it_hS);
  const double d_t = h_divergence(p_it, p_is);
  r.ub_induced_optimal = 0.5 * (ce_t.lambda_min + ce_t.lambda_max_of_h) + 0.5 * d_t;

  const double tv_y = tv_binary(label_marginal(source), label_marginal(induced_T));
  const double tv_h = tv_binary(prediction_marginal(hT, source), prediction_marginal(hT, induced_T));
  const double tv_x = feature_tv_of();
  r.lb_tradeoff = lb_from_tv(tv_y, tv_h);
  r.lb_tradeoff_features = lb_from_tv(tv_y, tv_x);

  auto& c = r.components;
  c.set("tau_hS", hS.tau());
  c.set("tau_hT", hT.tau());
  c.set("err_source_hS", err_s_hS);
  c.set("err_source_hT", err_s_hT);
  c.set("err_induced_hS", err_is_hS);
  c.set("err_induced_hT", err_it_hT);
  c.set("lambda_source_to_hS", ce_s.lambda_min);
  c.set("dhh_source_hS", d_s);
  c.set("lambda_hS_to_hT", ce_t.lambda_min);
  c.set("Lambda_hS", ce_t.lambda_max_of_h);
  c.set("dhh_hT_hS", d_t);
  c.set("tv_labels_hT", tv_y);
  c.set("tv_predictions_hT", tv_h);
  c.set("tv_features_hT", tv_x);
  c.set("p_source", label_marginal(source).p_plus);
  c.set("p_induced_hS", label_marginal(induced_S).p_plus);
  c.set("p_induced_hT", label_marginal(induced_T).p_plus);
  c.set("tpr_source_hS", rate_or_nan(hS, source, true));
  c.set("fpr_source_hS", rate_or_nan(hS, source, false));
  c.set("tpr_source_hT", rate_or_nan(hT, source, true));
  c.set("fpr_source_hT", rate_or_nan(hT, source, false));
  return r;
}

}  // namespace

BoundReport assemble_report(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                            const BinnedDomain& source, const BinnedDomain& induced_S,
                            const BinnedDomain& induced_T, const HypothesisGrid& grid) {
  return assemble(hS, hT, source, induced_S, induced_T, grid,
                  [&] { return feature_tv(source, induced_T); });
}

BoundReport assemble_report(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                            const EmpiricalDataset& source, const EmpiricalDataset& induced_S,
                            const EmpiricalDataset& induced_T, const HypothesisGrid& grid,
                            const FeaturePartition& partition) {
  return assemble(hS, hT, source, induced_S, induced_T, grid,
                  [&] { return feature_tv(source, induced_T, partition, hT); });
}

}  // namespace ida
