#include "ida/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "ida/error.hpp"

namespace ida {

namespace {

void require_nonempty(const EmpiricalDataset& data) {
  if (data.empty()) throw Error(ErrorCode::InvalidConfig, "dataset is empty");
}

void require_binned_classifier(const ThresholdClassifier& h) {
  if (h.mode() != ThresholdMode::Raw) {
    throw Error(ErrorCode::InvalidConfig, "binned laws are evaluated with raw thresholds only");
  }
}

void require_conditional(const BinnedDomain& domain) {
  if (!domain.has_conditional()) {
    throw Error(ErrorCode::MissingConditional, "P(Y=+1|x) is not available for this law");
  }
  domain.validate();
}

// Fraction of bin k lying strictly below tau.
double reject_fraction(const BinnedDensity1D& f, std::size_t k, double tau) {
  const double l = f.edge(k);
  return std::clamp((tau - l) / f.width(), 0.0, 1.0);
}

ClassRisks class_risks_from(const GridProfile& prof) {
  return ClassRisks{prof.err_plus(0), prof.err_minus(0)};
}

}  // namespace

double tv_binary(LabelMarginal p, LabelMarginal q) { return std::abs(p.p_plus - q.p_plus); }

double tv_binned(const BinnedDensity1D& f, const BinnedDensity1D& g) {
  if (!same_bins(f, g)) throw Error(ErrorCode::MismatchedBins, "densities use different bins");
  double s = 0.0;
  for (std::size_t k = 0; k < f.bins(); ++k) s += std::abs(f.mass(k) - g.mass(k));
  return std::min(1.0, 0.5 * s);
}

double GridProfile::err_plus(std::size_t j) const {
  if (!(p_plus > 0.0)) throw Error(ErrorCode::MissingClass, "no positive labels");
  return reject_plus[j] / p_plus;
}

double GridProfile::err_minus(std::size_t j) const {
  if (!(p_plus < 1.0)) throw Error(ErrorCode::MissingClass, "no negative labels");
  return (1.0 - p_plus - reject_minus[j]) / (1.0 - p_plus);
}

GridProfile profile(const HypothesisGrid& grid, const EmpiricalDataset& data) {
  require_nonempty(data);
  const auto stats = grid.statistics(data);
  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (is_positive(data.y(i)) ? pos : neg).push_back(stats[i]);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  const double n = static_cast<double>(data.size());
  const bool raw = grid.mode() == ThresholdMode::Raw;
  // raw rejects s < tau, squashed rejects s <= tau
  auto rejected = [raw](const std::vector<double>& v, double tau) {
    auto it = raw ? std::lower_bound(v.begin(), v.end(), tau)
                  : std::upper_bound(v.begin(), v.end(), tau);
    return static_cast<double>(it - v.begin());
  };
  GridProfile prof;
  prof.p_plus = static_cast<double>(pos.size()) / n;
  prof.reject_plus.resize(grid.size());
  prof.reject_minus.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    prof.reject_plus[j] = rejected(pos, grid.tau(j)) / n;
    prof.reject_minus[j] = rejected(neg, grid.tau(j)) / n;
  }
  return prof;
}

GridProfile profile(const HypothesisGrid& grid, const BinnedDomain& domain) {
  if (grid.mode() != ThresholdMode::Raw) {
    throw Error(ErrorCode::InvalidConfig, "binned laws are evaluated with raw thresholds only");
  }
  require_conditional(domain);
  const auto& f = domain.density;
  const std::size_t K = f.bins();
  // prefix[k] = joint mass of bins [0, k)
  std::vector<double> pre_plus(K + 1, 0.0);
  std::vector<double> pre_minus(K + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double q = domain.p_plus_given_bin[k];
    pre_plus[k + 1] = pre_plus[k] + f.mass(k) * q;
    pre_minus[k + 1] = pre_minus[k] + f.mass(k) * (1.0 - q);
  }
  GridProfile prof;
  prof.p_plus = pre_plus[K];
  prof.reject_plus.resize(grid.size());
  prof.reject_minus.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double tau = grid.tau(j);
    if (tau <= f.lo()) {
      prof.reject_plus[j] = 0.0;
      prof.reject_minus[j] = 0.0;
      continue;
    }
    if (tau >= f.hi()) {
      prof.reject_plus[j] = pre_plus[K];
      prof.reject_minus[j] = pre_minus[K];
      continue;
    }
    const std::size_t k = f.bin_of(tau);
    const double r = reject_fraction(f, k, tau);
    const double q = domain.p_plus_given_bin[k];
    prof.reject_plus[j] = pre_plus[k] + r * f.mass(k) * q;
    prof.reject_minus[j] = pre_minus[k] + r * f.mass(k) * (1.0 - q);
  }
  return prof;
}

GridProfile profile(const ThresholdClassifier& h, const EmpiricalDataset& data) {
  return profile(HypothesisGrid({h.tau()}, h.mode(), h.scorer()), data);
}

GridProfile profile(const ThresholdClassifier& h, const BinnedDomain& domain) {
  require_binned_classifier(h);
  return profile(HypothesisGrid({h.tau()}, h.mode(), h.scorer()), domain);
}

double risk(const ThresholdClassifier& h, const EmpiricalDataset& data) {
  require_nonempty(data);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(h, data.x(i)) != data.y(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double risk(const ThresholdClassifier& h, const BinnedDomain& domain) {
  return profile(h, domain).error(0);
}

ClassRisks class_conditional_risks(const ThresholdClassifier& h, const EmpiricalDataset& data) {
  return class_risks_from(profile(h, data));
}

ClassRisks class_conditional_risks(const ThresholdClassifier& h, const BinnedDomain& domain) {
  return class_risks_from(profile(h, domain));
}

Rates rates(const ThresholdClassifier& h, const EmpiricalDataset& data) {
  const auto r = class_conditional_risks(h, data);
  return Rates{1.0 - r.err_plus, r.err_minus};
}

Rates rates(const ThresholdClassifier& h, const BinnedDomain& domain) {
  const auto r = class_conditional_risks(h, domain);
  return Rates{1.0 - r.err_plus, r.err_minus};
}

LabelMarginal label_marginal(const EmpiricalDataset& data) {
  require_nonempty(data);
  return LabelMarginal(static_cast<double>(data.count_positive()) /
                       static_cast<double>(data.size()));
}

LabelMarginal label_marginal(const BinnedDomain& domain) {
  require_conditional(domain);
  double p = 0.0;
  for (std::size_t k = 0; k < domain.density.bins(); ++k) {
    p += domain.density.mass(k) * domain.p_plus_given_bin[k];
  }
  return LabelMarginal(std::clamp(p, 0.0, 1.0));
}

LabelMarginal prediction_marginal(const ThresholdClassifier& h, const EmpiricalDataset& data) {
  require_nonempty(data);
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (is_positive(predict(h, data.x(i)))) ++accepted;
  }
  return LabelMarginal(static_cast<double>(accepted) / static_cast<double>(data.size()));
}

LabelMarginal prediction_marginal(const ThresholdClassifier& h, const BinnedDomain& domain) {
  require_binned_classifier(h);
  const auto& f = domain.density;
  double accepted = 0.0;
  for (std::size_t k = 0; k < f.bins(); ++k) {
    accepted += f.mass(k) * (1.0 - reject_fraction(f, k, h.tau()));
  }
  return LabelMarginal(std::clamp(accepted, 0.0, 1.0));
}

double h_divergence(const GridProfile& a, const GridProfile& b) {
  if (a.size() != b.size() || a.size() == 0) {
    throw Error(ErrorCode::InvalidConfig, "profiles must come from the same nonempty grid");
  }
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double g = a.reject(j) - b.reject(j);
    if (j == 0 || g < lo) lo = g;
    if (j == 0 || g > hi) hi = g;
  }
  return std::min(2.0, 2.0 * (hi - lo));
}

double h_divergence(const EmpiricalDataset& a, const EmpiricalDataset& b,
                    const HypothesisGrid& grid) {
  return h_divergence(profile(grid, a), profile(grid, b));
}

double h_divergence(const BinnedDomain& a, const BinnedDomain& b, const HypothesisGrid& grid) {
  return h_divergence(profile(grid, a), profile(grid, b));
}

ImportanceWeightMap::ImportanceWeightMap(const BinnedDensity1D& source, std::vector<double> omega)
    : lo_(source.lo()), hi_(source.hi()), omega_(std::move(omega)) {
  if (omega_.size() != source.bins()) {
    throw Error(ErrorCode::MismatchedBins, "weights and source use different bins");
  }
  double mean = 0.0;
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    if (!std::isfinite(omega_[k]) || omega_[k] < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "importance weights must be finite and nonnegative");
    }
    mean += omega_[k] * source.mass(k);
  }
  if (std::abs(mean - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvariantViolation,
                "importance weights have source mean " + std::to_string(mean));
  }
}

bool ImportanceWeightMap::aligned_with(const BinnedDensity1D& density) const noexcept {
  return density.bins() == omega_.size() && density.lo() == lo_ && density.hi() == hi_;
}

double ImportanceWeightMap::at(double x) const {
  if (!(x >= lo_ && x <= hi_)) throw Error(ErrorCode::OutOfDomain, "x outside weight support");
  const auto K = omega_.size();
  auto k = static_cast<std::size_t>((x - lo_) / (hi_ - lo_) * static_cast<double>(K));
  return omega_[std::min(k, K - 1)];
}

ImportanceWeightMap importance_weights(const BinnedDensity1D& source,
                                       const BinnedDensity1D& induced) {
  if (!same_bins(source, induced)) {
    throw Error(ErrorCode::MismatchedBins, "source and induced densities use different bins");
  }
  std::vector<double> omega(source.bins(), 0.0);
  for (std::size_t k = 0; k < source.bins(); ++k) {
    const double s = source.mass(k);
    const double t = induced.mass(k);
    if (s > 0.0) {
      omega[k] = t / s;
    } else if (t > 0.0) {
      throw Error(ErrorCode::UnsupportedShift,
                  "induced mass on bin " + std::to_string(k) + " where the source has none");
    }
  }
  return ImportanceWeightMap(source, std::move(omega));
}

double weight_variance(const ImportanceWeightMap& omega, const BinnedDensity1D& source) {
  if (!omega.aligned_with(source)) throw Error(ErrorCode::MismatchedBins, "weight alignment");
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < source.bins(); ++k) {
    m1 += source.mass(k) * omega.omega(k);
    m2 += source.mass(k) * omega.omega(k) * omega.omega(k);
  }
  return std::max(0.0, m2 - m1 * m1);
}

double reweighted_risk(const ThresholdClassifier& h, const BinnedDomain& source,
                       const ImportanceWeightMap& omega) {
  require_binned_classifier(h);
  require_conditional(source);
  const auto& f = source.density;
  if (!omega.aligned_with(f)) throw Error(ErrorCode::MismatchedBins, "weight alignment");
  double total = 0.0;
  for (std::size_t k = 0; k < f.bins(); ++k) {
    const double r = reject_fraction(f, k, h.tau());
    const double q = source.p_plus_given_bin[k];
    total += omega.omega(k) * f.mass(k) * (r * q + (1.0 - r) * (1.0 - q));
  }
  return total;
}

double reweighted_risk(const ThresholdClassifier& h, const EmpiricalDataset& source,
                       const ImportanceWeightMap& omega) {
  require_nonempty(source);
  double total = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    auto x = source.x(i);
    if (predict(h, x) != source.y(i)) total += omega.at(x[0]);
  }
  return total / static_cast<double>(source.size());
}

namespace {

std::size_t cell_of(const FeaturePartition& part, double v) {
  if (v < part.lo) return 0;
  if (v > part.hi) return part.bins + 1;
  auto k = static_cast<std::size_t>((v - part.lo) / (part.hi - part.lo) *
                                    static_cast<double>(part.bins));
  return 1 + std::min(k, part.bins - 1);
}

double tv_of_cells(const EmpiricalDataset& a, const EmpiricalDataset& b,
                   const FeaturePartition& part, const ThresholdClassifier* h) {
  require_nonempty(a);
  require_nonempty(b);
  if (part.coordinate >= a.dim() || part.coordinate >= b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "partition coordinate out of range");
  }
  if (part.bins == 0 || !(part.hi > part.lo)) {
    throw Error(ErrorCode::InvalidConfig, "feature partition needs bins >= 1 and hi > lo");
  }
  const std::size_t split = h ? 2 : 1;
  const std::size_t cells = (part.bins + 2) * split;
  std::vector<double> ca(cells, 0.0);
  std::vector<double> cb(cells, 0.0);
  auto fill = [&](const EmpiricalDataset& d, std::vector<double>& c) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      auto x = d.x(i);
      std::size_t cell = cell_of(part, x[part.coordinate]) * split;
      if (h && is_positive(predict(*h, x))) cell += 1;
      c[cell] += 1.0;
    }
  };
  fill(a, ca);
  fill(b, cb);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double s = 0.0;
  for (std::size_t c = 0; c < cells; ++c) s += std::abs(ca[c] / na - cb[c] / nb);
  return std::min(1.0, 0.5 * s);
}

}  // namespace

double feature_tv(const EmpiricalDataset& a, const EmpiricalDataset& b,
                  const FeaturePartition& partition) {
  return tv_of_cells(a, b, partition, nullptr);
}

double feature_tv(const EmpiricalDataset& a, const EmpiricalDataset& b,
                  const FeaturePartition& partition, const ThresholdClassifier& h) {
  return tv_of_cells(a, b, partition, &h);
}

double feature_tv(const BinnedDomain& a, const BinnedDomain& b) {
  return tv_binned(a.density, b.density);
}

}  // namespace ida
