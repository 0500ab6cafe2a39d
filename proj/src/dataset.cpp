#include "ida/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ida/error.hpp"

namespace ida {

const char* to_string(DomainTag tag) noexcept {
  return tag == DomainTag::Source ? "source" : "induced";
}

EmpiricalDataset::EmpiricalDataset(std::size_t dim, DomainTag tag) : dim_(dim), tag_(tag) {
  if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "feature dimension must be >= 1");
}

EmpiricalDataset EmpiricalDataset::from_points(const std::vector<LabeledPoint>& points,
                                               DomainTag tag) {
  if (points.empty()) throw Error(ErrorCode::InvalidConfig, "dataset must be nonempty");
  EmpiricalDataset data(points.front().x.size(), tag);
  data.reserve(points.size());
  for (const auto& p : points) data.push_back(p);
  return data;
}

void EmpiricalDataset::reserve(std::size_t n) {
  features_.reserve(n * dim_);
  labels_.reserve(n);
  groups_.reserve(n);
}

void EmpiricalDataset::push_back(std::span<const double> x, Label y, int group) {
  if (x.size() != dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                "point has dimension " + std::to_string(x.size()) + ", dataset has " +
                    std::to_string(dim_));
  }
  if (y != Label::Positive && y != Label::Negative) {
    throw Error(ErrorCode::InvalidConfig, "label must be -1 or +1");
  }
  features_.insert(features_.end(), x.begin(), x.end());
  labels_.push_back(y);
  groups_.push_back(group);
}

LabeledPoint EmpiricalDataset::point(std::size_t i) const {
  auto xs = x(i);
  return LabeledPoint{std::vector<double>(xs.begin(), xs.end()), labels_[i], groups_[i]};
}

std::size_t EmpiricalDataset::count_positive() const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label::Positive));
}

BinnedDensity1D::BinnedDensity1D(double lo, double hi, std::vector<double> mass)
    : lo_(lo), hi_(hi), mass_(std::move(mass)) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw Error(ErrorCode::InvalidConfig, "density interval needs finite hi > lo");
  }
  if (mass_.size() < 2) throw Error(ErrorCode::InvalidConfig, "density needs at least 2 bins");
  double total = 0.0;
  for (double m : mass_) {
    if (!std::isfinite(m) || m < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "bin mass must be finite and nonnegative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "bin masses sum to " + std::to_string(total));
  }
}

BinnedDensity1D BinnedDensity1D::uniform(double lo, double hi, std::size_t bins) {
  return BinnedDensity1D(lo, hi, std::vector<double>(bins, 1.0 / static_cast<double>(bins)));
}

double BinnedDensity1D::edge(std::size_t k) const noexcept {
  if (k >= mass_.size()) return hi_;
  return lo_ + (hi_ - lo_) * static_cast<double>(k) / static_cast<double>(mass_.size());
}

std::size_t BinnedDensity1D::bin_of(double x) const {
  if (!contains(x)) throw Error(ErrorCode::OutOfDomain, "value outside density support");
  const auto k = static_cast<std::size_t>((x - lo_) / (hi_ - lo_) *
                                          static_cast<double>(mass_.size()));
  return std::min(k, mass_.size() - 1);
}

bool same_bins(const BinnedDensity1D& a, const BinnedDensity1D& b) noexcept {
  return a.bins() == b.bins() && a.lo() == b.lo() && a.hi() == b.hi();
}

LabelMarginal::LabelMarginal(double p) : p_plus(p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::OutOfDomain, "p_plus must lie in [0,1]");
}

void BinnedDomain::validate() const {
  if (!has_conditional()) return;
  if (p_plus_given_bin.size() != density.bins()) {
    throw Error(ErrorCode::MismatchedBins, "conditional and density bin counts differ");
  }
  for (double q : p_plus_given_bin) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw Error(ErrorCode::OutOfDomain, "P(Y=+1|bin) must lie in [0,1]");
    }
  }
}

BinnedDensity1D histogram(const EmpiricalDataset& data, std::size_t coordinate, double lo,
                          double hi, std::size_t bins) {
  if (data.empty()) throw Error(ErrorCode::InvalidConfig, "histogram of an empty dataset");
  if (coordinate >= data.dim()) throw Error(ErrorCode::DimensionMismatch, "coordinate index");
  std::vector<double> counts(bins, 0.0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (std::size_t i = 0; i < data.size(); ++i) {
    double v = data.x(i)[coordinate];
    if (v < lo || v > hi) throw Error(ErrorCode::OutOfDomain, "sample outside histogram range");
    auto k = std::min(static_cast<std::size_t>((v - lo) * scale), bins - 1);
    counts[k] += 1.0;
  }
  const double n = static_cast<double>(data.size());
  for (double& c : counts) c /= n;
  return BinnedDensity1D(lo, hi, std::move(counts));
}

}  // namespace ida
