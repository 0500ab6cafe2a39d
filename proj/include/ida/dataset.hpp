#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ida {

enum class Label : std::int8_t { Negative = -1, Positive = +1 };

inline bool is_positive(Label y) noexcept { return y == Label::Positive; }
inline Label label_from_bool(bool positive) noexcept {
  return positive ? Label::Positive : Label::Negative;
}
inline int to_int(Label y) noexcept { return static_cast<int>(y); }

enum class DomainTag { Source, Induced };
const char* to_string(DomainTag tag) noexcept;

struct LabeledPoint {
  std::vector<double> x;
  Label y = Label::Negative;
  int group = -1;  // -1 when the point carries no group
};

// Labeled samples with a uniform feature dimension, stored row-major.
class EmpiricalDataset {
 public:
  EmpiricalDataset(std::size_t dim, DomainTag tag = DomainTag::Source);

  // Validates nonemptiness and uniform dimension.
  static EmpiricalDataset from_points(const std::vector<LabeledPoint>& points,
                                      DomainTag tag = DomainTag::Source);

  void reserve(std::size_t n);
  void push_back(std::span<const double> x, Label y, int group = -1);
  void push_back(const LabeledPoint& point) { push_back(point.x, point.y, point.group); }

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  DomainTag tag() const noexcept { return tag_; }
  void set_tag(DomainTag tag) noexcept { tag_ = tag; }

  std::span<const double> x(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  std::span<double> x_mut(std::size_t i) { return {features_.data() + i * dim_, dim_}; }
  Label y(std::size_t i) const { return labels_[i]; }
  void set_y(std::size_t i, Label y) { labels_[i] = y; }
  int group(std::size_t i) const { return groups_[i]; }
  LabeledPoint point(std::size_t i) const;

  std::size_t count_positive() const noexcept;

 private:
  std::size_t dim_;
  DomainTag tag_;
  std::vector<double> features_;
  std::vector<Label> labels_;
  std::vector<int> groups_;
};

// Equal-width bins on [lo, hi] carrying probability mass.
class BinnedDensity1D {
 public:
  BinnedDensity1D(double lo, double hi, std::vector<double> mass);

  static BinnedDensity1D uniform(double lo, double hi, std::size_t bins);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::size_t bins() const noexcept { return mass_.size(); }
  double width() const noexcept { return (hi_ - lo_) / static_cast<double>(mass_.size()); }
  double edge(std::size_t k) const noexcept;
  double mass(std::size_t k) const { return mass_[k]; }
  std::span<const double> masses() const noexcept { return mass_; }

  // Bin index containing x; the upper endpoint hi belongs to the last bin.
  std::size_t bin_of(double x) const;
  bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }

 private:
  double lo_;
  double hi_;
  std::vector<double> mass_;
};

bool same_bins(const BinnedDensity1D& a, const BinnedDensity1D& b) noexcept;

struct LabelMarginal {
  explicit LabelMarginal(double p_plus);
  double p_plus;
};

// Piecewise-constant joint law of (x, y): uniform density inside each bin and
// P(Y=+1 | x) constant per bin. Every risk and divergence evaluated on it is
// exact for that law.
struct BinnedDomain {
  BinnedDensity1D density;
  std::vector<double> p_plus_given_bin;  // empty when the conditional is unknown
  DomainTag tag = DomainTag::Source;

  bool has_conditional() const noexcept { return !p_plus_given_bin.empty(); }
  void validate() const;
};

// Histogram of one feature coordinate over [lo, hi] with the given bin count.
BinnedDensity1D histogram(const EmpiricalDataset& data, std::size_t coordinate, double lo,
                          double hi, std::size_t bins);

}  // namespace ida
