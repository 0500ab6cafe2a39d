#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ida/dataset.hpp"

namespace ida {

struct LinearScorer {
  std::vector<double> w;
  double b = 0.0;

  double score(std::span<const double> x) const;  // w.x + b
};

double sigmoid(double z) noexcept;

// "w_1 ... w_d b" on one line.
std::string to_text(const LinearScorer& scorer);
LinearScorer scorer_from_text(const std::string& line);

enum class ThresholdMode {
  Squashed,  // +1 iff sigmoid(w.x + b) > tau
  Raw,       // +1 iff x_1 >= tau
};

const char* to_string(ThresholdMode mode) noexcept;

class ThresholdClassifier {
 public:
  static ThresholdClassifier raw(double tau);
  static ThresholdClassifier squashed(LinearScorer scorer, double tau);

  double tau() const noexcept { return tau_; }
  ThresholdMode mode() const noexcept { return mode_; }
  const LinearScorer& scorer() const noexcept { return scorer_; }
  ThresholdClassifier with_tau(double tau) const;

  // Quantity compared against tau: x_1 in raw mode, the squashed score otherwise.
  double statistic(std::span<const double> x) const;
  bool accepts_statistic(double s) const noexcept {
    return mode_ == ThresholdMode::Raw ? s >= tau_ : s > tau_;
  }

 private:
  ThresholdClassifier(LinearScorer scorer, double tau, ThresholdMode mode);

  LinearScorer scorer_;
  double tau_;
  ThresholdMode mode_;
};

Label predict(const ThresholdClassifier& h, std::span<const double> x);

class HypothesisGrid {
 public:
  HypothesisGrid(std::vector<double> taus, ThresholdMode mode, LinearScorer scorer = {});

  // count equally spaced thresholds on [lo, hi].
  static HypothesisGrid uniform(std::size_t count, double lo, double hi, ThresholdMode mode,
                                LinearScorer scorer = {});

  std::size_t size() const noexcept { return taus_.size(); }
  double tau(std::size_t j) const { return taus_[j]; }
  const std::vector<double>& taus() const noexcept { return taus_; }
  ThresholdMode mode() const noexcept { return mode_; }
  const LinearScorer& scorer() const noexcept { return scorer_; }
  ThresholdClassifier at(std::size_t j) const;

  // Statistic of every point, in dataset order.
  std::vector<double> statistics(const EmpiricalDataset& data) const;

 private:
  std::vector<double> taus_;
  ThresholdMode mode_;
  LinearScorer scorer_;
};

inline constexpr std::size_t kDefaultGridSize = 201;

struct TrainingOptions {
  std::size_t epochs = 500;
  double lr = 0.5;
};

// Full-batch gradient descent on the mean logistic loss from zero weights.
LinearScorer train_base_scorer(const EmpiricalDataset& data, const TrainingOptions& options = {});

}  // namespace ida
