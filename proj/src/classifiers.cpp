#include "ida/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ida/error.hpp"

namespace ida {

double LinearScorer::score(std::span<const double> x) const {
  if (x.size() != w.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "scorer has dimension " + std::to_string(w.size()) + ", input has " +
                    std::to_string(x.size()));
  }
  double s = b;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
  return s;
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::string to_text(const LinearScorer& scorer) {
  std::string out;
  char buf[40];
  for (double v : scorer.w) {
    std::snprintf(buf, sizeof buf, "%.17g ", v);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", scorer.b);
  out += buf;
  return out;
}

LinearScorer scorer_from_text(const std::string& line) {
  std::istringstream in(line);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad scorer value '" + token + "'");
    }
    if (used != token.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::ParseError, "bad scorer value '" + token + "'");
    }
    values.push_back(v);
  }
  if (values.size() < 2) throw Error(ErrorCode::ParseError, "scorer needs weights and a bias");
  LinearScorer scorer;
  scorer.b = values.back();
  values.pop_back();
  scorer.w = std::move(values);
  return scorer;
}

const char* to_string(ThresholdMode mode) noexcept {
  return mode == ThresholdMode::Raw ? "raw" : "squashed";
}

ThresholdClassifier::ThresholdClassifier(LinearScorer scorer, double tau, ThresholdMode mode)
    : scorer_(std::move(scorer)), tau_(tau), mode_(mode) {
  if (!std::isfinite(tau)) throw Error(ErrorCode::NonFinite, "threshold must be finite");
  if (mode == ThresholdMode::Squashed && (tau < 0.0 || tau > 1.0)) {
    throw Error(ErrorCode::OutOfDomain, "squashed threshold must lie in [0,1]");
  }
  for (double v : scorer_.w) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "scorer weight not finite");
  }
  if (!std::isfinite(scorer_.b)) throw Error(ErrorCode::NonFinite, "scorer bias not finite");
}

ThresholdClassifier ThresholdClassifier::raw(double tau) {
  return ThresholdClassifier({}, tau, ThresholdMode::Raw);
}

ThresholdClassifier ThresholdClassifier::squashed(LinearScorer scorer, double tau) {
  return ThresholdClassifier(std::move(scorer), tau, ThresholdMode::Squashed);
}

ThresholdClassifier ThresholdClassifier::with_tau(double tau) const {
  return ThresholdClassifier(scorer_, tau, mode_);
}

double ThresholdClassifier::statistic(std::span<const double> x) const {
  if (mode_ == ThresholdMode::Raw) {
    if (x.empty()) throw Error(ErrorCode::DimensionMismatch, "raw mode needs x_1");
    return x[0];
  }
  return sigmoid(scorer_.score(x));
}

Label predict(const ThresholdClassifier& h, std::span<const double> x) {
  return label_from_bool(h.accepts_statistic(h.statistic(x)));
}

HypothesisGrid::HypothesisGrid(std::vector<double> taus, ThresholdMode mode, LinearScorer scorer)
    : taus_(std::move(taus)), mode_(mode), scorer_(std::move(scorer)) {
  if (taus_.empty()) throw Error(ErrorCode::InvalidConfig, "hypothesis grid must be nonempty");
  for (std::size_t j = 1; j < taus_.size(); ++j) {
    if (!(taus_[j] > taus_[j - 1])) {
      throw Error(ErrorCode::InvalidConfig, "grid thresholds must be strictly increasing");
    }
  }
  if (mode_ == ThresholdMode::Squashed && (taus_.front() < 0.0 || taus_.back() > 1.0)) {
    throw Error(ErrorCode::OutOfDomain, "squashed thresholds must lie in [0,1]");
  }
}

HypothesisGrid HypothesisGrid::uniform(std::size_t count, double lo, double hi,
                                       ThresholdMode mode, LinearScorer scorer) {
  if (count == 0) throw Error(ErrorCode::InvalidConfig, "grid size must be >= 1");
  std::vector<double> taus(count);
  if (count == 1) {
    taus[0] = lo;
  } else {
    for (std::size_t j = 0; j < count; ++j) {
      taus[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
    }
    taus.back() = hi;
  }
  return HypothesisGrid(std::move(taus), mode, std::move(scorer));
}

ThresholdClassifier HypothesisGrid::at(std::size_t j) const {
  return mode_ == ThresholdMode::Raw ? ThresholdClassifier::raw(taus_.at(j))
                                     : ThresholdClassifier::squashed(scorer_, taus_.at(j));
}

std::vector<double> HypothesisGrid::statistics(const EmpiricalDataset& data) const {
  std::vector<double> s(data.size());
  if (mode_ == ThresholdMode::Raw) {
    for (std::size_t i = 0; i < data.size(); ++i) s[i] = data.x(i)[0];
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) s[i] = sigmoid(scorer_.score(data.x(i)));
  }
  return s;
}

LinearScorer train_base_scorer(const EmpiricalDataset& data, const TrainingOptions& options) {
  const std::size_t n = data.size();
  const std::size_t pos = data.count_positive();
  if (pos == 0 || pos == n) {
    throw Error(ErrorCode::MissingClass, "logistic training needs both classes");
  }
  const std::size_t d = data.dim();
  LinearScorer scorer{std::vector<double>(d, 0.0), 0.0};
  std::vector<double> grad(d);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = data.x(i);
      const double t = is_positive(data.y(i)) ? 1.0 : 0.0;
      const double z = scorer.score(x);
      const double p = sigmoid(z);
      // log(1 + e^z) - t z, stable for large |z|
      loss += (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - t * z;
      const double r = p - t;
      for (std::size_t k = 0; k < d; ++k) grad[k] += r * x[k];
      grad_b += r;
    }
    if (!std::isfinite(loss)) throw Error(ErrorCode::NonFinite, "logistic loss diverged");
    for (std::size_t k = 0; k < d; ++k) scorer.w[k] -= options.lr * grad[k] * inv_n;
    scorer.b -= options.lr * grad_b * inv_n;
    for (double v : scorer.w) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "logistic weights diverged");
    }
  }
  return scorer;
}

}  // namespace ida
