#include "ida/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ida/error.hpp"

namespace ida {

std::size_t argmin_smallest(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::InvalidConfig, "argmin of an empty sequence");
  const double best = *std::min_element(values.begin(), values.end());
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] <= best + 1e-12) return j;
  }
  return 0;
}

namespace {

std::vector<double> errors_of(const GridProfile& prof) {
  std::vector<double> e(prof.size());
  for (std::size_t j = 0; j < prof.size(); ++j) e[j] = prof.error(j);
  return e;
}

}  // namespace

ThresholdClassifier source_optimal(const HypothesisGrid& grid, const EmpiricalDataset& source) {
  return grid.at(argmin_smallest(errors_of(profile(grid, source))));
}

ThresholdClassifier source_optimal(const HypothesisGrid& grid, const BinnedDomain& source) {
  return grid.at(argmin_smallest(errors_of(profile(grid, source))));
}

InducedSearch induced_search(const HypothesisGrid& grid, const BinnedShiftModel& model) {
  InducedSearch out{0, std::vector<double>(grid.size())};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto h = grid.at(j);
    out.induced_risk[j] = risk(h, model.induce(h));
  }
  out.index = argmin_smallest(out.induced_risk);
  return out;
}

InducedSearch induced_search(const HypothesisGrid& grid, const SampledShiftModel& model,
                             std::uint64_t seed) {
  InducedSearch out{0, std::vector<double>(grid.size())};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto h = grid.at(j);
    out.induced_risk[j] = risk(h, model.induce(h, seed));
  }
  out.index = argmin_smallest(out.induced_risk);
  return out;
}

ThresholdClassifier induced_optimal(const HypothesisGrid& grid, const BinnedShiftModel& model) {
  return grid.at(induced_search(grid, model).index);
}

ThresholdClassifier induced_optimal(const HypothesisGrid& grid, const SampledShiftModel& model,
                                    std::uint64_t seed) {
  return grid.at(induced_search(grid, model, seed).index);
}

double replicator_closed_form_risk(double theta, const ReplicatorConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(theta)) throw Error(ErrorCode::NonFinite, "theta must be finite");
  const Rates r{1.0 - truncated_normal_cdf(theta, cfg.mu_plus, cfg.sigma),
                1.0 - truncated_normal_cdf(theta, cfg.mu_minus, cfg.sigma)};
  const auto F = fitness_utility(r, cfg.U);
  const double p = replicator_induce(cfg.p0, F.plus, F.minus).p_plus;
  return 1.0 - (p * r.tpr + (1.0 - p) * (1.0 - r.fpr));
}

double replicator_risk_gradient(double theta, const ReplicatorConfig& cfg, double step) {
  return (replicator_closed_form_risk(theta + step, cfg) -
          replicator_closed_form_risk(theta - step, cfg)) /
         (2.0 * step);
}

double replicator_gd(const ReplicatorConfig& cfg, double theta0, const GdOptions& options,
                     GdTrace* trace) {
  if (!(options.lr > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning rate must be > 0");
  double theta = std::clamp(theta0, 0.0, 1.0);
  double risk_now = replicator_closed_form_risk(theta, cfg);
  double lr = options.lr;
  if (trace) {
    trace->theta.push_back(theta);
    trace->risk.push_back(risk_now);
  }
  for (std::size_t it = 0; it < options.iters; ++it) {
    const double g = replicator_risk_gradient(theta, cfg);
    const double next = std::clamp(theta - lr * g, 0.0, 1.0);
    const double risk_next = replicator_closed_form_risk(next, cfg);
    if (options.backtracking && risk_next > risk_now) {
      lr *= 0.5;
    } else {
      theta = next;
      risk_now = risk_next;
    }
    if (trace) {
      trace->theta.push_back(theta);
      trace->risk.push_back(risk_now);
    }
  }
  return theta;
}

double replicator_gd_multistart(const ReplicatorConfig& cfg, const std::vector<double>& starts,
                                const GdOptions& options) {
  if (starts.empty()) throw Error(ErrorCode::InvalidConfig, "no starting points");
  double best_theta = 0.0;
  double best_risk = std::numeric_limits<double>::infinity();
  for (double t0 : starts) {
    const double t = replicator_gd(cfg, t0, options);
    const double r = replicator_closed_form_risk(t, cfg);
    if (r < best_risk - 1e-15) {
      best_risk = r;
      best_theta = t;
    }
  }
  return best_theta;
}

void BanditConfig::validate() const {
  if (dim == 0) throw Error(ErrorCode::InvalidConfig, "dimension must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidConfig, "delta in (0,1)");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::InvalidConfig, "eta >= 0");
  if (T == 0) throw Error(ErrorCode::InvalidConfig, "T must be >= 1");
  if (!(theta_radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "theta radius must be > 0");
  if (n_t == 0) throw Error(ErrorCode::InvalidConfig, "n_t must be >= 1");
}

namespace {

double norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

BanditResult bandit_gd(const PerformativeProblem& problem, const BanditConfig& cfg, Rng& rng) {
  cfg.validate();
  if (!problem.loss || !problem.sampler) {
    throw Error(ErrorCode::InvalidConfig, "problem needs a loss and a sampler");
  }
  const std::size_t d = cfg.dim;
  const double radius = (1.0 - cfg.delta) * cfg.theta_radius;
  std::normal_distribution<double> normal(0.0, 1.0);
  BanditResult out{Vector(d, 0.0), {}};
  out.trace.reserve(cfg.T);
  Vector u(d);
  Vector probe(d);
  for (std::size_t t = 1; t <= cfg.T; ++t) {
    double un = 0.0;
    while (!(un > 0.0)) {
      for (auto& c : u) c = normal(rng);
      un = norm(u);
    }
    for (std::size_t i = 0; i < d; ++i) {
      u[i] /= un;
      probe[i] = out.theta[i] + cfg.delta * u[i];
    }
    const auto samples = problem.sampler(probe, cfg.n_t, rng);
    if (samples.empty()) throw Error(ErrorCode::InvalidConfig, "sampler returned no data");
    double ir = 0.0;
    for (const auto& z : samples) {
      const double l = problem.loss(probe, z);
      if (!std::isfinite(l)) throw Error(ErrorCode::NonFinite, "loss is not finite");
      ir += l;
    }
    ir /= static_cast<double>(samples.size());
    const double scale = static_cast<double>(d) / cfg.delta * ir;
    for (std::size_t i = 0; i < d; ++i) out.theta[i] -= cfg.eta * scale * u[i];
    const double n = norm(out.theta);
    if (n > radius) {
      for (auto& c : out.theta) c *= radius / n;
    }
    out.trace.push_back(BanditTraceRow{t, ir, norm(out.theta)});
  }
  return out;
}

CsvTable bandit_trace_csv(const BanditResult& result) {
  CsvTable table({"round", "ir_estimate", "theta_norm"});
  for (const auto& r : result.trace) {
    table.row(std::vector<double>{static_cast<double>(r.round), r.ir_estimate, r.theta_norm});
  }
  return table;
}

CsvTable gd_trace_csv(const GdTrace& trace) {
  CsvTable table({"iter", "theta", "risk"});
  for (std::size_t i = 0; i < trace.theta.size(); ++i) {
    table.row(std::vector<double>{static_cast<double>(i), trace.theta[i], trace.risk[i]});
  }
  return table;
}

PerformativeProblem QuadraticToy::problem() const {
  const QuadraticToy toy = *this;
  PerformativeProblem p;
  p.loss = [](const Vector& theta, const Vector& z) {
    double s = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) s += (theta[i] - z[i]) * (theta[i] - z[i]);
    return s;
  };
  p.sampler = [toy](const Vector& theta, std::size_t count, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> out(count, Vector(theta.size()));
    for (auto& z : out) {
      for (std::size_t i = 0; i < theta.size(); ++i) {
        z[i] = toy.mu0 + toy.eps * theta[i] + toy.s * normal(rng);
      }
    }
    return out;
  };
  return p;
}

double QuadraticToy::induced_risk(const Vector& theta) const {
  double total = 0.0;
  for (double t : theta) {
    const double m = (1.0 - eps) * t - mu0;
    total += m * m + s * s;
  }
  return total;
}

double QuadraticToy::minimum(std::size_t dim) const { return static_cast<double>(dim) * s * s; }

Vector QuadraticToy::minimizer(std::size_t dim) const {
  if (!(eps < 1.0)) throw Error(ErrorCode::InvalidConfig, "toy needs eps < 1");
  return Vector(dim, mu0 / (1.0 - eps));
}

std::vector<double> regularized_objective(const GridProfile& prof, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidAlpha, "alpha must be finite and >= 0");
  }
  if (prof.p_plus - 0.5 * alpha < 0.0) {
    throw Error(ErrorCode::InvalidAlpha, "alpha/2 exceeds the positive rate; the penalty would "
                                         "reward misclassifying positives");
  }
  std::vector<double> obj(prof.size());
  for (std::size_t j = 0; j < prof.size(); ++j) {
    obj[j] = prof.error(j);
    if (alpha > 0.0) obj[j] += alpha * 0.5 * (prof.tpr(j) + prof.fpr(j));
  }
  return obj;
}

ThresholdClassifier regularized_training(const EmpiricalDataset& source,
                                         const HypothesisGrid& grid, double alpha) {
  const auto prof = profile(grid, source);
  if (!prof.has_both_classes()) throw Error(ErrorCode::MissingClass, "both classes required");
  return grid.at(argmin_smallest(regularized_objective(prof, alpha)));
}

ThresholdClassifier regularized_training(const BinnedDomain& source, const HypothesisGrid& grid,
                                         double alpha) {
  const auto prof = profile(grid, source);
  if (!prof.has_both_classes()) throw Error(ErrorCode::MissingClass, "both classes required");
  return grid.at(argmin_smallest(regularized_objective(prof, alpha)));
}

double improvement_metric(double induced_risk_hS, double induced_risk_hT) {
  const double acc_s = 1.0 - induced_risk_hS;
  const double acc_t = 1.0 - induced_risk_hT;
  if (!(acc_s > 0.0)) throw Error(ErrorCode::DegenerateAccuracy, "source classifier accuracy is 0");
  return (acc_t - acc_s) / acc_s;
}

double improvement_metric(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                          const BinnedShiftModel& model) {
  return improvement_metric(risk(hS, model.induce(hS)), risk(hT, model.induce(hT)));
}

double improvement_metric(const ThresholdClassifier& hS, const ThresholdClassifier& hT,
                          const SampledShiftModel& model, std::uint64_t seed) {
  return improvement_metric(risk(hS, model.induce(hS, seed)), risk(hT, model.induce(hT, seed)));
}

}  // namespace ida
