#include "ida/shift_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "ida/error.hpp"

namespace ida {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

constexpr double kEdgeSlack = 1e-12;

void check_strategic(double tau, double B) {
  if (!std::isfinite(tau) || !std::isfinite(B) || B < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "strategic budget must be finite and >= 0");
  }
  if (tau - B < -kEdgeSlack || tau + B > 1.0 + kEdgeSlack) {
    throw Error(ErrorCode::InvalidConfig, "strategic model needs tau - B >= 0 and tau + B <= 1");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

double LabelConditional::operator()(double x) const {
  if (shape == Shape::Linear) return std::clamp(x, 0.0, 1.0);
  return sigmoid(slope * (x - center));
}

double LabelConditional::average(double a, double b) const {
  if (!(b > a)) return (*this)(a);
  if (shape == Shape::Linear) return std::clamp(0.5 * (a + b), 0.0, 1.0);
  if (std::abs(slope) < 1e-12) return 0.5;
  return (softplus(slope * (b - center)) - softplus(slope * (a - center))) / (slope * (b - a));
}

double strategic_weight(double x, double tau, double B) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::OutOfDomain, "x must lie in [0,1]");
  check_strategic(tau, B);
  if (!(B > 0.0)) throw Error(ErrorCode::InvalidConfig, "strategic weight needs B > 0");
  if (x < tau - B) return 1.0;
  if (x < tau) return (tau - x) / B;
  if (x < tau + B) return (-x + tau + 2.0 * B) / B;
  return 1.0;
}

double strategic_weight_integral(double a, double b, double tau, double B) {
  check_strategic(tau, B);
  if (!(b > a)) return 0.0;
  if (!(B > 0.0)) return b - a;
  struct Piece {
    double start, end, intercept, slope;  // weight = intercept + slope * x
  };
  const Piece pieces[] = {
      {-std::numeric_limits<double>::infinity(), tau - B, 1.0, 0.0},
      {tau - B, tau, tau / B, -1.0 / B},
      {tau, tau + B, (tau + 2.0 * B) / B, -1.0 / B},
      {tau + B, std::numeric_limits<double>::infinity(), 1.0, 0.0},
  };
  double total = 0.0;
  for (const auto& p : pieces) {
    const double s = std::max(a, p.start);
    const double e = std::min(b, p.end);
    if (e > s) total += (e - s) * (p.intercept + p.slope * 0.5 * (s + e));
  }
  return total;
}

BinnedDensity1D strategic_induced_density(double tau, double B, std::size_t bins) {
  check_strategic(tau, B);
  if (bins < 2) throw Error(ErrorCode::InvalidConfig, "density needs at least 2 bins");
  std::vector<double> mass(bins);
  const double K = static_cast<double>(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    mass[k] = strategic_weight_integral(static_cast<double>(k) / K,
                                        static_cast<double>(k + 1) / K, tau, B);
  }
  return BinnedDensity1D(0.0, 1.0, std::move(mass));
}

double strategic_agent_response(double x, double tau, double B, Rng& rng) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::OutOfDomain, "x must lie in [0,1]");
  check_strategic(tau, B);
  if (x >= tau || x < tau - B) return x;
  const double success = 1.0 - (tau - x) / B;
  const double u = uniform01(rng);
  if (u >= success) return x;
  // width B - (tau - x)
  return tau + uniform01(rng) * (x + B - tau);
}

BinnedDomain strategic_source_domain(const LabelConditional& eta, std::size_t bins) {
  auto density = BinnedDensity1D::uniform(0.0, 1.0, bins);
  std::vector<double> q(bins);
  for (std::size_t k = 0; k < bins; ++k) q[k] = eta.average(density.edge(k), density.edge(k + 1));
  return BinnedDomain{std::move(density), std::move(q), DomainTag::Source};
}

EmpiricalDataset strategic_sample(std::size_t n, const LabelConditional& eta, Rng& rng) {
  EmpiricalDataset data(1, DomainTag::Source);
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = uniform01(rng);
    const double y = uniform01(rng);
    data.push_back(std::span<const double>(&x, 1), label_from_bool(y < eta(x)));
  }
  return data;
}

EmpiricalDataset strategic_respond(const EmpiricalDataset& source, double tau, double B,
                                   const LabelConditional& eta, Rng& rng) {
  if (source.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "strategic data is 1-D");
  EmpiricalDataset out(1, DomainTag::Induced);
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double x = strategic_agent_response(source.x(i)[0], tau, B, rng);
    const double y = uniform01(rng);
    out.push_back(std::span<const double>(&x, 1), label_from_bool(y < eta(x)));
  }
  return out;
}

// ---------------------------------------------------------------------------

void UtilityMatrix::validate() const {
  for (double v : {pp, pm, mp, mm}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "utility entries must be finite");
  }
}

Fitness fitness_accuracy(const Rates& r) noexcept { return Fitness{r.tpr, 1.0 - r.fpr}; }

Fitness fitness_utility(const Rates& r, const UtilityMatrix& U) noexcept {
  return Fitness{r.tpr * U.pp + (1.0 - r.tpr) * U.pm, r.fpr * U.mp + (1.0 - r.fpr) * U.mm};
}

Fitness fitness_accuracy(const ThresholdClassifier& h, const EmpiricalDataset& source) {
  return fitness_accuracy(rates(h, source));
}

Fitness fitness_accuracy(const ThresholdClassifier& h, const BinnedDomain& source) {
  return fitness_accuracy(rates(h, source));
}

Fitness fitness_utility(const ThresholdClassifier& h, const EmpiricalDataset& source,
                        const UtilityMatrix& U) {
  return fitness_utility(rates(h, source), U);
}

Fitness fitness_utility(const ThresholdClassifier& h, const BinnedDomain& source,
                        const UtilityMatrix& U) {
  return fitness_utility(rates(h, source), U);
}

LabelMarginal replicator_induce(LabelMarginal p_source, double F_plus, double F_minus) {
  if (!(F_plus >= 0.0) || !(F_minus >= 0.0)) {
    throw Error(ErrorCode::DegenerateFitness, "fitness values must be nonnegative");
  }
  const double p = p_source.p_plus;
  const double num = p * F_plus;
  const double den = num + (1.0 - p) * F_minus;
  if (!(den > 0.0)) throw Error(ErrorCode::DegenerateFitness, "mean fitness is zero");
  return LabelMarginal(std::clamp(num / den, 0.0, 1.0));
}

void ReplicatorConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidConfig, "replicator sigma must be positive");
  }
  if (!std::isfinite(mu_plus) || !std::isfinite(mu_minus)) {
    throw Error(ErrorCode::InvalidConfig, "replicator means must be finite");
  }
  if (bins < 2) throw Error(ErrorCode::InvalidConfig, "replicator density needs >= 2 bins");
  U.validate();
}

double truncated_normal_cdf(double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma must be positive");
  const double lo = normal_cdf((0.0 - mu) / sigma);
  const double hi = normal_cdf((1.0 - mu) / sigma);
  const double z = hi - lo;
  if (!(z > 1e-300)) throw Error(ErrorCode::InvalidConfig, "truncation interval has no mass");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return std::clamp((normal_cdf((x - mu) / sigma) - lo) / z, 0.0, 1.0);
}

double truncated_normal_sample(double mu, double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma must be positive");
  // Rejection from the untruncated Gaussian.
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    const double v = mu + sigma * standard_normal(rng);
    if (v >= 0.0 && v <= 1.0) return v;
  }
  throw Error(ErrorCode::InvalidConfig, "truncated Gaussian acceptance rate is too low");
}

BinnedDensity1D truncated_normal_density(double mu, double sigma, std::size_t bins) {
  std::vector<double> mass(bins);
  const double K = static_cast<double>(bins);
  double prev = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double next = truncated_normal_cdf(static_cast<double>(k + 1) / K, mu, sigma);
    mass[k] = std::max(0.0, next - prev);
    prev = next;
  }
  return BinnedDensity1D(0.0, 1.0, std::move(mass));
}

BinnedDomain label_mixture(const BinnedDensity1D& f_plus, const BinnedDensity1D& f_minus,
                           double p) {
  if (!same_bins(f_plus, f_minus)) {
    throw Error(ErrorCode::MismatchedBins, "class conditionals use different bins");
  }
  std::vector<double> mass(f_plus.bins());
  std::vector<double> q(f_plus.bins());
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double a = p * f_plus.mass(k);
    mass[k] = a + (1.0 - p) * f_minus.mass(k);
    q[k] = mass[k] > 0.0 ? std::clamp(a / mass[k], 0.0, 1.0) : p;
  }
  return BinnedDomain{BinnedDensity1D(f_plus.lo(), f_plus.hi(), std::move(mass)), std::move(q),
                      DomainTag::Source};
}

// ---------------------------------------------------------------------------

void CovariateDagConfig::validate() const {
  if (!(sigma2 > 0.0) || !(sigma3 > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "DAG noise scales must be positive");
  }
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidConfig, "adaptation strength c must be >= 0");
  }
}

EmpiricalDataset covariate_dag_sample(std::size_t n, const CovariateDagConfig& cfg, Rng& rng) {
  cfg.validate();
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "sample size must be >= 1");
  EmpiricalDataset data(3, DomainTag::Source);
  data.reserve(n);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = unif(rng);
    const double x2 = 1.2 * x1 + cfg.sigma2 * standard_normal(rng);
    const double x3 = -x1 * x1 + cfg.sigma3 * standard_normal(rng);
    const double x[3] = {x1, x2, x3};
    data.push_back(x, label_from_bool(x2 > 0.0));
  }
  return data;
}

EmpiricalDataset covariate_dag_adapt(const EmpiricalDataset& data, const ThresholdClassifier& h,
                                     const CovariateDagConfig& cfg, Rng& rng) {
  cfg.validate();
  if (data.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "DAG points are 3-D");
  EmpiricalDataset out(3, DomainTag::Induced);
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto x = data.x(i);
    const double pred = static_cast<double>(to_int(predict(h, x)));
    const double x1 = x[0] + cfg.c * (pred - 1.0);
    double e2 = 0.0;
    double e3 = 0.0;
    switch (cfg.mode) {
      case CovariateAdaptMode::Counterfactual:
        e2 = x[1] - 1.2 * x[0];
        e3 = x[2] + x[0] * x[0];
        break;
      case CovariateAdaptMode::FreshNoise:
        e2 = cfg.sigma2 * standard_normal(rng);
        e3 = cfg.sigma3 * standard_normal(rng);
        break;
      case CovariateAdaptMode::Freeze: {
        const double moved[3] = {x1, x[1], x[2]};
        out.push_back(moved, data.y(i), data.group(i));
        continue;
      }
    }
    const double x2 = 1.2 * x1 + e2;
    const double moved[3] = {x1, x2, -x1 * x1 + e3};
    out.push_back(moved, label_from_bool(x2 > 0.0), data.group(i));
  }
  return out;
}

void TargetDagConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha in [0,1]");
  if (!(sigma > 0.0) || !(sigma2 > 0.0) || !(sigma3 > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "DAG noise scales must be positive");
  }
  for (const auto& row : c_hy) {
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidConfig, "c_hy entries in [0,1]");
    }
  }
}

namespace {

void push_target_point(EmpiricalDataset& out, Label y, const TargetDagConfig& cfg, Rng& rng) {
  const double x1 = truncated_normal_sample(is_positive(y) ? cfg.mu_pos : cfg.mu_neg, cfg.sigma, rng);
  const double x2 = -0.8 * x1 + cfg.sigma2 * standard_normal(rng);
  const double x3 = 0.2 * to_int(y) + cfg.sigma3 * standard_normal(rng);
  const double x[3] = {x1, x2, x3};
  out.push_back(x, y);
}

}  // namespace

EmpiricalDataset target_dag_sample(std::size_t n, const TargetDagConfig& cfg, Rng& rng) {
  cfg.validate();
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "sample size must be >= 1");
  EmpiricalDataset data(3, DomainTag::Source);
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    push_target_point(data, label_from_bool(uniform01(rng) < cfg.alpha), cfg, rng);
  }
  return data;
}

EmpiricalDataset target_dag_adapt(const EmpiricalDataset& data, const ThresholdClassifier& h,
                                  const TargetDagConfig& cfg, Rng& rng) {
  cfg.validate();
  if (data.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "DAG points are 3-D");
  EmpiricalDataset out(3, DomainTag::Induced);
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int hi = is_positive(predict(h, data.x(i))) ? 1 : 0;
    const int yi = is_positive(data.y(i)) ? 1 : 0;
    const double c = cfg.c_hy[hi][yi];
    push_target_point(out, label_from_bool(uniform01(rng) < c), cfg, rng);
  }
  return out;
}

// ---------------------------------------------------------------------------

void FicoConfig::validate() const {
  for (double v : {eps1, eps2, sigma}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidConfig, "noise scales must be finite and >= 0");
    }
  }
  if (!std::isfinite(alpha_D) || !std::isfinite(alpha_Y)) {
    throw Error(ErrorCode::InvalidConfig, "dynamics increments must be finite");
  }
}

FicoNoise draw_fico_noise(Rng& rng) {
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  FicoNoise n{};
  n.u1 = sym(rng);
  n.u2 = sym(rng);
  n.n3 = standard_normal(rng);
  n.label = uniform01(rng);
  return n;
}

std::array<double, 3> fico_features(double Q, int A, const FicoConfig& cfg,
                                    const FicoNoise& noise) {
  if (!(Q > 0.0 && Q <= 1.0)) throw Error(ErrorCode::OutOfDomain, "credit score must lie in (0,1]");
  const double a = static_cast<double>(A);
  return {1.5 * Q + cfg.eps1 * noise.u1, 0.8 * a + cfg.eps2 * noise.u2, a + cfg.sigma * noise.n3};
}

std::array<double, 3> fico_features(double Q, int A, const FicoConfig& cfg, Rng& rng) {
  return fico_features(Q, A, cfg, draw_fico_noise(rng));
}

double fico_update(double Q, int decision, int outcome, const FicoConfig& cfg) {
  if (!(Q > 0.0 && Q <= 1.0)) throw Error(ErrorCode::OutOfDomain, "credit score must lie in (0,1]");
  if ((decision != 0 && decision != 1) || (outcome != 0 && outcome != 1)) {
    throw Error(ErrorCode::OutOfDomain, "decision and outcome are 0 or 1");
  }
  const double next = Q * (1.0 + cfg.alpha_D * decision + cfg.alpha_Y * outcome);
  return std::clamp(next, std::numeric_limits<double>::min(), 1.0);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& s, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError, "bad number '" + s + "' on row " + std::to_string(row));
  }
  return v;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const auto j = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

}  // namespace

std::vector<GroupDensity> parse_group_cdf(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.size() < 2 || header[0] != "score") {
    throw Error(ErrorCode::ParseError, "header must be 'score,<group>,...'");
  }
  const std::size_t groups = header.size() - 1;
  std::vector<double> score;
  std::vector<std::vector<double>> cdf(groups);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + " has " +
                                             std::to_string(cells.size()) + " cells");
    }
    const double s = parse_number(cells[0], row);
    if (s < 0.0 || s > 1.0) throw Error(ErrorCode::ParseError, "score outside [0,1]");
    if (!score.empty() && !(s > score.back())) {
      throw Error(ErrorCode::ParseError, "score column must be strictly increasing");
    }
    score.push_back(s);
    for (std::size_t g = 0; g < groups; ++g) {
      const double v = parse_number(cells[g + 1], row);
      if (v < 0.0 || v > 1.0) throw Error(ErrorCode::ParseError, "CDF value outside [0,1]");
      if (!cdf[g].empty() && v < cdf[g].back()) {
        throw Error(ErrorCode::NonMonotoneCDF, "column '" + header[g + 1] + "' decreases on row " +
                                                   std::to_string(row));
      }
      cdf[g].push_back(v);
    }
  }
  if (score.size() < 2) throw Error(ErrorCode::ParseError, "CDF needs at least two rows");
  const std::size_t bins = std::max<std::size_t>(2, score.size() - 1);
  const double lo = score.front();
  const double hi = score.back();
  std::vector<GroupDensity> out;
  for (std::size_t g = 0; g < groups; ++g) {
    const double total = cdf[g].back() - cdf[g].front();
    if (!(total > 0.0)) {
      throw Error(ErrorCode::ParseError, "column '" + header[g + 1] + "' carries no mass");
    }
    std::vector<double> mass(bins);
    double prev = cdf[g].front();
    for (std::size_t k = 0; k < bins; ++k) {
      const double e = k + 1 == bins ? hi : lo + (hi - lo) * static_cast<double>(k + 1) /
                                                     static_cast<double>(bins);
      const double next = interpolate(score, cdf[g], e);
      mass[k] = std::max(0.0, next - prev) / total;
      prev = next;
    }
    const double sum = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (double& m : mass) m /= sum;
    out.push_back(GroupDensity{header[g + 1], BinnedDensity1D(lo, hi, std::move(mass))});
  }
  return out;
}

std::vector<GroupDensity> ingest_group_cdf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open group CDF file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_group_cdf(text.str());
}

std::string synthetic_group_cdf_csv(std::size_t rows) {
  if (rows < 2) throw Error(ErrorCode::InvalidConfig, "CDF table needs at least two rows");
  const double params[4][2] = {{2.0, 5.0}, {3.0, 4.0}, {4.0, 3.0}, {5.0, 2.0}};
  std::string out = "score,group_a,group_b,group_c,group_d\n";
  char buf[64];
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = static_cast<double>(r) / static_cast<double>(rows - 1);
    std::snprintf(buf, sizeof buf, "%.12g", s);
    out += buf;
    for (const auto& p : params) {
      std::snprintf(buf, sizeof buf, ",%.12g", boost::math::ibeta(p[0], p[1], s));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

double sample_from_density(const BinnedDensity1D& f, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t k = 0;
  for (; k + 1 < f.bins(); ++k) {
    acc += f.mass(k);
    if (u < acc) break;
  }
  return f.edge(k) + uniform01(rng) * f.width();
}

// ---------------------------------------------------------------------------

EmpiricalDataset IdentitySampledShift::induce(const ThresholdClassifier&, std::uint64_t) const {
  EmpiricalDataset copy = source_;
  copy.set_tag(DomainTag::Induced);
  return copy;
}

StrategicShift::StrategicShift(StrategicConfig cfg)
    : cfg_(cfg), source_(strategic_source_domain(cfg.eta, cfg.bins)) {
  if (!(cfg.B >= 0.0 && cfg.B <= 0.5)) throw Error(ErrorCode::InvalidConfig, "B must lie in [0, 0.5]");
}

BinnedDomain StrategicShift::induce(const ThresholdClassifier& h) const {
  if (h.mode() != ThresholdMode::Raw) {
    throw Error(ErrorCode::InvalidConfig, "strategic agents respond to raw thresholds");
  }
  BinnedDomain d{strategic_induced_density(h.tau(), cfg_.B, cfg_.bins), source_.p_plus_given_bin,
                 DomainTag::Induced};
  return d;
}

ReplicatorShift::ReplicatorShift(ReplicatorConfig cfg)
    : cfg_(cfg),
      f_plus_(truncated_normal_density(cfg.mu_plus, cfg.sigma, cfg.bins)),
      f_minus_(truncated_normal_density(cfg.mu_minus, cfg.sigma, cfg.bins)),
      source_(label_mixture(f_plus_, f_minus_, cfg.p0.p_plus)) {
  cfg_.validate();
}

LabelMarginal ReplicatorShift::induced_prior(const ThresholdClassifier& h) const {
  const auto F = fitness_utility(h, source_, cfg_.U);
  return replicator_induce(cfg_.p0, F.plus, F.minus);
}

BinnedDomain ReplicatorShift::induce(const ThresholdClassifier& h) const {
  auto d = label_mixture(f_plus_, f_minus_, induced_prior(h).p_plus);
  d.tag = DomainTag::Induced;
  return d;
}

CovariateDagShift::CovariateDagShift(EmpiricalDataset source, CovariateDagConfig cfg)
    : source_(std::move(source)), cfg_(cfg) {
  cfg_.validate();
}

EmpiricalDataset CovariateDagShift::induce(const ThresholdClassifier& h,
                                           std::uint64_t seed) const {
  Rng rng(seed);
  return covariate_dag_adapt(source_, h, cfg_, rng);
}

TargetDagShift::TargetDagShift(EmpiricalDataset source, TargetDagConfig cfg)
    : source_(std::move(source)), cfg_(cfg) {
  cfg_.validate();
}

EmpiricalDataset TargetDagShift::induce(const ThresholdClassifier& h, std::uint64_t seed) const {
  Rng rng(seed);
  return target_dag_adapt(source_, h, cfg_, rng);
}

EmpiricalDataset fico_population(const std::vector<double>& Q, const std::vector<int>& A,
                                 const FicoConfig& cfg, const std::vector<FicoNoise>& noise,
                                 DomainTag tag) {
  if (Q.size() != A.size() || Q.size() != noise.size() || Q.empty()) {
    throw Error(ErrorCode::InvalidConfig, "population arrays must be nonempty and aligned");
  }
  EmpiricalDataset data(3, tag);
  data.reserve(Q.size());
  for (std::size_t i = 0; i < Q.size(); ++i) {
    const auto x = fico_features(Q[i], A[i], cfg, noise[i]);
    data.push_back(x, label_from_bool(noise[i].label < Q[i]), A[i]);
  }
  return data;
}

FicoStepShift::FicoStepShift(std::vector<double> Q, std::vector<int> A, FicoConfig cfg,
                             std::vector<FicoNoise> noise_now, std::vector<FicoNoise> noise_next)
    : Q_(std::move(Q)),
      A_(std::move(A)),
      cfg_(cfg),
      noise_now_(std::move(noise_now)),
      noise_next_(std::move(noise_next)),
      source_(fico_population(Q_, A_, cfg_, noise_now_, DomainTag::Source)) {
  cfg_.validate();
  if (noise_next_.size() != Q_.size()) {
    throw Error(ErrorCode::InvalidConfig, "next-step noise must match the population");
  }
}

std::vector<double> FicoStepShift::next_scores(const ThresholdClassifier& h) const {
  std::vector<double> next(Q_.size());
  for (std::size_t i = 0; i < Q_.size(); ++i) {
    const int decision = is_positive(predict(h, source_.x(i))) ? 1 : 0;
    const int outcome = is_positive(source_.y(i)) ? 1 : 0;
    next[i] = fico_update(Q_[i], decision, outcome, cfg_);
  }
  return next;
}

EmpiricalDataset FicoStepShift::induce(const ThresholdClassifier& h, std::uint64_t) const {
  return fico_population(next_scores(h), A_, cfg_, noise_next_, DomainTag::Induced);
}

}  // namespace ida
