#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ida/distributions.hpp"
#include "ida/error.hpp"

using namespace ida;

namespace {

EmpiricalDataset dataset_1d(const std::vector<double>& xs, const std::vector<int>& ys) {
  EmpiricalDataset d(1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    d.push_back(std::span<const double>(&x, 1), ys[i] > 0 ? Label::Positive : Label::Negative);
  }
  return d;
}

BinnedDomain domain(double lo, double hi, std::vector<double> mass, std::vector<double> eta) {
  return BinnedDomain{BinnedDensity1D(lo, hi, std::move(mass)), std::move(eta), DomainTag::Source};
}

// P(a <= X < b) under a binned law, integrating the uniform within-bin density.
double mass_between(const BinnedDensity1D& f, double a, double b) {
  double total = 0.0;
  for (std::size_t k = 0; k < f.bins(); ++k) {
    const double l = f.edge(k);
    const double r = f.edge(k + 1);
    const double overlap = std::max(0.0, std::min(b, r) - std::max(a, l));
    total += f.mass(k) * overlap / (r - l);
  }
  return total;
}

}  // namespace

TEST_CASE("tv_binary") {
  CHECK(tv_binary(LabelMarginal(0.5), LabelMarginal(0.5)) == 0.0);
  CHECK(tv_binary(LabelMarginal(0.0), LabelMarginal(1.0)) == 1.0);
  // sup over the events {+1} and {-1} of a Bernoulli pair
  const double p = 0.3, q = 0.5;
  const double oracle = std::max(std::abs(p - q), std::abs((1 - p) - (1 - q)));
  CHECK(tv_binary(LabelMarginal(p), LabelMarginal(q)) == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(tv_binary(LabelMarginal(p), LabelMarginal(q)) == tv_binary(LabelMarginal(q), LabelMarginal(p)));
}

TEST_CASE("tv_binned") {
  const BinnedDensity1D f(0, 1, {0.6, 0.4});
  const BinnedDensity1D g(0, 1, {0.4, 0.6});
  CHECK(tv_binned(f, f) == 0.0);
  CHECK(tv_binned(BinnedDensity1D(0, 1, {1, 0}), BinnedDensity1D(0, 1, {0, 1})) == 1.0);
  // sup over all four bin subsets
  double sup = 0.0;
  for (int s = 0; s < 4; ++s) {
    double a = 0, b = 0;
    for (int k = 0; k < 2; ++k) {
      if (s & (1 << k)) {
        a += f.mass(k);
        b += g.mass(k);
      }
    }
    sup = std::max(sup, std::abs(a - b));
  }
  CHECK(tv_binned(f, g) == doctest::Approx(sup).epsilon(1e-15));
  CHECK_THROWS_AS(tv_binned(f, BinnedDensity1D(0, 2, {0.5, 0.5})), Error);
  try {
    tv_binned(f, BinnedDensity1D(0, 1, {0.2, 0.3, 0.5}));
    FAIL("expected MismatchedBins");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MismatchedBins);
  }
}

TEST_CASE("tv distances are symmetric and satisfy the triangle inequality") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<double>> m(3, std::vector<double>(6));
    for (auto& v : m) {
      double s = 0;
      for (auto& x : v) s += (x = u(rng));
      for (auto& x : v) x /= s;
    }
    const BinnedDensity1D a(0, 1, m[0]), b(0, 1, m[1]), c(0, 1, m[2]);
    CHECK(tv_binned(a, b) == doctest::Approx(tv_binned(b, a)).epsilon(1e-15));
    CHECK(tv_binned(a, c) <= tv_binned(a, b) + tv_binned(b, c) + 1e-12);
    const double p = u(rng), q = u(rng), r = u(rng);
    CHECK(tv_binary(LabelMarginal(p), LabelMarginal(r)) <=
          tv_binary(LabelMarginal(p), LabelMarginal(q)) +
              tv_binary(LabelMarginal(q), LabelMarginal(r)) + 1e-12);
  }
}

TEST_CASE("BinnedDensity1D validation") {
  CHECK_THROWS_AS(BinnedDensity1D(1, 0, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(BinnedDensity1D(0, 1, {1.0}), Error);
  CHECK_THROWS_AS(BinnedDensity1D(0, 1, {0.7, 0.7}), Error);
  CHECK_THROWS_AS(BinnedDensity1D(0, 1, {1.5, -0.5}), Error);
  CHECK_NOTHROW(BinnedDensity1D(0, 1, {0.5, 0.5 + 1e-10}));
  const BinnedDensity1D f(0, 1, {0.25, 0.25, 0.25, 0.25});
  CHECK(f.bin_of(0.0) == 0);
  CHECK(f.bin_of(0.25) == 1);
  CHECK(f.bin_of(1.0) == 3);
}

TEST_CASE("empirical_risk") {
  const auto d = dataset_1d({0.1, 0.2, 0.3, 0.6, 0.7, 0.8, 0.9, 0.95, 0.15, 0.05},
                            {-1, -1, -1, 1, 1, 1, 1, 1, -1, -1});
  CHECK(empirical_risk(ThresholdClassifier::raw(0.5), d) == 0.0);
  // h flips every label: accept below, reject above is not a threshold, so use
  // a dataset whose labels are the reverse of the threshold rule.
  const auto flipped = dataset_1d({0.1, 0.9}, {1, -1});
  CHECK(empirical_risk(ThresholdClassifier::raw(0.5), flipped) == 1.0);
  // constant +1 on 30% positives: count mismatches directly
  std::vector<double> xs(10, 0.5);
  std::vector<int> ys{1, 1, 1, -1, -1, -1, -1, -1, -1, -1};
  const auto d30 = dataset_1d(xs, ys);
  int mismatches = 0;
  for (int y : ys) mismatches += (y != 1);
  CHECK(empirical_risk(ThresholdClassifier::raw(-1.0), d30) ==
        doctest::Approx(mismatches / 10.0).epsilon(1e-15));
}

TEST_CASE("class_conditional_risks and rates") {
  const auto d = dataset_1d({0.1, 0.2, 0.8, 0.9}, {-1, -1, 1, 1});
  const auto perfect = class_conditional_risks(ThresholdClassifier::raw(0.5), d);
  CHECK(perfect.err_plus == 0.0);
  CHECK(perfect.err_minus == 0.0);
  const auto all_pos = class_conditional_risks(ThresholdClassifier::raw(0.0), d);
  CHECK(all_pos.err_plus == 0.0);
  CHECK(all_pos.err_minus == 1.0);

  // TPR = 0.9, TNR = 0.8 by construction: 10 positives, 10 negatives
  std::vector<double> xs;
  std::vector<int> ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(i < 9 ? 0.9 : 0.1);
    ys.push_back(1);
  }
  for (int i = 0; i < 10; ++i) {
    xs.push_back(i < 8 ? 0.1 : 0.9);
    ys.push_back(-1);
  }
  const auto m = dataset_1d(xs, ys);
  const auto h = ThresholdClassifier::raw(0.5);
  const auto cr = class_conditional_risks(h, m);
  CHECK(cr.err_plus == doctest::Approx(1.0 - 0.9).epsilon(1e-15));
  CHECK(cr.err_minus == doctest::Approx(1.0 - 0.8).epsilon(1e-15));
  const double p = label_marginal(m).p_plus;
  CHECK(risk(h, m) == doctest::Approx(p * cr.err_plus + (1 - p) * cr.err_minus).epsilon(1e-15));

  const auto r = rates(h, d);
  CHECK(r.tpr == 1.0);
  CHECK(r.fpr == 0.0);
  const auto r_all = rates(ThresholdClassifier::raw(0.0), d);
  CHECK(r_all.tpr == 1.0);
  CHECK(r_all.fpr == 1.0);
  const auto r_none = rates(ThresholdClassifier::raw(2.0), d);
  CHECK(r_none.tpr == 0.0);
  CHECK(r_none.fpr == 0.0);

  const auto only_pos = dataset_1d({0.1, 0.9}, {1, 1});
  try {
    class_conditional_risks(h, only_pos);
    FAIL("expected MissingClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingClass);
  }
  CHECK_THROWS_AS(rates(h, only_pos), Error);
}

TEST_CASE("binned risk splits the bin containing the threshold") {
  const auto dom = domain(0, 1, {0.25, 0.25, 0.25, 0.25}, {0.0, 0.2, 0.6, 1.0});
  for (double tau : {0.0, 0.1, 0.25, 0.4, 0.5, 0.62, 0.9, 1.0}) {
    // integrate error density: below tau predictions are -1 (error = eta),
    // above tau they are +1 (error = 1 - eta)
    double oracle = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double l = 0.25 * k, r = l + 0.25;
      const double below = std::clamp(tau, l, r) - l;
      const double above = r - std::clamp(tau, l, r);
      const double eta = dom.p_plus_given_bin[k];
      oracle += (below * eta + above * (1 - eta)) / 0.25 * 0.25;
    }
    const auto h = ThresholdClassifier::raw(tau);
    CHECK(risk(h, dom) == doctest::Approx(oracle).epsilon(1e-13));
    const auto cr = class_conditional_risks(h, dom);
    const double p = label_marginal(dom).p_plus;
    CHECK(risk(h, dom) == doctest::Approx(p * cr.err_plus + (1 - p) * cr.err_minus).epsilon(1e-13));
  }
}

TEST_CASE("grid profile agrees with per-classifier evaluation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EmpiricalDataset d(1);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng);
    d.push_back(std::span<const double>(&x, 1), label_from_bool(u(rng) < x));
  }
  const auto grid = HypothesisGrid::uniform(41, 0, 1, ThresholdMode::Raw);
  const auto prof = profile(grid, d);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(prof.error(j) == doctest::Approx(risk(grid.at(j), d)).epsilon(1e-13));
    CHECK(prof.accept(j) ==
          doctest::Approx(prediction_marginal(grid.at(j), d).p_plus).epsilon(1e-13));
  }
}

TEST_CASE("h_divergence") {
  const auto grid3 = HypothesisGrid({0.25, 0.5, 0.75}, ThresholdMode::Raw);
  const auto d = domain(0, 1, {0.5, 0.5, 0.0, 0.0}, {0.5, 0.5, 0.5, 0.5});
  const auto d2 = domain(0, 1, {0.0, 0.0, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5});
  CHECK(h_divergence(d, d, grid3) == 0.0);
  CHECK(h_divergence(d, d2, HypothesisGrid({0.5}, ThresholdMode::Raw)) == 0.0);
  // brute force over all 9 ordered pairs: disagreement = mass between thresholds
  double sup = 0.0;
  for (double a : grid3.taus()) {
    for (double b : grid3.taus()) {
      const double lo = std::min(a, b), hi = std::max(a, b);
      sup = std::max(sup, std::abs(mass_between(d.density, lo, hi) -
                                   mass_between(d2.density, lo, hi)));
    }
  }
  CHECK(h_divergence(d, d2, grid3) == doctest::Approx(2 * sup).epsilon(1e-15));
  CHECK(h_divergence(d, d2, grid3) == doctest::Approx(h_divergence(d2, d, grid3)).epsilon(1e-15));
}

TEST_CASE("h_divergence on samples matches brute force and grows with the grid") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EmpiricalDataset a(1), b(1);
  for (int i = 0; i < 300; ++i) {
    const double x = u(rng), z = std::sqrt(u(rng));
    a.push_back(std::span<const double>(&x, 1), label_from_bool(u(rng) < 0.5));
    b.push_back(std::span<const double>(&z, 1), label_from_bool(u(rng) < 0.5));
  }
  const auto small = HypothesisGrid::uniform(11, 0, 1, ThresholdMode::Raw);
  const auto big = HypothesisGrid::uniform(21, 0, 1, ThresholdMode::Raw);
  auto brute = [&](const HypothesisGrid& g) {
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        auto dis = [&](const EmpiricalDataset& d) {
          double c = 0;
          for (std::size_t n = 0; n < d.size(); ++n) {
            c += predict(g.at(i), d.x(n)) != predict(g.at(j), d.x(n));
          }
          return c / static_cast<double>(d.size());
        };
        sup = std::max(sup, std::abs(dis(a) - dis(b)));
      }
    }
    return 2 * sup;
  };
  CHECK(h_divergence(a, b, small) == doctest::Approx(brute(small)).epsilon(1e-13));
  CHECK(h_divergence(a, b, big) >= h_divergence(a, b, small) - 1e-15);
  CHECK(h_divergence(a, b, big) <= 2.0);
}

TEST_CASE("importance_weights") {
  const BinnedDensity1D src(0, 1, {0.5, 0.5});
  const auto same = importance_weights(src, src);
  CHECK(same.omega(0) == 1.0);
  CHECK(same.omega(1) == 1.0);
  const auto w = importance_weights(src, BinnedDensity1D(0, 1, {0.0, 1.0}));
  CHECK(w.omega(0) == 0.0);
  CHECK(w.omega(1) == 2.0);
  try {
    importance_weights(BinnedDensity1D(0, 1, {1.0, 0.0}), BinnedDensity1D(0, 1, {0.5, 0.5}));
    FAIL("expected UnsupportedShift");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedShift);
  }
  // zero mass on both sides gives weight 0
  const auto z = importance_weights(BinnedDensity1D(0, 1, {1.0, 0.0}),
                                    BinnedDensity1D(0, 1, {1.0, 0.0}));
  CHECK(z.omega(1) == 0.0);
  // mean-one invariant is validated at construction
  CHECK_THROWS_AS(ImportanceWeightMap(src, {1.0, 2.0}), Error);
}

TEST_CASE("reweighted_risk") {
  const auto dom = domain(0, 1, {0.1, 0.3, 0.4, 0.2}, {0.1, 0.3, 0.7, 0.6});
  const auto h = ThresholdClassifier::raw(0.5);
  const ImportanceWeightMap ones(dom.density, {1, 1, 1, 1});
  CHECK(reweighted_risk(h, dom, ones) == doctest::Approx(risk(h, dom)).epsilon(1e-15));

  // double misclassification-heavy bins, halve the others, renormalize
  std::vector<double> err(4), w(4);
  for (std::size_t k = 0; k < 4; ++k) {
    const bool accepted = k >= 2;
    err[k] = accepted ? 1 - dom.p_plus_given_bin[k] : dom.p_plus_given_bin[k];
    w[k] = err[k] > 0.5 ? 2.0 : 0.5;
  }
  double z = 0.0;
  for (std::size_t k = 0; k < 4; ++k) z += dom.density.mass(k) * w[k];
  for (auto& v : w) v /= z;
  double oracle = 0.0;
  for (std::size_t k = 0; k < 4; ++k) oracle += dom.density.mass(k) * w[k] * err[k];
  CHECK(reweighted_risk(h, dom, ImportanceWeightMap(dom.density, w)) ==
        doctest::Approx(oracle).epsilon(1e-14));

  // induced law with the same conditional: reweighting equals the direct risk
  const BinnedDomain induced{BinnedDensity1D(0, 1, {0.05, 0.15, 0.5, 0.3}),
                             dom.p_plus_given_bin, DomainTag::Induced};
  const auto omega = importance_weights(dom.density, induced.density);
  CHECK(std::abs(reweighted_risk(h, dom, omega) - risk(h, induced)) <= 1e-12);

  const ImportanceWeightMap misaligned(BinnedDensity1D(0, 1, {0.5, 0.5}), {1, 1});
  try {
    reweighted_risk(h, dom, misaligned);
    FAIL("expected MismatchedBins");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MismatchedBins);
  }
}

TEST_CASE("reweighted_risk on samples with unit weights equals the empirical risk") {
  const auto d = dataset_1d({0.1, 0.4, 0.6, 0.9}, {1, -1, -1, 1});
  const ImportanceWeightMap ones(BinnedDensity1D(0, 1, {0.5, 0.5}), {1, 1});
  const auto h = ThresholdClassifier::raw(0.5);
  CHECK(reweighted_risk(h, d, ones) == doctest::Approx(empirical_risk(h, d)).epsilon(1e-15));
}

TEST_CASE("data processing: prediction TV never exceeds feature TV") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(16), b(16), eta(16);
    double sa = 0, sb = 0;
    for (int k = 0; k < 16; ++k) {
      sa += a[k] = u(rng);
      sb += b[k] = u(rng);
      eta[k] = u(rng);
    }
    for (auto& x : a) x /= sa;
    for (auto& x : b) x /= sb;
    const auto da = domain(0, 1, a, eta), db = domain(0, 1, b, eta);
    for (double tau = 0.0; tau <= 1.0; tau += 0.037) {
      const auto h = ThresholdClassifier::raw(tau);
      const double tv_h = tv_binary(prediction_marginal(h, da), prediction_marginal(h, db));
      CHECK(tv_h <= feature_tv(da, db) + 1e-9);
    }
  }
  // samples with the h-refined partition
  EmpiricalDataset s1(1), s2(1);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng), z = u(rng) * u(rng);
    s1.push_back(std::span<const double>(&x, 1), Label::Positive);
    s2.push_back(std::span<const double>(&z, 1), Label::Negative);
  }
  const FeaturePartition part{0, 0.0, 1.0, 7};
  for (double tau = 0.0; tau <= 1.0; tau += 0.01) {
    const auto h = ThresholdClassifier::raw(tau);
    const double tv_h = tv_binary(prediction_marginal(h, s1), prediction_marginal(h, s2));
    CHECK(tv_h <= feature_tv(s1, s2, part, h) + 1e-9);
    CHECK(feature_tv(s1, s2, part) <= feature_tv(s1, s2, part, h) + 1e-12);
  }
}

TEST_CASE("feature_tv on samples uses underflow and overflow cells") {
  const auto a = dataset_1d({-5.0, 0.5}, {1, 1});
  const auto b = dataset_1d({5.0, 0.5}, {1, 1});
  CHECK(feature_tv(a, b, FeaturePartition{0, 0.0, 1.0, 4}) == doctest::Approx(0.5));
  CHECK(feature_tv(a, a, FeaturePartition{0, 0.0, 1.0, 4}) == 0.0);
}

TEST_CASE("histogram") {
  const auto d = dataset_1d({0.1, 0.2, 0.6, 0.9}, {1, -1, 1, -1});
  const auto f = histogram(d, 0, 0.0, 1.0, 2);
  CHECK(f.mass(0) == doctest::Approx(0.5));
  CHECK(f.mass(1) == doctest::Approx(0.5));
}
