#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ida/bounds.hpp"
#include "ida/classifiers.hpp"
#include "ida/distributions.hpp"
#include "ida/error.hpp"
#include "ida/optimizers.hpp"
#include "ida/shift_models.hpp"

using namespace ida;

namespace {

BinnedDomain two_bin(double m0, double m1, double eta0, double eta1) {
  return BinnedDomain{BinnedDensity1D(0.0, 1.0, {m0, m1}), {eta0, eta1}};
}

std::optional<ErrorCode> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// 2 max over grid pairs of the gap in disagreement mass; nested thresholds
// disagree exactly on the mass between them.
double brute_divergence(const BinnedDomain& a, const BinnedDomain& b, const HypothesisGrid& g) {
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double da = std::abs(prediction_marginal(g.at(i), a).p_plus -
                                 prediction_marginal(g.at(j), a).p_plus);
      const double db = std::abs(prediction_marginal(g.at(i), b).p_plus -
                                 prediction_marginal(g.at(j), b).p_plus);
      best = std::max(best, std::abs(da - db));
    }
  }
  return 2.0 * best;
}

double brute_lambda(const BinnedDomain& a, const BinnedDomain& b, const HypothesisGrid& g) {
  double best = 2.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    best = std::min(best, risk(g.at(j), a) + risk(g.at(j), b));
  }
  return best;
}

double covariance_oracle(const ThresholdClassifier& h, const BinnedDomain& d,
                         const ImportanceWeightMap& w) {
  // Direct E[gw] - E[g]E[w] with g = eta - P(h = +1 | bin), evaluated at bin midpoints
  // except for the bin split by the threshold, which is handled fractionally.
  const auto& f = d.density;
  double eg = 0.0, ew = 0.0, egw = 0.0;
  for (std::size_t k = 0; k < f.bins(); ++k) {
    const double l = f.edge(k), r = f.edge(k + 1);
    double acc = 0.0;
    if (h.tau() <= l) acc = 1.0;
    else if (h.tau() < r) acc = (r - h.tau()) / (r - l);
    const double g = d.p_plus_given_bin[k] - acc;
    eg += f.mass(k) * g;
    ew += f.mass(k) * w.omega(k);
    egw += f.mass(k) * g * w.omega(k);
  }
  return egw - eg * ew;
}

}  // namespace

TEST_CASE("combined errors") {
  const auto d = two_bin(0.5, 0.5, 0.0, 1.0);
  const auto d2 = two_bin(0.5, 0.5, 0.3, 0.9);
  const HypothesisGrid g({0.5, 1.0}, ThresholdMode::Raw);

  SUBCASE("D = D2 with a perfect classifier in the grid") {
    const auto ce = combined_errors(g.at(0), d, d, g);
    CHECK(ce.lambda_min == 0.0);
    CHECK(ce.lambda_max_of_h == doctest::Approx(0.0));
  }
  SUBCASE("two-point grid by enumeration") {
    // tau = 0.5: 0 + (0.5*0.3 + 0.5*0.1); tau = 1: 0.5 + (0.5*0.9 + 0.5*0.3)
    const auto ce = combined_errors(g.at(1), d, d2, g);
    CHECK(ce.lambda_min == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(ce.lambda_max_of_h == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(ce.lambda_min <= ce.lambda_max_of_h);
  }
}

TEST_CASE("source to induced bound") {
  SUBCASE("no shift leaves err_S + lambda") {
    const auto d = two_bin(0.4, 0.6, 0.2, 0.7);
    const auto g = HypothesisGrid::uniform(11, 0, 1, ThresholdMode::Raw);
    const auto h = ThresholdClassifier::raw(0.3);
    const double ub = ub_source_to_induced(h, d, d, g);
    CHECK(ub == doctest::Approx(risk(h, d) + brute_lambda(d, d, g)).epsilon(1e-12));
    CHECK(ub >= risk(h, d) - kBoundTolerance);
  }
  SUBCASE("perfect shared classifier, tight case") {
    const auto s = two_bin(0.5, 0.5, 0.0, 1.0);
    const auto t = two_bin(0.3, 0.7, 0.0, 1.0);
    const HypothesisGrid g({0.5, 1.0}, ThresholdMode::Raw);
    const auto h = g.at(1);
    // err_S(h) = 0.5, lambda = 0, d_HH = 2 |0.5 - 0.7| = 0.4, induced risk 0.7
    const double ub = ub_source_to_induced(h, s, t, g);
    CHECK(brute_lambda(s, t, g) <= 1e-15);
    CHECK(ub == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(ub >= risk(h, t) - kBoundTolerance);
  }
  SUBCASE("strategic response at tau = 0.5, B = 0.2") {
    const StrategicShift model(StrategicConfig{0.2, {}, 256});
    const auto g = HypothesisGrid::uniform(41, 0, 1, ThresholdMode::Raw);
    const auto h = ThresholdClassifier::raw(0.5);
    const auto induced = model.induce(h);
    const double expected = risk(h, model.source()) + brute_lambda(model.source(), induced, g) +
                            0.5 * brute_divergence(model.source(), induced, g);
    const double ub = ub_source_to_induced(h, model.source(), induced, g);
    CHECK(ub == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ub - risk(h, induced) >= -kBoundTolerance);
  }
}

TEST_CASE("induced to optimal bound") {
  const StrategicShift model(StrategicConfig{0.15, {}, 256});
  const auto g = HypothesisGrid::uniform(41, 0, 1, ThresholdMode::Raw);

  SUBCASE("h = h_T") {
    const auto h = ThresholdClassifier::raw(0.45);
    const auto dh = model.induce(h);
    CHECK(ub_induced_to_optimal(h, dh, h, dh, g) >= 0.0);
  }
  SUBCASE("two distinct strategic thresholds") {
    const auto h = ThresholdClassifier::raw(0.3);
    const auto hT = ThresholdClassifier::raw(0.6);
    const auto dh = model.induce(h);
    const auto dt = model.induce(hT);
    const double gap = risk(h, dh) - risk(hT, dt);
    const double lam = brute_lambda(dh, dt, g);
    const double Lam = risk(h, dh) + risk(h, dt);
    const double expected = 0.5 * (lam + Lam) + 0.5 * brute_divergence(dt, dh, g);
    const double ub = ub_induced_to_optimal(h, dh, hT, dt, g);
    CHECK(ub == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ub >= gap - kBoundTolerance);
  }
  SUBCASE("identical induced distributions") {
    const auto d = two_bin(0.5, 0.5, 0.25, 0.75);
    const HypothesisGrid g2({0.0, 0.5, 1.0}, ThresholdMode::Raw);
    const auto h = g2.at(0);
    // lambda = 2 min err = 2 * 0.25, Lambda(h) = 2 err(h) = 2 * 0.5
    CHECK(ub_induced_to_optimal(h, d, g2.at(1), d, g2) == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("label and prediction tradeoff lower bound") {
  CHECK(lb_from_tv(0.4, 0.2) == doctest::Approx(0.1).epsilon(1e-15));

  SUBCASE("no shift is vacuous") {
    const auto d = two_bin(0.4, 0.6, 0.2, 0.7);
    CHECK(lb_tradeoff(ThresholdClassifier::raw(0.5), d, d) <= 0.0);
  }
  SUBCASE("replicator shift against closed forms") {
    ReplicatorConfig cfg;
    cfg.p0 = LabelMarginal(0.4);
    cfg.bins = 400;
    const ReplicatorShift model(cfg);
    for (double tau : {0.2, 0.45, 0.6, 0.85}) {
      const auto h = ThresholdClassifier::raw(tau);
      const auto induced = model.induce(h);
      const auto r = rates(h, model.source());
      const double p = 0.4;
      // fitness = P(correct | y)
      const double fp = r.tpr, fm = 1.0 - r.fpr;
      const double ph = p * fp / (p * fp + (1 - p) * fm);
      const double tv_y = std::abs(p - ph);
      const double tv_h = std::abs(p - ph) * std::abs(r.tpr - r.fpr);
      const double lb = lb_tradeoff(h, model.source(), induced);
      CHECK(lb == doctest::Approx(0.5 * (tv_y - tv_h)).epsilon(1e-9));
      const double max_err = std::max(risk(h, model.source()), risk(h, induced));
      CHECK(lb <= max_err + kBoundTolerance);
      // under target shift the lower bound collapses to ts_lb
      CHECK(std::abs(lb - ts_lb(p, ph, r.tpr, r.fpr)) <= 1e-9);
    }
  }
  SUBCASE("feature variant never exceeds the label/prediction variant") {
    const StrategicShift model(StrategicConfig{0.2, {}, 128});
    for (double tau : {0.25, 0.5, 0.75}) {
      const auto h = ThresholdClassifier::raw(tau);
      const auto induced = model.induce(h);
      CHECK(lb_tradeoff_features(h, model.source(), induced) <=
            lb_tradeoff(h, model.source(), induced) + kBoundTolerance);
    }
  }
}

TEST_CASE("covariate-shift suboptimality bound") {
  CHECK(cs_ub_suboptimality(0.3, 0.0, 0.0) == 0.0);
  CHECK(cs_ub_suboptimality(0.0, 0.5, 0.2) == 0.0);
  // B = 0.24 gives Var = 0.16, sd = 0.4 for both; sqrt(0.09) * 0.8
  CHECK(cs_ub_suboptimality(0.09, 2 * 0.24 / 3, 2 * 0.24 / 3) == doctest::Approx(0.24).epsilon(1e-12));

  SUBCASE("strategic maps: twice the single-sd strategic bound") {
    const double B = 0.2;
    const std::size_t K = 4096;
    const auto src = strategic_source_domain(LabelConditional{}, K);
    const auto hS = ThresholdClassifier::raw(0.5);
    // thresholds on bin edges keep the weight jump out of every bin interior
    const auto hT = ThresholdClassifier::raw(0.625);
    const auto wS = importance_weights(src.density, strategic_induced_density(0.5, B, K));
    const auto wT = importance_weights(src.density, strategic_induced_density(0.625, B, K));
    const double cs = cs_ub_suboptimality(hS, hT, src, wS, wT);
    CHECK(cs == doctest::Approx(2.0 * strategic_ub(B, risk(hT, src))).epsilon(1e-6));
  }
  SUBCASE("dominates the gap between grid optima") {
    const StrategicShift model(StrategicConfig{0.2, {}, 1024});
    const auto g = HypothesisGrid::uniform(101, 0.2, 0.8, ThresholdMode::Raw);
    const auto hS = source_optimal(g, model.source());
    const auto hT = induced_optimal(g, model);
    const auto& f = model.source().density;
    const auto wS = importance_weights(f, model.induce(hS).density);
    const auto wT = importance_weights(f, model.induce(hT).density);
    const double gap = risk(hS, model.induce(hS)) - risk(hT, model.induce(hT));
    CHECK(cs_ub_suboptimality(hS, hT, model.source(), wS, wT) >= gap - kBoundTolerance);
  }
}

TEST_CASE("covariate-shift assumption checks") {
  SUBCASE("no shift is flagged degenerate") {
    const auto d = two_bin(0.5, 0.5, 0.2, 0.8);
    const ImportanceWeightMap w(d.density, {1.0, 1.0});
    const auto c = cs_assumption_check(ThresholdClassifier::raw(0.5), d, w);
    CHECK(c.covariance == doctest::Approx(0.0));
    CHECK_FALSE(c.a3);
  }
  SUBCASE("hand-built two-bin case") {
    const auto d = two_bin(0.5, 0.5, 0.2, 0.8);
    const ImportanceWeightMap w(d.density, {0.5, 1.5});
    const auto h = ThresholdClassifier::raw(1.5);  // rejects everything
    // g = eta; E[g w] - E[g] E[w] = (0.05 + 0.6) - 0.5 * 1
    const auto c = cs_assumption_check(h, d, w);
    CHECK(c.covariance == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(c.a1_upper == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(c.a1_lower == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(c.all());
    const auto induced = two_bin(0.25, 0.75, 0.2, 0.8);
    // TV_Y = |0.5 - 0.65|, TV_h = 0
    const double lb = cs_lb_positive(h, d, induced, w);
    CHECK(lb == doctest::Approx(0.075).epsilon(1e-12));
    CHECK(lb > 0.0);
    CHECK(lb <= std::max(risk(h, d), risk(h, induced)) + kBoundTolerance);
  }
  SUBCASE("strategic weights never give a positive covariance") {
    // g = eta - 1(h = +1) is <= 0 wherever omega >= 1 and >= 0 wherever omega <= 1
    for (const auto shape : {LabelConditional::Shape::Linear, LabelConditional::Shape::Logistic}) {
      LabelConditional eta;
      eta.shape = shape;
      const auto src = strategic_source_domain(eta, 1024);
      for (double B : {0.05, 0.1, 0.2}) {
        for (double tau : {0.3, 0.5, 0.6, 0.75}) {
          const auto h = ThresholdClassifier::raw(tau);
          const auto w = importance_weights(src.density, strategic_induced_density(tau, B, 1024));
          const auto c = cs_assumption_check(h, src, w);
          CHECK(c.covariance == doctest::Approx(covariance_oracle(h, src, w)).epsilon(1e-9));
          CHECK(c.covariance <= 1e-12);
          CHECK_FALSE(c.a3);
        }
      }
    }
  }
  SUBCASE("unmet assumptions raise") {
    const auto d = two_bin(0.5, 0.5, 0.2, 0.8);
    const ImportanceWeightMap flat(d.density, {1.0, 1.0});
    CHECK(code_of([&] { cs_lb_positive(ThresholdClassifier::raw(0.5), d, d, flat); }) ==
          ErrorCode::AssumptionsUnmet);
    const ImportanceWeightMap w(d.density, {1.5, 0.5});
    const auto induced = two_bin(0.75, 0.25, 0.2, 0.8);
    CHECK(code_of([&] { cs_lb_positive(ThresholdClassifier::raw(1.5), d, induced, w); }) ==
          ErrorCode::AssumptionsUnmet);
  }
  SUBCASE("missing conditional") {
    const BinnedDomain d{BinnedDensity1D(0.0, 1.0, {0.5, 0.5}), {}};
    const ImportanceWeightMap w(d.density, {1.0, 1.0});
    CHECK(code_of([&] { cs_assumption_check(ThresholdClassifier::raw(0.5), d, w); }) ==
          ErrorCode::MissingConditional);
  }
}

TEST_CASE("strategic bound") {
  CHECK(strategic_ub(0.0, 0.3) == 0.0);
  CHECK(strategic_ub(0.2, 0.0) == 0.0);
  CHECK(strategic_ub(0.15, 0.1) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("target-shift bounds") {
  SUBCASE("upper bound arithmetic") {
    const TargetShiftTerms t{0.5, 0.4, 0.5, Rates{0.9, 0.3}, Rates{0.7, 0.2}};
    CHECK(ts_ub(t) == doctest::Approx(0.55).epsilon(1e-12));
  }
  SUBCASE("h_S = h_T gives 0") {
    const TargetShiftTerms t{0.3, 0.6, 0.6, Rates{0.8, 0.1}, Rates{0.8, 0.1}};
    CHECK(ts_ub(t) == 0.0);
  }
  SUBCASE("lower bound") {
    CHECK(ts_lb(0.5, 0.7, 1.0, 0.0) == 0.0);
    CHECK(ts_lb(0.5, 0.7, 0.9, 0.2) == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(ts_lb(0.4, 0.4, 0.9, 0.2) == 0.0);
  }
  SUBCASE("replicator pipeline") {
    ReplicatorConfig cfg;
    cfg.bins = 400;
    const ReplicatorShift model(cfg);
    const auto g = HypothesisGrid::uniform(101, 0, 1, ThresholdMode::Raw);
    const auto hS = source_optimal(g, model.source());
    const auto hT = induced_optimal(g, model);
    const double gap = risk(hS, model.induce(hS)) - risk(hT, model.induce(hT));
    const double ub =
        ts_ub(hS, hT, model.source(), model.induced_prior(hS), model.induced_prior(hT));
    CHECK(ub >= gap - kBoundTolerance);
  }
}

TEST_CASE("replicator proportion bound") {
  CHECK(replicator_prop_bound(0.5, 0.2, 0.2, 0.8, 0.9) == 0.0);
  CHECK(replicator_prop_bound(0.5, 0.2, 0.1, 0.8, 0.8) == 0.0);
  CHECK(replicator_prop_bound(0.5, 0.2, 0.1, 0.8, 0.9) ==
        doctest::Approx(0.5 * 0.1 * 0.1 / (0.8 * 0.9)).epsilon(1e-12));
  CHECK(replicator_prop_bound(0.5, 0.2, 0.1, 0.8, 0.9, PropDenominator::Error) ==
        doctest::Approx(0.5 * 0.1 * 0.1 / (0.2 * 0.1)).epsilon(1e-12));
  CHECK(code_of([] { replicator_prop_bound(0.5, 1.0, 0.1, 0.8, 0.9); }) ==
        ErrorCode::DegenerateAccuracy);

  SUBCASE("worked example against replicator_induce") {
    // err = p (1 - TPR) + (1 - p) FPR gives FPR = 0.2 and 0.1
    const double p = 0.5;
    const auto a = fitness_accuracy(Rates{0.8, 0.2});
    const auto b = fitness_accuracy(Rates{0.9, 0.1});
    const double pa = replicator_induce(LabelMarginal(p), a.plus, a.minus).p_plus;
    const double pb = replicator_induce(LabelMarginal(p), b.plus, b.minus).p_plus;
    CHECK(std::abs(pa - pb) <= replicator_prop_bound(p, 0.2, 0.1, 0.8, 0.9) + kBoundTolerance);
  }
  SUBCASE("equal rates give equal induced priors") {
    const auto f = fitness_accuracy(Rates{0.7, 0.25});
    const double pa = replicator_induce(LabelMarginal(0.3), f.plus, f.minus).p_plus;
    const double pb = replicator_induce(LabelMarginal(0.3), f.plus, f.minus).p_plus;
    CHECK(pa == pb);
  }
}

TEST_CASE("worst-case bounds over candidate sets") {
  const StrategicShift model(StrategicConfig{0.2, {}, 128});
  const auto g = HypothesisGrid::uniform(21, 0, 1, ThresholdMode::Raw);
  const auto probe = ThresholdClassifier::raw(0.5);
  const std::vector<ThresholdClassifier> hs{ThresholdClassifier::raw(0.4),
                                            ThresholdClassifier::raw(0.55),
                                            ThresholdClassifier::raw(0.7)};
  std::vector<BinnedDomain> ds;
  for (double tau : {0.35, 0.5, 0.65}) ds.push_back(model.induce(ThresholdClassifier::raw(tau)));
  const auto& src = model.source();

  SUBCASE("singletons equal the pointwise bounds") {
    const auto wc = worst_case_bounds(probe, src, {hs[0]}, {ds[1]}, g);
    CHECK(wc.ub == ub_induced_to_optimal(probe, ds[1], hs[0], ds[1], g));
    CHECK(wc.lb == lb_tradeoff(probe, src, ds[1]));
  }
  SUBCASE("three candidates by enumeration") {
    double ub = -1.0, lb = 2.0;
    for (const auto& h : hs) {
      for (const auto& a : ds) {
        for (const auto& b : ds) ub = std::max(ub, ub_induced_to_optimal(probe, a, h, b, g));
      }
    }
    for (const auto& a : ds) lb = std::min(lb, lb_tradeoff(probe, src, a));
    const auto wc = worst_case_bounds(probe, src, hs, ds, g);
    CHECK(wc.ub == ub);
    CHECK(wc.lb == lb);
  }
  SUBCASE("supersets widen the interval") {
    const auto small = worst_case_bounds(probe, src, {hs[0], hs[1]}, {ds[0], ds[1]}, g);
    const auto big = worst_case_bounds(probe, src, hs, ds, g);
    CHECK(big.ub >= small.ub);
    CHECK(big.lb <= small.lb);
  }
  SUBCASE("empty sets") {
    CHECK(code_of([&] { worst_case_bounds(probe, src, {}, ds, g); }) == ErrorCode::InvalidConfig);
  }
}

TEST_CASE("convexity product condition") {
  Rng rng(3);
  std::vector<LabeledPoint> pts;
  for (int i = 1; i < 20; ++i) {
    const double x = i / 20.0;
    pts.push_back(LabeledPoint{{x}, label_from_bool(x >= 0.5)});
  }
  const auto y01 = [](const LabeledPoint& z) { return is_positive(z.y) ? 1.0 : 0.0; };
  // h_a(x) = a x; squared loss; mean-one weight 1 + a (2x - 1), which is 2x at a = 1
  const std::vector<double> slopes{0.0, 0.5, 1.0, 1.5, 2.0};
  const PointFunction sq_loss = [&](std::size_t i, const LabeledPoint& z) {
    const double r = slopes[i] * z.x[0] - y01(z);
    return 0.5 * r * r;
  };

  SUBCASE("constant weight") {
    const PointFunction one = [](std::size_t, const LabeledPoint&) { return 1.0; };
    CHECK(convexity_condition_check(slopes.size(), one, sq_loss, pts, 0, rng));
  }
  SUBCASE("linear weight with squared loss fails") {
    const PointFunction omega = [&](std::size_t i, const LabeledPoint& z) {
      return 1.0 + slopes[i] * (2.0 * z.x[0] - 1.0);
    };
    CHECK_FALSE(convexity_condition_check(slopes.size(), omega, sq_loss, pts, 0, rng));
  }
  SUBCASE("monotone-aligned three-classifier toy") {
    const PointFunction omega = [](std::size_t i, const LabeledPoint& z) {
      return 0.5 + 0.25 * static_cast<double>(i) * z.x[0];
    };
    const PointFunction loss = [](std::size_t i, const LabeledPoint& z) {
      return static_cast<double>(i * i) * (1.0 + z.x[0]);
    };
    bool all = true;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        for (const auto& z : pts) {
          all = all && (omega(i, z) - omega(j, z)) * (loss(i, z) - loss(j, z)) >= -1e-12;
        }
      }
    }
    CHECK(all);
    CHECK(convexity_condition_check(3, omega, loss, pts, 0, rng));
    CHECK(convexity_condition_check(3, omega, loss, pts, 10, rng));
  }
}

TEST_CASE("assembled reports satisfy every claimed inequality") {
  const auto g = HypothesisGrid::uniform(201, 0, 1, ThresholdMode::Raw);
  SUBCASE("strategic") {
    const StrategicShift model(StrategicConfig{0.2, {}, 512});
    const auto g = HypothesisGrid::uniform(201, 0.2, 0.8, ThresholdMode::Raw);
    const auto hS = source_optimal(g, model.source());
    const auto hT = induced_optimal(g, model);
    const auto r =
        assemble_report(hS, hT, model.source(), model.induce(hS), model.induce(hT), g);
    CHECK(r.diff >= -kBoundTolerance);
    for (const auto& c : report_checks(r)) {
      INFO(c.name);
      CHECK(c.slack >= -kBoundTolerance);
    }
    CHECK(r.csv_header().size() == r.csv_values().size());
  }
  SUBCASE("replicator") {
    ReplicatorConfig cfg;
    cfg.bins = 500;
    const ReplicatorShift model(cfg);
    const auto hS = source_optimal(g, model.source());
    const auto hT = induced_optimal(g, model);
    const auto r =
        assemble_report(hS, hT, model.source(), model.induce(hS), model.induce(hT), g);
    for (const auto& c : report_checks(r)) {
      INFO(c.name);
      CHECK(c.slack >= -kBoundTolerance);
    }
  }
}

TEST_CASE("named values") {
  NamedValues v;
  v.set("a", 1.0);
  v.set("b", 2.0);
  v.set("a", 3.0);
  CHECK(v.items().size() == 2);
  CHECK(v.items()[0].first == "a");
  CHECK(v.get("a") == 3.0);
  CHECK_FALSE(v.contains("c"));
  CHECK(code_of([&] { v.get("c"); }) == ErrorCode::InvalidConfig);
}
