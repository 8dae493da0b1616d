#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "cseg/combination.hpp"
#include "cseg/conformal.hpp"
#include "cseg/errors.hpp"
#include "oracles.hpp"

using namespace cseg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_stats(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<int> small(-5, 5);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<double> out(n);
  for (auto& x : out) {
    const int k = kind(rng);
    // Mix of -inf sentinels, heavy ties and continuous values.
    if (k == 0) {
      x = -kInf;
    } else if (k <= 4) {
      x = small(rng);
    } else {
      x = normal(rng);
    }
  }
  return out;
}

double random_alpha(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 3);
  double a = 0.0;
  do {
    // Some draws land on round decimals such as 0.1 or 0.35 where rounding matters.
    a = pick(rng) == 0 ? std::round(u(rng) * 100.0) / 100.0 : u(rng);
  } while (!(a > 0.0 && a < 1.0));
  return a;
}

ScoreImage random_image(std::mt19937_64& rng, std::int64_t h, std::int64_t w) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(h * w));
  for (auto& x : v) x = normal(rng);
  return {GridDims(h, w), std::move(v)};
}

double max_over(const ScoreImage& img, const LabelMask& set, bool negate) {
  double best = -kInf;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (set[i]) best = std::max(best, negate ? -img[i] : img[i]);
  }
  return best;
}

}  // namespace

TEST_CASE("conformal rank uses the exact binary value of alpha") {
  CHECK(conformal_rank(9, 0.1) == 9);
  CHECK(conformal_rank(4, 0.1) == 5);
  CHECK(conformal_rank(3, 0.5) == 2);
  CHECK(conformal_rank(1, 0.5) == 1);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> n_dist(1, 5000);
  for (int i = 0; i < 5000; ++i) {
    const auto n = n_dist(rng);
    const double a = random_alpha(rng);
    CHECK(conformal_rank(n, a) == oracle::conformal_rank(n, a));
  }
  CHECK_THROWS_AS((void)conformal_rank(10, 0.0), ConfigError);
  CHECK_THROWS_AS((void)conformal_rank(10, 1.0), ConfigError);
}

TEST_CASE("conformal quantile examples") {
  const std::vector<double> nine = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(conformal_quantile(nine, 0.1) == 9.0);
  CHECK(conformal_quantile(std::vector<double>{1, 2, 3, 4}, 0.1) == kInf);
  CHECK(conformal_quantile(std::vector<double>{-kInf, -kInf, 0.0}, 0.5) == -kInf);
  CHECK(oracle::quantile_sweep(nine, 0.1) == 9.0);
  CHECK(oracle::quantile_sweep({-kInf, -kInf, 0.0}, 0.5) == -kInf);
  CHECK_THROWS_AS((void)conformal_quantile(std::vector<double>{}, 0.1), EmptyInputError);
}

TEST_CASE("conformal quantile equals the infimum sweep") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<std::size_t> n_dist(1, 50);
  for (int t = 0; t < 1000; ++t) {
    const auto stats = random_stats(rng, n_dist(rng));
    const double a = random_alpha(rng);
    CHECK(conformal_quantile(stats, a) == oracle::quantile_sweep(stats, a));
  }
}

TEST_CASE("smaller alpha never lowers the threshold") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto stats = random_stats(rng, 1 + static_cast<std::size_t>(t % 40));
    double previous = -kInf;
    for (double a = 0.95; a > 0.01; a -= 0.05) {
      const double q = conformal_quantile(stats, a);
      CHECK(q >= previous);
      previous = q;
    }
  }
}

TEST_CASE("risk-control threshold equals the quantile") {
  CHECK(risk_control_lambda(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}, 0.1) == 9.0);
  CHECK(risk_control_lambda(std::vector<double>{3.25}, 0.6) == 3.25);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> n_dist(1, 60);
  for (int t = 0; t < 1000; ++t) {
    const auto taus = random_stats(rng, n_dist(rng));
    const double a = random_alpha(rng);
    const double lambda = risk_control_lambda(taus, a);
    CHECK(lambda == oracle::risk_sweep(taus, a));
    CHECK(lambda == conformal_quantile(taus, a));
  }
}

TEST_CASE("nonconformity statistics") {
  const auto center = oracle::mask_from_rows({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}});
  const auto d = oracle::signed_distance(center, Metric::Euclidean);
  const auto s = nonconformity(d, d, center);
  CHECK(s.tau == -0.5);
  CHECK(s.gamma == -0.5);

  std::mt19937_64 rng(1);
  const auto img = random_image(rng, 3, 3);
  const auto full = nonconformity(img, img, LabelMask(GridDims(3, 3), true));
  CHECK(full.tau == -kInf);
  CHECK(full.gamma == max_over(img, LabelMask(GridDims(3, 3), true), true));
  const auto none = nonconformity(img, img, LabelMask(GridDims(3, 3), false));
  CHECK(none.gamma == -kInf);

  const ScoreImage constant(GridDims(3, 3), 1.75);
  CHECK(nonconformity(constant, constant, center).tau == 1.75);
  CHECK_THROWS_AS((void)nonconformity(constant, ScoreImage(GridDims(3, 2), 0.0), center), ShapeError);
}

TEST_CASE("calibrate examples") {
  const std::vector<Nonconformity> one = {{0.3, -1.0}};
  const auto t = calibrate(one, 0.5, 0.5);
  CHECK(t.lambda_inner == 0.3);
  CHECK(t.lambda_outer == -1.0);
  CHECK_FALSE(t.lambda_joint.has_value());
  CHECK(t.n == 1);

  const std::vector<Nonconformity> few = {{0.1, 0.2}, {0.3, -0.1}, {0.2, 0.5}};
  const auto vacuous = calibrate(few, 0.01, 0.01, 0.01);
  CHECK(vacuous.lambda_inner == kInf);
  CHECK(vacuous.lambda_outer == kInf);
  CHECK(*vacuous.lambda_joint == kInf);
  std::mt19937_64 rng(3);
  const auto f = random_image(rng, 5, 5);
  const auto sets = build_sets(f, f, vacuous, SetMode::Marginal);
  CHECK(count_ones(sets.inner) == 0);
  CHECK(count_ones(sets.outer) == 25);

  CHECK_THROWS_AS((void)calibrate(std::vector<Nonconformity>{}, 0.1, 0.1), EmptyInputError);
}

TEST_CASE("joint threshold dominates both marginal thresholds") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<Nonconformity> stats(5 + static_cast<std::size_t>(t % 60));
    for (auto& s : stats) s = {normal(rng), normal(rng)};
    const double a = random_alpha(rng);
    const auto th = calibrate(stats, a, a, a);
    CHECK(*th.lambda_joint >= th.lambda_inner);
    CHECK(*th.lambda_joint >= th.lambda_outer);
  }
}

TEST_CASE("set construction") {
  const ScoreImage f(GridDims(1, 4), {-1.0, 0.25, 0.5, 2.0});
  // Strict for the inner set, non-strict for the outer set.
  CHECK(inner_set(f, 0.5) == oracle::mask_from_rows({{0, 0, 0, 1}}));
  CHECK(outer_set(f, -0.5) == oracle::mask_from_rows({{0, 0, 1, 1}}));
  CHECK(count_ones(inner_set(f, kInf)) == 0);
  CHECK(count_ones(outer_set(f, kInf)) == 4);

  ThresholdSet th;
  th.lambda_inner = 0.0;
  th.lambda_outer = 0.0;
  CHECK_THROWS_AS((void)build_sets(f, f, th, SetMode::Joint), ConfigError);
  CHECK_THROWS_AS((void)build_sets(f, f, th, SetMode::WeightedJoint), ConfigError);
  th.alpha1 = 0.05;
  th.alpha2 = 0.08;
  th.alpha_joint = 0.1;
  CHECK_THROWS_AS((void)build_sets(f, f, th, SetMode::WeightedJoint), ConfigError);
  th.alpha1 = 0.02;
  CHECK_NOTHROW((void)build_sets(f, f, th, SetMode::WeightedJoint));
  th.lambda_joint = 1.0;
  const auto joint = build_sets(f, f, th, SetMode::Joint);
  CHECK(joint.inner == inner_set(f, 1.0));
  CHECK(joint.outer == outer_set(f, 1.0));
}

TEST_CASE("inner set lies inside the outer set for nonnegative lambda") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const auto f = random_image(rng, 6, 7);
    const double l = lam(rng);
    CHECK(is_subset(inner_set(f, l), outer_set(f, l)));
  }
}

TEST_CASE("larger lambda shrinks the inner set and grows the outer set") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 100; ++t) {
    const auto f = random_image(rng, 5, 5);
    for (double l = -2.0; l < 2.0; l += 0.25) {
      CHECK(is_subset(inner_set(f, l + 0.25), inner_set(f, l)));
      CHECK(is_subset(outer_set(f, l), outer_set(f, l + 0.25)));
    }
  }
}

TEST_CASE("coverage events coincide with statistic comparisons") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const auto f_inner = random_image(rng, 5, 6);
    const auto f_outer = random_image(rng, 5, 6);
    const auto truth = oracle::random_mask(rng, 5, 6, 0.5);
    const auto s = nonconformity(f_inner, f_outer, truth);
    // Probe thresholds on and around the realised statistics.
    for (const double l : {normal(rng), s.tau, s.gamma, std::nextafter(s.tau, -kInf), std::nextafter(s.gamma, -kInf)}) {
      if (!std::isfinite(l)) continue;
      CHECK(is_subset(inner_set(f_inner, l), truth) == (s.tau <= l));
      CHECK(is_subset(truth, outer_set(f_outer, l)) == (s.gamma <= l));
    }
  }
}

TEST_CASE("generalized construction with the max combination") {
  // Fixed 4x4 example: the main-text tau uses the background, the generalized
  // inner statistic uses the foreground.
  const ScoreImage f(GridDims(4, 4), {0.9, 0.1, -0.3, 0.4,  //
                                      0.2, 1.5, 0.7, -0.8,  //
                                      -1.2, 0.6, 2.1, 0.0,  //
                                      0.3, -0.5, 0.8, -0.1});
  const auto truth = oracle::mask_from_rows({{0, 0, 0, 0}, {0, 1, 1, 0}, {0, 1, 1, 0}, {0, 0, 0, 0}});
  const TransformedRecord rec{f, f, truth};
  const MaxCombination max;
  CHECK(nonconformity(f, f, truth).tau == 0.9);
  CHECK(generalized_statistic(rec, max, Side::Inner) == 2.1);
  CHECK(nonconformity(f, f, truth).gamma == -0.6);
  CHECK(generalized_statistic(rec, max, Side::Outer) == 1.2);

  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    std::vector<TransformedRecord> records;
    std::vector<double> inner_direct, outer_direct;
    const auto n = 1 + static_cast<std::size_t>(t % 30);
    for (std::size_t i = 0; i < n; ++i) {
      auto fi = random_image(rng, 4, 5);
      auto fo = random_image(rng, 4, 5);
      auto y = oracle::random_mask(rng, 4, 5, 0.4);
      inner_direct.push_back(max_over(fi, y, false));
      outer_direct.push_back(max_over(fo, complement(y), true));
      records.push_back({std::move(fi), std::move(fo), std::move(y)});
    }
    const double a = random_alpha(rng);
    const double li = generalized_calibrate(records, max, Side::Inner, a);
    const double lo = generalized_calibrate(records, max, Side::Outer, a);
    CHECK(li == oracle::quantile_sweep(inner_direct, a));
    CHECK(lo == oracle::quantile_sweep(outer_direct, a));
    const auto& probe = records.front();
    if (std::isfinite(li)) CHECK(generalized_set(probe.f_inner, max, Side::Inner, li) == inner_set(probe.f_inner, li));
    if (std::isfinite(lo)) CHECK(generalized_set(probe.f_outer, max, Side::Outer, lo) == outer_set(probe.f_outer, lo));
  }
}

TEST_CASE("registered combinations are increasing") {
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  REQUIRE(registered_combinations().size() >= 3);
  for (const auto& c : registered_combinations()) {
    CHECK(combination_by_name(c->name()) == c);
    for (int t = 0; t < 1000; ++t) {
      const auto x = random_image(rng, 4, 4);
      auto set = oracle::random_mask(rng, 4, 4, u(rng));
      std::vector<std::uint8_t> bits(set.bits().begin(), set.bits().end());
      const auto v = static_cast<std::size_t>(std::uniform_int_distribution<int>(0, 15)(rng));
      bits[v] = 1;
      set = LabelMask(set.dims(), std::move(bits));
      std::vector<std::uint8_t> single(16, 0);
      single[v] = 1;
      const double at_v = c->combine(LabelMask(set.dims(), std::move(single)), x);
      CHECK(c->at_pixel(x, v) == at_v);
      CHECK(at_v <= c->combine(set, x));
    }
  }
  CHECK_THROWS_AS((void)combination_by_name("median"), ConfigError);
}
