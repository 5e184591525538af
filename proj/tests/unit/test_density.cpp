#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dsfusion/density.hpp"
#include "dsfusion/errors.hpp"

using namespace dsfusion;

namespace {

double normal_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double log_likelihood(const MembershipModel& m, const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) {
    double p = 0.0;
    for (const auto& c : m.components()) p += c.weight * normal_pdf(x, c.mean, c.stddev);
    s += std::log(p);
  }
  return s;
}

std::vector<double> random_sample(std::mt19937_64& gen, std::size_t n) {
  std::uniform_int_distribution<int> modes(1, 4);
  std::uniform_real_distribution<double> loc(-20.0, 20.0), scale(0.1, 5.0);
  const int k = modes(gen);
  std::vector<double> mu(k), sd(k);
  for (int i = 0; i < k; ++i) {
    mu[i] = loc(gen);
    sd[i] = scale(gen);
  }
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<double> xs(n);
  for (auto& x : xs) {
    const int i = pick(gen);
    x = std::normal_distribution<double>(mu[i], sd[i])(gen);
  }
  return xs;
}

}  // namespace

TEST_CASE("membership model validation") {
  CHECK_THROWS_AS(MembershipModel({}), InvalidConfig);
  CHECK_THROWS_AS(MembershipModel({{0.5, 0.0, 1.0}}), InvalidConfig);
  CHECK_THROWS_AS(MembershipModel({{1.0, 0.0, 0.0}}), InvalidConfig);
  CHECK_THROWS_AS(MembershipModel({{1.0, NAN, 1.0}}), InvalidConfig);
  CHECK_THROWS_AS(MembershipModel({{0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}}), InvalidConfig);
  CHECK_NOTHROW(MembershipModel({{0.25, 0.0, 1.0}, {0.75, 1.0, 2.0}}));
}

TEST_CASE("EM config validation") {
  EmConfig c;
  CHECK_NOTHROW(c.validate());
  c.tol = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = {};
  c.min_iters = 20;
  c.max_iters = 10;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
}

TEST_CASE("single Gaussian fits") {
  const std::vector<double> a{1, 2, 3};
  const auto m = fit_single_gaussian(a);
  CHECK(m.size() == 1);
  CHECK(m.components()[0].mean == doctest::Approx(2.0));
  CHECK(m.components()[0].stddev == doctest::Approx(1.0));

  const std::vector<double> b{0, 2};
  CHECK(fit_single_gaussian(b).components()[0].stddev == doctest::Approx(std::sqrt(2.0)));

  const std::vector<double> flat{5, 5, 5};
  CHECK(fit_single_gaussian(flat).components()[0].stddev == 1e-12);
  CHECK(fit_single_gaussian(flat, 0.25).components()[0].stddev == 0.25);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(fit_single_gaussian(one), InsufficientData);
}

TEST_CASE("sigma floor") {
  const std::vector<double> v{2.0, 12.0, 7.0};
  CHECK(sigma_floor_for(v, 1e-6) == doctest::Approx(1e-5));
  const std::vector<double> flat{3.0, 3.0};
  CHECK(sigma_floor_for(flat, 1e-6) == 1e-12);
}

TEST_CASE("EM separates two tight clusters") {
  const std::vector<double> xs{-0.1, 0.0, 0.1, 9.9, 10.0, 10.1};
  const auto fit = fit_gmm(xs, 2, EmConfig{});
  const auto c = fit.model.components();
  const auto lo = c[0].mean < c[1].mean ? 0 : 1;
  CHECK(std::abs(c[lo].mean - 0.0) < 0.05);
  CHECK(std::abs(c[1 - lo].mean - 10.0) < 0.05);
  CHECK(std::abs(c[0].weight - 0.5) < 0.01);
  CHECK(fit.iterations >= 10);
  CHECK(fit.log_likelihood == doctest::Approx(log_likelihood(fit.model, xs)).epsilon(1e-9));
}

TEST_CASE("EM on constant data stays finite at the floor") {
  const std::vector<double> xs{5, 5, 5, 5};
  const auto fit = fit_gmm(xs, 2, EmConfig{});
  for (const auto& c : fit.model.components()) {
    CHECK(c.stddev == 1e-12);
    CHECK(std::isfinite(c.mean));
    CHECK(std::isfinite(c.weight));
  }
  CHECK(std::isfinite(fit.log_likelihood));
}

TEST_CASE("EM argument checks") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  CHECK_THROWS_AS(fit_gmm(xs, 1, EmConfig{}), InvalidConfig);
  CHECK_THROWS_AS(fit_gmm(xs, 3, EmConfig{}), InsufficientData);
  CHECK_NOTHROW(fit_gmm(xs, 2, EmConfig{}));
}

TEST_CASE("EM ascent, weights and floors on random data") {
  std::mt19937_64 gen(1234);
  for (int t = 0; t < 60; ++t) {
    const auto xs = random_sample(gen, 6 + t * 3);
    for (int y : {2, 3}) {
      EmConfig cfg;
      const double floor = sigma_floor_for(xs, cfg.sigma_floor_rel);
      const auto fit = fit_gmm(xs, y, cfg, floor);
      REQUIRE(fit.trace.size() == static_cast<std::size_t>(fit.iterations) + 1);
      for (std::size_t i = 1; i < fit.trace.size(); ++i) CHECK(fit.trace[i] >= fit.trace[i - 1] - 1e-9);
      double w = 0.0;
      for (const auto& c : fit.model.components()) {
        w += c.weight;
        CHECK(c.stddev >= floor);
      }
      CHECK(w == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(fit.iterations >= cfg.min_iters);
      CHECK(fit.iterations <= cfg.max_iters);
    }
  }
}

TEST_CASE("EM is translation equivariant and ignores input order") {
  std::mt19937_64 gen(8);
  const auto xs = random_sample(gen, 80);
  auto shifted = xs;
  for (auto& x : shifted) x += 3.5;
  auto reversed = xs;
  std::reverse(reversed.begin(), reversed.end());
  const auto a = fit_gmm(xs, 3, EmConfig{});
  const auto b = fit_gmm(shifted, 3, EmConfig{});
  const auto c = fit_gmm(reversed, 3, EmConfig{});
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& ca = a.model.components()[k];
    const auto& cb = b.model.components()[k];
    CHECK(cb.mean - ca.mean == doctest::Approx(3.5).epsilon(1e-6));
    CHECK(cb.stddev == doctest::Approx(ca.stddev).epsilon(1e-6));
    CHECK(cb.weight == doctest::Approx(ca.weight).epsilon(1e-6));
    CHECK(c.model.components()[k].mean == ca.mean);
  }
}

TEST_CASE("membership evaluation") {
  const MembershipModel std_normal({{1.0, 0.0, 1.0}});
  CHECK(eval_membership(std_normal, 0.0) == doctest::Approx(0.3989422804014327));
  CHECK(eval_membership(std_normal, 1.0) == eval_membership(std_normal, -1.0));

  const MembershipModel two({{0.5, 0.0, 1.0}, {0.5, 10.0, 1.0}});
  CHECK(eval_membership(two, 5.0) == doctest::Approx(2 * 0.5 * normal_pdf(5.0, 0.0, 1.0)).epsilon(1e-12));

  const MembershipModel swapped({{0.5, 10.0, 1.0}, {0.5, 0.0, 1.0}});
  const MembershipModel three({{0.2, -1.0, 0.5}, {0.3, 2.0, 1.5}, {0.5, 4.0, 0.7}});
  const MembershipModel three_perm({{0.5, 4.0, 0.7}, {0.2, -1.0, 0.5}, {0.3, 2.0, 1.5}});
  for (double x : {-3.0, 0.0, 1.7, 5.0, 12.0}) {
    CHECK(eval_membership(two, x) == doctest::Approx(eval_membership(swapped, x)).epsilon(1e-14));
    CHECK(eval_membership(three, x) == doctest::Approx(eval_membership(three_perm, x)).epsilon(1e-14));
  }

  // Far tails: the log form stays finite where the density underflows.
  CHECK(eval_membership(std_normal, 60.0) == 0.0);
  CHECK(eval_log_membership(std_normal, 60.0) == doctest::Approx(-1800.0 - 0.5 * std::log(2 * std::numbers::pi)));
  CHECK(eval_log_membership(std_normal, 1e300) == -std::numeric_limits<double>::infinity());
  CHECK(eval_log_membership(two, -1e300) == -std::numeric_limits<double>::infinity());
  std::vector<double> huge{1e300, 0.0}, logs(2);
  eval_log_membership(two, huge, logs);
  CHECK(logs[0] == -std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(logs[1]));
}

TEST_CASE("batched evaluation equals the scalar path") {
  const MembershipModel three({{0.2, -1.0, 0.5}, {0.3, 2.0, 1.5}, {0.5, 4.0, 0.7}});
  const MembershipModel single({{1.0, 1.0, 2.0}});
  std::vector<double> xs;
  for (int i = 0; i < 37; ++i) xs.push_back(-10.0 + 0.7 * i);
  std::vector<double> out(xs.size());
  for (const auto* m : {&three, &single}) {
    eval_log_membership(*m, xs, out);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(out[i] == doctest::Approx(eval_log_membership(*m, xs[i])).epsilon(1e-12));
    }
  }
}
