#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dsfusion/bpa.hpp"
#include "dsfusion/errors.hpp"
#include "oracles.hpp"

using namespace dsfusion;

namespace {

// Theta_1..Theta_n as bits 0..n-1.
Subset set_of(std::initializer_list<int> members) {
  std::uint32_t b = 0;
  for (int m : members) b |= 1u << (m - 1);
  return Subset{b};
}

}  // namespace

TEST_CASE("max normalization") {
  const auto f = Frame::anonymous(3);
  const auto p = normalize_max(MembershipVector(f, {0.1, 0.2, 0.4}));
  CHECK(p.values()[0] == doctest::Approx(0.25));
  CHECK(p.values()[1] == doctest::Approx(0.5));
  CHECK(p.values()[2] == 1.0);
  CHECK_FALSE(p.degenerate());

  const auto z = normalize_max(MembershipVector(f, {0.0, 0.0, 0.0}));
  CHECK(z.degenerate());
  for (double v : z.values()) CHECK(v == 1.0);

  const auto q = normalize_max(MembershipVector(Frame::anonymous(4), {0.4, 0.3, 0.2, 0.1}));
  CHECK(q.values()[0] == 1.0);
  CHECK(q.values()[1] == doctest::Approx(0.75));
  CHECK(q.values()[3] == doctest::Approx(0.25));

  CHECK_THROWS_AS(MembershipVector(f, {0.1, -1.0, 0.2}), InvalidConfig);
  CHECK_THROWS_AS(MembershipVector(f, {0.1, 0.2}), FrameMismatch);
  CHECK_THROWS_AS(PossibilityVector(f, {0.1, 1.2, 0.2}), InvalidConfig);
}

TEST_CASE("log-space normalization matches and survives underflow") {
  const auto f = Frame::anonymous(3);
  const std::vector<double> logs{std::log(0.1), std::log(0.2), std::log(0.4)};
  const auto p = normalize_max_log(f, logs);
  CHECK(p.values()[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p.values()[2] == 1.0);

  // exp() of these underflows to 0, the ratios do not.
  const std::vector<double> far{-2000.0, -2000.0 + std::log(0.5), -3000.0};
  const auto q = normalize_max_log(f, far);
  CHECK_FALSE(q.degenerate());
  CHECK(q.values()[0] == 1.0);
  CHECK(q.values()[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q.values()[2] == 0.0);

  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> none{ninf, ninf, ninf};
  CHECK(normalize_max_log(f, none).degenerate());
}

TEST_CASE("simple BPA") {
  const auto f = Frame::anonymous(3);
  const auto m = simple_bpa(f, 0, 0.25);
  CHECK(m.mass(set_of({2, 3})) == doctest::Approx(0.75));
  CHECK(m.mass(f.full()) == doctest::Approx(0.25));
  CHECK(simple_bpa(f, 1, 1.0).is_vacuous());
  const auto sl = simple_bpa(f, 0, 0.121);
  CHECK(sl.mass(set_of({2, 3})) == doctest::Approx(0.879).epsilon(1e-12));
  CHECK(sl.mass(f.full()) == doctest::Approx(0.121).epsilon(1e-12));
  CHECK_THROWS_AS(simple_bpa(f, 3, 0.5), InvalidConfig);
}

TEST_CASE("four-class comparison example: proposed transformation") {
  const auto f = Frame::anonymous(4);
  const auto pv = normalize_max(MembershipVector(f, {0.1, 0.2, 0.3, 0.4}));
  const auto fused = fuse_possibility(pv);
  CHECK(fused.conflict == 0.0);
  const auto& m = fused.mass;
  CHECK(m.focal_count() == 8);

  // Exact products (1 - p_i) over removed classes times p_i over kept ones.
  CHECK(m.mass(set_of({4})) == doctest::Approx(0.09375).epsilon(1e-12));
  CHECK(m.mass(set_of({1, 4})) == doctest::Approx(0.03125).epsilon(1e-12));
  CHECK(m.mass(set_of({2, 4})) == doctest::Approx(0.09375).epsilon(1e-12));
  CHECK(m.mass(set_of({1, 2, 4})) == doctest::Approx(0.03125).epsilon(1e-12));
  CHECK(m.mass(set_of({3, 4})) == doctest::Approx(0.28125).epsilon(1e-12));
  CHECK(m.mass(set_of({1, 3, 4})) == doctest::Approx(0.09375).epsilon(1e-12));
  CHECK(m.mass(set_of({2, 3, 4})) == doctest::Approx(0.28125).epsilon(1e-12));
  CHECK(m.mass(f.full()) == doctest::Approx(0.09375).epsilon(1e-12));
}

TEST_CASE("four-class comparison example: rank-based baseline") {
  const auto f = Frame::anonymous(4);
  const auto m = baseline_rank_bpa(MembershipVector(f, {0.1, 0.2, 0.3, 0.4}));
  CHECK(m.focal_count() == 4);
  CHECK(m.mass(set_of({4})) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(m.mass(set_of({3, 4})) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(m.mass(set_of({2, 3, 4})) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(m.mass(f.full()) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(m.is_consonant());
}

TEST_CASE("sepal-length fusion example") {
  const auto f = Frame::anonymous(3);
  const auto m = fuse_possibility_to_bpa(PossibilityVector(f, {0.121, 1.0, 0.288}));
  CHECK(m.mass(set_of({2})) == doctest::Approx(0.879 * 0.712).epsilon(1e-12));
  CHECK(m.mass(set_of({1, 2})) == doctest::Approx(0.121 * 0.712).epsilon(1e-12));
  CHECK(m.mass(set_of({2, 3})) == doctest::Approx(0.879 * 0.288).epsilon(1e-12));
  CHECK(m.mass(f.full()) == doctest::Approx(0.121 * 0.288).epsilon(1e-12));
  const auto p = pignistic(m);
  CHECK(p[0] == doctest::Approx(0.054692).epsilon(1e-9));
  CHECK(p[1] == doctest::Approx(0.807116).epsilon(1e-9));
  CHECK(p[2] == doctest::Approx(0.138192).epsilon(1e-9));
}

TEST_CASE("fusion of all-ones is vacuous; degenerate memberships abstain") {
  const auto f = Frame::anonymous(5);
  CHECK(fuse_possibility_to_bpa(PossibilityVector(f, std::vector<double>(5, 1.0))).is_vacuous());
  CHECK(fuse_possibility_to_bpa(normalize_max(MembershipVector(f, std::vector<double>(5, 0.0)))).is_vacuous());
}

TEST_CASE("closed form equals product expansion and iterated Dempster; zero conflict") {
  std::mt19937_64 gen(2024);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + t % 6;
    const auto f = Frame::anonymous(n);
    const auto p = oracle::random_possibility(n, gen);
    const auto fused = fuse_possibility(PossibilityVector(f, p));
    const auto want = oracle::product_expansion(p);
    CHECK(fused.conflict == 0.0);
    CHECK(want.conflict == 0.0);
    CHECK(oracle::max_abs_diff(oracle::to_map(fused.mass), want.masses) < 1e-9);

    std::vector<MassFunction> simple;
    for (std::size_t i = 0; i < n; ++i) simple.push_back(simple_bpa(f, i, p[i]));
    const auto iterated = combine_with_conflict(simple);
    CHECK(iterated.conflict == doctest::Approx(0.0));
    CHECK(oracle::max_abs_diff(oracle::to_map(iterated.mass), want.masses) < 1e-9);

    // Every focal element keeps every fully possible class.
    for (const auto& e : fused.mass.focal_elements()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (p[i] == 1.0) CHECK(e.set.contains(i));
      }
    }
  }
}

TEST_CASE("argmax of a unique-max possibility vector is the decision") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 0.99);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + t % 5;
    std::vector<double> p(n);
    for (auto& v : p) v = u(gen);
    const std::size_t top = t % n;
    p[top] = 1.0;
    CHECK(decide(fuse_possibility_to_bpa(PossibilityVector(Frame::anonymous(n), p))) == top);
  }
}

TEST_CASE("rank-based baseline edge cases") {
  const auto f = Frame::anonymous(3);
  const auto uni = baseline_rank_bpa(MembershipVector(f, {1.0, 1.0, 1.0}));
  CHECK(uni.mass(set_of({1})) == doctest::Approx(1.0 / 3));
  CHECK(uni.mass(set_of({1, 2})) == doctest::Approx(1.0 / 3));
  CHECK(uni.mass(f.full()) == doctest::Approx(1.0 / 3));

  const auto one = baseline_rank_bpa(MembershipVector(f, {1.0, 0.0, 0.0}));
  CHECK(one.focal_count() == 1);
  CHECK(one.mass(set_of({1})) == 1.0);

  CHECK_THROWS_AS(baseline_rank_bpa(MembershipVector(f, {0.0, 0.0, 0.0})), DegenerateInput);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-30.0, 0.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> logs(3), lin(3);
    for (int i = 0; i < 3; ++i) {
      logs[i] = u(gen);
      lin[i] = std::exp(logs[i]);
    }
    const auto a = baseline_rank_bpa(MembershipVector(f, lin));
    const auto b = baseline_rank_bpa_log(f, logs);
    CHECK(a.is_consonant());
    CHECK(oracle::max_abs_diff(oracle::to_map(a), oracle::to_map(b)) < 1e-12);
  }
}
