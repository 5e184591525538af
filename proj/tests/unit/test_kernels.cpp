#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dsfusion/errors.hpp"
#include "dsfusion/kernels.hpp"

using namespace dsfusion::kernels;

namespace {

std::vector<const KernelTable*> wide_tables() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::avx2}) {
    if (const auto* t = table_for(isa)) out.push_back(t);
  }
  if (out.empty()) MESSAGE("no SIMD variant available on this machine; only the scalar table is exercised");
  return out;
}

std::vector<double> uniform(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

void close(double got, double want, double rel) {
  const double tol = rel * std::max(1.0, std::abs(want));
  CHECK(std::abs(got - want) <= tol);
}

// Lengths that cover empty input, pure tails and several full vectors.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 67, 250};

}  // namespace

TEST_CASE("isa names round-trip and scalar is always there") {
  CHECK(parse_isa("scalar") == Isa::scalar);
  CHECK(parse_isa("avx2") == Isa::avx2);
  CHECK_FALSE(parse_isa("sse9").has_value());
  CHECK(isa_name(Isa::avx2) == "avx2");
  CHECK(available(Isa::scalar));
  CHECK(table_for(Isa::scalar) == &scalar_table());
  CHECK(available(best_available()));
}

TEST_CASE("selecting a variant switches the active table") {
  const Isa before = active().isa;
  select(Isa::scalar);
  CHECK(active().isa == Isa::scalar);
  if (!available(Isa::avx2)) {
    CHECK_THROWS_AS(select(Isa::avx2), dsfusion::InvalidConfig);
  }
  select(before);
}

TEST_CASE("gaussian_log_terms matches scalar") {
  std::mt19937_64 gen(1);
  const auto& ref = scalar_table();
  for (const auto* t : wide_tables()) {
    for (std::size_t n : kLengths) {
      const auto x = uniform(gen, n, -50.0, 50.0);
      std::vector<double> a(n), b(n);
      ref.gaussian_log_terms(x.data(), n, 1.5, 1.0 / 3.25, -2.1, a.data());
      t->gaussian_log_terms(x.data(), n, 1.5, 1.0 / 3.25, -2.1, b.data());
      for (std::size_t i = 0; i < n; ++i) close(b[i], a[i], 1e-13);
    }
  }
}

TEST_CASE("exp kernels match scalar over the whole range") {
  std::mt19937_64 gen(2);
  const auto& ref = scalar_table();
  for (const auto* t : wide_tables()) {
    for (std::size_t n : kLengths) {
      const auto a = uniform(gen, n, -760.0, 720.0);
      const auto b = uniform(gen, n, -20.0, 20.0);
      std::vector<double> want(n), got(n);
      ref.exp_diff(a.data(), b.data(), n, want.data());
      t->exp_diff(a.data(), b.data(), n, got.data());
      for (std::size_t i = 0; i < n; ++i) {
        if (std::isinf(want[i])) {
          CHECK(std::isinf(got[i]));
        } else if (want[i] < 1e-300) {
          CHECK(got[i] <= 1e-300);
        } else {
          CHECK(std::abs(got[i] - want[i]) <= 1e-14 * want[i]);
        }
      }
    }
    const std::vector<double> edge{0.0, -0.0, 1e-300, -745.2, -1e4, -INFINITY, 1.0, -1.0, 709.7, 1e4};
    const std::vector<double> zero(edge.size(), 0.0);
    std::vector<double> want(edge.size()), got(edge.size());
    ref.exp_diff(edge.data(), zero.data(), edge.size(), want.data());
    t->exp_diff(edge.data(), zero.data(), edge.size(), got.data());
    CHECK(got[0] == 1.0);
    CHECK(got[1] == 1.0);
    CHECK(got[4] == 0.0);
    CHECK(got[5] == 0.0);
    CHECK(std::isinf(got[9]));
    CHECK(std::abs(got[6] - want[6]) <= 1e-15 * want[6]);
  }
}

TEST_CASE("accumulate_exp_diff and max_into match scalar") {
  std::mt19937_64 gen(3);
  const auto& ref = scalar_table();
  for (const auto* t : wide_tables()) {
    for (std::size_t n : kLengths) {
      const auto a = uniform(gen, n, -40.0, 0.0);
      const auto b = uniform(gen, n, -5.0, 5.0);
      std::vector<double> want(n, 0.5), got(n, 0.5);
      ref.accumulate_exp_diff(a.data(), b.data(), n, want.data());
      t->accumulate_exp_diff(a.data(), b.data(), n, got.data());
      for (std::size_t i = 0; i < n; ++i) close(got[i], want[i], 1e-14);

      auto m1 = b, m2 = b;
      ref.max_into(a.data(), n, m1.data());
      t->max_into(a.data(), n, m2.data());
      CHECK(m1 == m2);
    }
  }
}

TEST_CASE("reductions match scalar up to summation order") {
  std::mt19937_64 gen(4);
  const auto& ref = scalar_table();
  for (const auto* t : wide_tables()) {
    for (std::size_t n : kLengths) {
      const auto x = uniform(gen, n, -3.0, 7.0);
      const auto w = uniform(gen, n, 0.0, 1.0);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i]) * (1.0 + w[i]) + w[i] * (x[i] - 2.0) * (x[i] - 2.0);
      const double tol = 1e-14 * std::max(1.0, scale);
      CHECK(std::abs(t->sum(x.data(), n) - ref.sum(x.data(), n)) <= tol);
      CHECK(std::abs(t->dot(x.data(), w.data(), n) - ref.dot(x.data(), w.data(), n)) <= tol);
      CHECK(std::abs(t->weighted_sq_dev(x.data(), w.data(), n, 2.0) - ref.weighted_sq_dev(x.data(), w.data(), n, 2.0)) <=
            tol);
    }
  }
}

TEST_CASE("squared distances match scalar for every dimension") {
  std::mt19937_64 gen(5);
  const auto& ref = scalar_table();
  for (const auto* t : wide_tables()) {
    for (std::size_t dim : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 60u}) {
      for (std::size_t rows : {0u, 1u, 6u, 33u}) {
        const auto m = uniform(gen, rows * dim, -10.0, 10.0);
        const auto q = uniform(gen, dim, -10.0, 10.0);
        std::vector<double> a(rows), b(rows);
        ref.squared_distances(m.data(), rows, dim, q.data(), a.data());
        t->squared_distances(m.data(), rows, dim, q.data(), b.data());
        for (std::size_t r = 0; r < rows; ++r) close(b[r], a[r], 1e-13);
      }
    }
  }
}

TEST_CASE("span front-ends dispatch through the active table") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const std::vector<double> y{4.0, 5.0, 6.0};
  CHECK(sum(x) == 6.0);
  CHECK(dot(x, y) == 32.0);
  CHECK(weighted_sq_dev(x, y, 2.0) == 10.0);
  std::vector<double> d(1);
  squared_distances(x, 3, y, d);
  CHECK(d[0] == 27.0);
}
