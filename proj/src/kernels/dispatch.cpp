#include <atomic>
#include <cstdlib>
#include <string>

#include "dsfusion/errors.hpp"
#include "kernels_internal.hpp"

namespace dsfusion::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(DSFUSION_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("DSFUSION_ISA")) {
    if (auto isa = parse_isa(env)) {
      if (const KernelTable* t = table_for(*isa)) return t;
    }
  }
  return table_for(best_available());
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  return std::nullopt;
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_table();
    case Isa::avx2:
#if defined(DSFUSION_HAVE_AVX2)
      if (cpu_has_avx2()) return &avx2_table();
#endif
      return nullptr;
  }
  return nullptr;
}

bool available(Isa isa) { return table_for(isa) != nullptr; }

Isa best_available() { return available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (!t) throw InvalidConfig("kernel variant '" + std::string(isa_name(isa)) + "' is not available");
  current().store(t, std::memory_order_release);
}

void gaussian_log_terms(std::span<const double> x, double mean, double inv_sigma, double offset,
                        std::span<double> out) {
  active().gaussian_log_terms(x.data(), x.size(), mean, inv_sigma, offset, out.data());
}

void max_into(std::span<const double> src, std::span<double> dst) {
  active().max_into(src.data(), src.size(), dst.data());
}

void accumulate_exp_diff(std::span<const double> a, std::span<const double> b, std::span<double> acc) {
  active().accumulate_exp_diff(a.data(), b.data(), a.size(), acc.data());
}

void exp_diff(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  active().exp_diff(a.data(), b.data(), a.size(), out.data());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

double weighted_sq_dev(std::span<const double> x, std::span<const double> w, double center) {
  return active().weighted_sq_dev(x.data(), w.data(), x.size(), center);
}

void squared_distances(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                       std::span<double> out) {
  active().squared_distances(rows.data(), out.size(), dim, query.data(), out.data());
}

}  // namespace dsfusion::kernels
