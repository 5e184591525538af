#pragma once

// Data-parallel inner loops used by EM fitting, batch membership evaluation
// and neighbour search. Every kernel has a scalar reference implementation;
// wider variants are chosen at runtime and must agree with the reference to
// within rounding (see tests/unit/test_kernels.cpp).

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dsfusion::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

struct KernelTable {
  Isa isa;
  // out[i] = offset - 0.5 * ((x[i] - mean) * inv_sigma)^2
  void (*gaussian_log_terms)(const double* x, std::size_t n, double mean, double inv_sigma, double offset,
                             double* out);
  // dst[i] = max(dst[i], src[i])
  void (*max_into)(const double* src, std::size_t n, double* dst);
  // acc[i] += exp(a[i] - b[i])
  void (*accumulate_exp_diff)(const double* a, const double* b, std::size_t n, double* acc);
  // out[i] = exp(a[i] - b[i])
  void (*exp_diff)(const double* a, const double* b, std::size_t n, double* out);
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i w[i] * (x[i] - center)^2
  double (*weighted_sq_dev)(const double* x, const double* w, std::size_t n, double center);
  // out[r] = sum_j (rows[r*dim + j] - query[j])^2 for a row-major matrix.
  void (*squared_distances)(const double* rows, std::size_t nrows, std::size_t dim, const double* query,
                            double* out);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

bool available(Isa isa);
Isa best_available();

// Kernels used by the library. Defaults to best_available(), overridable by
// the DSFUSION_ISA environment variable (scalar | avx2) or by select().
const KernelTable& active();
// Throws InvalidConfig when the requested variant is unavailable.
void select(Isa isa);

// Span front-ends over active().
void gaussian_log_terms(std::span<const double> x, double mean, double inv_sigma, double offset,
                        std::span<double> out);
void max_into(std::span<const double> src, std::span<double> dst);
void accumulate_exp_diff(std::span<const double> a, std::span<const double> b, std::span<double> acc);
void exp_diff(std::span<const double> a, std::span<const double> b, std::span<double> out);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double weighted_sq_dev(std::span<const double> x, std::span<const double> w, double center);
void squared_distances(std::span<const double> rows, std::size_t dim, std::span<const double> query,
                       std::span<double> out);

}  // namespace dsfusion::kernels
