#include <cmath>

#include "kernels_internal.hpp"

namespace dsfusion::kernels {

namespace {

void gaussian_log_terms(const double* x, std::size_t n, double mean, double inv_sigma, double offset,
                        double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (x[i] - mean) * inv_sigma;
    out[i] = offset - 0.5 * (z * z);
  }
}

void max_into(const double* src, std::size_t n, double* dst) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > dst[i] ? src[i] : dst[i];
}

void accumulate_exp_diff(const double* a, const double* b, std::size_t n, double* acc) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += std::exp(a[i] - b[i]);
}

void exp_diff(const double* a, const double* b, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a[i] - b[i]);
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double weighted_sq_dev(const double* x, const double* w, std::size_t n, double center) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - center;
    s += w[i] * (d * d);
  }
  return s;
}

void squared_distances(const double* rows, std::size_t nrows, std::size_t dim, const double* query,
                       double* out) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const double* row = rows + r * dim;
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = row[j] - query[j];
      s += d * d;
    }
    out[r] = s;
  }
}

constexpr KernelTable kScalar{
    Isa::scalar, gaussian_log_terms, max_into, accumulate_exp_diff, exp_diff, sum, dot, weighted_sq_dev,
    squared_distances,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace dsfusion::kernels
