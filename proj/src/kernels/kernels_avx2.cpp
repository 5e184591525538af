// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma
// and is only entered after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace dsfusion::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// Cephes-style exp: range reduction by ln2 split in two parts, then a (2,3)
// rational approximation on [-ln2/2, ln2/2]. Inputs below -708.39 flush to
// zero; large inputs overflow to +inf like std::exp.
inline __m256d pow2_pd(__m256d k) {
  // k + 1023 must stay in [1, 2046] for the exponent-field trick.
  const __m256d magic = _mm256_set1_pd(1023.0 + 4503599627370496.0);
  return _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)), 52));
}

inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.39641853226408);
  const __m256d hi = _mm256_set1_pd(709.8);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878E-4), xx,
                               _mm256_set1_pd(3.02994407707441961300E-2));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042E-6), xx,
                               _mm256_set1_pd(2.52448340349684104192E-3));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000009E0));

  const __m256d ratio = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  __m256d r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), ratio, _mm256_set1_pd(1.0));

  // 2^fx as 2^a * 2^b with a = floor(fx / 2): fx reaches 1024 near the
  // overflow threshold, which a single exponent field cannot hold.
  const __m256d a = _mm256_floor_pd(_mm256_mul_pd(fx, _mm256_set1_pd(0.5)));
  r = _mm256_mul_pd(_mm256_mul_pd(r, pow2_pd(a)), pow2_pd(_mm256_sub_pd(fx, a)));
  return _mm256_blendv_pd(r, _mm256_setzero_pd(), underflow);
}

// Scalar tail shares the vector path's approximation so results do not
// depend on where an element falls relative to the 4-lane boundary.
inline double exp_tail(double x) {
  alignas(32) double buf[4] = {x, 0.0, 0.0, 0.0};
  _mm256_store_pd(buf, exp_pd(_mm256_load_pd(buf)));
  return buf[0];
}

void gaussian_log_terms(const double* x, std::size_t n, double mean, double inv_sigma, double offset,
                        double* out) {
  const __m256d vm = _mm256_set1_pd(mean);
  const __m256d vs = _mm256_set1_pd(inv_sigma);
  const __m256d vo = _mm256_set1_pd(offset);
  const __m256d half = _mm256_set1_pd(-0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vm), vs);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(half, _mm256_mul_pd(z, z), vo));
  }
  for (; i < n; ++i) {
    const double z = (x[i] - mean) * inv_sigma;
    out[i] = std::fma(-0.5, z * z, offset);
  }
}

void max_into(const double* src, std::size_t n, double* dst) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(src + i), _mm256_loadu_pd(dst + i)));
  }
  for (; i < n; ++i) dst[i] = src[i] > dst[i] ? src[i] : dst[i];
}

void accumulate_exp_diff(const double* a, const double* b, std::size_t n, double* acc) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), e));
  }
  for (; i < n; ++i) acc[i] += exp_tail(a[i] - b[i]);
}

void exp_diff(const double* a, const double* b, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  }
  for (; i < n; ++i) out[i] = exp_tail(a[i] - b[i]);
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double weighted_sq_dev(const double* x, const double* w, std::size_t n, double center) {
  const __m256d vc = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(d, d), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - center;
    s += w[i] * (d * d);
  }
  return s;
}

void squared_distances(const double* rows, std::size_t nrows, std::size_t dim, const double* query,
                       double* out) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const double* row = rows + r * dim;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= dim; j += 4) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(query + j));
      acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; j < dim; ++j) {
      const double d = row[j] - query[j];
      s += d * d;
    }
    out[r] = s;
  }
}

constexpr KernelTable kAvx2{
    Isa::avx2, gaussian_log_terms, max_into, accumulate_exp_diff, exp_diff, sum, dot, weighted_sq_dev,
    squared_distances,
};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace dsfusion::kernels
