#include "dsfusion/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dsfusion/errors.hpp"
#include "dsfusion/kernels.hpp"

namespace dsfusion {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
constexpr double kMinWeight = 1e-300;

double log_component_offset(const GaussianComponent& c) { return std::log(c.weight) - std::log(c.stddev) - kHalfLog2Pi; }

}  // namespace

MembershipModel::MembershipModel(std::vector<GaussianComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidConfig("membership model needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0 && c.weight <= 1.0)) throw InvalidConfig("component weight must be in (0, 1]");
    if (!(c.stddev > 0.0) || !std::isfinite(c.stddev)) throw InvalidConfig("component stddev must be positive");
    if (!std::isfinite(c.mean)) throw InvalidConfig("component mean must be finite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidConfig("component weights must sum to 1");
}

void EmConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidConfig("EM tolerance must be positive");
  if (min_iters < 0 || max_iters < 1 || min_iters > max_iters) {
    throw InvalidConfig("EM iteration bounds must satisfy 0 <= min_iters <= max_iters, max_iters >= 1");
  }
  if (!(sigma_floor_rel >= 0.0)) throw InvalidConfig("sigma floor must be nonnegative");
}

double sigma_floor_for(std::span<const double> values, double rel) {
  if (values.empty()) return 1e-12;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return std::max(rel * (*hi - *lo), 1e-12);
}

MembershipModel fit_single_gaussian(std::span<const double> values, double sigma_floor) {
  if (values.size() < 2) throw InsufficientData("single Gaussian fit needs at least 2 values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return MembershipModel({{1.0, mean, std::max(sd, sigma_floor)}});
}

MembershipModel fit_single_gaussian(std::span<const double> values) {
  return fit_single_gaussian(values, sigma_floor_for(values, EmConfig{}.sigma_floor_rel));
}

GmmFit fit_gmm(std::span<const double> values, int components, const EmConfig& cfg, double sigma_floor) {
  cfg.validate();
  if (components < 2) throw InvalidConfig("mixture fitting needs at least 2 components; use fit_single_gaussian");
  const auto y = static_cast<std::size_t>(components);
  const std::size_t n = values.size();
  if (n < 2 * y) {
    throw InsufficientData("mixture with " + std::to_string(y) + " components needs at least " +
                           std::to_string(2 * y) + " values, got " + std::to_string(n));
  }

  // Sorting fixes the summation order, so the fit does not depend on row order.
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());

  std::vector<GaussianComponent> comp(y);
  for (std::size_t k = 0; k < y; ++k) {
    const std::size_t begin = k * n / y;
    const std::size_t end = (k + 1) * n / y;
    const double cnt = static_cast<double>(end - begin);
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += x[i];
    mean /= cnt;
    double ss = 0.0;
    for (std::size_t i = begin; i < end; ++i) ss += (x[i] - mean) * (x[i] - mean);
    comp[k] = {cnt / static_cast<double>(n), mean, std::max(std::sqrt(ss / cnt), sigma_floor)};
  }

  std::vector<double> logp(y * n);
  std::vector<double> peak(n), acc(n), lse(n), resp(n);
  std::vector<double> trace;
  const auto row = [&](std::size_t k) { return std::span<double>(logp.data() + k * n, n); };

  const auto e_step = [&]() {
    for (std::size_t k = 0; k < y; ++k) {
      kernels::gaussian_log_terms(x, comp[k].mean, 1.0 / comp[k].stddev, log_component_offset(comp[k]), row(k));
    }
    std::copy_n(logp.begin(), n, peak.begin());
    for (std::size_t k = 1; k < y; ++k) kernels::max_into(row(k), peak);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < y; ++k) kernels::accumulate_exp_diff(row(k), peak, acc);
    for (std::size_t i = 0; i < n; ++i) lse[i] = peak[i] + std::log(acc[i]);
    return kernels::sum(lse);
  };

  double ll = e_step();
  trace.push_back(ll);
  int iter = 0;
  while (iter < cfg.max_iters) {
    // M-step from the responsibilities of the last E-step.
    double total_nk = 0.0;
    for (std::size_t k = 0; k < y; ++k) {
      kernels::exp_diff(row(k), lse, resp);
      const double nk = kernels::sum(resp);
      if (nk > std::numeric_limits<double>::min() * static_cast<double>(n)) {
        const double mean = kernels::dot(resp, x) / nk;
        const double var = kernels::weighted_sq_dev(x, resp, mean) / nk;
        comp[k].mean = mean;
        comp[k].stddev = std::max(std::sqrt(var), sigma_floor);
      }
      comp[k].weight = nk;
      total_nk += nk;
    }
    for (auto& c : comp) c.weight = std::max(c.weight / total_nk, kMinWeight);
    ++iter;

    const double prev = ll;
    ll = e_step();
    trace.push_back(ll);
    if (iter >= cfg.min_iters && std::abs(ll - prev) / (1.0 + std::abs(ll)) < cfg.tol) break;
  }

  double wsum = 0.0;
  for (const auto& c : comp) wsum += c.weight;
  for (auto& c : comp) c.weight /= wsum;
  return {MembershipModel(std::move(comp)), ll, iter, std::move(trace)};
}

GmmFit fit_gmm(std::span<const double> values, int components, const EmConfig& cfg) {
  return fit_gmm(values, components, cfg, sigma_floor_for(values, cfg.sigma_floor_rel));
}

double eval_log_membership(const MembershipModel& model, double x) {
  const auto comps = model.components();
  double terms[64];
  std::vector<double> heap;
  double* t = terms;
  if (comps.size() > 64) {
    heap.resize(comps.size());
    t = heap.data();
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const double z = (x - comps[k].mean) / comps[k].stddev;
    t[k] = log_component_offset(comps[k]) - 0.5 * z * z;
    peak = std::max(peak, t[k]);
  }
  // Every term -inf (z*z overflowed): the density is zero, not NaN.
  if (peak == -std::numeric_limits<double>::infinity()) return peak;
  double s = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) s += std::exp(t[k] - peak);
  return peak + std::log(s);
}

double eval_membership(const MembershipModel& model, double x) { return std::exp(eval_log_membership(model, x)); }

void eval_log_membership(const MembershipModel& model, std::span<const double> xs, std::span<double> out) {
  const auto comps = model.components();
  const std::size_t n = xs.size();
  if (comps.size() == 1) {
    kernels::gaussian_log_terms(xs, comps[0].mean, 1.0 / comps[0].stddev, log_component_offset(comps[0]), out);
    return;
  }
  std::vector<double> terms(comps.size() * n);
  std::vector<double> acc(n, 0.0);
  const auto row = [&](std::size_t k) { return std::span<double>(terms.data() + k * n, n); };
  for (std::size_t k = 0; k < comps.size(); ++k) {
    kernels::gaussian_log_terms(xs, comps[k].mean, 1.0 / comps[k].stddev, log_component_offset(comps[k]), row(k));
  }
  std::copy_n(terms.begin(), n, out.begin());
  for (std::size_t k = 1; k < comps.size(); ++k) kernels::max_into(row(k), out);
  for (std::size_t k = 0; k < comps.size(); ++k) kernels::accumulate_exp_diff(row(k), out, acc);
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i] != -std::numeric_limits<double>::infinity()) out[i] += std::log(acc[i]);
  }
}

}  // namespace dsfusion
