#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dsfusion {

struct GaussianComponent {
  double weight;
  double mean;
  double stddev;
};

// Univariate membership function: a weighted sum of Gaussian densities.
// One component is the single-Gaussian case.
class MembershipModel {
 public:
  // Weights must be in (0, 1] and sum to 1 within 1e-9; stddevs > 0.
  explicit MembershipModel(std::vector<GaussianComponent> components);

  std::span<const GaussianComponent> components() const { return components_; }
  std::size_t size() const { return components_.size(); }

 private:
  std::vector<GaussianComponent> components_;
};

struct EmConfig {
  double tol = 3e-3;  // on |l_t - l_{t-1}| / (1 + |l_t|)
  int min_iters = 10;
  int max_iters = 2000;
  double sigma_floor_rel = 1e-6;

  // Throws InvalidConfig.
  void validate() const;
};

// max(rel * (max - min), 1e-12) over the given values.
double sigma_floor_for(std::span<const double> values, double rel);

// Sample mean and Bessel-corrected standard deviation, floored at sigma_floor.
// Throws InsufficientData for fewer than two values.
MembershipModel fit_single_gaussian(std::span<const double> values, double sigma_floor);
MembershipModel fit_single_gaussian(std::span<const double> values);

struct GmmFit {
  MembershipModel model;
  double log_likelihood;           // of the returned parameters
  int iterations;                  // EM (E+M) steps performed
  std::vector<double> trace;       // log-likelihood before each step, then the final value
};

// EM for a univariate mixture of `components` Gaussians (>= 2), initialised
// deterministically from contiguous equal-count blocks of the sorted data.
// Needs at least 2 * components values.
GmmFit fit_gmm(std::span<const double> values, int components, const EmConfig& cfg, double sigma_floor);
GmmFit fit_gmm(std::span<const double> values, int components, const EmConfig& cfg);

// Mixture density at x, evaluated per component in log space with a max shift.
double eval_membership(const MembershipModel& model, double x);
double eval_log_membership(const MembershipModel& model, double x);
// Batched log density via the SIMD kernels; out.size() == xs.size().
void eval_log_membership(const MembershipModel& model, std::span<const double> xs, std::span<double> out);

}  // namespace dsfusion
