#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsfusion/dataset.hpp"
#include "dsfusion/density.hpp"
#include "dsfusion/mass_function.hpp"

namespace dsfusion {

// How a per-attribute membership vector becomes a BPA: `proposed` fuses the
// simple BPAs of the max-normalized possibilities; `baseline` is the nested
// rank-based assignment over sum-normalized memberships.
enum class BpaMode { proposed, baseline };

std::string_view to_string(BpaMode mode);
std::optional<BpaMode> parse_bpa_mode(std::string_view s);

struct FusionConfig {
  int max_components = 3;  // candidates y = 1..max_components; 1 means single Gaussian only
  int inner_folds = 5;     // folds of the component-selection cross-validation
  EmConfig em;
  BpaMode bpa_mode = BpaMode::proposed;
  std::uint64_t seed = 0;

  void validate() const;
};

class TrainedFusionClassifier {
 public:
  // `models` is class-major: models[cls * attributes.size() + attr].
  TrainedFusionClassifier(Frame frame, std::vector<std::string> attributes, BpaMode mode, int components,
                          std::vector<MembershipModel> models);

  const Frame& frame() const { return frame_; }
  const std::vector<std::string>& attributes() const { return attributes_; }
  std::size_t attribute_count() const { return attributes_.size(); }
  BpaMode bpa_mode() const { return mode_; }
  int components() const { return components_; }
  const MembershipModel& model(std::size_t cls, std::size_t attr) const {
    return models_[cls * attributes_.size() + attr];
  }

 private:
  Frame frame_;
  std::vector<std::string> attributes_;
  BpaMode mode_;
  int components_;
  std::vector<MembershipModel> models_;
};

struct CvReport {
  std::vector<int> candidates;                 // component counts tried, ascending
  std::vector<std::vector<double>> fold_bias;  // [fold][candidate]
  std::vector<double> total_bias;              // [candidate], summed over folds
  int chosen_components = 1;
  std::size_t conflicts = 0;                   // validation samples lost to total conflict
};

struct TrainResult {
  TrainedFusionClassifier classifier;
  CvReport report;
};

// Fits every (class, attribute) membership function with a fixed component
// count. The sigma floor of each attribute comes from that attribute's range
// over all of `data`.
TrainedFusionClassifier fit_membership_models(const Dataset& data, int components, const EmConfig& em,
                                              BpaMode mode);

// Chooses the component count minimising the summed validation bias over a
// stratified k'-fold partition (one partition, shared by all candidates; ties
// go to fewer components), then refits on all of `data`.
TrainResult train(const Dataset& data, const FusionConfig& cfg);

// Candidate with the smallest summed bias; the first (fewest components) wins ties.
int select_components(std::span<const int> candidates, std::span<const double> total_bias);

using BiasMetric = std::function<double(std::span<const double>, std::span<const double>)>;
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Distance between a probability vector and the one-hot vector of the true class.
double cv_bias(std::span<const double> probabilities, std::size_t true_class);
double cv_bias(std::span<const double> probabilities, std::size_t true_class, const BiasMetric& metric);

struct Prediction {
  std::size_t cls;
  std::vector<double> betp;
  std::vector<MassFunction> attribute_bpas;
};

MassFunction attribute_bpa(const TrainedFusionClassifier& clf, std::size_t attribute, double x);
// Throws TotalConflict when the attribute BPAs cannot be combined.
Prediction predict(const TrainedFusionClassifier& clf, std::span<const double> sample);

struct BatchPrediction {
  std::optional<std::size_t> cls;  // empty when the attribute BPAs were in total conflict
  std::vector<double> betp;        // empty alongside cls
};

// Same decisions as predict() for every row, with memberships evaluated in
// batches through the SIMD kernels.
std::vector<BatchPrediction> predict_all(const TrainedFusionClassifier& clf, const Dataset& data);

}  // namespace dsfusion
