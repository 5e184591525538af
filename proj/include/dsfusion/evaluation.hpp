#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsfusion/dataset.hpp"
#include "dsfusion/fusion_classifier.hpp"
#include "dsfusion/knn.hpp"

namespace dsfusion {

struct Protocol {
  enum class Kind { kfold, fraction };

  Kind kind = Kind::kfold;
  std::size_t folds = 5;
  double train_fraction = 0.7;
  std::size_t repeats = 100;
  std::uint64_t seed = 0;

  static Protocol kfold(std::size_t folds, std::size_t repeats, std::uint64_t seed);
  static Protocol fraction(double train_fraction, std::size_t repeats, std::uint64_t seed);

  void validate() const;
  // "5-fold" or "split-0.7"
  std::string describe() const;
};

// One decision per test row; an empty entry is a sample the method could not
// classify (total conflict) and counts as wrong.
using Predictions = std::vector<std::optional<std::size_t>>;
using FitPredict = std::function<Predictions(const Dataset& train, const Dataset& test, std::uint64_t seed)>;

struct EvalResult {
  // One accuracy per validation set: every fold of every repeat in k-fold
  // mode, one per repeat in fraction mode.
  std::vector<double> run_accuracies;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation of run_accuracies
  std::size_t evaluated = 0;
  std::size_t unclassified = 0;
};

double accuracy(const Predictions& predictions, std::span<const std::size_t> labels);
double sample_stddev(std::span<const double> values);

// Repeat r draws its partition from derive_seed(protocol.seed, r); a method
// called on fold g of that repeat gets derive_seed(repeat seed, g) for any
// randomness of its own.
EvalResult evaluate(const FitPredict& method, const Dataset& data, const Protocol& protocol);

// cfg.seed is replaced by the seed evaluate() hands to each call.
FitPredict fusion_method(FusionConfig cfg);
FitPredict knn_method(KnnConfig cfg);

}  // namespace dsfusion
