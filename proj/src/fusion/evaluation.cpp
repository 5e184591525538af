#include "dsfusion/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dsfusion/errors.hpp"
#include "dsfusion/rng.hpp"

namespace dsfusion {

Protocol Protocol::kfold(std::size_t folds, std::size_t repeats, std::uint64_t seed) {
  Protocol p;
  p.kind = Kind::kfold;
  p.folds = folds;
  p.repeats = repeats;
  p.seed = seed;
  return p;
}

Protocol Protocol::fraction(double train_fraction, std::size_t repeats, std::uint64_t seed) {
  Protocol p;
  p.kind = Kind::fraction;
  p.train_fraction = train_fraction;
  p.repeats = repeats;
  p.seed = seed;
  return p;
}

void Protocol::validate() const {
  if (repeats == 0) throw InvalidConfig("repeats must be at least 1");
  if (kind == Kind::kfold && folds < 2) throw InvalidConfig("folds must be at least 2");
  if (kind == Kind::fraction && !(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidConfig("train fraction must lie in (0, 1)");
  }
}

std::string Protocol::describe() const {
  if (kind == Kind::kfold) return std::to_string(folds) + "-fold";
  char buf[32];
  std::snprintf(buf, sizeof buf, "split-%g", train_fraction);
  return buf;
}

double accuracy(const Predictions& predictions, std::span<const std::size_t> labels) {
  if (predictions.size() != labels.size()) throw InvalidConfig("prediction and label counts differ");
  if (labels.empty()) throw InsufficientData("accuracy of an empty test set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] && *predictions[i] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

EvalResult evaluate(const FitPredict& method, const Dataset& data, const Protocol& protocol) {
  protocol.validate();
  EvalResult out;
  const auto run = [&](std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows,
                       std::uint64_t seed) {
    const auto train = data.subset(train_rows);
    const auto test = data.subset(test_rows);
    const auto preds = method(train, test, seed);
    for (const auto& p : preds) {
      if (!p) ++out.unclassified;
    }
    out.evaluated += test.rows();
    out.run_accuracies.push_back(accuracy(preds, test.labels()));
  };

  for (std::size_t r = 0; r < protocol.repeats; ++r) {
    const auto repeat_seed = derive_seed(protocol.seed, r);
    Rng rng(repeat_seed);
    if (protocol.kind == Protocol::Kind::fraction) {
      const auto split = split_fraction(data, protocol.train_fraction, rng);
      run(split.train, split.test, derive_seed(repeat_seed, 0));
      continue;
    }
    const auto folds = stratified_folds(data, protocol.folds, rng);
    std::vector<char> held(data.rows());
    for (std::size_t g = 0; g < folds.size(); ++g) {
      std::fill(held.begin(), held.end(), 0);
      for (std::size_t i : folds[g]) held[i] = 1;
      std::vector<std::size_t> train_rows;
      train_rows.reserve(data.rows() - folds[g].size());
      for (std::size_t i = 0; i < data.rows(); ++i) {
        if (!held[i]) train_rows.push_back(i);
      }
      run(train_rows, folds[g], derive_seed(repeat_seed, g));
    }
  }

  double total = 0.0;
  for (double a : out.run_accuracies) total += a;
  out.mean = total / static_cast<double>(out.run_accuracies.size());
  out.stddev = sample_stddev(out.run_accuracies);
  return out;
}

FitPredict fusion_method(FusionConfig cfg) {
  cfg.validate();
  return [cfg](const Dataset& train_set, const Dataset& test_set, std::uint64_t seed) {
    FusionConfig c = cfg;
    c.seed = seed;
    const auto trained = train(train_set, c);
    const auto preds = predict_all(trained.classifier, test_set);
    Predictions out;
    out.reserve(preds.size());
    for (const auto& p : preds) out.push_back(p.cls);
    return out;
  };
}

FitPredict knn_method(KnnConfig cfg) {
  return [cfg](const Dataset& train_set, const Dataset& test_set, std::uint64_t) {
    return classify_all(train_set, test_set, cfg);
  };
}

}  // namespace dsfusion
