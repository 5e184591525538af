#include "dsfusion/fusion_classifier.hpp"

#include <algorithm>
#include <cmath>

#include "dsfusion/bpa.hpp"
#include "dsfusion/errors.hpp"

namespace dsfusion {

std::string_view to_string(BpaMode mode) { return mode == BpaMode::proposed ? "proposed" : "baseline"; }

std::optional<BpaMode> parse_bpa_mode(std::string_view s) {
  if (s == "proposed") return BpaMode::proposed;
  if (s == "baseline") return BpaMode::baseline;
  return std::nullopt;
}

void FusionConfig::validate() const {
  if (max_components < 1) throw InvalidConfig("max components must be at least 1");
  if (inner_folds < 2) throw InvalidConfig("inner folds must be at least 2");
  em.validate();
}

TrainedFusionClassifier::TrainedFusionClassifier(Frame frame, std::vector<std::string> attributes, BpaMode mode,
                                                 int components, std::vector<MembershipModel> models)
    : frame_(std::move(frame)),
      attributes_(std::move(attributes)),
      mode_(mode),
      components_(components),
      models_(std::move(models)) {
  if (attributes_.empty()) throw InvalidConfig("classifier needs at least one attribute");
  if (models_.size() != frame_.size() * attributes_.size()) throw InvalidConfig("membership grid is incomplete");
  if (components_ < 1) throw InvalidConfig("component count must be at least 1");
  for (const auto& m : models_) {
    if (m.size() != static_cast<std::size_t>(components_)) {
      throw InvalidConfig("membership models disagree on the component count");
    }
  }
}

namespace {

std::string cell_name(const Dataset& data, std::size_t cls, std::size_t attr) {
  return "class '" + data.frame().label(cls) + "', attribute '" + data.attributes()[attr] + "'";
}

std::size_t values_needed(int components) { return components < 2 ? 2 : 2 * static_cast<std::size_t>(components); }

// Distance of the worst possible prediction; used for samples whose BPAs
// could not be combined at all.
double worst_bias(std::size_t n, std::size_t true_class, const BiasMetric& metric) {
  std::vector<double> wrong(n, 0.0);
  wrong[(true_class + 1) % n] = 1.0;
  return cv_bias(wrong, true_class, metric);
}

MassFunction bpa_from_logs(const Frame& frame, BpaMode mode, std::span<const double> logs) {
  if (mode == BpaMode::proposed) return fuse_possibility_to_bpa(normalize_max_log(frame, logs));
  return baseline_rank_bpa_log(frame, logs);
}

}  // namespace

TrainedFusionClassifier fit_membership_models(const Dataset& data, int components, const EmConfig& em,
                                              BpaMode mode) {
  if (components < 1) throw InvalidConfig("component count must be at least 1");
  const std::size_t n = data.classes();
  const std::size_t k = data.cols();
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t cls = 0; cls < n; ++cls) members[cls] = data.rows_of_class(cls);

  std::vector<std::optional<MembershipModel>> grid(n * k);
  std::vector<double> values;
  for (std::size_t attr = 0; attr < k; ++attr) {
    const auto col = data.column(attr);
    const double floor = sigma_floor_for(col, em.sigma_floor_rel);
    for (std::size_t cls = 0; cls < n; ++cls) {
      values.clear();
      for (std::size_t r : members[cls]) values.push_back(col[r]);
      if (values.size() < values_needed(components)) {
        throw InsufficientData(cell_name(data, cls, attr) + " has " + std::to_string(values.size()) +
                               " values, need " + std::to_string(values_needed(components)) + " for " +
                               std::to_string(components) + " component(s)");
      }
      if (components == 1) {
        grid[cls * k + attr] = fit_single_gaussian(values, floor);
      } else {
        grid[cls * k + attr] = fit_gmm(values, components, em, floor).model;
      }
    }
  }
  std::vector<MembershipModel> models;
  models.reserve(grid.size());
  for (auto& m : grid) models.push_back(std::move(*m));
  return TrainedFusionClassifier(data.frame(), data.attributes(), mode, components, std::move(models));
}

TrainResult train(const Dataset& data, const FusionConfig& cfg) {
  cfg.validate();
  const std::size_t n = data.classes();

  CvReport report;
  for (int y = 1; y <= cfg.max_components; ++y) report.candidates.push_back(y);

  Rng rng(cfg.seed);
  const auto folds = stratified_folds(data, static_cast<std::size_t>(cfg.inner_folds), rng);

  // Every inner training set must support the largest candidate.
  std::vector<char> in_fold(data.rows());
  for (const auto& fold : folds) {
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t r : fold) ++counts[data.label(r)];
    const auto total = data.class_counts();
    for (std::size_t cls = 0; cls < n; ++cls) {
      const auto left = total[cls] - counts[cls];
      if (left < values_needed(cfg.max_components)) {
        throw InsufficientData(cell_name(data, cls, 0) + " has only " + std::to_string(left) +
                               " values in a cross-validation training fold, need " +
                               std::to_string(values_needed(cfg.max_components)));
      }
    }
  }

  const BiasMetric metric = euclidean_distance;
  report.total_bias.assign(report.candidates.size(), 0.0);
  report.fold_bias.assign(folds.size(), std::vector<double>(report.candidates.size(), 0.0));
  for (std::size_t g = 0; g < folds.size(); ++g) {
    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (std::size_t r : folds[g]) in_fold[r] = 1;
    std::vector<std::size_t> train_rows;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      if (!in_fold[r]) train_rows.push_back(r);
    }
    const Dataset inner_train = data.subset(train_rows);
    const Dataset validation = data.subset(folds[g]);
    for (std::size_t c = 0; c < report.candidates.size(); ++c) {
      const auto clf = fit_membership_models(inner_train, report.candidates[c], cfg.em, cfg.bpa_mode);
      const auto preds = predict_all(clf, validation);
      double bias = 0.0;
      for (std::size_t r = 0; r < validation.rows(); ++r) {
        if (preds[r].cls) {
          bias += cv_bias(preds[r].betp, validation.label(r), metric);
        } else {
          bias += worst_bias(n, validation.label(r), metric);
          ++report.conflicts;
        }
      }
      report.fold_bias[g][c] = bias;
      report.total_bias[c] += bias;
    }
  }

  report.chosen_components = select_components(report.candidates, report.total_bias);
  return {fit_membership_models(data, report.chosen_components, cfg.em, cfg.bpa_mode), std::move(report)};
}

int select_components(std::span<const int> candidates, std::span<const double> total_bias) {
  if (candidates.empty() || candidates.size() != total_bias.size()) {
    throw InvalidConfig("need one bias per candidate");
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < total_bias.size(); ++c) {
    if (total_bias[c] < total_bias[best]) best = c;
  }
  return candidates[best];
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw FrameMismatch("vectors differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double cv_bias(std::span<const double> probabilities, std::size_t true_class) {
  return cv_bias(probabilities, true_class, euclidean_distance);
}

double cv_bias(std::span<const double> probabilities, std::size_t true_class, const BiasMetric& metric) {
  if (true_class >= probabilities.size()) throw FrameMismatch("true class outside the probability vector");
  std::vector<double> onehot(probabilities.size(), 0.0);
  onehot[true_class] = 1.0;
  return metric(probabilities, onehot);
}

MassFunction attribute_bpa(const TrainedFusionClassifier& clf, std::size_t attribute, double x) {
  if (attribute >= clf.attribute_count()) throw FrameMismatch("attribute index out of range");
  const std::size_t n = clf.frame().size();
  std::vector<double> logs(n);
  for (std::size_t cls = 0; cls < n; ++cls) logs[cls] = eval_log_membership(clf.model(cls, attribute), x);
  return bpa_from_logs(clf.frame(), clf.bpa_mode(), logs);
}

Prediction predict(const TrainedFusionClassifier& clf, std::span<const double> sample) {
  if (sample.size() != clf.attribute_count()) {
    throw FrameMismatch("sample has " + std::to_string(sample.size()) + " attributes, classifier expects " +
                        std::to_string(clf.attribute_count()));
  }
  Prediction out;
  out.attribute_bpas.reserve(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) out.attribute_bpas.push_back(attribute_bpa(clf, j, sample[j]));
  const auto fused = combine_dempster(out.attribute_bpas);
  out.betp = pignistic(fused);
  out.cls = argmax_first(out.betp);
  return out;
}

std::vector<BatchPrediction> predict_all(const TrainedFusionClassifier& clf, const Dataset& data) {
  if (data.cols() != clf.attribute_count()) throw FrameMismatch("dataset and classifier differ in attributes");
  if (!(data.frame() == clf.frame())) throw FrameMismatch("dataset and classifier differ in classes");
  const std::size_t n = clf.frame().size();
  const std::size_t k = clf.attribute_count();
  const std::size_t rows = data.rows();

  // logs[(attr * n + cls) * rows + r]
  std::vector<double> logs(k * n * rows);
  for (std::size_t attr = 0; attr < k; ++attr) {
    const auto col = data.column(attr);
    for (std::size_t cls = 0; cls < n; ++cls) {
      eval_log_membership(clf.model(cls, attr), col, std::span<double>(logs.data() + (attr * n + cls) * rows, rows));
    }
  }

  std::vector<BatchPrediction> out(rows);
  std::vector<double> cell(n);
  std::vector<MassFunction> bpas;
  bpas.reserve(k);
  for (std::size_t r = 0; r < rows; ++r) {
    bpas.clear();
    for (std::size_t attr = 0; attr < k; ++attr) {
      for (std::size_t cls = 0; cls < n; ++cls) cell[cls] = logs[(attr * n + cls) * rows + r];
      bpas.push_back(bpa_from_logs(clf.frame(), clf.bpa_mode(), cell));
    }
    try {
      const auto fused = combine_dempster(bpas);
      out[r].betp = pignistic(fused);
      out[r].cls = argmax_first(out[r].betp);
    } catch (const TotalConflict&) {
      // Left empty; callers count it as a miss.
    }
  }
  return out;
}

}  // namespace dsfusion
