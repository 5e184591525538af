#include "dsfusion/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsfusion/errors.hpp"
#include "dsfusion/kernels.hpp"

namespace dsfusion {

std::string_view to_string(KnnVariant v) {
  switch (v) {
    case KnnVariant::knn: return "knn";
    case KnnVariant::wknn: return "wknn";
    case KnnVariant::eknn: return "eknn";
    case KnnVariant::beknn: return "beknn";
  }
  return "?";
}

std::optional<KnnVariant> parse_knn_variant(std::string_view s) {
  for (auto v : {KnnVariant::knn, KnnVariant::wknn, KnnVariant::eknn, KnnVariant::beknn}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

std::string_view to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "manhattan"; }

std::optional<Metric> parse_metric(std::string_view s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "manhattan") return Metric::manhattan;
  return std::nullopt;
}

void KnnConfig::validate(std::size_t n_classes) const {
  if (k == 0) throw InvalidConfig("k must be at least 1");
  const bool evidential = variant == KnnVariant::eknn || variant == KnnVariant::beknn;
  if (evidential && k < n_classes) {
    throw InvalidConfig("k = " + std::to_string(k) + " is smaller than the " + std::to_string(n_classes) +
                        " classes; evidential variants take k / n neighbours per class");
  }
}

namespace {

constexpr double kWeightEps = 1e-12;

bool evidential(KnnVariant v) { return v == KnnVariant::eknn || v == KnnVariant::beknn; }

// Indices of the `m` smallest distances among `candidates`, ordered by
// (distance, row index) so ties resolve the same way everywhere.
std::vector<std::size_t> nearest(std::vector<std::size_t> candidates, const std::vector<double>& d, std::size_t m) {
  const auto less = [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); };
  m = std::min(m, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(m), candidates.end(), less);
  candidates.resize(m);
  return candidates;
}

std::size_t vote(std::span<const double> weights) { return argmax_first(weights); }

}  // namespace

std::vector<double> distances(const Dataset& train, std::span<const double> query, Metric metric) {
  if (query.size() != train.cols()) {
    throw FrameMismatch("query has " + std::to_string(query.size()) + " features, training data has " +
                        std::to_string(train.cols()));
  }
  std::vector<double> out(train.rows());
  if (metric == Metric::euclidean) {
    kernels::squared_distances(train.values(), train.cols(), query, out);
    for (double& v : out) v = std::sqrt(v);
  } else {
    for (std::size_t r = 0; r < train.rows(); ++r) {
      const auto row = train.row(r);
      double s = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) s += std::abs(row[j] - query[j]);
      out[r] = s;
    }
  }
  return out;
}

std::vector<NeighborEvidence> neighbor_beliefs(const Dataset& train, std::span<const double> query,
                                               const KnnConfig& cfg) {
  cfg.validate(train.classes());
  const std::size_t n = train.classes();
  const std::size_t per_class = cfg.k / n;
  const auto d = distances(train, query, cfg.metric);

  std::vector<NeighborEvidence> out;
  out.reserve(per_class * n);
  for (std::size_t cls = 0; cls < n; ++cls) {
    auto members = train.rows_of_class(cls);
    if (members.size() < per_class) {
      throw InsufficientData("class '" + train.frame().label(cls) + "' has " + std::to_string(members.size()) +
                             " training rows, need " + std::to_string(per_class) + " neighbours");
    }
    const auto near = nearest(std::move(members), d, per_class);
    for (std::size_t j = 0; j < near.size(); ++j) {
      out.push_back({cls, j, d[near[j]], std::exp(-d[near[j]]), 0.0});
    }
  }
  // b / max b == exp(d_min - d); this form survives distances whose exp(-d)
  // underflows to zero.
  double d_min = out.empty() ? 0.0 : out.front().distance;
  for (const auto& e : out) d_min = std::min(d_min, e.distance);
  for (auto& e : out) e.normalized_belief = std::exp(d_min - e.distance);
  return out;
}

MassFunction beknn_bpa(const NeighborEvidence& ev, const Frame& frame) {
  if (ev.cls >= frame.size()) throw FrameMismatch("evidence class outside the frame");
  const double b = std::clamp(ev.normalized_belief, 0.0, 1.0);
  return MassFunction(frame, {{frame.complement(Subset::singleton(ev.cls)), 1.0 - b}, {frame.full(), b}});
}

MassFunction eknn_bpa(const NeighborEvidence& ev, const Frame& frame) {
  if (ev.cls >= frame.size()) throw FrameMismatch("evidence class outside the frame");
  const double b = std::clamp(ev.normalized_belief, 0.0, 1.0);
  return MassFunction(frame, {{Subset::singleton(ev.cls), b}, {frame.full(), 1.0 - b}});
}

namespace {

// log(1 - exp(l)) for l <= 0, accurate at both ends.
double log1m_exp(double l) { return l > -0.6931471805599453 ? std::log(-std::expm1(l)) : std::log1p(-std::exp(l)); }

}  // namespace

BeknnCombination combine_beknn(std::span<const NeighborEvidence> evidence, const Frame& frame) {
  const std::size_t n = frame.size();
  double d_min = std::numeric_limits<double>::infinity();
  for (const auto& e : evidence) {
    if (e.cls >= n) throw FrameMismatch("evidence class outside the frame");
    d_min = std::min(d_min, e.distance);
  }
  // log P_c; b~ that underflowed is recovered from the distances.
  std::vector<double> log_p(n, 0.0);
  for (const auto& e : evidence) {
    const double b = std::clamp(e.normalized_belief, 0.0, 1.0);
    log_p[e.cls] += b > 0.0 ? std::log(b) : d_min - e.distance;
  }

  std::vector<std::size_t> uncertain;
  for (std::size_t c = 0; c < n; ++c) {
    if (log_p[c] < 0.0) uncertain.push_back(c);
  }
  const std::size_t m = uncertain.size();
  std::vector<double> log_q(m);
  double log_conflict = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    log_q[b] = log1m_exp(log_p[uncertain[b]]);
    log_conflict += log_q[b];
  }
  const bool all_uncertain = m == n;

  std::vector<std::pair<Subset, double>> logs;
  logs.reserve(std::size_t{1} << m);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << m); ++s) {
    // With every class uncertain, excluding all of them is the conflict term.
    if (all_uncertain && s + 1 == (std::uint32_t{1} << m)) continue;
    double lw = 0.0;
    Subset excluded;
    for (std::size_t b = 0; b < m; ++b) {
      if ((s >> b) & 1u) {
        lw += log_q[b];
        excluded = excluded | Subset::singleton(uncertain[b]);
      } else {
        lw += log_p[uncertain[b]];
      }
    }
    if (lw == -std::numeric_limits<double>::infinity()) continue;
    logs.push_back({frame.complement(excluded), lw});
    peak = std::max(peak, lw);
  }
  if (logs.empty()) throw TotalConflict(1.0);
  std::vector<FocalElement> els;
  els.reserve(logs.size());
  for (const auto& [set, lw] : logs) els.push_back({set, std::exp(lw - peak)});
  const double conflict = all_uncertain ? std::exp(log_conflict) : 0.0;
  return {MassFunction::normalized(frame, std::move(els)), conflict};
}

std::size_t classify_knn(const Dataset& train, std::span<const double> query, const KnnConfig& cfg) {
  cfg.validate(train.classes());
  const std::size_t n = train.classes();
  if (evidential(cfg.variant)) {
    const auto evidence = neighbor_beliefs(train, query, cfg);
    if (cfg.variant == KnnVariant::beknn) return decide(combine_beknn(evidence, train.frame()).mass);
    std::vector<MassFunction> bpas;
    bpas.reserve(evidence.size());
    for (const auto& e : evidence) bpas.push_back(eknn_bpa(e, train.frame()));
    return decide(combine_dempster(bpas));
  }

  if (cfg.k > train.rows()) {
    throw InsufficientData("k = " + std::to_string(cfg.k) + " exceeds the " + std::to_string(train.rows()) +
                           " training rows");
  }
  const auto d = distances(train, query, cfg.metric);
  std::vector<std::size_t> all(train.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto near = nearest(std::move(all), d, cfg.k);
  std::vector<double> weights(n, 0.0);
  for (std::size_t r : near) {
    weights[train.label(r)] += cfg.variant == KnnVariant::wknn ? 1.0 / (d[r] + kWeightEps) : 1.0;
  }
  return vote(weights);
}

std::vector<std::optional<std::size_t>> classify_all(const Dataset& train, const Dataset& test, const KnnConfig& cfg) {
  cfg.validate(train.classes());
  if (test.cols() != train.cols()) throw FrameMismatch("training and test data differ in attributes");
  std::optional<Dataset> scaled_train;
  std::optional<Dataset> scaled_test;
  if (cfg.minmax_scale) {
    const MinMaxScaler scaler(train);
    scaled_train = scaler.apply(train);
    scaled_test = scaler.apply(test);
  }
  const Dataset& tr = scaled_train ? *scaled_train : train;
  const Dataset& te = scaled_test ? *scaled_test : test;

  std::vector<std::optional<std::size_t>> out(te.rows());
  for (std::size_t r = 0; r < te.rows(); ++r) {
    try {
      out[r] = classify_knn(tr, te.row(r), cfg);
    } catch (const TotalConflict&) {
    }
  }
  return out;
}

}  // namespace dsfusion
