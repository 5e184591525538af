#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dsfusion/dataset.hpp"
#include "dsfusion/mass_function.hpp"

namespace dsfusion {

enum class KnnVariant { knn, wknn, eknn, beknn };
enum class Metric { euclidean, manhattan };

std::string_view to_string(KnnVariant v);
std::optional<KnnVariant> parse_knn_variant(std::string_view s);
std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view s);

struct KnnConfig {
  std::size_t k = 24;
  KnnVariant variant = KnnVariant::beknn;
  Metric metric = Metric::euclidean;
  // Min-max scale features using the training set before measuring distances.
  // Only classify_all applies it.
  bool minmax_scale = false;

  // Throws InvalidConfig.
  void validate(std::size_t n_classes) const;
};

struct NeighborEvidence {
  std::size_t cls;
  std::size_t rank;          // 0 = nearest within its class
  double distance;
  double belief;             // exp(-distance)
  double normalized_belief;  // belief / max belief over all evidences
};

std::vector<double> distances(const Dataset& train, std::span<const double> query, Metric metric);

// floor(k / n) nearest same-class neighbours for every class, class-major.
// Throws InsufficientData when a class has fewer training rows than that.
std::vector<NeighborEvidence> neighbor_beliefs(const Dataset& train, std::span<const double> query,
                                               const KnnConfig& cfg);

// m(X \ {cls}) = 1 - b~, m(X) = b~
MassFunction beknn_bpa(const NeighborEvidence& ev, const Frame& frame);
// m({cls}) = b~, m(X) = 1 - b~
MassFunction eknn_bpa(const NeighborEvidence& ev, const Frame& frame);

struct BeknnCombination {
  MassFunction mass;
  double conflict;  // K of the Dempster sum; may round to 1 even though it never reaches it
};

// Dempster sum of the beknn_bpa of every evidence. Evidences against the same
// class merge without conflict into m(X \ {c}) = 1 - P_c, m(X) = P_c with
// P_c = prod b~; the per-class results then go through the product expansion
// in log space, normalized by the surviving mass. Because the nearest
// neighbour has b~ = 1 no P_c is zero, so this never throws TotalConflict,
// however close to 1 K gets.
BeknnCombination combine_beknn(std::span<const NeighborEvidence> evidence, const Frame& frame);

// Ties go to the lowest class index. The evidential variants throw
// TotalConflict when their neighbour BPAs cannot be combined.
std::size_t classify_knn(const Dataset& train, std::span<const double> query, const KnnConfig& cfg);

// Every row of `test`, with optional scaling; empty entries mark total conflict.
std::vector<std::optional<std::size_t>> classify_all(const Dataset& train, const Dataset& test, const KnnConfig& cfg);

}  // namespace dsfusion
