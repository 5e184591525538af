#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dsfusion/frame.hpp"

namespace dsfusion {

inline constexpr double kMassTolerance = 1e-9;
inline constexpr double kTotalConflictThreshold = 1.0 - 1e-12;
// Focal masses below this after combination are dropped and the rest renormalized.
inline constexpr double kPruneThreshold = 1e-15;

struct FocalElement {
  Subset set;
  double mass;
};

// A basic probability assignment over a frame. Only focal elements are
// stored, sorted by bitmask; masses are strictly positive and sum to one.
class MassFunction {
 public:
  // Validating constructor: subsets must be nonempty members of 2^frame,
  // masses nonnegative and summing to 1 within kMassTolerance. Duplicate
  // subsets are merged and zero masses dropped.
  MassFunction(Frame frame, std::vector<FocalElement> elements);

  static MassFunction vacuous(const Frame& frame);
  static MassFunction categorical(const Frame& frame, Subset set);

  // Builds a mass function from unnormalized nonnegative weights: merges
  // duplicates, prunes dust below kPruneThreshold (relative to the total) and
  // rescales to sum 1. Throws DegenerateInput when nothing positive remains.
  static MassFunction normalized(const Frame& frame, std::vector<FocalElement> weights);

  const Frame& frame() const { return frame_; }
  std::span<const FocalElement> focal_elements() const { return elements_; }
  std::size_t focal_count() const { return elements_.size(); }
  double mass(Subset s) const;

  bool is_vacuous() const;
  bool is_bayesian() const;
  // Focal elements form a chain under inclusion.
  bool is_consonant() const;

  // "{{a}: 0.600000, {a,b}: 0.400000}" sorted by bitmask.
  std::string to_string() const;

 private:
  struct Trusted {};
  MassFunction(Trusted, Frame frame, std::vector<FocalElement> elements)
      : frame_(std::move(frame)), elements_(std::move(elements)) {}

  Frame frame_;
  std::vector<FocalElement> elements_;
};

struct CombinationResult {
  MassFunction mass;
  // Overall conflict 1 - prod(1 - K_step) of the (iterated) orthogonal sum.
  double conflict;
};

// Dempster's rule. Multi-way combination is a left fold of pairwise steps,
// each renormalized; TotalConflict is raised when a step has K >= 1 - 1e-12.
CombinationResult combine_with_conflict(const MassFunction& a, const MassFunction& b);
CombinationResult combine_with_conflict(std::span<const MassFunction> ms);
MassFunction combine_dempster(const MassFunction& a, const MassFunction& b);
MassFunction combine_dempster(std::span<const MassFunction> ms);

// BetP over the singletons: each focal mass split equally among its members.
std::vector<double> pignistic(const MassFunction& m);

// Index of the largest value; ties go to the lowest index.
std::size_t argmax_first(std::span<const double> values);

std::size_t decide(const MassFunction& m);

}  // namespace dsfusion
