#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsfusion/frame.hpp"
#include "dsfusion/mass_function.hpp"

namespace dsfusion {

// Per-class membership (density) values for one attribute of one sample.
class MembershipVector {
 public:
  // One finite, nonnegative value per class.
  MembershipVector(Frame frame, std::vector<double> values);

  const Frame& frame() const { return frame_; }
  std::span<const double> values() const { return values_; }

 private:
  Frame frame_;
  std::vector<double> values_;
};

// Max-normalized memberships, read as a possibility distribution.
class PossibilityVector {
 public:
  // Values must lie in [0, 1].
  PossibilityVector(Frame frame, std::vector<double> values, bool degenerate = false);

  const Frame& frame() const { return frame_; }
  std::span<const double> values() const { return values_; }
  // True when the memberships were all zero and the vector fell back to all ones.
  bool degenerate() const { return degenerate_; }

 private:
  Frame frame_;
  std::vector<double> values_;
  bool degenerate_;
};

PossibilityVector normalize_max(const MembershipVector& mv);
// Same normalization from log memberships: exp(l_i - max_j l_j). Avoids the
// underflow that makes density vectors all-zero far in the tails.
PossibilityVector normalize_max_log(const Frame& frame, std::span<const double> log_memberships);

// m(X \ {cls}) = 1 - possibility, m(X) = possibility.
MassFunction simple_bpa(const Frame& frame, std::size_t cls, double possibility);

struct FusedBpa {
  MassFunction mass;
  double conflict;  // exactly 0 whenever some possibility equals 1
};

// Dempster sum of the n simple BPAs, computed by the closed-form product
// expansion: for every set S of classes with possibility < 1, the mass
// prod_{i in S}(1 - p_i) * prod_{i not in S} p_i lands on X \ S.
FusedBpa fuse_possibility(const PossibilityVector& pv);
MassFunction fuse_possibility_to_bpa(const PossibilityVector& pv);

// Rank-based nested BPA: sum-normalize, sort descending (ties to the lower
// class index) and give the k-th largest value to the set of the top k
// classes. Throws DegenerateInput when all memberships are zero.
MassFunction baseline_rank_bpa(const MembershipVector& mv);
MassFunction baseline_rank_bpa_log(const Frame& frame, std::span<const double> log_memberships);

}  // namespace dsfusion
