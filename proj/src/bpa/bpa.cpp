#include "dsfusion/bpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsfusion/errors.hpp"

namespace dsfusion {

namespace {

void require_length(const Frame& frame, std::size_t n) {
  if (n != frame.size()) {
    throw FrameMismatch("expected " + std::to_string(frame.size()) + " values, got " + std::to_string(n));
  }
}

MassFunction nested_from_normalized(const Frame& frame, std::span<const double> share) {
  std::vector<std::size_t> order(share.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return share[a] > share[b]; });
  std::vector<FocalElement> els;
  Subset nested;
  for (std::size_t cls : order) {
    nested = nested | Subset::singleton(cls);
    if (share[cls] > 0.0) els.push_back({nested, share[cls]});
  }
  return MassFunction::normalized(frame, std::move(els));
}

}  // namespace

MembershipVector::MembershipVector(Frame frame, std::vector<double> values)
    : frame_(std::move(frame)), values_(std::move(values)) {
  require_length(frame_, values_.size());
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidConfig("membership values must be finite and nonnegative");
  }
}

PossibilityVector::PossibilityVector(Frame frame, std::vector<double> values, bool degenerate)
    : frame_(std::move(frame)), values_(std::move(values)), degenerate_(degenerate) {
  require_length(frame_, values_.size());
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidConfig("possibility values must lie in [0, 1]");
  }
}

PossibilityVector normalize_max(const MembershipVector& mv) {
  const auto v = mv.values();
  const double peak = *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0)) return PossibilityVector(mv.frame(), std::vector<double>(v.size(), 1.0), true);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / peak;
  return PossibilityVector(mv.frame(), std::move(out));
}

PossibilityVector normalize_max_log(const Frame& frame, std::span<const double> log_memberships) {
  require_length(frame, log_memberships.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (double l : log_memberships) {
    if (std::isnan(l)) throw InvalidConfig("log membership is NaN");
    peak = std::max(peak, l);
  }
  if (peak == -std::numeric_limits<double>::infinity()) {
    return PossibilityVector(frame, std::vector<double>(log_memberships.size(), 1.0), true);
  }
  std::vector<double> out(log_memberships.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_memberships[i] - peak);
  return PossibilityVector(frame, std::move(out));
}

MassFunction simple_bpa(const Frame& frame, std::size_t cls, double possibility) {
  if (cls >= frame.size()) throw InvalidConfig("class index out of range");
  if (!(possibility >= 0.0 && possibility <= 1.0)) throw InvalidConfig("possibility must lie in [0, 1]");
  const Subset rest = frame.complement(Subset::singleton(cls));
  if (possibility == 1.0 || rest.empty()) return MassFunction::vacuous(frame);
  return MassFunction(frame, {{rest, 1.0 - possibility}, {frame.full(), possibility}});
}

FusedBpa fuse_possibility(const PossibilityVector& pv) {
  const Frame& frame = pv.frame();
  const auto p = pv.values();

  std::vector<std::size_t> uncertain;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 1.0) uncertain.push_back(i);
  }
  const std::size_t m = uncertain.size();

  std::vector<FocalElement> weights;
  weights.reserve(std::size_t{1} << m);
  double conflict = 0.0;
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << m); ++s) {
    double w = 1.0;
    Subset excluded;
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t cls = uncertain[b];
      if ((s >> b) & 1u) {
        w *= 1.0 - p[cls];
        excluded = excluded | Subset::singleton(cls);
      } else {
        w *= p[cls];
      }
    }
    if (w == 0.0) continue;
    const Subset target = frame.complement(excluded);
    if (target.empty()) {
      conflict += w;
    } else {
      weights.push_back({target, w});
    }
  }
  if (conflict >= kTotalConflictThreshold || weights.empty()) throw TotalConflict(conflict);
  return {MassFunction::normalized(frame, std::move(weights)), conflict};
}

MassFunction fuse_possibility_to_bpa(const PossibilityVector& pv) { return fuse_possibility(pv).mass; }

MassFunction baseline_rank_bpa(const MembershipVector& mv) {
  const auto v = mv.values();
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateInput("rank-based BPA is undefined when all memberships are zero");
  std::vector<double> share(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) share[i] = v[i] / total;
  return nested_from_normalized(mv.frame(), share);
}

MassFunction baseline_rank_bpa_log(const Frame& frame, std::span<const double> log_memberships) {
  require_length(frame, log_memberships.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (double l : log_memberships) peak = std::max(peak, l);
  if (peak == -std::numeric_limits<double>::infinity() || std::isnan(peak)) {
    throw DegenerateInput("rank-based BPA is undefined when all memberships are zero");
  }
  std::vector<double> share(log_memberships.size());
  double total = 0.0;
  for (std::size_t i = 0; i < share.size(); ++i) {
    share[i] = std::exp(log_memberships[i] - peak);
    total += share[i];
  }
  for (double& s : share) s /= total;
  return nested_from_normalized(frame, share);
}

}  // namespace dsfusion
