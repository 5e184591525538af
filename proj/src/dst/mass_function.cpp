#include "dsfusion/mass_function.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "dsfusion/errors.hpp"

namespace dsfusion {

namespace {

void sort_and_merge(std::vector<FocalElement>& els) {
  std::stable_sort(els.begin(), els.end(),
                   [](const FocalElement& a, const FocalElement& b) { return a.set.bits < b.set.bits; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < els.size(); ++i) {
    if (out > 0 && els[out - 1].set == els[i].set) {
      els[out - 1].mass += els[i].mass;
    } else {
      els[out++] = els[i];
    }
  }
  els.resize(out);
}

void check_subset(const Frame& frame, Subset s) {
  if (s.empty()) throw InvalidConfig("the empty set cannot carry mass");
  if (!frame.valid(s)) throw InvalidConfig("subset outside the frame");
}

// Dense accumulation is used for small frames; both paths add products in
// the same order so they produce identical sums.
constexpr std::size_t kDenseBits = 8;

}  // namespace

MassFunction::MassFunction(Frame frame, std::vector<FocalElement> elements) : frame_(std::move(frame)) {
  double total = 0.0;
  for (const auto& e : elements) {
    check_subset(frame_, e.set);
    if (!(e.mass >= 0.0) || !std::isfinite(e.mass)) throw InvalidConfig("masses must be finite and nonnegative");
    total += e.mass;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw InvalidConfig("masses must sum to 1 (got " + std::to_string(total) + ")");
  }
  sort_and_merge(elements);
  std::erase_if(elements, [](const FocalElement& e) { return e.mass <= 0.0; });
  elements_ = std::move(elements);
}

MassFunction MassFunction::vacuous(const Frame& frame) { return categorical(frame, frame.full()); }

MassFunction MassFunction::categorical(const Frame& frame, Subset set) {
  check_subset(frame, set);
  return MassFunction(Trusted{}, frame, {{set, 1.0}});
}

MassFunction MassFunction::normalized(const Frame& frame, std::vector<FocalElement> weights) {
  for (const auto& w : weights) check_subset(frame, w.set);
  sort_and_merge(weights);
  std::erase_if(weights, [](const FocalElement& e) { return !(e.mass > 0.0); });

  double total = 0.0;
  for (const auto& w : weights) total += w.mass;
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateInput("no positive mass to normalize");

  const double cutoff = kPruneThreshold * total;
  bool pruned = false;
  for (const auto& w : weights) pruned = pruned || w.mass < cutoff;
  if (pruned) {
    std::erase_if(weights, [cutoff](const FocalElement& e) { return e.mass < cutoff; });
    total = 0.0;
    for (const auto& w : weights) total += w.mass;
  }
  for (auto& w : weights) w.mass /= total;
  return MassFunction(Trusted{}, frame, std::move(weights));
}

double MassFunction::mass(Subset s) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), s,
                             [](const FocalElement& e, Subset key) { return e.set.bits < key.bits; });
  return (it != elements_.end() && it->set == s) ? it->mass : 0.0;
}

bool MassFunction::is_vacuous() const { return elements_.size() == 1 && elements_[0].set == frame_.full(); }

bool MassFunction::is_bayesian() const {
  return std::all_of(elements_.begin(), elements_.end(), [](const FocalElement& e) { return e.set.size() == 1; });
}

bool MassFunction::is_consonant() const {
  std::vector<Subset> sets;
  for (const auto& e : elements_) sets.push_back(e.set);
  std::sort(sets.begin(), sets.end(), [](Subset a, Subset b) { return a.size() < b.size(); });
  for (std::size_t i = 1; i < sets.size(); ++i) {
    if (!sets[i - 1].is_subset_of(sets[i])) return false;
  }
  return true;
}

std::string MassFunction::to_string() const {
  std::string out = "{";
  char buf[32];
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (i) out += ", ";
    std::snprintf(buf, sizeof buf, "%.6f", elements_[i].mass);
    out += frame_.format(elements_[i].set);
    out += ": ";
    out += buf;
  }
  out += '}';
  return out;
}

CombinationResult combine_with_conflict(const MassFunction& a, const MassFunction& b) {
  if (!(a.frame() == b.frame())) throw FrameMismatch("cannot combine mass functions on different frames");
  const Frame& frame = a.frame();

  double conflict = 0.0;
  std::vector<FocalElement> products;
  if (frame.size() <= kDenseBits) {
    std::array<double, std::size_t{1} << kDenseBits> acc{};
    for (const auto& ea : a.focal_elements()) {
      for (const auto& eb : b.focal_elements()) {
        const Subset s = ea.set & eb.set;
        const double p = ea.mass * eb.mass;
        if (s.empty()) {
          conflict += p;
        } else {
          acc[s.bits] += p;
        }
      }
    }
    const std::uint32_t limit = frame.full().bits;
    for (std::uint32_t s = 1; s <= limit; ++s) {
      if (acc[s] > 0.0) products.push_back({Subset{s}, acc[s]});
    }
  } else {
    products.reserve(a.focal_count() * b.focal_count());
    for (const auto& ea : a.focal_elements()) {
      for (const auto& eb : b.focal_elements()) {
        const Subset s = ea.set & eb.set;
        const double p = ea.mass * eb.mass;
        if (s.empty()) {
          conflict += p;
        } else {
          products.push_back({s, p});
        }
      }
    }
  }

  if (conflict >= kTotalConflictThreshold || products.empty()) throw TotalConflict(conflict);
  return {MassFunction::normalized(frame, std::move(products)), conflict};
}

CombinationResult combine_with_conflict(std::span<const MassFunction> ms) {
  if (ms.empty()) throw InvalidConfig("combination needs at least one mass function");
  CombinationResult acc{ms[0], 0.0};
  double survive = 1.0;
  for (std::size_t i = 1; i < ms.size(); ++i) {
    auto step = combine_with_conflict(acc.mass, ms[i]);
    survive *= 1.0 - step.conflict;
    acc.mass = std::move(step.mass);
  }
  acc.conflict = 1.0 - survive;
  return acc;
}

MassFunction combine_dempster(const MassFunction& a, const MassFunction& b) {
  return combine_with_conflict(a, b).mass;
}

MassFunction combine_dempster(std::span<const MassFunction> ms) { return combine_with_conflict(ms).mass; }

std::vector<double> pignistic(const MassFunction& m) {
  std::vector<double> p(m.frame().size(), 0.0);
  for (const auto& e : m.focal_elements()) {
    const double share = e.mass / static_cast<double>(e.set.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (e.set.contains(i)) p[i] += share;
    }
  }
  return p;
}

std::size_t argmax_first(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t decide(const MassFunction& m) { return argmax_first(pignistic(m)); }

}  // namespace dsfusion
