#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace dsfusion {

inline constexpr std::size_t kMaxFrameSize = 16;

// A subset of the frame as an n-bit mask; bit i set <=> class i is a member.
struct Subset {
  std::uint32_t bits = 0;

  constexpr Subset() = default;
  constexpr explicit Subset(std::uint32_t b) : bits(b) {}

  static constexpr Subset singleton(std::size_t i) { return Subset{std::uint32_t{1} << i}; }

  constexpr bool empty() const { return bits == 0; }
  constexpr bool contains(std::size_t i) const { return (bits >> i) & 1u; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits)); }
  constexpr bool is_subset_of(Subset other) const { return (bits & ~other.bits) == 0; }

  friend constexpr Subset operator&(Subset a, Subset b) { return Subset{a.bits & b.bits}; }
  friend constexpr Subset operator|(Subset a, Subset b) { return Subset{a.bits | b.bits}; }
  friend constexpr bool operator==(Subset, Subset) = default;
  friend constexpr auto operator<=>(Subset, Subset) = default;
};

// Ordered, immutable set of class labels. Copies share the label storage.
class Frame {
 public:
  explicit Frame(std::vector<std::string> labels);

  // Frame with labels "c0", "c1", ... handy for tests and synthetic data.
  static Frame anonymous(std::size_t n);

  std::size_t size() const { return labels_->size(); }
  const std::string& label(std::size_t i) const { return (*labels_)[i]; }
  const std::vector<std::string>& labels() const { return *labels_; }
  std::size_t index_of(std::string_view label) const;

  Subset full() const { return Subset{static_cast<std::uint32_t>((std::uint64_t{1} << size()) - 1)}; }
  Subset complement(Subset s) const { return Subset{full().bits & ~s.bits}; }
  bool valid(Subset s) const { return s.is_subset_of(full()); }

  // "{a,b}" rendering of a subset using the frame's labels.
  std::string format(Subset s) const;

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.labels_ == b.labels_ || *a.labels_ == *b.labels_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> labels_;
};

}  // namespace dsfusion
