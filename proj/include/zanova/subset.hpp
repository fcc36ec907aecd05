#ifndef ZANOVA_SUBSET_HPP
#define ZANOVA_SUBSET_HPP

#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zanova {

inline constexpr int kMaxDimension = 32;
inline constexpr int kMaxExpansionDimension = 12;

/// Set of input dimensions as a bitmask: bit i set <=> dimension i (zero
/// based) belongs to the set. Ordered by mask value.
class Subset {
 public:
  constexpr Subset() = default;
  constexpr explicit Subset(std::uint32_t bits) : bits_(bits) {}

  /// From zero-based dimension indices.
  static Subset of(std::initializer_list<int> dims);
  /// From one-based dimension labels, as written in configs and reports.
  static Subset from_labels(std::span<const int> labels);
  static Subset full(int d);

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1u; }
  int size() const { return std::popcount(bits_); }
  constexpr bool is_subset_of(Subset other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  /// Highest dimension index + 1, 0 for the empty set.
  int span_dimension() const { return 32 - std::countl_zero(bits_); }
  std::vector<int> dims() const;

  /// One-based comma-separated labels, e.g. "1,3"; "0" for the empty set.
  std::string label() const;

  friend constexpr auto operator<=>(Subset, Subset) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// All nonempty subsets of {0..d-1} in ascending mask order. d <= 12.
std::vector<Subset> all_nonempty_subsets(int d);

/// Nonempty subsets with at most `max_order` elements, ascending mask order.
std::vector<Subset> subsets_up_to_order(int d, int max_order);

}  // namespace zanova

#endif
