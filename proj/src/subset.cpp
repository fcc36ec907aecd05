#include "zanova/subset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace zanova {

Subset Subset::of(std::initializer_list<int> dims) {
  std::uint32_t bits = 0;
  for (int i : dims) {
    if (i < 0 || i >= kMaxDimension)
      throw std::invalid_argument(fmt::format("dimension index {} out of range", i));
    bits |= 1u << i;
  }
  return Subset(bits);
}

Subset Subset::from_labels(std::span<const int> labels) {
  std::uint32_t bits = 0;
  for (int l : labels) {
    if (l < 1 || l > kMaxDimension)
      throw std::invalid_argument(fmt::format("dimension label {} out of range", l));
    bits |= 1u << (l - 1);
  }
  return Subset(bits);
}

Subset Subset::full(int d) {
  if (d < 0 || d > kMaxDimension)
    throw std::invalid_argument(fmt::format("dimension {} out of range", d));
  return Subset(d == 32 ? ~0u : (1u << d) - 1u);
}

std::vector<int> Subset::dims() const {
  std::vector<int> out;
  for (int i = 0; i < kMaxDimension; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

std::string Subset::label() const {
  if (empty()) return "0";
  std::string out;
  for (int i : dims()) {
    if (!out.empty()) out += ',';
    out += std::to_string(i + 1);
  }
  return out;
}

std::vector<Subset> all_nonempty_subsets(int d) {
  if (d < 1 || d > kMaxExpansionDimension)
    throw std::invalid_argument(
        fmt::format("full subset enumeration needs 1 <= d <= {}, got {}", kMaxExpansionDimension, d));
  std::vector<Subset> out;
  for (std::uint32_t b = 1; b < (1u << d); ++b) out.emplace_back(b);
  return out;
}

std::vector<Subset> subsets_up_to_order(int d, int max_order) {
  if (d < 1 || d > kMaxDimension)
    throw std::invalid_argument(fmt::format("dimension {} out of range", d));
  if (max_order < 1) throw std::invalid_argument("subset order cap must be >= 1");
  std::vector<Subset> out;
  // Grow subsets in ascending mask order without walking all 2^d masks.
  std::vector<std::uint32_t> frontier{0u};
  for (int order = 1; order <= std::min(max_order, d); ++order) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t b : frontier) {
      const int top = 32 - std::countl_zero(b);
      for (int i = top; i < d; ++i) next.push_back(b | (1u << i));
    }
    for (auto b : next) out.emplace_back(b);
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace zanova
