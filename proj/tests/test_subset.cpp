#include "zanova/subset.hpp"

#include <doctest.h>

#include <set>
#include <stdexcept>
#include <vector>

using namespace zanova;

TEST_SUITE("subset") {
  TEST_CASE("construction and labels") {
    CHECK(Subset().label() == "0");
    CHECK(Subset::of({0}).label() == "1");
    CHECK(Subset::of({0, 1}).label() == "1,2");
    CHECK(Subset::of({2, 0}).bits() == 0b101u);
    const std::vector<int> labels{1, 3};
    CHECK(Subset::from_labels(labels) == Subset::of({0, 2}));
    CHECK(Subset::full(3).bits() == 7u);
    CHECK(Subset::of({1, 4}).dims() == std::vector<int>{1, 4});
    CHECK(Subset::of({1, 4}).span_dimension() == 5);
    CHECK(Subset::of({1, 4}).size() == 2);
  }

  TEST_CASE("invalid subsets") {
    const std::vector<int> zero{0}, big{33};
    CHECK_THROWS_AS(Subset::from_labels(zero), std::invalid_argument);
    CHECK_THROWS_AS(Subset::from_labels(big), std::invalid_argument);
    CHECK_THROWS_AS(Subset::of({-1}), std::invalid_argument);
    CHECK_THROWS_AS(Subset::full(33), std::invalid_argument);
  }

  TEST_CASE("containment") {
    const auto a = Subset::of({0, 2});
    CHECK(a.contains(0));
    CHECK(!a.contains(1));
    CHECK(Subset::of({2}).is_subset_of(a));
    CHECK(!Subset::of({1}).is_subset_of(a));
    CHECK(Subset().is_subset_of(a));
  }

  TEST_CASE("enumeration") {
    for (int d = 1; d <= 6; ++d) {
      const auto all = all_nonempty_subsets(d);
      CHECK(all.size() == (1u << d) - 1);
      CHECK(std::set<Subset>(all.begin(), all.end()).size() == all.size());
      for (std::size_t k = 1; k < all.size(); ++k) CHECK(all[k - 1] < all[k]);
    }
    const auto low = subsets_up_to_order(5, 2);
    CHECK(low.size() == 15);
    for (auto s : low) CHECK(s.size() <= 2);
    CHECK_THROWS_AS(all_nonempty_subsets(kMaxExpansionDimension + 1), std::invalid_argument);
  }
}
