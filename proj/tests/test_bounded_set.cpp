#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lm/bounded_set.hpp"

using namespace lm;

TEST_CASE("new sets are empty with capacity M^2") {
  CHECK(BoundedSet(NumericContext(1)).capacity() == 1);
  CHECK(BoundedSet(NumericContext(2)).capacity() == 9);
  CHECK(BoundedSet(NumericContext(8)).capacity() == 65025);
  CHECK(BoundedSet(NumericContext(2)).size() == 0);
}

TEST_CASE("insert is idempotent and capacity-checked") {
  NumericContext c1(1);
  BoundedSet s(c1);
  s = s.insert(LMValue(c1, 0));
  CHECK(s.size() == 1);
  s = s.insert(LMValue(c1, 0));
  CHECK(s.size() == 1);
  CHECK_THROWS_AS(s.insert(LMValue(c1, 1)), CardinalityError);
}

TEST_CASE("exactly M^2 distinct inserts fit") {
  NumericContext c2(2);
  BoundedSet s(c2);
  for (std::int64_t k = 0; k < 9; ++k) {
    s = s.insert(LMValue(c2, k));
  }
  CHECK(s.size() == 9);
  CHECK_THROWS_AS(s.insert(LMValue(c2, -1)), CardinalityError);
  // re-inserting a member of a full set is still a no-op
  CHECK(s.insert(LMValue(c2, 4)).size() == 9);
}

TEST_CASE("union deduplicates and respects capacity") {
  NumericContext c2(2);
  BoundedSet a(c2), b(c2);
  CHECK(set_union(a, b).size() == 0);

  a = a.insert(LMValue(c2, 0)).insert(LMValue(c2, 1));
  b = b.insert(LMValue(c2, 1)).insert(LMValue(c2, 2));
  BoundedSet u = set_union(a, b);
  CHECK(u.size() == 3);
  CHECK(u.to_string() == "{0/3, 1/3, 2/3}");

  NumericContext c1(1);
  BoundedSet x = BoundedSet(c1).insert(LMValue(c1, 0));
  BoundedSet y = BoundedSet(c1).insert(LMValue(c1, 1));
  CHECK_THROWS_AS(set_union(x, y), CardinalityError);
}

TEST_CASE("intersection never overflows") {
  NumericContext c2(2);
  BoundedSet a = BoundedSet(c2).insert(LMValue(c2, 0)).insert(LMValue(c2, 1));
  BoundedSet b = BoundedSet(c2).insert(LMValue(c2, 1));
  BoundedSet i = set_intersect(a, b);
  CHECK(i.size() == 1);
  CHECK(i.contains(LMValue(c2, 1)));
  CHECK_FALSE(i.contains(LMValue(c2, 0)));
}

TEST_CASE("enumeration order is ascending k") {
  NumericContext c2(2);
  BoundedSet s = BoundedSet(c2)
                     .insert(LMValue(c2, 5))
                     .insert(LMValue(c2, -9))
                     .insert(LMValue(c2, 0));
  auto vs = s.values();
  REQUIRE(vs.size() == 3);
  CHECK(vs[0].numerator() == -9);
  CHECK(vs[1].numerator() == 0);
  CHECK(vs[2].numerator() == 5);
  CHECK(s.to_string() == "{-9/3, 0/3, 5/3}");
}

TEST_CASE("sets reject elements and partners from other contexts") {
  NumericContext c1(1), c2(2);
  BoundedSet s(c1);
  CHECK_THROWS_AS(s.insert(LMValue(c2, 1)), UsageError);
  CHECK_THROWS_AS(set_union(BoundedSet(c1), BoundedSet(c2)), UsageError);
  CHECK_THROWS_AS(set_intersect(BoundedSet(c1), BoundedSet(c2)), UsageError);
}

TEST_CASE("union and intersection are commutative and associative in range") {
  NumericContext c2(2);
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    BoundedSet sets[3] = {BoundedSet(c2), BoundedSet(c2), BoundedSet(c2)};
    for (auto& s : sets) {
      for (int i = 0; i < 3; ++i) {
        s = s.insert(LMValue(c2, static_cast<std::int64_t>(rng() % 19) - 9));
      }
    }
    const auto& [a, b, c] = sets;
    CHECK(set_union(a, b) == set_union(b, a));
    CHECK(set_intersect(a, b) == set_intersect(b, a));
    CHECK(set_union(set_union(a, b), c) == set_union(a, set_union(b, c)));
    CHECK(set_intersect(set_intersect(a, b), c) ==
          set_intersect(a, set_intersect(b, c)));
  }
}
