#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "lm/core.hpp"

using namespace lm;

namespace {

Rational random_rational(std::mt19937_64& rng, std::int64_t m) {
  const std::int64_t den = static_cast<std::int64_t>(rng() % 1000) + 1;
  const std::int64_t span = 2 * (m + 2) * den;
  const std::int64_t num =
      static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(span + 1)) -
      (m + 2) * den;
  return Rational(num, den);
}

} // namespace

TEST_CASE("context derives M from the bit parameter") {
  CHECK(NumericContext(1).bound() == 1);
  CHECK(NumericContext(8).bound() == 255);
  CHECK(NumericContext(4).bound() == 15);
  CHECK(NumericContext(4).domain_size() == 451);
  CHECK(NumericContext(31).bound() == 2147483647);

  CHECK_THROWS_AS(NumericContext(0), UsageError);
  CHECK_THROWS_AS(NumericContext(-3), UsageError);
  CHECK_THROWS_AS(NumericContext(32), UsageError);
}

TEST_CASE("value numerators are confined to [-M^2, M^2]") {
  NumericContext ctx(2);
  CHECK_NOTHROW(LMValue(ctx, 9));
  CHECK_NOTHROW(LMValue(ctx, -9));
  CHECK_THROWS_AS(LMValue(ctx, 10), UsageError);
  CHECK_THROWS_AS(LMValue(ctx, -10), UsageError);
}

TEST_CASE("value_map saturates, floors toward -inf, and renders k/M") {
  NumericContext c1(1), c8(8);
  CHECK(value_map(c1, Rational(5)).numerator() == 1);
  CHECK(value_map(c1, Rational(-5)).numerator() == -1);
  CHECK(value_map(c8, Rational(0)).numerator() == 0);
  CHECK(value_map(c8, Rational(3, 10)).numerator() == 76);
  CHECK(value_map(c8, Rational(-3, 10)).numerator() == -77);
  CHECK(value_map(c8, Rational(3, 10)).to_string() == "76/255");

  // the boundary itself is representable: both branches agree at +-M
  CHECK(value_map(c8, Rational(255)).numerator() == 255 * 255);
  CHECK(value_map(c8, Rational(-255)).numerator() == -255 * 255);
}

TEST_CASE("value_map is the identity on grid points") {
  for (int bits : {1, 2, 3}) {
    NumericContext ctx(bits);
    for (const LMValue& v : enumerate_domain(ctx)) {
      CHECK(value_map(ctx, v.value()) == v);
    }
  }
}

TEST_CASE("value_map is total, monotone, and within 1/M of interior inputs") {
  std::mt19937_64 rng(97531);
  for (int bits : {1, 3, 8}) {
    NumericContext ctx(bits);
    const std::int64_t m = ctx.bound();
    std::vector<Rational> xs;
    for (int i = 0; i < 500; ++i) {
      xs.push_back(random_rational(rng, m));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      LMValue v = value_map(ctx, xs[i]);
      CHECK(std::llabs(v.numerator()) <= ctx.max_numerator());
      if (i > 0) {
        CHECK(value_map(ctx, xs[i - 1]).numerator() <= v.numerator());
      }
      if (xs[i] > -m && xs[i] < m) {
        Rational err = xs[i] - v.value();
        CHECK(err >= 0);
        CHECK(err < Rational(1, m));
      }
    }
  }
}

TEST_CASE("in_grid requires grid alignment and bounded magnitude") {
  NumericContext c8(8), c1(1);
  CHECK(in_grid(c8, Rational(76, 255)));
  CHECK_FALSE(in_grid(c8, Rational(3, 10)));
  CHECK_FALSE(in_grid(c1, Rational(2)));
  CHECK(in_grid(c8, Rational(255)));
  CHECK(in_grid(c8, Rational(-255)));
  CHECK_FALSE(in_grid(c8, Rational(256)));
}

TEST_CASE("saturating addition clamps; trapping addition signals") {
  NumericContext c1(1);
  LMValue one(c1, 1), minus_one(c1, -1);
  CHECK(lm_add(BoundaryPolicy::Saturate, one, minus_one).numerator() == 0);
  CHECK(lm_add(BoundaryPolicy::Saturate, one, one).numerator() == 1);

  try {
    lm_add(BoundaryPolicy::Trap, one, one);
    FAIL("expected BoundaryError");
  } catch (const BoundaryError& e) {
    CHECK(e.operation() == "add");
    CHECK(e.classical_value() == Rational(2));
    CHECK(e.bound() == 1);
  }

  // reaching the boundary exactly is not a violation
  CHECK_NOTHROW(lm_add(BoundaryPolicy::Trap, one, LMValue(c1, 0)));
}

TEST_CASE("subtraction maps the exact difference") {
  NumericContext c2(2);
  CHECK(lm_sub(BoundaryPolicy::Saturate, LMValue(c2, 3), LMValue(c2, 5))
            .numerator() == -2);
  CHECK(lm_sub(BoundaryPolicy::Saturate, LMValue(c2, 9), LMValue(c2, -9))
            .numerator() == 9);
  CHECK_THROWS_AS(
      lm_sub(BoundaryPolicy::Trap, LMValue(c2, 9), LMValue(c2, -9)),
      BoundaryError);
}

TEST_CASE("multiplication floors off-grid products and saturates at +-M") {
  NumericContext c1(1), c2(2);
  CHECK(lm_mul(BoundaryPolicy::Saturate, LMValue(c1, -1), LMValue(c1, -1))
            .numerator() == 1);
  // 2/3 * 2/3 = 4/9, floored to 1/3 on the M=3 grid
  CHECK(lm_mul(BoundaryPolicy::Saturate, LMValue(c2, 2), LMValue(c2, 2))
            .numerator() == 1);
  // 3 * 3 = 9 > M, saturates to 3
  CHECK(lm_mul(BoundaryPolicy::Saturate, LMValue(c2, 9), LMValue(c2, 9))
            .numerator() == 9);
  CHECK_THROWS_AS(
      lm_mul(BoundaryPolicy::Trap, LMValue(c2, 9), LMValue(c2, 9)),
      BoundaryError);
  // off-grid but in range: floored silently under Trap as well
  CHECK(lm_mul(BoundaryPolicy::Trap, LMValue(c2, 2), LMValue(c2, 2))
            .numerator() == 1);
  // negative off-grid product floors away from zero
  CHECK(lm_mul(BoundaryPolicy::Saturate, LMValue(c2, -2), LMValue(c2, 2))
            .numerator() == -2);
}

TEST_CASE("grid arithmetic agrees with the rational route exhaustively") {
  for (int bits : {1, 2, 3}) {
    NumericContext ctx(bits);
    const std::int64_t m = ctx.bound();
    auto domain = enumerate_domain(ctx);
    for (const LMValue& x : domain) {
      for (const LMValue& y : domain) {
        Rational sum = x.value() + y.value();
        Rational prod = x.value() * y.value();
        CHECK(lm_add(BoundaryPolicy::Saturate, x, y) == value_map(ctx, sum));
        CHECK(lm_mul(BoundaryPolicy::Saturate, x, y) == value_map(ctx, prod));

        const bool sum_traps = sum > m || sum < -m;
        const bool prod_traps = prod > m || prod < -m;
        if (sum_traps) {
          CHECK_THROWS_AS(lm_add(BoundaryPolicy::Trap, x, y), BoundaryError);
        } else {
          CHECK(lm_add(BoundaryPolicy::Trap, x, y) ==
                lm_add(BoundaryPolicy::Saturate, x, y));
        }
        if (prod_traps) {
          CHECK_THROWS_AS(lm_mul(BoundaryPolicy::Trap, x, y), BoundaryError);
        } else {
          CHECK(lm_mul(BoundaryPolicy::Trap, x, y) ==
                lm_mul(BoundaryPolicy::Saturate, x, y));
        }
      }
    }
  }
}

TEST_CASE("grid arithmetic agrees with the rational route at M=255") {
  NumericContext ctx(8);
  std::mt19937_64 rng(424242);
  const std::int64_t cap = ctx.max_numerator();
  for (int i = 0; i < 2000; ++i) {
    LMValue x(ctx, static_cast<std::int64_t>(rng() % (2 * cap + 1)) - cap);
    LMValue y(ctx, static_cast<std::int64_t>(rng() % (2 * cap + 1)) - cap);
    CHECK(lm_add(BoundaryPolicy::Saturate, x, y) ==
          value_map(ctx, x.value() + y.value()));
    CHECK(lm_mul(BoundaryPolicy::Saturate, x, y) ==
          value_map(ctx, x.value() * y.value()));
    CHECK(lm_add(BoundaryPolicy::Saturate, x, y) ==
          lm_add(BoundaryPolicy::Saturate, y, x));
    CHECK(lm_mul(BoundaryPolicy::Saturate, x, y) ==
          lm_mul(BoundaryPolicy::Saturate, y, x));
  }
}

TEST_CASE("values from different contexts never mix") {
  NumericContext c1(1), c2(2);
  LMValue a(c1, 1), b(c2, 1);
  CHECK_THROWS_AS(lm_add(BoundaryPolicy::Saturate, a, b), UsageError);
  CHECK_THROWS_AS(lm_mul(BoundaryPolicy::Saturate, a, b), UsageError);
  CHECK_THROWS_AS((void)(a == b), UsageError);
}

TEST_CASE("domain enumeration is ascending and capped") {
  NumericContext c1(1), c2(2);
  auto d1 = enumerate_domain(c1);
  REQUIRE(d1.size() == 3);
  CHECK(d1.front().numerator() == -1);
  CHECK(d1.back().numerator() == 1);
  CHECK(enumerate_domain(c2).size() == 19);
  CHECK(enumerate_domain(NumericContext(8)).size() == 130051);

  CHECK_THROWS_AS(enumerate_domain(NumericContext(11)), CapError);
  CHECK_THROWS_AS(enumerate_domain(c2, 10), CapError);
}
