#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lm/q88.hpp"

using namespace lm;

namespace {

std::int16_t random_raw(std::mt19937_64& rng) {
  return static_cast<std::int16_t>(static_cast<std::int32_t>(rng() % 65536) -
                                   32768);
}

} // namespace

TEST_CASE("conversion floors 256x and traps out of range") {
  CHECK(Q88::from_rational(Rational(3, 2)).raw() == 384);
  CHECK(Q88::from_rational(Rational(0)).raw() == 0);
  CHECK(Q88::from_rational(Rational(-3, 10)).raw() == -77); // floor(-76.8)
  CHECK(Q88::from_rational(Rational(127)).raw() == 32512);

  try {
    Q88::from_rational(Rational(200));
    FAIL("expected TrapError");
  } catch (const TrapError& e) {
    CHECK(e.wide_value() == 51200);
  }
  CHECK_THROWS_AS(Q88::from_rational(Rational(-129)), TrapError);
  CHECK_NOTHROW(Q88::from_rational(Rational(-128)));
}

TEST_CASE("rendering is exact decimal plus raw payload") {
  CHECK(Q88::from_raw(960).to_string() == "3.75 (raw 960)");
  CHECK(Q88::from_raw(768).to_string() == "3.0 (raw 768)");
  CHECK(Q88::from_raw(1).to_string() == "0.00390625 (raw 1)");
  CHECK(Q88::from_raw(-384).to_string() == "-1.5 (raw -384)");
  CHECK(Q88::from_raw(0).to_string() == "0.0 (raw 0)");
  CHECK(Q88::from_raw(-32768).value() == Rational(-128));
}

TEST_CASE("addition is widen-check-trap and otherwise exact") {
  Q88 a = Q88::from_rational(Rational(3, 2));
  Q88 b = Q88::from_rational(Rational(9, 4));
  CHECK(q88_add(a, b).raw() == 960);
  CHECK(q88_add(a, b).value() == a.value() + b.value());

  try {
    q88_add(Q88::from_rational(Rational(100)), Q88::from_rational(Rational(100)));
    FAIL("expected TrapError");
  } catch (const TrapError& e) {
    CHECK(e.operation() == "add");
    CHECK(e.wide_value() == 51200);
  }
  CHECK_THROWS_AS(q88_add(Q88::from_raw(-32768), Q88::from_raw(-1)), TrapError);
  CHECK_NOTHROW(q88_add(Q88::from_raw(32767), Q88::from_raw(0)));

  std::mt19937_64 rng(31337);
  for (int i = 0; i < 2000; ++i) {
    Q88 x = Q88::from_raw(random_raw(rng));
    CHECK(q88_add(x, Q88::from_raw(0)) == x);
  }
}

TEST_CASE("multiplication widens, rescales by 8 bits, and traps") {
  Q88 x = Q88::from_rational(Rational(3, 2));
  Q88 y = Q88::from_rational(Rational(2));
  CHECK(q88_mul(x, y).raw() == 768);

  // 1/256 * 1/2: the modes disagree by one ulp
  CHECK(q88_mul(Q88::from_raw(1), Q88::from_raw(128)).raw() == 0);
  CHECK(q88_mul(Q88::from_raw(1), Q88::from_raw(128),
                RoundingMode::SymmetricRound)
            .raw() == 1);

  // negative products shift arithmetically (floor), round symmetrically
  CHECK(q88_mul(Q88::from_raw(-1), Q88::from_raw(1)).raw() == -1);
  CHECK(q88_mul(Q88::from_raw(-1), Q88::from_raw(127)).raw() == -1);
  CHECK(q88_mul(Q88::from_raw(-1), Q88::from_raw(127),
                RoundingMode::SymmetricRound)
            .raw() == 0);

  try {
    q88_mul(Q88::from_rational(Rational(127)), Q88::from_rational(Rational(2)));
    FAIL("expected TrapError");
  } catch (const TrapError& e) {
    CHECK(e.operation() == "mul");
    CHECK(e.wide_value() == 65024);
  }

  // rescaled results landing exactly on the range edge do not trap
  CHECK(q88_mul(Q88::from_raw(32767), Q88::from_raw(256)).raw() == 32767);
  CHECK_THROWS_AS(q88_mul(Q88::from_raw(32767), Q88::from_raw(257)),
                  TrapError);

  std::mt19937_64 rng(999);
  for (int i = 0; i < 2000; ++i) {
    Q88 v = Q88::from_raw(random_raw(rng));
    CHECK(q88_mul(v, Q88::from_raw(256)) == v); // exact multiplicative identity
  }
}

TEST_CASE("datapath matches the exact-rational oracle") {
  std::mt19937_64 rng(246810);
  for (int i = 0; i < 10000; ++i) {
    Q88 x = Q88::from_raw(random_raw(rng));
    Q88 y = Q88::from_raw(random_raw(rng));
    CHECK(q88_oracle_check(x, y, Q88Op::Add));
    CHECK(q88_oracle_check(x, y, Q88Op::Mul, RoundingMode::Truncate));
    CHECK(q88_oracle_check(x, y, Q88Op::Mul, RoundingMode::SymmetricRound));
  }
  // directed sign-sensitive case
  CHECK(q88_oracle_check(Q88::from_raw(-1), Q88::from_raw(1), Q88Op::Mul,
                         RoundingMode::Truncate));
}

TEST_CASE("truncation never exceeds the true product; rounding stays within 1/512") {
  std::mt19937_64 rng(13579);
  for (int i = 0; i < 5000; ++i) {
    Q88 x = Q88::from_raw(random_raw(rng));
    Q88 y = Q88::from_raw(random_raw(rng));
    Rational exact = x.value() * y.value();
    try {
      Rational trunc = q88_mul(x, y, RoundingMode::Truncate).value();
      CHECK(trunc <= exact);
      CHECK(exact - trunc < Rational(1, 256));
    } catch (const TrapError&) {
    }
    try {
      Rational sym = q88_mul(x, y, RoundingMode::SymmetricRound).value();
      Rational diff = sym - exact;
      if (diff < 0) {
        diff = -diff;
      }
      CHECK(diff <= Rational(1, 512));
    } catch (const TrapError&) {
    }
  }
}

TEST_CASE("in-range addition is associative") {
  std::mt19937_64 rng(112358);
  int verified = 0;
  while (verified < 3000) {
    const std::int32_t a = static_cast<std::int32_t>(rng() % 20001) - 10000;
    const std::int32_t b = static_cast<std::int32_t>(rng() % 20001) - 10000;
    const std::int32_t c = static_cast<std::int32_t>(rng() % 20001) - 10000;
    const auto fits = [](std::int32_t v) {
      return v >= kQ88Min && v <= kQ88Max;
    };
    if (!fits(a + b) || !fits(b + c) || !fits(a + b + c)) {
      continue;
    }
    Q88 qa = Q88::from_raw(static_cast<std::int16_t>(a));
    Q88 qb = Q88::from_raw(static_cast<std::int16_t>(b));
    Q88 qc = Q88::from_raw(static_cast<std::int16_t>(c));
    CHECK(q88_add(q88_add(qa, qb), qc) == q88_add(qa, q88_add(qb, qc)));
    ++verified;
  }
}
