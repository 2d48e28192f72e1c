#pragma once

#include <cstdint>
#include <string>

#include "lm/errors.hpp"
#include "lm/rational.hpp"

namespace lm {

inline constexpr std::int32_t kQ88Min = -32768;
inline constexpr std::int32_t kQ88Max = 32767;
inline constexpr std::int32_t kQ88One = 256;

// Signalled when a rescaled result falls outside the 16-bit range. There is
// no wraparound and no saturation here: trapping is the only boundary
// behavior.
class TrapError : public Error {
public:
  TrapError(std::string operation, BigInt wide)
      : Error(operation + ": rescaled value " + wide.str() +
              " outside [-32768, 32767]"),
        operation_(std::move(operation)),
        wide_(std::move(wide)) {}

  const std::string& operation() const { return operation_; }
  const BigInt& wide_value() const { return wide_; }

private:
  std::string operation_;
  BigInt wide_;
};

// Rounding applied when a 32-bit product is rescaled back to Q8.8.
// Truncate is an arithmetic shift (floor toward -inf); SymmetricRound is
// round half away from zero, applied before the shift.
enum class RoundingMode { Truncate, SymmetricRound };

// Signed fixed point: 16-bit two's-complement raw value, denoting raw/256.
class Q88 {
public:
  Q88() = default;

  static Q88 from_raw(std::int16_t raw) {
    Q88 q;
    q.raw_ = raw;
    return q;
  }

  // floor(256 x) when representable; traps otherwise.
  static Q88 from_rational(const Rational& x) {
    BigInt scaled = rational_floor(Rational(kQ88One) * x);
    if (scaled < kQ88Min || scaled > kQ88Max) {
      throw TrapError("from_rational", scaled);
    }
    return from_raw(static_cast<std::int16_t>(scaled.convert_to<std::int32_t>()));
  }

  std::int16_t raw() const { return raw_; }
  Rational value() const { return Rational(raw_, kQ88One); }

  // Exact decimal plus the raw payload, e.g. "3.75 (raw 960)".
  std::string to_string() const {
    return decimal_string() + " (raw " + std::to_string(raw_) + ")";
  }

  std::string decimal_string() const {
    const std::int32_t a = raw_ < 0 ? -static_cast<std::int32_t>(raw_) : raw_;
    const std::int32_t whole = a / kQ88One;
    // 1/256 steps terminate within 8 decimal digits: frac * 5^8.
    std::int64_t digits = static_cast<std::int64_t>(a % kQ88One) * 390625;
    std::string frac(8, '0');
    for (int i = 7; i >= 0; --i) {
      frac[static_cast<std::size_t>(i)] = static_cast<char>('0' + digits % 10);
      digits /= 10;
    }
    while (frac.size() > 1 && frac.back() == '0') {
      frac.pop_back();
    }
    return (raw_ < 0 ? "-" : "") + std::to_string(whole) + "." + frac;
  }

  friend bool operator==(Q88 a, Q88 b) { return a.raw_ == b.raw_; }
  friend bool operator!=(Q88 a, Q88 b) { return !(a == b); }

private:
  std::int16_t raw_ = 0;
};

// Widen, add, check. Addition never quantizes: when it does not trap the
// result is the exact rational sum.
inline Q88 q88_add(Q88 x, Q88 y) {
  const std::int32_t wide =
      static_cast<std::int32_t>(x.raw()) + static_cast<std::int32_t>(y.raw());
  if (wide < kQ88Min || wide > kQ88Max) {
    throw TrapError("add", wide);
  }
  return Q88::from_raw(static_cast<std::int16_t>(wide));
}

// Widen to a 32-bit product, rescale by 8 bits under the rounding mode,
// trap when the rescaled value leaves the 16-bit range.
inline Q88 q88_mul(Q88 x, Q88 y, RoundingMode mode = RoundingMode::Truncate) {
  const std::int32_t p =
      static_cast<std::int32_t>(x.raw()) * static_cast<std::int32_t>(y.raw());
  std::int32_t r;
  if (mode == RoundingMode::Truncate) {
    r = p >> 8; // arithmetic shift: floor toward -inf
  } else if (p >= 0) {
    r = (p + 128) >> 8;
  } else {
    r = -((-p + 128) >> 8);
  }
  if (r < kQ88Min || r > kQ88Max) {
    throw TrapError("mul", r);
  }
  return Q88::from_raw(static_cast<std::int16_t>(r));
}

enum class Q88Op { Add, Mul };

// round half away from zero, exact.
inline BigInt round_half_away(const Rational& x) {
  if (x >= 0) {
    return rational_floor(x + Rational(1, 2));
  }
  return -rational_floor(-x + Rational(1, 2));
}

// Differential check of the integer datapath against the exact-rational
// route: quantize the classical result by the mode's rule, range-check it
// the same way, and require identical outcomes (value or trap).
inline bool q88_oracle_check(Q88 x, Q88 y, Q88Op op,
                             RoundingMode mode = RoundingMode::Truncate) {
  Rational classical =
      op == Q88Op::Add ? Rational(x.value() + y.value()) : x.value() * y.value();
  Rational scaled = Rational(kQ88One) * classical;
  BigInt quantized;
  if (op == Q88Op::Add) {
    if (!is_integer(scaled)) {
      return false; // sums of 1/256 multiples are always exact
    }
    quantized = numerator(scaled);
  } else if (mode == RoundingMode::Truncate) {
    quantized = rational_floor(scaled);
  } else {
    quantized = round_half_away(scaled);
  }
  const bool oracle_in_range = quantized >= kQ88Min && quantized <= kQ88Max;

  try {
    Q88 got = op == Q88Op::Add ? q88_add(x, y) : q88_mul(x, y, mode);
    return oracle_in_range && BigInt(got.raw()) == quantized;
  } catch (const TrapError&) {
    return !oracle_in_range;
  }
}

} // namespace lm
