#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lm/errors.hpp"
#include "lm/rational.hpp"

namespace lm {

// Largest bit parameter: for b <= 31 every numerator k (|k| <= M^2) and
// every numerator sum k1 + k2 fits a signed 64-bit integer.
inline constexpr int kMaxBits = 31;

// Exhaustive walks over the domain refuse to produce more values than this
// unless the caller raises the cap explicitly.
inline constexpr std::int64_t kDefaultEnumerationCap = 1'000'000;

// The bound parameter b with its derived magnitude/precision bound
// M = 2^b - 1. M is never stored independently of b.
class NumericContext {
public:
  explicit NumericContext(int bits) : bits_(bits) {
    if (bits < 1 || bits > kMaxBits) {
      throw UsageError("bit parameter must be in [1, " +
                       std::to_string(kMaxBits) + "], got " +
                       std::to_string(bits));
    }
    m_ = (std::int64_t{1} << bits) - 1;
  }

  int bits() const { return bits_; }
  std::int64_t bound() const { return m_; }              // M
  std::int64_t max_numerator() const { return m_ * m_; } // M^2
  std::int64_t domain_size() const { return 2 * m_ * m_ + 1; }

  friend bool operator==(const NumericContext& a, const NumericContext& b) {
    return a.bits_ == b.bits_;
  }
  friend bool operator!=(const NumericContext& a, const NumericContext& b) {
    return !(a == b);
  }

private:
  int bits_;
  std::int64_t m_;
};

// Boundary behavior of the value mapping: clamp to +-M, or refuse to
// produce a value at all.
enum class BoundaryPolicy { Saturate, Trap };

// Signalled instead of saturating when the Trap policy sees a classical
// value of magnitude strictly greater than M.
class BoundaryError : public Error {
public:
  BoundaryError(std::string operation, Rational value, std::int64_t bound)
      : Error(operation + ": |" + rational_to_string(value) +
              "| exceeds bound " + std::to_string(bound)),
        operation_(std::move(operation)),
        value_(std::move(value)),
        bound_(bound) {}

  const std::string& operation() const { return operation_; }
  const Rational& classical_value() const { return value_; }
  std::int64_t bound() const { return bound_; }

private:
  std::string operation_;
  Rational value_;
  std::int64_t bound_;
};

// One grid point k/M. The numerator k is the whole state: |k| <= M^2.
class LMValue {
public:
  LMValue(NumericContext context, std::int64_t numerator)
      : ctx_(context), k_(numerator) {
    if (k_ > ctx_.max_numerator() || k_ < -ctx_.max_numerator()) {
      throw UsageError("numerator " + std::to_string(k_) +
                       " outside [-M^2, M^2] for M = " +
                       std::to_string(ctx_.bound()));
    }
  }

  std::int64_t numerator() const { return k_; }
  const NumericContext& context() const { return ctx_; }
  Rational value() const { return Rational(k_, ctx_.bound()); }

  // Canonical rendering "k/M", e.g. "76/255".
  std::string to_string() const {
    return std::to_string(k_) + "/" + std::to_string(ctx_.bound());
  }

private:
  NumericContext ctx_;
  std::int64_t k_;
};

// Mixing contexts is a usage error; every binary operation checks eagerly.
inline void require_same_context(const LMValue& a, const LMValue& b,
                                 const char* operation) {
  if (a.context() != b.context()) {
    throw UsageError(std::string(operation) +
                     ": operands belong to different contexts (b = " +
                     std::to_string(a.context().bits()) + " vs b = " +
                     std::to_string(b.context().bits()) + ")");
  }
}

inline bool operator==(const LMValue& a, const LMValue& b) {
  require_same_context(a, b, "compare");
  return a.numerator() == b.numerator();
}
inline bool operator!=(const LMValue& a, const LMValue& b) { return !(a == b); }
inline bool operator<(const LMValue& a, const LMValue& b) {
  require_same_context(a, b, "compare");
  return a.numerator() < b.numerator();
}

// Total value mapping of an exact rational into the grid: saturate at +-M,
// floor toward -inf (not truncation) strictly inside.
inline LMValue value_map(const NumericContext& ctx, const Rational& x) {
  const std::int64_t m = ctx.bound();
  if (x >= m) {
    return LMValue(ctx, ctx.max_numerator());
  }
  if (x <= -m) {
    return LMValue(ctx, -ctx.max_numerator());
  }
  BigInt k = rational_floor(Rational(m) * x);
  return LMValue(ctx, k.convert_to<std::int64_t>());
}

// True iff x is exactly a grid point: M*x integral and |x| <= M.
inline bool in_grid(const NumericContext& ctx, const Rational& x) {
  const std::int64_t m = ctx.bound();
  if (x > m || x < -m) {
    return false;
  }
  return is_integer(Rational(m) * x);
}

namespace detail {

// floor division for the wide products of lm_mul.
inline __int128 floor_div(__int128 num, __int128 den) {
  __int128 q = num / den;
  if ((num % den) != 0 && ((num < 0) != (den < 0))) {
    --q;
  }
  return q;
}

inline LMValue map_or_trap(const NumericContext& ctx, BoundaryPolicy policy,
                           const char* operation, const Rational& x) {
  if (policy == BoundaryPolicy::Trap && (x > ctx.bound() || x < -ctx.bound())) {
    throw BoundaryError(operation, x, ctx.bound());
  }
  return value_map(ctx, x);
}

} // namespace detail

// x (+) y. The exact sum of grid points is itself grid-aligned, so only
// saturation can occur; the numerator arithmetic below is exactly
// value_map(x + y) without building the rational.
inline LMValue lm_add(BoundaryPolicy policy, const LMValue& x,
                      const LMValue& y) {
  require_same_context(x, y, "add");
  const NumericContext& ctx = x.context();
  const std::int64_t cap = ctx.max_numerator();
  const std::int64_t sum = x.numerator() + y.numerator();
  if (sum > cap || sum < -cap) {
    if (policy == BoundaryPolicy::Trap) {
      throw BoundaryError("add", Rational(sum, ctx.bound()), ctx.bound());
    }
    return LMValue(ctx, sum > 0 ? cap : -cap);
  }
  return LMValue(ctx, sum);
}

// x (-) y, i.e. the value mapping of the exact difference.
inline LMValue lm_sub(BoundaryPolicy policy, const LMValue& x,
                      const LMValue& y) {
  require_same_context(x, y, "sub");
  const NumericContext& ctx = x.context();
  const std::int64_t cap = ctx.max_numerator();
  const std::int64_t diff = x.numerator() - y.numerator();
  if (diff > cap || diff < -cap) {
    if (policy == BoundaryPolicy::Trap) {
      throw BoundaryError("sub", Rational(diff, ctx.bound()), ctx.bound());
    }
    return LMValue(ctx, diff > 0 ? cap : -cap);
  }
  return LMValue(ctx, diff);
}

// x (*) y. The classical product (kx*ky)/M^2 may fall between grid points;
// it is floored under both policies. Trap fires only on |x*y| > M.
inline LMValue lm_mul(BoundaryPolicy policy, const LMValue& x,
                      const LMValue& y) {
  require_same_context(x, y, "mul");
  const NumericContext& ctx = x.context();
  const std::int64_t m = ctx.bound();
  const __int128 p = static_cast<__int128>(x.numerator()) * y.numerator();
  const __int128 m3 = static_cast<__int128>(m) * m * m;
  if (p > m3 || p < -m3) {
    if (policy == BoundaryPolicy::Trap) {
      throw BoundaryError("mul",
                          Rational(BigInt(x.numerator()) * y.numerator(),
                                   BigInt(m) * m),
                          m);
    }
    return LMValue(ctx, p > 0 ? ctx.max_numerator() : -ctx.max_numerator());
  }
  const __int128 k = detail::floor_div(p, m);
  return LMValue(ctx, static_cast<std::int64_t>(k));
}

// Exact negation; the grid is symmetric, so no mapping effect.
inline LMValue lm_neg(const LMValue& x) {
  return LMValue(x.context(), -x.numerator());
}

// All grid points in ascending order, k = -M^2 .. M^2.
inline std::vector<LMValue> enumerate_domain(
    const NumericContext& ctx, std::int64_t cap = kDefaultEnumerationCap) {
  if (ctx.domain_size() > cap) {
    throw CapError("domain has " + std::to_string(ctx.domain_size()) +
                   " values, over the enumeration cap " + std::to_string(cap));
  }
  std::vector<LMValue> out;
  out.reserve(static_cast<std::size_t>(ctx.domain_size()));
  for (std::int64_t k = -ctx.max_numerator(); k <= ctx.max_numerator(); ++k) {
    out.emplace_back(ctx, k);
  }
  return out;
}

} // namespace lm
