#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "lm/core.hpp"
#include "lm/errors.hpp"

namespace lm {

// One offending operand tuple, recorded as grid numerators together with
// both evaluations. For the cancellation search lhs and rhs are the two
// equal sums; for every other law they are the unequal sides.
struct LawCounterexample {
  std::vector<std::int64_t> operands;
  std::int64_t lhs = 0;
  std::int64_t rhs = 0;
};

// Two-tier result of an exhaustive scan: the law over the whole universe,
// and restricted to tuples whose intermediate classical values all stay on
// the grid.
struct LawReport {
  std::string law;
  std::uint64_t universe_size = 0;
  bool holds_universally = false;
  bool in_range_holds = false;
  std::uint64_t violation_count = 0;
  std::uint64_t in_range_violation_count = 0;
  // Ascending lexicographic by operand numerators; truncated at the
  // configured store limit (violation_count stays exact).
  std::vector<LawCounterexample> counterexamples;
};

struct LawCheckOptions {
  // Number of operand tuples an exhaustive scan may visit. The default
  // admits every M <= 7 scan; raise it explicitly for M = 15 (91M triples).
  std::uint64_t tuple_cap = 2'000'000;
  // Counterexamples kept in the report; large enough to hold every M <= 7
  // counterexample without truncation.
  std::size_t store_limit = std::size_t{1} << 20;
};

namespace detail {

inline void check_tuple_cap(const NumericContext& ctx, int arity,
                            const LawCheckOptions& opts) {
  const std::uint64_t n = static_cast<std::uint64_t>(ctx.domain_size());
  std::uint64_t tuples = 1;
  bool over = false;
  for (int i = 0; i < arity && !over; ++i) {
    if (tuples > opts.tuple_cap / n) {
      over = true;
    } else {
      tuples *= n;
    }
  }
  if (over || tuples > opts.tuple_cap) {
    throw CapError("scan of " + std::to_string(ctx.domain_size()) + "^" +
                   std::to_string(arity) +
                   " tuples exceeds cap " + std::to_string(opts.tuple_cap) +
                   "; raise the cap to run this bound");
  }
}

inline void record(LawReport& report, const LawCheckOptions& opts,
                   std::vector<std::int64_t> operands, std::int64_t lhs,
                   std::int64_t rhs, bool in_range) {
  ++report.violation_count;
  if (in_range) {
    ++report.in_range_violation_count;
  }
  if (report.counterexamples.size() < opts.store_limit) {
    report.counterexamples.push_back(
        LawCounterexample{std::move(operands), lhs, rhs});
  }
}

inline void finalize(LawReport& report) {
  report.holds_universally = report.violation_count == 0;
  report.in_range_holds = report.in_range_violation_count == 0;
}

// x*y lies on the grid iff |kx*ky| <= M^3 and M divides kx*ky.
inline bool product_on_grid(const NumericContext& ctx, std::int64_t kx,
                            std::int64_t ky) {
  const __int128 p = static_cast<__int128>(kx) * ky;
  const std::int64_t m = ctx.bound();
  const __int128 m3 = static_cast<__int128>(m) * m * m;
  if (p > m3 || p < -m3) {
    return false;
  }
  return p % m == 0;
}

} // namespace detail

// x (+) y = y (+) x and x (*) y = y (*) x over every pair. Both operators
// map a symmetric classical expression, so this is expected to hold
// universally, saturation included.
inline LawReport check_commutativity(const NumericContext& ctx,
                                     const LawCheckOptions& opts = {}) {
  detail::check_tuple_cap(ctx, 2, opts);
  LawReport report;
  report.law = "commutativity";
  const std::int64_t cap = ctx.max_numerator();
  report.universe_size = static_cast<std::uint64_t>(ctx.domain_size()) *
                         static_cast<std::uint64_t>(ctx.domain_size());
  const auto policy = BoundaryPolicy::Saturate;
  for (std::int64_t kx = -cap; kx <= cap; ++kx) {
    LMValue x(ctx, kx);
    for (std::int64_t ky = -cap; ky <= cap; ++ky) {
      LMValue y(ctx, ky);
      const std::int64_t add_lr = lm_add(policy, x, y).numerator();
      const std::int64_t add_rl = lm_add(policy, y, x).numerator();
      if (add_lr != add_rl) {
        detail::record(report, opts, {kx, ky}, add_lr, add_rl, true);
        continue;
      }
      const std::int64_t mul_lr = lm_mul(policy, x, y).numerator();
      const std::int64_t mul_rl = lm_mul(policy, y, x).numerator();
      if (mul_lr != mul_rl) {
        detail::record(report, opts, {kx, ky}, mul_lr, mul_rl, true);
      }
    }
  }
  detail::finalize(report);
  return report;
}

// (x (+) y) (+) z versus x (+) (y (+) z), each application mapping
// immediately. In range means x+y, y+z and x+y+z all stay within the grid;
// there the two groupings must agree exactly.
inline LawReport check_associativity_add(const NumericContext& ctx,
                                         const LawCheckOptions& opts = {}) {
  detail::check_tuple_cap(ctx, 3, opts);
  LawReport report;
  report.law = "associativity_add";
  const std::int64_t cap = ctx.max_numerator();
  const std::uint64_t n = static_cast<std::uint64_t>(ctx.domain_size());
  report.universe_size = n * n * n;
  const auto policy = BoundaryPolicy::Saturate;
  for (std::int64_t kx = -cap; kx <= cap; ++kx) {
    LMValue x(ctx, kx);
    for (std::int64_t ky = -cap; ky <= cap; ++ky) {
      LMValue y(ctx, ky);
      const LMValue xy = lm_add(policy, x, y);
      for (std::int64_t kz = -cap; kz <= cap; ++kz) {
        LMValue z(ctx, kz);
        const std::int64_t left =
            lm_add(policy, xy, z).numerator();
        const std::int64_t right =
            lm_add(policy, x, lm_add(policy, y, z)).numerator();
        if (left != right) {
          const bool in_range = std::llabs(kx + ky) <= cap &&
                                std::llabs(ky + kz) <= cap &&
                                std::llabs(kx + ky + kz) <= cap;
          detail::record(report, opts, {kx, ky, kz}, left, right, in_range);
        }
      }
    }
  }
  detail::finalize(report);
  return report;
}

// x (*) (y (+) z) versus (x (*) y) (+) (x (*) z). The in-range tier
// demands every intermediate classical value of either side on the grid:
// y+z, x*(y+z), x*y, x*z (and with them x*y + x*z, classically equal to
// x*(y+z)).
inline LawReport check_distributivity(const NumericContext& ctx,
                                      const LawCheckOptions& opts = {}) {
  detail::check_tuple_cap(ctx, 3, opts);
  LawReport report;
  report.law = "distributivity";
  const std::int64_t cap = ctx.max_numerator();
  const std::uint64_t n = static_cast<std::uint64_t>(ctx.domain_size());
  report.universe_size = n * n * n;
  const auto policy = BoundaryPolicy::Saturate;
  for (std::int64_t kx = -cap; kx <= cap; ++kx) {
    LMValue x(ctx, kx);
    for (std::int64_t ky = -cap; ky <= cap; ++ky) {
      LMValue y(ctx, ky);
      const LMValue xy = lm_mul(policy, x, y);
      for (std::int64_t kz = -cap; kz <= cap; ++kz) {
        LMValue z(ctx, kz);
        const std::int64_t left =
            lm_mul(policy, x, lm_add(policy, y, z)).numerator();
        const std::int64_t right =
            lm_add(policy, xy, lm_mul(policy, x, z)).numerator();
        if (left != right) {
          const std::int64_t sum_yz = ky + kz;
          const bool in_range =
              std::llabs(sum_yz) <= cap &&
              detail::product_on_grid(ctx, kx, sum_yz) &&
              detail::product_on_grid(ctx, kx, ky) &&
              detail::product_on_grid(ctx, kx, kz);
          detail::record(report, opts, {kx, ky, kz}, left, right, in_range);
        }
      }
    }
  }
  detail::finalize(report);
  return report;
}

// Search for x (+) y = x (+) z with y != z. Such triples exist at every
// bound (saturation erases the difference); restricted to in-range sums
// (x+y and x+z on the grid) addition is exact, so none can appear there.
inline LawReport check_cancellation(const NumericContext& ctx,
                                    const LawCheckOptions& opts = {}) {
  detail::check_tuple_cap(ctx, 3, opts);
  LawReport report;
  report.law = "cancellation";
  const std::int64_t cap = ctx.max_numerator();
  const std::uint64_t n = static_cast<std::uint64_t>(ctx.domain_size());
  report.universe_size = n * n * n;
  const auto policy = BoundaryPolicy::Saturate;
  for (std::int64_t kx = -cap; kx <= cap; ++kx) {
    LMValue x(ctx, kx);
    for (std::int64_t ky = -cap; ky <= cap; ++ky) {
      const std::int64_t xy =
          lm_add(policy, x, LMValue(ctx, ky)).numerator();
      for (std::int64_t kz = -cap; kz <= cap; ++kz) {
        if (ky == kz) {
          continue;
        }
        const std::int64_t xz =
            lm_add(policy, x, LMValue(ctx, kz)).numerator();
        if (xy == xz) {
          const bool in_range =
              std::llabs(kx + ky) <= cap && std::llabs(kx + kz) <= cap;
          detail::record(report, opts, {kx, ky, kz}, xy, xz, in_range);
        }
      }
    }
  }
  detail::finalize(report);
  return report;
}

} // namespace lm
