#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "lm/core.hpp"
#include "lm/errors.hpp"

namespace lm {

// Raised when an insert or union would push a set past its M^2 capacity.
class CardinalityError : public Error {
public:
  using Error::Error;
};

// An immutable finite set of grid values, capped at M^2 elements.
// Operations return new sets; enumeration order is ascending k.
class BoundedSet {
public:
  explicit BoundedSet(NumericContext context) : ctx_(context) {}

  const NumericContext& context() const { return ctx_; }
  std::int64_t capacity() const { return ctx_.max_numerator(); }
  std::int64_t size() const { return static_cast<std::int64_t>(ks_.size()); }

  bool contains(const LMValue& v) const {
    check_member(v);
    return std::binary_search(ks_.begin(), ks_.end(), v.numerator());
  }

  // No-op when the element is already present.
  BoundedSet insert(const LMValue& v) const {
    check_member(v);
    auto pos = std::lower_bound(ks_.begin(), ks_.end(), v.numerator());
    if (pos != ks_.end() && *pos == v.numerator()) {
      return *this;
    }
    if (size() + 1 > capacity()) {
      throw CardinalityError("insert would give " + std::to_string(size() + 1) +
                             " elements, over capacity M^2 = " +
                             std::to_string(capacity()));
    }
    BoundedSet out(ctx_);
    out.ks_.reserve(ks_.size() + 1);
    out.ks_.assign(ks_.begin(), pos);
    out.ks_.push_back(v.numerator());
    out.ks_.insert(out.ks_.end(), pos, ks_.end());
    return out;
  }

  std::vector<LMValue> values() const {
    std::vector<LMValue> out;
    out.reserve(ks_.size());
    for (std::int64_t k : ks_) {
      out.emplace_back(ctx_, k);
    }
    return out;
  }

  // "{k1/M, k2/M, ...}" ascending.
  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < ks_.size(); ++i) {
      if (i > 0) {
        out += ", ";
      }
      out += std::to_string(ks_[i]) + "/" + std::to_string(ctx_.bound());
    }
    out += "}";
    return out;
  }

  friend BoundedSet set_union(const BoundedSet& a, const BoundedSet& b) {
    check_same_context(a, b, "union");
    BoundedSet out(a.ctx_);
    std::set_union(a.ks_.begin(), a.ks_.end(), b.ks_.begin(), b.ks_.end(),
                   std::back_inserter(out.ks_));
    if (out.size() > out.capacity()) {
      throw CardinalityError("union has " + std::to_string(out.size()) +
                             " elements, over capacity M^2 = " +
                             std::to_string(out.capacity()));
    }
    return out;
  }

  friend BoundedSet set_intersect(const BoundedSet& a, const BoundedSet& b) {
    check_same_context(a, b, "intersect");
    BoundedSet out(a.ctx_);
    std::set_intersection(a.ks_.begin(), a.ks_.end(), b.ks_.begin(),
                          b.ks_.end(), std::back_inserter(out.ks_));
    return out;
  }

  friend bool operator==(const BoundedSet& a, const BoundedSet& b) {
    check_same_context(a, b, "compare");
    return a.ks_ == b.ks_;
  }

private:
  void check_member(const LMValue& v) const {
    if (v.context() != ctx_) {
      throw UsageError("element belongs to a different context (b = " +
                       std::to_string(v.context().bits()) + " vs b = " +
                       std::to_string(ctx_.bits()) + ")");
    }
  }

  static void check_same_context(const BoundedSet& a, const BoundedSet& b,
                                 const char* operation) {
    if (a.ctx_ != b.ctx_) {
      throw UsageError(std::string(operation) +
                       ": sets belong to different contexts");
    }
  }

  NumericContext ctx_;
  std::vector<std::int64_t> ks_; // sorted ascending, no duplicates
};

} // namespace lm
