#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>

#include "lm/core.hpp"
#include "lm/errors.hpp"
#include "lm/rational.hpp"

namespace lm {

// Classical semantics has no image for a division by zero.
class DivisionByZeroError : public Error {
public:
  using Error::Error;
};

// Symbolic differentiation covers the polynomial fragment only.
class NonDifferentiableError : public Error {
public:
  using Error::Error;
};

enum class ExprKind { Const, Var, Neg, Add, Sub, Mul, Div, Abs, Min, Max };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree over exact rationals. Subtrees are shared;
// build nodes through the static factories.
class Expr {
  struct Key {
    explicit Key() = default;
  };

public:
  Expr(Key, ExprKind kind, Rational value, std::string name, ExprPtr lhs,
       ExprPtr rhs)
      : kind_(kind),
        value_(std::move(value)),
        name_(std::move(name)),
        lhs_(std::move(lhs)),
        rhs_(std::move(rhs)) {}

  static ExprPtr constant(Rational v) {
    return std::make_shared<Expr>(Key{}, ExprKind::Const, std::move(v), "",
                                  nullptr, nullptr);
  }
  static ExprPtr variable(std::string name) {
    if (name.empty()) {
      throw UsageError("variable name must not be empty");
    }
    return std::make_shared<Expr>(Key{}, ExprKind::Var, Rational(0),
                                  std::move(name), nullptr, nullptr);
  }
  static ExprPtr neg(ExprPtr e) { return unary(ExprKind::Neg, std::move(e)); }
  static ExprPtr abs(ExprPtr e) { return unary(ExprKind::Abs, std::move(e)); }
  static ExprPtr add(ExprPtr a, ExprPtr b) {
    return binary(ExprKind::Add, std::move(a), std::move(b));
  }
  static ExprPtr sub(ExprPtr a, ExprPtr b) {
    return binary(ExprKind::Sub, std::move(a), std::move(b));
  }
  static ExprPtr mul(ExprPtr a, ExprPtr b) {
    return binary(ExprKind::Mul, std::move(a), std::move(b));
  }
  static ExprPtr div(ExprPtr a, ExprPtr b) {
    return binary(ExprKind::Div, std::move(a), std::move(b));
  }
  static ExprPtr min(ExprPtr a, ExprPtr b) {
    return binary(ExprKind::Min, std::move(a), std::move(b));
  }
  static ExprPtr max(ExprPtr a, ExprPtr b) {
    return binary(ExprKind::Max, std::move(a), std::move(b));
  }

  ExprKind kind() const { return kind_; }
  const Rational& value() const { return value_; } // Const only
  const std::string& name() const { return name_; } // Var only
  const ExprPtr& lhs() const { return lhs_; }       // also the unary child
  const ExprPtr& rhs() const { return rhs_; }

private:
  static ExprPtr unary(ExprKind kind, ExprPtr e) {
    if (!e) {
      throw UsageError("null child in expression node");
    }
    return std::make_shared<Expr>(Key{}, kind, Rational(0), "", std::move(e),
                                  nullptr);
  }
  static ExprPtr binary(ExprKind kind, ExprPtr a, ExprPtr b) {
    if (!a || !b) {
      throw UsageError("null child in expression node");
    }
    return std::make_shared<Expr>(Key{}, kind, Rational(0), "", std::move(a),
                                  std::move(b));
  }

  ExprKind kind_;
  Rational value_;
  std::string name_;
  ExprPtr lhs_;
  ExprPtr rhs_;
};

using Env = std::map<std::string, Rational>;
using LMEnv = std::map<std::string, LMValue>;

inline void collect_free_variables(const ExprPtr& e,
                                   std::set<std::string>& out) {
  if (!e) {
    return;
  }
  if (e->kind() == ExprKind::Var) {
    out.insert(e->name());
  }
  collect_free_variables(e->lhs(), out);
  collect_free_variables(e->rhs(), out);
}

inline std::set<std::string> free_variables(const ExprPtr& e) {
  std::set<std::string> out;
  collect_free_variables(e, out);
  return out;
}

// Replaces every occurrence of `name`, sharing untouched subtrees.
inline ExprPtr substitute(const ExprPtr& e, const std::string& name,
                          const ExprPtr& replacement) {
  switch (e->kind()) {
  case ExprKind::Const:
    return e;
  case ExprKind::Var:
    return e->name() == name ? replacement : e;
  default: {
    ExprPtr a = e->lhs() ? substitute(e->lhs(), name, replacement) : nullptr;
    ExprPtr b = e->rhs() ? substitute(e->rhs(), name, replacement) : nullptr;
    if (a == e->lhs() && b == e->rhs()) {
      return e;
    }
    switch (e->kind()) {
    case ExprKind::Neg: return Expr::neg(a);
    case ExprKind::Abs: return Expr::abs(a);
    case ExprKind::Add: return Expr::add(a, b);
    case ExprKind::Sub: return Expr::sub(a, b);
    case ExprKind::Mul: return Expr::mul(a, b);
    case ExprKind::Div: return Expr::div(a, b);
    case ExprKind::Min: return Expr::min(a, b);
    case ExprKind::Max: return Expr::max(a, b);
    default: throw UsageError("unreachable expression kind");
    }
  }
  }
}

// Parenthesized infix, mostly for diagnostics.
inline std::string expr_to_string(const ExprPtr& e) {
  switch (e->kind()) {
  case ExprKind::Const: return rational_to_string(e->value());
  case ExprKind::Var: return e->name();
  case ExprKind::Neg: return "(-" + expr_to_string(e->lhs()) + ")";
  case ExprKind::Abs: return "abs(" + expr_to_string(e->lhs()) + ")";
  case ExprKind::Add:
    return "(" + expr_to_string(e->lhs()) + " + " + expr_to_string(e->rhs()) +
           ")";
  case ExprKind::Sub:
    return "(" + expr_to_string(e->lhs()) + " - " + expr_to_string(e->rhs()) +
           ")";
  case ExprKind::Mul:
    return "(" + expr_to_string(e->lhs()) + " * " + expr_to_string(e->rhs()) +
           ")";
  case ExprKind::Div:
    return "(" + expr_to_string(e->lhs()) + " / " + expr_to_string(e->rhs()) +
           ")";
  case ExprKind::Min:
    return "min(" + expr_to_string(e->lhs()) + ", " +
           expr_to_string(e->rhs()) + ")";
  case ExprKind::Max:
    return "max(" + expr_to_string(e->lhs()) + ", " +
           expr_to_string(e->rhs()) + ")";
  }
  throw UsageError("unreachable expression kind");
}

// Exact evaluation under standard field semantics; no mapping of any kind.
inline Rational eval_classical(const ExprPtr& e, const Env& env) {
  switch (e->kind()) {
  case ExprKind::Const:
    return e->value();
  case ExprKind::Var: {
    auto it = env.find(e->name());
    if (it == env.end()) {
      throw UsageError("unbound variable '" + e->name() + "'");
    }
    return it->second;
  }
  case ExprKind::Neg:
    return -eval_classical(e->lhs(), env);
  case ExprKind::Abs: {
    Rational v = eval_classical(e->lhs(), env);
    return v < 0 ? Rational(-v) : v;
  }
  case ExprKind::Add:
    return eval_classical(e->lhs(), env) + eval_classical(e->rhs(), env);
  case ExprKind::Sub:
    return eval_classical(e->lhs(), env) - eval_classical(e->rhs(), env);
  case ExprKind::Mul:
    return eval_classical(e->lhs(), env) * eval_classical(e->rhs(), env);
  case ExprKind::Div: {
    Rational num = eval_classical(e->lhs(), env);
    Rational den = eval_classical(e->rhs(), env);
    if (den == 0) {
      throw DivisionByZeroError("division by zero in classical evaluation");
    }
    return num / den;
  }
  case ExprKind::Min: {
    Rational a = eval_classical(e->lhs(), env);
    Rational b = eval_classical(e->rhs(), env);
    return a <= b ? a : b;
  }
  case ExprKind::Max: {
    Rational a = eval_classical(e->lhs(), env);
    Rational b = eval_classical(e->rhs(), env);
    return a >= b ? a : b;
  }
  }
  throw UsageError("unreachable expression kind");
}

// SnapAtEnd: evaluate classically, map once at the root.
// SnapEachStep: map after every node, the naive contrast mode.
enum class EvalMode { SnapAtEnd, SnapEachStep };

namespace detail {

inline void check_env_context(const NumericContext& ctx, const LMEnv& env) {
  for (const auto& [name, v] : env) {
    if (v.context() != ctx) {
      throw UsageError("binding '" + name + "' belongs to context b = " +
                       std::to_string(v.context().bits()) +
                       ", expected b = " + std::to_string(ctx.bits()));
    }
  }
}

inline LMValue eval_snapped(const NumericContext& ctx, BoundaryPolicy policy,
                            const ExprPtr& e, const LMEnv& env) {
  switch (e->kind()) {
  case ExprKind::Const:
    return map_or_trap(ctx, policy, "const", e->value());
  case ExprKind::Var: {
    auto it = env.find(e->name());
    if (it == env.end()) {
      throw UsageError("unbound variable '" + e->name() + "'");
    }
    return it->second; // already a grid point; mapping is the identity
  }
  case ExprKind::Neg:
    return lm_neg(eval_snapped(ctx, policy, e->lhs(), env));
  case ExprKind::Abs: {
    LMValue v = eval_snapped(ctx, policy, e->lhs(), env);
    return LMValue(ctx, v.numerator() < 0 ? -v.numerator() : v.numerator());
  }
  case ExprKind::Add:
    return lm_add(policy, eval_snapped(ctx, policy, e->lhs(), env),
                  eval_snapped(ctx, policy, e->rhs(), env));
  case ExprKind::Sub:
    return lm_sub(policy, eval_snapped(ctx, policy, e->lhs(), env),
                  eval_snapped(ctx, policy, e->rhs(), env));
  case ExprKind::Mul:
    return lm_mul(policy, eval_snapped(ctx, policy, e->lhs(), env),
                  eval_snapped(ctx, policy, e->rhs(), env));
  case ExprKind::Div: {
    LMValue a = eval_snapped(ctx, policy, e->lhs(), env);
    LMValue b = eval_snapped(ctx, policy, e->rhs(), env);
    if (b.numerator() == 0) {
      throw DivisionByZeroError("division by zero in snapped evaluation");
    }
    return map_or_trap(ctx, policy, "div", a.value() / b.value());
  }
  case ExprKind::Min: {
    LMValue a = eval_snapped(ctx, policy, e->lhs(), env);
    LMValue b = eval_snapped(ctx, policy, e->rhs(), env);
    return a.numerator() <= b.numerator() ? a : b;
  }
  case ExprKind::Max: {
    LMValue a = eval_snapped(ctx, policy, e->lhs(), env);
    LMValue b = eval_snapped(ctx, policy, e->rhs(), env);
    return a.numerator() >= b.numerator() ? a : b;
  }
  }
  throw UsageError("unreachable expression kind");
}

} // namespace detail

inline LMValue eval_mapped(const NumericContext& ctx, BoundaryPolicy policy,
                           EvalMode mode, const ExprPtr& e, const LMEnv& env) {
  detail::check_env_context(ctx, env);
  if (mode == EvalMode::SnapEachStep) {
    return detail::eval_snapped(ctx, policy, e, env);
  }
  Env classical;
  for (const auto& [name, v] : env) {
    classical.emplace(name, v.value());
  }
  return detail::map_or_trap(ctx, policy, "eval", eval_classical(e, classical));
}

// A single-parameter function given by a classical expression body.
struct FuncDef {
  std::string param;
  ExprPtr body;

  FuncDef(std::string parameter, ExprPtr b)
      : param(std::move(parameter)), body(std::move(b)) {
    if (!body) {
      throw UsageError("function body must not be null");
    }
    for (const std::string& v : free_variables(body)) {
      if (v != param) {
        throw UsageError("function body uses unbound variable '" + v + "'");
      }
    }
  }
};

// The bounded counterpart of f: evaluate the body classically at a grid
// point, then map the result once.
class MappedFunction {
public:
  MappedFunction(NumericContext ctx, BoundaryPolicy policy, FuncDef f)
      : ctx_(ctx), policy_(policy), f_(std::move(f)) {}

  LMValue operator()(const LMValue& x) const {
    LMEnv env;
    env.emplace(f_.param, x);
    return eval_mapped(ctx_, policy_, EvalMode::SnapAtEnd, f_.body, env);
  }

private:
  NumericContext ctx_;
  BoundaryPolicy policy_;
  FuncDef f_;
};

inline MappedFunction map_function(const NumericContext& ctx,
                                   BoundaryPolicy policy, FuncDef f) {
  return MappedFunction(ctx, policy, std::move(f));
}

// Syntactic composition f(g(x)); the mapped composition is map_function of
// the result, so quantization still happens exactly once.
inline FuncDef compose(const FuncDef& f, const FuncDef& g) {
  return FuncDef(g.param, substitute(f.body, f.param, g.body));
}

namespace detail {

inline ExprPtr derivative_node(const ExprPtr& e) {
  switch (e->kind()) {
  case ExprKind::Const:
    return Expr::constant(Rational(0));
  case ExprKind::Var:
    return Expr::constant(Rational(1));
  case ExprKind::Neg:
    return Expr::neg(derivative_node(e->lhs()));
  case ExprKind::Add:
    return Expr::add(derivative_node(e->lhs()), derivative_node(e->rhs()));
  case ExprKind::Sub:
    return Expr::sub(derivative_node(e->lhs()), derivative_node(e->rhs()));
  case ExprKind::Mul:
    return Expr::add(Expr::mul(derivative_node(e->lhs()), e->rhs()),
                     Expr::mul(e->lhs(), derivative_node(e->rhs())));
  default:
    throw NonDifferentiableError(
        "differentiation is defined on {const, var, neg, add, sub, mul} only");
  }
}

} // namespace detail

// Symbolic derivative over the polynomial fragment. The returned body is
// not simplified; compare semantically, not structurally.
inline FuncDef derivative_symbolic(const FuncDef& f) {
  return FuncDef(f.param, detail::derivative_node(f.body));
}

// The exact classical derivative value at x, mapped once.
inline LMValue mapped_derivative(const NumericContext& ctx, const FuncDef& f,
                                 const LMValue& x) {
  if (x.context() != ctx) {
    throw UsageError("point belongs to a different context");
  }
  FuncDef df = derivative_symbolic(f);
  Env env;
  env.emplace(df.param, x.value());
  return value_map(ctx, eval_classical(df.body, env));
}

// The naive one-sided difference quotient of the already-quantized function
// over a single grid step. Kept as a demonstration of what the mapped
// derivative avoids: quantization flattens small slopes to zero.
inline LMValue grid_finite_difference(const NumericContext& ctx,
                                      const FuncDef& f, const LMValue& x) {
  if (x.context() != ctx) {
    throw UsageError("point belongs to a different context");
  }
  if (x.numerator() + 1 > ctx.max_numerator()) {
    throw BoundaryError("grid_finite_difference",
                        x.value() + Rational(1, ctx.bound()), ctx.bound());
  }
  MappedFunction fm = map_function(ctx, BoundaryPolicy::Saturate, f);
  LMValue y1 = fm(LMValue(ctx, x.numerator() + 1));
  LMValue y0 = fm(x);
  // (y1 - y0) / (1/M) collapses to the integer numerator difference.
  return value_map(ctx, Rational(y1.numerator() - y0.numerator()));
}

} // namespace lm
