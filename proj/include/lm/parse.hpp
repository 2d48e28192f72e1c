#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "lm/errors.hpp"
#include "lm/expr.hpp"
#include "lm/rational.hpp"

namespace lm {
namespace detail {

enum class TokenKind { Number, Ident, Plus, Minus, Star, Slash, LParen,
                       RParen, Comma, End };

struct Token {
  TokenKind kind;
  Rational number;
  std::string text;
  std::size_t pos;
};

class ExprLexer {
public:
  explicit ExprLexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      Token t = next();
      out.push_back(t);
      if (t.kind == TokenKind::End) {
        return out;
      }
    }
  }

private:
  Token next() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) {
      return {TokenKind::End, Rational(0), "", start};
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      return number(start);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        ++pos_;
      }
      return {TokenKind::Ident, Rational(0),
              std::string(src_.substr(start, pos_ - start)), start};
    }
    ++pos_;
    switch (c) {
    case '+': return {TokenKind::Plus, Rational(0), "+", start};
    case '-': return {TokenKind::Minus, Rational(0), "-", start};
    case '*': return {TokenKind::Star, Rational(0), "*", start};
    case '/': return {TokenKind::Slash, Rational(0), "/", start};
    case '(': return {TokenKind::LParen, Rational(0), "(", start};
    case ')': return {TokenKind::RParen, Rational(0), ")", start};
    case ',': return {TokenKind::Comma, Rational(0), ",", start};
    default:
      throw ParseError("unexpected character '" + std::string(1, c) +
                       "' at position " + std::to_string(start));
    }
  }

  // Numbers: "12", "0.3" (exact decimal), and the adjacent fraction form
  // "3/10" (no spaces). "1 / 2" and "x/2" stay division expressions.
  Token number(std::size_t start) {
    std::size_t p = pos_;
    while (p < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[p]))) {
      ++p;
    }
    if (p < src_.size() && src_[p] == '.') {
      std::size_t fp = p + 1;
      std::size_t fend = fp;
      while (fend < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[fend]))) {
        ++fend;
      }
      if (fend == fp) {
        throw ParseError("decimal literal needs digits after '.' at position " +
                         std::to_string(p));
      }
      pos_ = fend;
      return {TokenKind::Number,
              parse_rational(src_.substr(start, fend - start)), "", start};
    }
    if (p + 1 < src_.size() && src_[p] == '/' &&
        std::isdigit(static_cast<unsigned char>(src_[p + 1]))) {
      std::size_t qend = p + 1;
      while (qend < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[qend]))) {
        ++qend;
      }
      // "1/2.5" is a division, not a fraction literal.
      if (qend >= src_.size() || src_[qend] != '.') {
        pos_ = qend;
        return {TokenKind::Number,
                parse_rational(src_.substr(start, qend - start)), "", start};
      }
    }
    pos_ = p;
    return {TokenKind::Number, parse_rational(src_.substr(start, p - start)),
            "", start};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// expr   := term (('+'|'-') term)*
// term   := factor (('*'|'/') factor)*
// factor := '-' factor | primary
// primary := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
class ExprParser {
public:
  explicit ExprParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ExprPtr run() {
    ExprPtr e = expr();
    expect(TokenKind::End, "end of input");
    return e;
  }

private:
  const Token& peek() const { return tokens_[idx_]; }
  Token take() { return tokens_[idx_++]; }

  bool accept(TokenKind k) {
    if (peek().kind == k) {
      ++idx_;
      return true;
    }
    return false;
  }

  void expect(TokenKind k, const char* what) {
    if (!accept(k)) {
      throw ParseError("expected " + std::string(what) + " at position " +
                       std::to_string(peek().pos));
    }
  }

  ExprPtr expr() {
    ExprPtr e = term();
    while (true) {
      if (accept(TokenKind::Plus)) {
        e = Expr::add(e, term());
      } else if (accept(TokenKind::Minus)) {
        e = Expr::sub(e, term());
      } else {
        return e;
      }
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    while (true) {
      if (accept(TokenKind::Star)) {
        e = Expr::mul(e, factor());
      } else if (accept(TokenKind::Slash)) {
        e = Expr::div(e, factor());
      } else {
        return e;
      }
    }
  }

  ExprPtr factor() {
    if (accept(TokenKind::Minus)) {
      return Expr::neg(factor());
    }
    return primary();
  }

  ExprPtr primary() {
    Token t = take();
    switch (t.kind) {
    case TokenKind::Number:
      return Expr::constant(t.number);
    case TokenKind::Ident: {
      if (t.text == "abs" || t.text == "min" || t.text == "max") {
        expect(TokenKind::LParen, "'(' after function name");
        std::vector<ExprPtr> args;
        args.push_back(expr());
        while (accept(TokenKind::Comma)) {
          args.push_back(expr());
        }
        expect(TokenKind::RParen, "')'");
        if (t.text == "abs") {
          if (args.size() != 1) {
            throw ParseError("abs takes one argument");
          }
          return Expr::abs(args[0]);
        }
        if (args.size() != 2) {
          throw ParseError(t.text + " takes two arguments");
        }
        return t.text == "min" ? Expr::min(args[0], args[1])
                               : Expr::max(args[0], args[1]);
      }
      return Expr::variable(t.text);
    }
    case TokenKind::LParen: {
      ExprPtr e = expr();
      expect(TokenKind::RParen, "')'");
      return e;
    }
    default:
      throw ParseError("unexpected token at position " + std::to_string(t.pos));
    }
  }

  std::vector<Token> tokens_;
  std::size_t idx_ = 0;
};

} // namespace detail

// Infix grammar with +, -, *, /, unary -, abs/min/max, parentheses,
// exact decimal and adjacent-fraction literals, identifiers.
inline ExprPtr parse_expr(std::string_view text) {
  return detail::ExprParser(detail::ExprLexer(text).run()).run();
}

// Single-parameter function from expression text. The parameter is the
// unique free variable; constant bodies default to `fallback_param`.
inline FuncDef parse_function(std::string_view text,
                              const std::string& fallback_param = "x") {
  ExprPtr body = parse_expr(text);
  std::set<std::string> vars = free_variables(body);
  if (vars.empty()) {
    return FuncDef(fallback_param, body);
  }
  if (vars.size() > 1) {
    throw UsageError("function text must use a single variable, found " +
                     std::to_string(vars.size()));
  }
  return FuncDef(*vars.begin(), body);
}

} // namespace lm
