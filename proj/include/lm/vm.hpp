#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "lm/core.hpp"
#include "lm/errors.hpp"

namespace lm {

// Explored state spaces larger than this are refused unless the caller
// supplies an explicit step budget.
inline constexpr std::int64_t kDefaultStateSpaceCap = 100'000'000;

// A step budget ran out before the run halted, trapped, or cycled.
class BudgetExhaustedError : public Error {
public:
  using Error::Error;
};

enum class Opcode { Loadi, Mov, Add, Mul, Neg, Jmp, Jsgn, Halt };

// Register machine instruction. Arithmetic runs through the grid
// operations under the program's boundary policy.
struct Instr {
  Opcode op = Opcode::Halt;
  int rd = 0;           // destination register
  int ra = 0;           // first source / tested register
  int rb = 0;           // second source
  std::int64_t imm = 0; // LOADI grid numerator
  int target = 0;       // JMP
  int t_neg = 0, t_zero = 0, t_pos = 0; // JSGN

  static Instr loadi(int rd, std::int64_t k) {
    Instr i;
    i.op = Opcode::Loadi;
    i.rd = rd;
    i.imm = k;
    return i;
  }
  static Instr mov(int rd, int rs) {
    Instr i;
    i.op = Opcode::Mov;
    i.rd = rd;
    i.ra = rs;
    return i;
  }
  static Instr add(int rd, int ra, int rb) {
    Instr i;
    i.op = Opcode::Add;
    i.rd = rd;
    i.ra = ra;
    i.rb = rb;
    return i;
  }
  static Instr mul(int rd, int ra, int rb) {
    Instr i;
    i.op = Opcode::Mul;
    i.rd = rd;
    i.ra = ra;
    i.rb = rb;
    return i;
  }
  static Instr neg(int rd, int rs) {
    Instr i;
    i.op = Opcode::Neg;
    i.rd = rd;
    i.ra = rs;
    return i;
  }
  static Instr jmp(int target) {
    Instr i;
    i.op = Opcode::Jmp;
    i.target = target;
    return i;
  }
  static Instr jsgn(int r, int t_neg, int t_zero, int t_pos) {
    Instr i;
    i.op = Opcode::Jsgn;
    i.ra = r;
    i.t_neg = t_neg;
    i.t_zero = t_zero;
    i.t_pos = t_pos;
    return i;
  }
  static Instr halt() { return Instr{}; }
};

// A validated program. Jump targets may equal the instruction count:
// program counter past the end is a halt.
class Program {
public:
  Program(NumericContext context, BoundaryPolicy policy, int reg_count,
          std::vector<Instr> code)
      : ctx_(context),
        policy_(policy),
        reg_count_(reg_count),
        code_(std::move(code)) {
    if (reg_count_ < 1) {
      throw UsageError("register count must be >= 1");
    }
    const int len = size();
    for (int pc = 0; pc < len; ++pc) {
      const Instr& i = code_[static_cast<std::size_t>(pc)];
      check_target(i.op == Opcode::Jmp ? i.target : 0, pc);
      if (i.op == Opcode::Jsgn) {
        check_target(i.t_neg, pc);
        check_target(i.t_zero, pc);
        check_target(i.t_pos, pc);
      }
      switch (i.op) {
      case Opcode::Loadi:
        check_reg(i.rd, pc);
        if (i.imm > ctx_.max_numerator() || i.imm < -ctx_.max_numerator()) {
          throw UsageError("instruction " + std::to_string(pc) +
                           ": immediate outside [-M^2, M^2]");
        }
        break;
      case Opcode::Mov:
      case Opcode::Neg:
        check_reg(i.rd, pc);
        check_reg(i.ra, pc);
        break;
      case Opcode::Add:
      case Opcode::Mul:
        check_reg(i.rd, pc);
        check_reg(i.ra, pc);
        check_reg(i.rb, pc);
        break;
      case Opcode::Jsgn:
        check_reg(i.ra, pc);
        break;
      case Opcode::Jmp:
      case Opcode::Halt:
        break;
      }
    }
  }

  const NumericContext& context() const { return ctx_; }
  BoundaryPolicy policy() const { return policy_; }
  int reg_count() const { return reg_count_; }
  const std::vector<Instr>& code() const { return code_; }
  int size() const { return static_cast<int>(code_.size()); }

private:
  void check_reg(int r, int pc) const {
    if (r < 0 || r >= reg_count_) {
      throw UsageError("instruction " + std::to_string(pc) +
                       ": register r" + std::to_string(r) + " out of range");
    }
  }
  void check_target(int t, int pc) const {
    if (t < 0 || t > size()) {
      throw UsageError("instruction " + std::to_string(pc) + ": jump target " +
                       std::to_string(t) + " out of range");
    }
  }

  NumericContext ctx_;
  BoundaryPolicy policy_;
  int reg_count_;
  std::vector<Instr> code_;
};

// One element of the finite global state space: program counter plus the
// register file of grid numerators.
struct VMState {
  int pc = 0;
  std::vector<std::int64_t> regs;

  friend bool operator==(const VMState&, const VMState&) = default;
};

struct VMStateHash {
  std::size_t operator()(const VMState& s) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(s.pc));
    for (std::int64_t k : s.regs) {
      mix(static_cast<std::uint64_t>(k));
    }
    return static_cast<std::size_t>(h);
  }
};

inline void validate_state(const Program& p, const VMState& s) {
  if (s.pc < 0 || s.pc > p.size()) {
    throw UsageError("program counter out of range");
  }
  if (static_cast<int>(s.regs.size()) != p.reg_count()) {
    throw UsageError("state has " + std::to_string(s.regs.size()) +
                     " registers, program needs " +
                     std::to_string(p.reg_count()));
  }
  for (std::int64_t k : s.regs) {
    if (k > p.context().max_numerator() || k < -p.context().max_numerator()) {
      throw UsageError("register numerator outside [-M^2, M^2]");
    }
  }
}

// Zero-filled registers, program counter at 0; a prefix of the register
// file may be supplied.
inline VMState initial_state(const Program& p,
                             std::vector<std::int64_t> regs = {}) {
  if (static_cast<int>(regs.size()) > p.reg_count()) {
    throw UsageError("too many initial registers");
  }
  regs.resize(static_cast<std::size_t>(p.reg_count()), 0);
  VMState s{0, std::move(regs)};
  validate_state(p, s);
  return s;
}

// The deterministic successor, or nullopt for a halt (HALT instruction or
// program counter past the end). Under the Trap policy an overflowing
// ADD/MUL propagates its BoundaryError.
inline std::optional<VMState> step(const Program& p, const VMState& s) {
  if (s.pc < 0 || s.pc > p.size() ||
      static_cast<int>(s.regs.size()) != p.reg_count()) {
    throw UsageError("malformed state for this program");
  }
  if (s.pc == p.size()) {
    return std::nullopt;
  }
  const Instr& i = p.code()[static_cast<std::size_t>(s.pc)];
  VMState next = s;
  next.pc = s.pc + 1;
  const NumericContext& ctx = p.context();
  auto reg = [&s](int r) { return s.regs[static_cast<std::size_t>(r)]; };
  auto set = [&next](int r, std::int64_t k) {
    next.regs[static_cast<std::size_t>(r)] = k;
  };
  switch (i.op) {
  case Opcode::Halt:
    return std::nullopt;
  case Opcode::Loadi:
    set(i.rd, i.imm);
    break;
  case Opcode::Mov:
    set(i.rd, reg(i.ra));
    break;
  case Opcode::Add:
    set(i.rd, lm_add(p.policy(), LMValue(ctx, reg(i.ra)),
                     LMValue(ctx, reg(i.rb)))
                  .numerator());
    break;
  case Opcode::Mul:
    set(i.rd, lm_mul(p.policy(), LMValue(ctx, reg(i.ra)),
                     LMValue(ctx, reg(i.rb)))
                  .numerator());
    break;
  case Opcode::Neg:
    set(i.rd, -reg(i.ra));
    break;
  case Opcode::Jmp:
    next.pc = i.target;
    break;
  case Opcode::Jsgn: {
    const std::int64_t k = reg(i.ra);
    next.pc = k < 0 ? i.t_neg : (k == 0 ? i.t_zero : i.t_pos);
    break;
  }
  }
  return next;
}

// |Sigma| = (|instructions| + 1) * (2 M^2 + 1)^R, exact.
inline BigInt state_space_size(const Program& p) {
  BigInt per_reg = p.context().domain_size();
  BigInt total = p.size() + 1;
  return total * boost::multiprecision::pow(
                     per_reg, static_cast<unsigned>(p.reg_count()));
}

struct Halted {
  std::int64_t steps = 0;
  VMState final_state;
};
struct Cycle {
  std::int64_t prefix_len = 0;
  std::int64_t period = 0;
};
struct Trapped {
  std::int64_t steps = 0;
  std::string cause;
};
using RunOutcome = std::variant<Halted, Cycle, Trapped>;

inline std::string outcome_to_string(const RunOutcome& o) {
  if (const auto* h = std::get_if<Halted>(&o)) {
    return "HALTED steps=" + std::to_string(h->steps);
  }
  if (const auto* c = std::get_if<Cycle>(&o)) {
    return "CYCLE prefix=" + std::to_string(c->prefix_len) +
           " period=" + std::to_string(c->period);
  }
  const auto& t = std::get<Trapped>(o);
  return "TRAPPED steps=" + std::to_string(t.steps);
}

// Simulates while recording every visited state exactly (full tuples, so a
// revisit can never be a hash artifact). Always decides within |Sigma| + 1
// steps; the returned prefix and period are both minimal.
inline RunOutcome decide_termination(
    const Program& p, const VMState& init,
    std::optional<std::int64_t> step_budget = std::nullopt,
    std::int64_t state_cap = kDefaultStateSpaceCap) {
  validate_state(p, init);
  if (!step_budget && state_space_size(p) > state_cap) {
    throw CapError("state space " + state_space_size(p).str() +
                   " over cap " + std::to_string(state_cap) +
                   "; supply a step budget to bypass");
  }
  std::unordered_map<VMState, std::int64_t, VMStateHash> visited;
  VMState current = init;
  visited.emplace(current, 0);
  std::int64_t steps = 0;
  while (true) {
    if (step_budget && steps == *step_budget) {
      throw BudgetExhaustedError("no decision within " +
                                 std::to_string(*step_budget) + " steps");
    }
    std::optional<VMState> next;
    try {
      next = step(p, current);
    } catch (const BoundaryError& e) {
      return Trapped{steps + 1, e.what()};
    }
    ++steps;
    if (!next) {
      return Halted{steps, current};
    }
    current = std::move(*next);
    auto [it, inserted] = visited.emplace(current, steps);
    if (!inserted) {
      return Cycle{it->second, steps - it->second};
    }
  }
}

// Plain simulation with a step limit and no state recording; for runs whose
// state space is too large to track.
inline RunOutcome simulate(const Program& p, const VMState& init,
                           std::int64_t max_steps) {
  validate_state(p, init);
  VMState current = init;
  for (std::int64_t steps = 0; steps < max_steps;) {
    std::optional<VMState> next;
    try {
      next = step(p, current);
    } catch (const BoundaryError& e) {
      return Trapped{steps + 1, e.what()};
    }
    ++steps;
    if (!next) {
      return Halted{steps, current};
    }
    current = std::move(*next);
  }
  throw BudgetExhaustedError("no halt or trap within " +
                             std::to_string(max_steps) + " steps");
}

namespace detail {

inline std::vector<std::string> split_operands(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) {
    out.push_back(cur);
  }
  return out;
}

inline std::int64_t parse_int(const std::string& tok, int line_no) {
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(tok, &used);
    if (used != tok.size()) {
      throw std::invalid_argument(tok);
    }
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" +
                     tok + "'");
  }
}

inline int parse_reg(const std::string& tok, int line_no) {
  if (tok.size() < 2 || (tok[0] != 'r' && tok[0] != 'R')) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": expected register, got '" + tok + "'");
  }
  return static_cast<int>(parse_int(tok.substr(1), line_no));
}

inline std::string upper(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return s;
}

} // namespace detail

// Text format: one instruction per line, `;` comments, numeric 0-based
// jump targets. Header lines `#bits`, `#regs` (required) and `#policy
// saturate|trap` (default saturate) come first.
inline Program parse_program(std::string_view text) {
  std::optional<int> bits;
  std::optional<int> regs;
  BoundaryPolicy policy = BoundaryPolicy::Saturate;
  std::vector<Instr> code;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (auto c = line.find(';'); c != std::string_view::npos) {
      line = line.substr(0, c);
    }
    std::vector<std::string> tok = detail::split_operands(line);
    if (tok.empty()) {
      continue;
    }

    if (tok[0][0] == '#') {
      if (tok.size() != 2) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": header needs one value");
      }
      if (tok[0] == "#bits") {
        bits = static_cast<int>(detail::parse_int(tok[1], line_no));
      } else if (tok[0] == "#regs") {
        regs = static_cast<int>(detail::parse_int(tok[1], line_no));
      } else if (tok[0] == "#policy") {
        if (tok[1] == "saturate") {
          policy = BoundaryPolicy::Saturate;
        } else if (tok[1] == "trap") {
          policy = BoundaryPolicy::Trap;
        } else {
          throw ParseError("line " + std::to_string(line_no) +
                           ": policy must be saturate or trap");
        }
      } else {
        throw ParseError("line " + std::to_string(line_no) +
                         ": unknown header '" + tok[0] + "'");
      }
      continue;
    }

    const std::string op = detail::upper(tok[0]);
    auto want = [&](std::size_t n) {
      if (tok.size() != n + 1) {
        throw ParseError("line " + std::to_string(line_no) + ": " + op +
                         " takes " + std::to_string(n) + " operands");
      }
    };
    if (op == "LOADI") {
      want(2);
      code.push_back(Instr::loadi(detail::parse_reg(tok[1], line_no),
                                  detail::parse_int(tok[2], line_no)));
    } else if (op == "MOV") {
      want(2);
      code.push_back(Instr::mov(detail::parse_reg(tok[1], line_no),
                                detail::parse_reg(tok[2], line_no)));
    } else if (op == "ADD" || op == "MUL") {
      want(3);
      int rd = detail::parse_reg(tok[1], line_no);
      int ra = detail::parse_reg(tok[2], line_no);
      int rb = detail::parse_reg(tok[3], line_no);
      code.push_back(op == "ADD" ? Instr::add(rd, ra, rb)
                                 : Instr::mul(rd, ra, rb));
    } else if (op == "NEG") {
      want(2);
      code.push_back(Instr::neg(detail::parse_reg(tok[1], line_no),
                                detail::parse_reg(tok[2], line_no)));
    } else if (op == "JMP") {
      want(1);
      code.push_back(
          Instr::jmp(static_cast<int>(detail::parse_int(tok[1], line_no))));
    } else if (op == "JSGN") {
      want(4);
      code.push_back(
          Instr::jsgn(detail::parse_reg(tok[1], line_no),
                      static_cast<int>(detail::parse_int(tok[2], line_no)),
                      static_cast<int>(detail::parse_int(tok[3], line_no)),
                      static_cast<int>(detail::parse_int(tok[4], line_no))));
    } else if (op == "HALT") {
      want(0);
      code.push_back(Instr::halt());
    } else {
      throw ParseError("line " + std::to_string(line_no) +
                       ": unknown instruction '" + tok[0] + "'");
    }
  }

  if (!bits) {
    throw ParseError("missing #bits header");
  }
  if (!regs) {
    throw ParseError("missing #regs header");
  }
  try {
    return Program(NumericContext(*bits), policy, *regs, std::move(code));
  } catch (const UsageError& e) {
    throw ParseError(e.what());
  }
}

} // namespace lm
