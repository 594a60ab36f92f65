#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace speclat {

class VariableSchema;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

/// Either a state variable (by name) or an integer literal.
struct Operand {
  std::variant<std::string, int> value;

  static Operand variable(std::string name) { return {std::move(name)}; }
  static Operand literal(int v) { return {v}; }

  bool is_variable() const { return std::holds_alternative<std::string>(value); }
  const std::string& name() const { return std::get<std::string>(value); }
  int literal_value() const { return std::get<int>(value); }
};

/// Boolean combination of comparisons over integer state variables.
///
/// Immutable; copies share structure. A bare variable in boolean position
/// means "variable != 0", so `serviceHuman & serviceTimer = 0` parses as
/// expected for 0/1 flags.
class StateFormula {
 public:
  enum class Kind { True, False, Compare, Not, And, Or };

  StateFormula();  // true

  static StateFormula truth();
  static StateFormula falsity();
  static StateFormula compare(Operand lhs, CompareOp op, Operand rhs);
  static StateFormula compare(std::string var, CompareOp op, int literal);
  static StateFormula flag(std::string var);  // var != 0

  /// Parses the textual syntax. Accepts ASCII (`&`, `|`, `!`, `!=`, `<=`, `>=`)
  /// and the usual logic symbols (∧ ∨ ¬ ≠ ≤ ≥). Throws Error(Parse).
  static StateFormula parse(std::string_view text);

  friend StateFormula operator&&(const StateFormula& a, const StateFormula& b);
  friend StateFormula operator||(const StateFormula& a, const StateFormula& b);
  friend StateFormula operator!(const StateFormula& a);

  Kind kind() const;
  CompareOp op() const;           // Compare only
  const Operand& lhs() const;     // Compare only
  const Operand& rhs() const;     // Compare only
  StateFormula child(int i) const;  // Not: 0; And/Or: 0 and 1

  /// Variable names referenced, sorted and unique.
  std::vector<std::string> variables() const;

  std::string to_string() const;

 private:
  struct Node;
  static std::shared_ptr<const Node> constant_node(bool value);
  explicit StateFormula(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// A formula resolved against a schema for fast repeated evaluation.
class BoundFormula {
 public:
  BoundFormula(const StateFormula& formula, const VariableSchema& schema);

  bool evaluate(std::span<const int> valuation) const;

 private:
  struct Instr {
    enum class Code : std::uint8_t { PushTrue, PushFalse, Cmp, Not, And, Or } code;
    CompareOp op = CompareOp::Eq;
    bool lhs_var = false;
    bool rhs_var = false;
    int lhs = 0;  // variable index or literal
    int rhs = 0;
  };
  std::vector<Instr> program_;  // postfix
};

bool compare_values(int lhs, CompareOp op, int rhs);
const char* to_string(CompareOp op);

}  // namespace speclat
