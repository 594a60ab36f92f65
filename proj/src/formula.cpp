#include "speclat/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "speclat/error.hpp"
#include "speclat/mdp.hpp"

namespace speclat {

struct StateFormula::Node {
  Kind kind = Kind::True;
  CompareOp op = CompareOp::Eq;
  Operand lhs{0};
  Operand rhs{0};
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

std::shared_ptr<const StateFormula::Node> StateFormula::constant_node(bool value) {
  static const auto t = [] {
    auto n = std::make_shared<StateFormula::Node>();
    n->kind = StateFormula::Kind::True;
    return std::shared_ptr<const StateFormula::Node>(n);
  }();
  static const auto f = [] {
    auto n = std::make_shared<StateFormula::Node>();
    n->kind = StateFormula::Kind::False;
    return std::shared_ptr<const StateFormula::Node>(n);
  }();
  return value ? t : f;
}

StateFormula::StateFormula() : node_(constant_node(true)) {}
StateFormula::StateFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

StateFormula StateFormula::truth() { return StateFormula(constant_node(true)); }
StateFormula StateFormula::falsity() { return StateFormula(constant_node(false)); }

StateFormula StateFormula::compare(Operand lhs, CompareOp op, Operand rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compare;
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return StateFormula(std::move(n));
}

StateFormula StateFormula::compare(std::string var, CompareOp op, int literal) {
  return compare(Operand::variable(std::move(var)), op, Operand::literal(literal));
}

StateFormula StateFormula::flag(std::string var) {
  return compare(std::move(var), CompareOp::Ne, 0);
}

StateFormula operator&&(const StateFormula& a, const StateFormula& b) {
  auto n = std::make_shared<StateFormula::Node>();
  n->kind = StateFormula::Kind::And;
  n->a = a.node_;
  n->b = b.node_;
  return StateFormula(std::move(n));
}

StateFormula operator||(const StateFormula& a, const StateFormula& b) {
  auto n = std::make_shared<StateFormula::Node>();
  n->kind = StateFormula::Kind::Or;
  n->a = a.node_;
  n->b = b.node_;
  return StateFormula(std::move(n));
}

StateFormula operator!(const StateFormula& a) {
  auto n = std::make_shared<StateFormula::Node>();
  n->kind = StateFormula::Kind::Not;
  n->a = a.node_;
  return StateFormula(std::move(n));
}

StateFormula::Kind StateFormula::kind() const { return node_->kind; }
CompareOp StateFormula::op() const { return node_->op; }
const Operand& StateFormula::lhs() const { return node_->lhs; }
const Operand& StateFormula::rhs() const { return node_->rhs; }
StateFormula StateFormula::child(int i) const { return StateFormula(i == 0 ? node_->a : node_->b); }

std::vector<std::string> StateFormula::variables() const {
  std::set<std::string> names;
  std::vector<const Node*> stack{node_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (n->kind == Kind::Compare) {
      if (n->lhs.is_variable()) names.insert(n->lhs.name());
      if (n->rhs.is_variable()) names.insert(n->rhs.name());
    }
    if (n->a) stack.push_back(n->a.get());
    if (n->b) stack.push_back(n->b.get());
  }
  return {names.begin(), names.end()};
}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

bool compare_values(int lhs, CompareOp op, int rhs) {
  switch (op) {
    case CompareOp::Eq: return lhs == rhs;
    case CompareOp::Ne: return lhs != rhs;
    case CompareOp::Lt: return lhs < rhs;
    case CompareOp::Le: return lhs <= rhs;
    case CompareOp::Gt: return lhs > rhs;
    case CompareOp::Ge: return lhs >= rhs;
  }
  return false;
}

namespace {

std::string operand_text(const Operand& o) {
  return o.is_variable() ? o.name() : std::to_string(o.literal_value());
}

// Precedence: Or 1, And 2, Not/atoms 3.
std::string render(const StateFormula& f, int parent_prec) {
  using K = StateFormula::Kind;
  switch (f.kind()) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Compare: {
      std::string s = operand_text(f.lhs()) + " " + to_string(f.op()) + " " + operand_text(f.rhs());
      return parent_prec >= 3 ? "(" + s + ")" : s;
    }
    case K::Not: return "!" + render(f.child(0), 3);
    case K::And: {
      std::string s = render(f.child(0), 2) + " & " + render(f.child(1), 2);
      return parent_prec > 2 ? "(" + s + ")" : s;
    }
    case K::Or: {
      std::string s = render(f.child(0), 1) + " | " + render(f.child(1), 1);
      return parent_prec > 1 ? "(" + s + ")" : s;
    }
  }
  return {};
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  StateFormula parse() {
    StateFormula f = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::Parse, "formula parse error at offset " + std::to_string(pos_) +
                                      ": " + what + " in \"" + std::string(text_) + "\"");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  StateFormula parse_or() {
    StateFormula f = parse_and();
    while (accept("||") || accept("|") || accept("∨")) f = f || parse_and();
    return f;
  }

  StateFormula parse_and() {
    StateFormula f = parse_unary();
    while (accept("&&") || accept("&") || accept("∧")) f = f && parse_unary();
    return f;
  }

  StateFormula parse_unary() {
    skip_space();
    // "!=" never starts a unary term, so a leading '!' is always negation.
    if (accept("!") || accept("¬")) return !parse_unary();
    return parse_primary();
  }

  std::optional<CompareOp> parse_op() {
    if (accept("==")) return CompareOp::Eq;
    if (accept("!=") || accept("≠")) return CompareOp::Ne;
    if (accept("<=") || accept("≤")) return CompareOp::Le;
    if (accept(">=") || accept("≥")) return CompareOp::Ge;
    if (accept("=")) return CompareOp::Eq;
    if (accept("<")) return CompareOp::Lt;
    if (accept(">")) return CompareOp::Gt;
    return std::nullopt;
  }

  std::optional<Operand> parse_operand() {
    skip_space();
    if (pos_ >= text_.size()) return std::nullopt;
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      int v = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
      if (ec != std::errc()) fail("bad integer literal");
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      return Operand::literal(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return Operand::variable(std::string(text_.substr(start, pos_ - start)));
    }
    return std::nullopt;
  }

  StateFormula parse_primary() {
    if (accept("(")) {
      StateFormula f = parse_or();
      if (!accept(")")) fail("expected ')'");
      return f;
    }
    auto lhs = parse_operand();
    if (!lhs) fail("expected operand");
    if (lhs->is_variable() && (lhs->name() == "true" || lhs->name() == "false")) {
      return lhs->name() == "true" ? StateFormula::truth() : StateFormula::falsity();
    }
    auto op = parse_op();
    if (!op) {
      if (!lhs->is_variable()) fail("integer literal used as a boolean");
      return StateFormula::flag(lhs->name());
    }
    auto rhs = parse_operand();
    if (!rhs) fail("expected right-hand operand");
    return StateFormula::compare(std::move(*lhs), *op, std::move(*rhs));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

StateFormula StateFormula::parse(std::string_view text) { return Parser(text).parse(); }

std::string StateFormula::to_string() const { return render(*this, 0); }

BoundFormula::BoundFormula(const StateFormula& formula, const VariableSchema& schema) {
  using K = StateFormula::Kind;
  auto resolve = [&](const Operand& o, bool& is_var) {
    is_var = o.is_variable();
    return is_var ? static_cast<int>(schema.require_index(o.name())) : o.literal_value();
  };
  // Postorder emission.
  auto emit = [&](auto&& self, const StateFormula& f) -> void {
    Instr in{};
    switch (f.kind()) {
      case K::True: in.code = Instr::Code::PushTrue; break;
      case K::False: in.code = Instr::Code::PushFalse; break;
      case K::Compare:
        in.code = Instr::Code::Cmp;
        in.op = f.op();
        in.lhs = resolve(f.lhs(), in.lhs_var);
        in.rhs = resolve(f.rhs(), in.rhs_var);
        break;
      case K::Not:
        self(self, f.child(0));
        in.code = Instr::Code::Not;
        break;
      case K::And:
      case K::Or:
        self(self, f.child(0));
        self(self, f.child(1));
        in.code = f.kind() == K::And ? Instr::Code::And : Instr::Code::Or;
        break;
    }
    program_.push_back(in);
  };
  emit(emit, formula);
}

bool BoundFormula::evaluate(std::span<const int> valuation) const {
  bool stack[64];
  std::vector<bool> overflow;
  std::size_t top = 0;
  auto push = [&](bool v) {
    if (top < 64) stack[top] = v;
    else overflow.push_back(v);
    ++top;
  };
  auto pop = [&]() {
    --top;
    if (top < 64) return stack[top];
    bool v = overflow.back();
    overflow.pop_back();
    return v;
  };
  for (const Instr& in : program_) {
    switch (in.code) {
      case Instr::Code::PushTrue: push(true); break;
      case Instr::Code::PushFalse: push(false); break;
      case Instr::Code::Cmp: {
        int l = in.lhs_var ? valuation[static_cast<std::size_t>(in.lhs)] : in.lhs;
        int r = in.rhs_var ? valuation[static_cast<std::size_t>(in.rhs)] : in.rhs;
        push(compare_values(l, in.op, r));
        break;
      }
      case Instr::Code::Not: push(!pop()); break;
      case Instr::Code::And: {
        bool b = pop();
        bool a = pop();
        push(a && b);
        break;
      }
      case Instr::Code::Or: {
        bool b = pop();
        bool a = pop();
        push(a || b);
        break;
      }
    }
  }
  return pop();
}

}  // namespace speclat
