#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace folia {

/// Raised for malformed user input (scenario files, expressions, degree
/// mismatches). The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical procedure cannot certify its result (truncation
/// envelope too large, refinement disagreement). The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable expression tree over indexed variables. Nodes are shared, so
/// copying an Expr is cheap. Constructors fold constants and drop trivial
/// identities so that zero stays structurally recognisable.
class Expr {
 public:
  enum class Op : std::uint8_t { Const, Var, Add, Mul, Neg, Pow, Sin, Cos, Exp };

  struct Node {
    Op op;
    double value = 0.0;  // Const
    int index = 0;       // Var index, or Pow exponent
    std::shared_ptr<const Node> a, b;
  };

  Expr();  // the constant 0
  explicit Expr(double c);

  static Expr constant(double c) { return Expr(c); }
  static Expr var(int index);

  friend Expr operator+(const Expr& x, const Expr& y);
  friend Expr operator-(const Expr& x, const Expr& y);
  friend Expr operator*(const Expr& x, const Expr& y);
  friend Expr operator/(const Expr& x, const Expr& y);
  friend Expr operator-(const Expr& x);
  friend Expr pow(const Expr& x, int n);
  friend Expr sin(const Expr& x);
  friend Expr cos(const Expr& x);
  friend Expr exp(const Expr& x);

  Op op() const { return node_->op; }
  bool is_const() const { return node_->op == Op::Const; }
  bool is_zero() const { return is_const() && node_->value == 0.0; }
  bool is_one() const { return is_const() && node_->value == 1.0; }
  double const_value() const { return node_->value; }

  /// Exact partial derivative with respect to variable `index`.
  Expr diff(int index) const;

  /// Replaces variable i by replacements[i]. Variables beyond the list are kept.
  Expr substitute(std::span<const Expr> replacements) const;

  /// Slow tree-walking evaluation; use Program in hot loops.
  double eval(std::span<const double> vars) const;

  /// Largest variable index referenced, or -1.
  int max_var() const;

  /// True if the expression provably does not depend on any variable.
  bool is_constant_expr() const { return max_var() < 0; }

  std::string to_string(const std::function<std::string(int)>& name = {}) const;

  const Node* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, Expr a, Expr b = Expr(), int index = 0);

  std::shared_ptr<const Node> node_;
};

/// Flattened evaluation program for a batch of expressions; shared
/// subtrees are evaluated once.
class Program {
 public:
  Program() = default;
  explicit Program(std::span<const Expr> outputs);

  std::size_t num_outputs() const { return outputs_.size(); }

  /// Evaluates all outputs. Thread-safe: scratch storage is thread-local.
  void eval(std::span<const double> vars, std::span<double> out) const;

 private:
  struct Instr {
    Expr::Op op;
    int a = -1, b = -1;
    int index = 0;
    double value = 0.0;
  };
  std::vector<Instr> code_;
  std::vector<int> outputs_;
};

/// Parses the scenario expression grammar. `resolve` maps an identifier to a
/// variable index, or returns -1 for an unknown name.
Expr parse_expr(std::string_view text, const std::function<int(std::string_view)>& resolve);

/// Resolver for coordinates named `<prefix>1..<prefix>count`.
std::function<int(std::string_view)> indexed_names(char prefix, int count);

/// Numerical equality at 32 quasi-random points of [-1,1]^nvars.
bool numerically_equal(const Expr& a, const Expr& b, int nvars, double tol = 1e-10);

/// Halton point `i` in [0,1]^dim (bases are the first primes).
std::vector<double> halton_point(int i, int dim);

}  // namespace folia
