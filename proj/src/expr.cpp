#include "folia/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace folia {

namespace {

std::shared_ptr<const Expr::Node> const_node(double c) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Expr::Op::Const;
  n->value = c;
  return n;
}

const std::shared_ptr<const Expr::Node>& zero_node() {
  static const auto z = const_node(0.0);
  return z;
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr::Expr(double c) : node_(c == 0.0 ? zero_node() : const_node(c)) {}

Expr Expr::var(int index) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->index = index;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make(Op op, Expr a, Expr b, int index) {
  switch (op) {
    case Op::Add:
      if (a.is_const() && b.is_const()) return Expr(a.const_value() + b.const_value());
      if (a.is_zero()) return b;
      if (b.is_zero()) return a;
      break;
    case Op::Mul:
      if (a.is_zero() || b.is_zero()) return Expr();
      if (a.is_const() && b.is_const()) return Expr(a.const_value() * b.const_value());
      if (a.is_one()) return b;
      if (b.is_one()) return a;
      if (a.is_const() && a.const_value() == -1.0) return make(Op::Neg, b);
      if (b.is_const() && b.const_value() == -1.0) return make(Op::Neg, a);
      break;
    case Op::Neg:
      if (a.is_const()) return Expr(-a.const_value());
      if (a.op() == Op::Neg) return Expr(a.node_->a);
      break;
    case Op::Pow:
      if (index == 0) return Expr(1.0);
      if (index == 1) return a;
      if (a.is_const()) return Expr(std::pow(a.const_value(), index));
      break;
    case Op::Sin:
      if (a.is_const()) return Expr(std::sin(a.const_value()));
      break;
    case Op::Cos:
      if (a.is_const()) return Expr(std::cos(a.const_value()));
      break;
    case Op::Exp:
      if (a.is_const()) return Expr(std::exp(a.const_value()));
      break;
    default:
      break;
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->index = index;
  n->a = a.node_;
  if (op == Op::Add || op == Op::Mul) n->b = b.node_;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr operator+(const Expr& x, const Expr& y) { return Expr::make(Expr::Op::Add, x, y); }
Expr operator-(const Expr& x) { return Expr::make(Expr::Op::Neg, x); }
Expr operator-(const Expr& x, const Expr& y) { return x + (-y); }
Expr operator*(const Expr& x, const Expr& y) { return Expr::make(Expr::Op::Mul, x, y); }
Expr operator/(const Expr& x, const Expr& y) {
  if (y.is_zero()) throw ConfigError("division by the constant 0");
  if (y.is_const()) return x * Expr(1.0 / y.const_value());
  return x * pow(y, -1);
}
Expr pow(const Expr& x, int n) {
  if (x.is_zero() && n < 0) throw ConfigError("negative power of the constant 0");
  if (x.is_zero() && n > 0) return Expr();
  return Expr::make(Expr::Op::Pow, x, Expr(), n);
}
Expr sin(const Expr& x) { return Expr::make(Expr::Op::Sin, x); }
Expr cos(const Expr& x) { return Expr::make(Expr::Op::Cos, x); }
Expr exp(const Expr& x) { return Expr::make(Expr::Op::Exp, x); }

Expr Expr::diff(int index) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const:
      return Expr();
    case Op::Var:
      return Expr(n.index == index ? 1.0 : 0.0);
    case Op::Add:
      return Expr(n.a).diff(index) + Expr(n.b).diff(index);
    case Op::Mul: {
      Expr a(n.a), b(n.b);
      return a.diff(index) * b + a * b.diff(index);
    }
    case Op::Neg:
      return -Expr(n.a).diff(index);
    case Op::Pow: {
      Expr a(n.a);
      Expr da = a.diff(index);
      if (da.is_zero()) return Expr();
      return Expr(static_cast<double>(n.index)) * pow(a, n.index - 1) * da;
    }
    case Op::Sin: {
      Expr a(n.a);
      return cos(a) * a.diff(index);
    }
    case Op::Cos: {
      Expr a(n.a);
      return -(sin(a) * a.diff(index));
    }
    case Op::Exp:
      return *this * Expr(n.a).diff(index);
  }
  return Expr();
}

Expr Expr::substitute(std::span<const Expr> repl) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const:
      return *this;
    case Op::Var:
      return n.index < static_cast<int>(repl.size()) ? repl[n.index] : *this;
    case Op::Add:
      return Expr(n.a).substitute(repl) + Expr(n.b).substitute(repl);
    case Op::Mul:
      return Expr(n.a).substitute(repl) * Expr(n.b).substitute(repl);
    case Op::Neg:
      return -Expr(n.a).substitute(repl);
    case Op::Pow:
      return pow(Expr(n.a).substitute(repl), n.index);
    case Op::Sin:
      return sin(Expr(n.a).substitute(repl));
    case Op::Cos:
      return cos(Expr(n.a).substitute(repl));
    case Op::Exp:
      return exp(Expr(n.a).substitute(repl));
  }
  return *this;
}

double Expr::eval(std::span<const double> vars) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Var:
      return vars[n.index];
    case Op::Add:
      return Expr(n.a).eval(vars) + Expr(n.b).eval(vars);
    case Op::Mul:
      return Expr(n.a).eval(vars) * Expr(n.b).eval(vars);
    case Op::Neg:
      return -Expr(n.a).eval(vars);
    case Op::Pow:
      return std::pow(Expr(n.a).eval(vars), n.index);
    case Op::Sin:
      return std::sin(Expr(n.a).eval(vars));
    case Op::Cos:
      return std::cos(Expr(n.a).eval(vars));
    case Op::Exp:
      return std::exp(Expr(n.a).eval(vars));
  }
  return 0.0;
}

int Expr::max_var() const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const:
      return -1;
    case Op::Var:
      return n.index;
    case Op::Add:
    case Op::Mul:
      return std::max(Expr(n.a).max_var(), Expr(n.b).max_var());
    default:
      return Expr(n.a).max_var();
  }
}

std::string Expr::to_string(const std::function<std::string(int)>& name) const {
  const Node& n = *node_;
  auto sub = [&](const std::shared_ptr<const Node>& c) { return Expr(c).to_string(name); };
  std::ostringstream os;
  switch (n.op) {
    case Op::Const:
      os << n.value;
      break;
    case Op::Var:
      if (name)
        os << name(n.index);
      else
        os << "v" << n.index;
      break;
    case Op::Add:
      os << "(" << sub(n.a) << "+" << sub(n.b) << ")";
      break;
    case Op::Mul:
      os << sub(n.a) << "*" << sub(n.b);
      break;
    case Op::Neg:
      os << "(-" << sub(n.a) << ")";
      break;
    case Op::Pow:
      os << "(" << sub(n.a) << ")^" << n.index;
      break;
    case Op::Sin:
      os << "sin(" << sub(n.a) << ")";
      break;
    case Op::Cos:
      os << "cos(" << sub(n.a) << ")";
      break;
    case Op::Exp:
      os << "exp(" << sub(n.a) << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

Program::Program(std::span<const Expr> outputs) {
  std::unordered_map<const Expr::Node*, int> seen;
  std::function<int(const Expr::Node*)> emit = [&](const Expr::Node* n) -> int {
    if (auto it = seen.find(n); it != seen.end()) return it->second;
    Instr in;
    in.op = n->op;
    in.value = n->value;
    in.index = n->index;
    if (n->a) in.a = emit(n->a.get());
    if (n->b) in.b = emit(n->b.get());
    code_.push_back(in);
    int reg = static_cast<int>(code_.size()) - 1;
    seen.emplace(n, reg);
    return reg;
  };
  outputs_.reserve(outputs.size());
  for (const Expr& e : outputs) outputs_.push_back(emit(e.node()));
}

void Program::eval(std::span<const double> vars, std::span<double> out) const {
  thread_local std::vector<double> reg;
  reg.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Expr::Op::Const:
        reg[i] = in.value;
        break;
      case Expr::Op::Var:
        reg[i] = vars[in.index];
        break;
      case Expr::Op::Add:
        reg[i] = reg[in.a] + reg[in.b];
        break;
      case Expr::Op::Mul:
        reg[i] = reg[in.a] * reg[in.b];
        break;
      case Expr::Op::Neg:
        reg[i] = -reg[in.a];
        break;
      case Expr::Op::Pow: {
        double x = reg[in.a];
        int n = in.index;
        if (n == 2)
          reg[i] = x * x;
        else if (n == 3)
          reg[i] = x * x * x;
        else
          reg[i] = std::pow(x, n);
        break;
      }
      case Expr::Op::Sin:
        reg[i] = std::sin(reg[in.a]);
        break;
      case Expr::Op::Cos:
        reg[i] = std::cos(reg[in.a]);
        break;
      case Expr::Op::Exp:
        reg[i] = std::exp(reg[in.a]);
        break;
    }
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = reg[outputs_[k]];
}

// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::function<int(std::string_view)>& resolve)
      : s_(text), resolve_(resolve) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression '" + std::string(s_) + "' at column " +
                      std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (accept('+'))
        e = e + product();
      else if (accept('-'))
        e = e - product();
      else
        return e;
    }
  }

  Expr product() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = e * unary();
      else if (accept('/'))
        e = e / unary();
      else
        return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      bool neg = accept('-');
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      int n = std::stoi(std::string(s_.substr(start, pos_ - start)));
      return pow(base, neg ? -n : n);
    }
    return base;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      return Expr(std::stod(std::string(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string_view ident = s_.substr(start, pos_ - start);
      if (ident == "sin" || ident == "cos" || ident == "exp") {
        if (!accept('(')) fail("expected '(' after " + std::string(ident));
        Expr arg = sum();
        if (!accept(')')) fail("expected ')'");
        if (ident == "sin") return sin(arg);
        if (ident == "cos") return cos(arg);
        return exp(arg);
      }
      int idx = resolve_ ? resolve_(ident) : -1;
      if (idx < 0) throw ConfigError("unknown coordinate " + std::string(ident));
      return Expr::var(idx);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  const std::function<int(std::string_view)>& resolve_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const std::function<int(std::string_view)>& resolve) {
  return Parser(text, resolve).parse();
}

std::function<int(std::string_view)> indexed_names(char prefix, int count) {
  return [prefix, count](std::string_view name) -> int {
    if (name.size() < 2 || name[0] != prefix) return -1;
    int v = 0;
    for (char c : name.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
      v = v * 10 + (c - '0');
      if (v > 1000) return -1;
    }
    if (name[1] == '0' || v < 1 || v > count) return -1;
    return v - 1;
  };
}

std::vector<double> halton_point(int i, int dim) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  std::vector<double> p(dim);
  for (int d = 0; d < dim; ++d) {
    int base = primes[d % 16];
    double f = 1.0, r = 0.0;
    int n = i + 1;
    while (n > 0) {
      f /= base;
      r += f * (n % base);
      n /= base;
    }
    p[d] = r;
  }
  return p;
}

bool numerically_equal(const Expr& a, const Expr& b, int nvars, double tol) {
  Expr diff = a - b;
  if (diff.is_zero()) return true;
  int dim = std::max(nvars, 1);
  for (int i = 0; i < 32; ++i) {
    auto p = halton_point(i, dim);
    for (double& x : p) x = 2.0 * x - 1.0;
    double va = a.eval(p), vb = b.eval(p);
    if (std::abs(va - vb) > tol * std::max(1.0, std::max(std::abs(va), std::abs(vb)))) return false;
  }
  return true;
}

}  // namespace folia
