#include "vdlab/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <system_error>

namespace vdlab {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return {buf, end};
}

// ---------------------------------------------------------------------------
// Tape: post-order instruction list; register i holds the value of instr i.

struct Instr {
  Op op;
  cplx value{};
  int index = 0;
  int a = -1, b = -1;
  const ExprNode* node = nullptr;
};

class Tape {
 public:
  explicit Tape(const std::shared_ptr<const ExprNode>& root) : root_(root) { emit(*root); }

  Jet eval(const Jet& z, std::span<const Jet> w) const {
    const int order = z.order();
    std::vector<Jet> reg;
    reg.reserve(code_.size());
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::Constant: reg.emplace_back(in.value, order); break;
        case Op::ImagUnit: reg.emplace_back(cplx(0.0, 1.0), order); break;
        case Op::VarZ: reg.push_back(z); break;
        case Op::VarW:
          if (in.index >= static_cast<int>(w.size()))
            throw DomainError("expression references w" + std::to_string(in.index) + " but it was not supplied");
          reg.push_back(w[static_cast<std::size_t>(in.index)]);
          break;
        case Op::Add: reg.push_back(reg[in.a] + reg[in.b]); break;
        case Op::Sub: reg.push_back(reg[in.a] - reg[in.b]); break;
        case Op::Mul: reg.push_back(reg[in.a] * reg[in.b]); break;
        case Op::Neg: reg.push_back(-reg[in.a]); break;
        case Op::Pow:
          if (in.index < 0 && std::abs(reg[in.a].value()) < kSingularTolerance) singular(in, "negative power of zero");
          reg.push_back(pow(reg[in.a], in.index));
          break;
        case Op::Exp: reg.push_back(exp(reg[in.a])); break;
        case Op::Div:
          if (std::abs(reg[in.b].value()) < kSingularTolerance) singular(in, "division by zero");
          reg.push_back(reg[in.a] / reg[in.b]);
          break;
        case Op::Log:
          if (std::abs(reg[in.a].value()) < kSingularTolerance) singular(in, "log of zero");
          reg.push_back(log(reg[in.a]));
          break;
      }
    }
    return reg.back();
  }

 private:
  [[noreturn]] void singular(const Instr& in, const char* what) const {
    std::shared_ptr<const ExprNode> alias(root_, in.node);
    std::string sub = Expression(alias).to_string();
    throw SingularPointError(std::string("singular evaluation: ") + what + " in " + sub, sub);
  }

  int emit(const ExprNode& n) {
    Instr in{n.op, n.value, n.index, -1, -1, &n};
    if (n.lhs) in.a = emit(*n.lhs);
    if (n.rhs) in.b = emit(*n.rhs);
    code_.push_back(in);
    return static_cast<int>(code_.size()) - 1;
  }

  std::shared_ptr<const ExprNode> root_;
  std::vector<Instr> code_;
};

// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<const ExprNode> make(Op op, std::shared_ptr<const ExprNode> a = nullptr,
                                     std::shared_ptr<const ExprNode> b = nullptr, int index = 0, cplx value = {}) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  n->index = index;
  n->value = value;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  std::shared_ptr<const ExprNode> run() {
    skip();
    if (pos_ >= s_.size()) fail("empty expression");
    auto e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected token");
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string token_at(std::size_t p) const {
    if (p >= s_.size()) return "<end>";
    std::size_t q = p + 1;
    if (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '.') {
      while (q < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[q])) || s_[q] == '.')) ++q;
    }
    return std::string(s_.substr(p, q - p));
  }

  [[noreturn]] void fail(const std::string& what) const {
    const std::string tok = token_at(pos_);
    throw ParseError("parse error at column " + std::to_string(pos_ + 1) + " near '" + tok + "': " + what, pos_ + 1,
                     tok);
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::shared_ptr<const ExprNode> expr() {
    auto lhs = term();
    while (true) {
      if (accept('+'))
        lhs = make(Op::Add, lhs, term());
      else if (accept('-'))
        lhs = make(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  std::shared_ptr<const ExprNode> term() {
    auto lhs = unary();
    while (true) {
      if (accept('*'))
        lhs = make(Op::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  std::shared_ptr<const ExprNode> unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  std::shared_ptr<const ExprNode> power() {
    auto base = primary();
    if (accept('^')) {
      skip();
      bool neg = false;
      if (pos_ < s_.size() && s_[pos_] == '-') {
        neg = true;
        ++pos_;
      }
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("integer exponent expected");
      int k = 0;
      auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, k);
      if (ec != std::errc{}) {
        pos_ = start;
        fail("exponent out of range");
      }
      base = make(Op::Pow, base, nullptr, neg ? -k : k);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '^') fail("chained exponent; parenthesize the base");
    }
    return base;
  }

  std::shared_ptr<const ExprNode> primary() {
    skip();
    if (pos_ >= s_.size()) fail("operand expected");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!accept(')')) fail("')' expected");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view word = s_.substr(start, pos_ - start);
      if (word == "z") return make(Op::VarZ);
      if (word == "i") return make(Op::ImagUnit);
      if (word == "x") return make(Op::VarW, nullptr, nullptr, 1);
      if (word == "y") return make(Op::VarW, nullptr, nullptr, 2);
      if (word == "exp" || word == "log") {
        if (!accept('(')) fail("'(' expected after function name");
        auto arg = expr();
        if (!accept(')')) fail("')' expected");
        return make(word == "exp" ? Op::Exp : Op::Log, arg);
      }
      if (word.size() >= 2 && word[0] == 'w' &&
          std::all_of(word.begin() + 1, word.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        int k = 0;
        std::from_chars(word.data() + 1, word.data() + word.size(), k);
        return make(Op::VarW, nullptr, nullptr, k);
      }
      pos_ = start;
      fail("unknown identifier");
    }
    fail("unexpected character");
  }

  std::shared_ptr<const ExprNode> number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc{} || p != s_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("malformed number");
    }
    return make(Op::Constant, nullptr, nullptr, 0, cplx(v, 0.0));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// Binding strength: 1 sum, 2 product, 3 unary, 5 primary.
int level(const ExprNode& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Constant: return (n.value.imag() != 0.0 || std::signbit(n.value.real())) ? 1 : 5;
    default: return 5;
  }
}

void print(const ExprNode& n, int min_level, std::string& out) {
  const bool paren = level(n) < min_level;
  if (paren) out += '(';
  switch (n.op) {
    case Op::Constant:
      if (n.value.imag() == 0.0) {
        out += format_double(n.value.real());
      } else {
        out += format_double(n.value.real());
        out += '+';
        out += format_double(n.value.imag());
        out += "*i";
      }
      break;
    case Op::ImagUnit: out += 'i'; break;
    case Op::VarZ: out += 'z'; break;
    case Op::VarW: out += 'w' + std::to_string(n.index); break;
    case Op::Add:
      print(*n.lhs, 1, out);
      out += '+';
      print(*n.rhs, 2, out);
      break;
    case Op::Sub:
      print(*n.lhs, 1, out);
      out += '-';
      print(*n.rhs, 2, out);
      break;
    case Op::Mul:
      print(*n.lhs, 2, out);
      out += '*';
      print(*n.rhs, 3, out);
      break;
    case Op::Div:
      print(*n.lhs, 2, out);
      out += '/';
      print(*n.rhs, 3, out);
      break;
    case Op::Neg:
      out += '-';
      print(*n.lhs, 3, out);
      break;
    case Op::Pow:
      print(*n.lhs, 5, out);
      out += '^';
      out += std::to_string(n.index);
      break;
    case Op::Exp:
    case Op::Log:
      out += n.op == Op::Exp ? "exp(" : "log(";
      print(*n.lhs, 1, out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

bool uses(const ExprNode& n, const std::function<bool(const ExprNode&)>& pred) {
  if (pred(n)) return true;
  return (n.lhs && uses(*n.lhs, pred)) || (n.rhs && uses(*n.rhs, pred));
}

int max_w(const ExprNode& n) {
  int m = n.op == Op::VarW ? n.index : -1;
  if (n.lhs) m = std::max(m, max_w(*n.lhs));
  if (n.rhs) m = std::max(m, max_w(*n.rhs));
  return m;
}

std::shared_ptr<const ExprNode> subst(const std::shared_ptr<const ExprNode>& n, const Expression* z_rep,
                                      std::span<const Expression> w_rep) {
  if (n->op == Op::VarZ && z_rep) return z_rep->root_ptr();
  if (n->op == Op::VarW && n->index < static_cast<int>(w_rep.size()))
    return w_rep[static_cast<std::size_t>(n->index)].root_ptr();
  if (!n->lhs) return n;
  auto a = subst(n->lhs, z_rep, w_rep);
  auto b = n->rhs ? subst(n->rhs, z_rep, w_rep) : nullptr;
  if (a == n->lhs && b == n->rhs) return n;
  return make(n->op, a, b, n->index, n->value);
}

// --- polynomial arithmetic ---------------------------------------------------

void poly_trim(Polynomial& p) {
  for (auto it = p.begin(); it != p.end();) {
    if (it->second == cplx(0.0, 0.0))
      it = p.erase(it);
    else
      ++it;
  }
}

Monomial add_exponents(const Monomial& a, const Monomial& b) {
  Monomial r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  while (!r.empty() && r.back() == 0) r.pop_back();
  return r;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) r[add_exponents(ma, mb)] += ca * cb;
  poly_trim(r);
  return r;
}

Polynomial poly_add(Polynomial a, const Polynomial& b, double sign) {
  for (const auto& [m, c] : b) a[m] += sign * c;
  poly_trim(a);
  return a;
}

std::optional<Polynomial> expand(const ExprNode& n) {
  auto unit = [](int slot) {
    Monomial m(static_cast<std::size_t>(slot + 1), 0);
    m[static_cast<std::size_t>(slot)] = 1;
    return Polynomial{{m, cplx(1.0)}};
  };
  switch (n.op) {
    case Op::Constant: {
      Polynomial p{{Monomial{}, n.value}};
      poly_trim(p);
      return p;
    }
    case Op::ImagUnit: return Polynomial{{Monomial{}, cplx(0.0, 1.0)}};
    case Op::VarZ: return unit(0);
    case Op::VarW: return unit(n.index + 1);
    case Op::Add:
    case Op::Sub: {
      auto a = expand(*n.lhs), b = expand(*n.rhs);
      if (!a || !b) return std::nullopt;
      return poly_add(std::move(*a), *b, n.op == Op::Add ? 1.0 : -1.0);
    }
    case Op::Mul: {
      auto a = expand(*n.lhs), b = expand(*n.rhs);
      if (!a || !b) return std::nullopt;
      return poly_mul(*a, *b);
    }
    case Op::Div: {
      auto a = expand(*n.lhs), b = expand(*n.rhs);
      if (!a || !b) return std::nullopt;
      if (b->size() != 1 || !b->begin()->first.empty()) return std::nullopt;
      const cplx d = b->begin()->second;
      for (auto& [m, c] : *a) c /= d;
      return a;
    }
    case Op::Neg: {
      auto a = expand(*n.lhs);
      if (!a) return std::nullopt;
      for (auto& [m, c] : *a) c = -c;
      return a;
    }
    case Op::Pow: {
      if (n.index < 0) return std::nullopt;
      auto a = expand(*n.lhs);
      if (!a) return std::nullopt;
      Polynomial r{{Monomial{}, cplx(1.0)}};
      for (int k = 0; k < n.index; ++k) r = poly_mul(r, *a);
      return r;
    }
    case Op::Exp:
    case Op::Log: return std::nullopt;
  }
  return std::nullopt;
}

bool same(const ExprNode& a, const ExprNode& b) {
  if (a.op != b.op || a.index != b.index) return false;
  if (a.op == Op::Constant && a.value != b.value) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) || static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs))
    return false;
  return (!a.lhs || same(*a.lhs, *b.lhs)) && (!a.rhs || same(*a.rhs, *b.rhs));
}

}  // namespace

// ---------------------------------------------------------------------------

Expression::Expression() : Expression(make(Op::Constant)) {}

Expression::Expression(std::shared_ptr<const ExprNode> root)
    : root_(std::move(root)), tape_(std::make_shared<const Tape>(root_)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).run()); }
Expression Expression::constant(cplx c) { return Expression(make(Op::Constant, nullptr, nullptr, 0, c)); }
Expression Expression::z() { return Expression(make(Op::VarZ)); }
Expression Expression::w(int k) { return Expression(make(Op::VarW, nullptr, nullptr, k)); }

std::string Expression::to_string() const {
  std::string out;
  print(*root_, 1, out);
  return out;
}

Jet Expression::eval(const Jet& z, std::span<const Jet> w) const { return tape_->eval(z, w); }

cplx Expression::value(cplx z, std::span<const cplx> w) const {
  std::vector<Jet> wj;
  wj.reserve(w.size());
  for (cplx v : w) wj.emplace_back(v, 0);
  return tape_->eval(Jet(z, 0), wj).value();
}

bool Expression::uses_z() const {
  return uses(*root_, [](const ExprNode& n) { return n.op == Op::VarZ; });
}

int Expression::max_w_index() const { return max_w(*root_); }

Expression Expression::substitute(const Expression* z_replacement, std::span<const Expression> w_replacements) const {
  return Expression(subst(root_, z_replacement, w_replacements));
}

std::optional<Polynomial> Expression::as_polynomial() const { return expand(*root_); }

std::optional<std::vector<cplx>> Expression::as_polynomial_in_z() const {
  if (max_w_index() >= 0) return std::nullopt;
  auto p = as_polynomial();
  if (!p) return std::nullopt;
  int degree = 0;
  for (const auto& [m, c] : *p) degree = std::max(degree, m.empty() ? 0 : m[0]);
  std::vector<cplx> coeffs(static_cast<std::size_t>(degree + 1), 0.0);
  for (const auto& [m, c] : *p) coeffs[m.empty() ? 0 : static_cast<std::size_t>(m[0])] += c;
  return coeffs;
}

Expression operator+(const Expression& a, const Expression& b) { return Expression(make(Op::Add, a.root_, b.root_)); }
Expression operator-(const Expression& a, const Expression& b) { return Expression(make(Op::Sub, a.root_, b.root_)); }
Expression operator*(const Expression& a, const Expression& b) { return Expression(make(Op::Mul, a.root_, b.root_)); }
Expression operator/(const Expression& a, const Expression& b) { return Expression(make(Op::Div, a.root_, b.root_)); }
Expression operator-(const Expression& a) { return Expression(make(Op::Neg, a.root_)); }
Expression pow(const Expression& a, int n) { return Expression(make(Op::Pow, a.root_, nullptr, n)); }
Expression exp(const Expression& a) { return Expression(make(Op::Exp, a.root_)); }
Expression log(const Expression& a) { return Expression(make(Op::Log, a.root_)); }

bool structurally_equal(const Expression& a, const Expression& b) { return same(*a.root_, *b.root_); }

}  // namespace vdlab
