#pragma once

// Immutable expression trees over z, the chart/homogeneous coordinates w0, w1, ...
// (x and y are accepted as aliases of w1 and w2), complex constants, + - * /,
// integer powers, exp and principal log. Evaluation runs on jets through a
// compiled instruction tape.
//
// Text grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | 'z' | 'i' | 'w' digits | 'x' | 'y'
//            | ('exp' | 'log') '(' expr ')' | '(' expr ')'

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdlab/errors.hpp"
#include "vdlab/jet.hpp"

namespace vdlab {

class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, std::size_t column, std::string token)
      : DomainError(what), column_(column), token_(std::move(token)) {}
  // 1-based column of the offending token.
  std::size_t column() const noexcept { return column_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t column_;
  std::string token_;
};

enum class Op { Constant, ImagUnit, VarZ, VarW, Add, Sub, Mul, Div, Neg, Pow, Exp, Log };

struct ExprNode {
  Op op = Op::Constant;
  cplx value{};      // Constant
  int index = 0;     // VarW coordinate index, Pow exponent
  std::shared_ptr<const ExprNode> lhs, rhs;
};

// Sparse multivariate polynomial; exponent slot 0 is z, slot k + 1 is w_k.
using Monomial = std::vector<int>;
using Polynomial = std::map<Monomial, cplx>;

class Tape;

class Expression {
 public:
  Expression();  // the constant 0
  explicit Expression(std::shared_ptr<const ExprNode> root);

  static Expression parse(std::string_view text);
  static Expression constant(cplx c);
  static Expression z();
  static Expression w(int k);

  std::string to_string() const;
  const ExprNode& root() const noexcept { return *root_; }
  const std::shared_ptr<const ExprNode>& root_ptr() const noexcept { return root_; }

  // Jet of the expression; variables not supplied evaluate as errors.
  Jet eval(const Jet& z, std::span<const Jet> w = {}) const;
  cplx value(cplx z, std::span<const cplx> w = {}) const;

  bool uses_z() const;
  // Largest w index referenced, or -1.
  int max_w_index() const;
  bool is_constant() const { return !uses_z() && max_w_index() < 0; }

  // Replace z and/or w_k by other expressions (composition).
  Expression substitute(const Expression* z_replacement, std::span<const Expression> w_replacements) const;

  // Expansion as a polynomial; nullopt if exp, log, or division by a
  // non-constant occurs.
  std::optional<Polynomial> as_polynomial() const;
  // Coefficients c_0..c_d of a polynomial in z alone.
  std::optional<std::vector<cplx>> as_polynomial_in_z() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression pow(const Expression& a, int n);
  friend Expression exp(const Expression& a);
  friend Expression log(const Expression& a);

  friend bool structurally_equal(const Expression& a, const Expression& b);

 private:
  std::shared_ptr<const ExprNode> root_;
  std::shared_ptr<const Tape> tape_;
};

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace vdlab
