#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "moreau/function.hpp"

namespace moreau {

// Grammar (whitespace-insensitive):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | variable | '(' expr ')' | call
//   call    := ('abs' | 'sqrt') '(' expr ')'
//            | ('min' | 'max') '(' expr (',' expr)+ ')'
//            | 'ind' '(' number ',' number ')'
//            | 'ind' '(' variable ',' number ',' number ')'
//   variable:= 'x' digits   (x1..xn; plain 'x' is x1 when n == 1)
//
// ind(a,b) is 0 on the closed box [a,b]^n and +infinity elsewhere.

class Expression {
 public:
  struct Node;

  /// Parses `text` for functions on R^dim. Throws ParseError or ArityError.
  static Expression parse(std::string_view text, std::size_t dim);

  double eval(const Point& x) const;
  std::size_t dim() const { return dim_; }

  /// Fully parenthesized text in the same grammar; parse(print()) evaluates
  /// identically.
  std::string print() const;

 private:
  Expression(std::shared_ptr<const Node> root, std::size_t dim);

  std::shared_ptr<const Node> root_;
  std::size_t dim_;
};

/// Builds a FunctionSpec from an expression. Without a certificate, one is
/// fitted by sampling and flagged unverified.
FunctionSpec parse_function(std::string_view expr, std::size_t dim,
                            std::optional<ProxBoundCertificate> certificate = std::nullopt);

}  // namespace moreau
