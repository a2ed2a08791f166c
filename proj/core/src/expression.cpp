#include "moreau/expression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "function_internal.hpp"

namespace moreau {

struct Expression::Node {
  enum class Kind { constant, variable, negate, add, sub, mul, div, pow, abs, sqrt, min, max, indicator };

  Kind kind = Kind::constant;
  double value = 0.0;
  int exponent = 0;
  /// Variable index; for indicators, kAllCoords means the whole box.
  std::size_t var = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::shared_ptr<const Node>> args;

  static constexpr std::size_t kAllCoords = std::numeric_limits<std::size_t>::max();
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = Node::Kind;

constexpr double kInf = std::numeric_limits<double>::infinity();

NodePtr make(Kind kind, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t dim) : text_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    skip_ws();
    std::string found = pos_ < text_.size() ? fmt::format("'{}'", text_[pos_]) : "end of input";
    throw ParseError(pos_, std::move(expected), found);
  }

  void expect(char c) {
    if (!accept(c)) fail({fmt::format("'{}'", c)});
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) {
        lhs = make(Kind::add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Kind::sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) {
        lhs = make(Kind::mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Kind::div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::negate, {unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    const bool negative = accept('-');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start || (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e'))) {
      pos_ = start;
      fail({"integer exponent"});
    }
    int exponent = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
    if (ec != std::errc()) {
      pos_ = start;
      fail({"integer exponent"});
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::pow;
    n->exponent = negative ? -exponent : exponent;
    n->args = {base};
    return n;
  }

  bool at_number_start() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t d = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - d;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) {
      pos_ = start;
      fail({"number"});
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = mark;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail({"finite number"});
    }
    return v;
  }

  double signed_number() {
    if (accept('-')) return -number();
    accept('+');
    return number();
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  /// Parses the digits after 'x'; returns the 0-based variable index.
  std::size_t variable_index(std::size_t ident_start) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) {
      if (dim_ == 1) return 0;
      throw ArityError(ident_start, 0, dim_);
    }
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, index);
    if (ec != std::errc() || index == 0 || index > dim_) throw ArityError(ident_start, index, dim_);
    return index - 1;
  }

  NodePtr primary() {
    if (at_number_start()) {
      auto n = std::make_shared<Node>();
      n->kind = Kind::constant;
      n->value = number();
      return n;
    }
    if (accept('(')) {
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    skip_ws();
    const std::size_t ident_start = pos_;
    const std::string name = identifier();
    if (name == "x") {
      auto n = std::make_shared<Node>();
      n->kind = Kind::variable;
      n->var = variable_index(ident_start);
      return n;
    }
    if (name == "abs" || name == "sqrt") {
      expect('(');
      NodePtr arg = expr();
      expect(')');
      return make(name == "abs" ? Kind::abs : Kind::sqrt, {arg});
    }
    if (name == "min" || name == "max") {
      expect('(');
      std::vector<NodePtr> args{expr()};
      expect(',');
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      expect(')');
      return make(name == "min" ? Kind::min : Kind::max, std::move(args));
    }
    if (name == "ind") return indicator();
    pos_ = ident_start;
    fail({"number", "variable", "'('", "'-'", "abs", "sqrt", "min", "max", "ind"});
  }

  NodePtr indicator() {
    expect('(');
    auto n = std::make_shared<Node>();
    n->kind = Kind::indicator;
    n->var = Node::kAllCoords;
    skip_ws();
    if (peek() == 'x') {
      const std::size_t ident_start = pos_;
      identifier();
      n->var = variable_index(ident_start);
      expect(',');
    }
    n->lo = signed_number();
    expect(',');
    n->hi = signed_number();
    expect(')');
    if (n->lo > n->hi) throw InvalidArgument(fmt::format("ind: empty interval [{}, {}]", n->lo, n->hi));
    return n;
  }

  std::string_view text_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

double eval_node(const Node& n, const Point& x) {
  switch (n.kind) {
    case Kind::constant:
      return n.value;
    case Kind::variable:
      return x[n.var];
    case Kind::negate:
      return -eval_node(*n.args[0], x);
    case Kind::add:
      return eval_node(*n.args[0], x) + eval_node(*n.args[1], x);
    case Kind::sub:
      return eval_node(*n.args[0], x) - eval_node(*n.args[1], x);
    case Kind::mul:
      return eval_node(*n.args[0], x) * eval_node(*n.args[1], x);
    case Kind::div:
      return eval_node(*n.args[0], x) / eval_node(*n.args[1], x);
    case Kind::pow: {
      const double b = eval_node(*n.args[0], x);
      if (n.exponent == 2) return b * b;
      return std::pow(b, n.exponent);
    }
    case Kind::abs:
      return std::abs(eval_node(*n.args[0], x));
    case Kind::sqrt: {
      const double v = eval_node(*n.args[0], x);
      return v < 0.0 ? kInf : std::sqrt(v);
    }
    case Kind::min: {
      double v = eval_node(*n.args[0], x);
      for (std::size_t i = 1; i < n.args.size(); ++i) v = std::min(v, eval_node(*n.args[i], x));
      return v;
    }
    case Kind::max: {
      double v = eval_node(*n.args[0], x);
      for (std::size_t i = 1; i < n.args.size(); ++i) v = std::max(v, eval_node(*n.args[i], x));
      return v;
    }
    case Kind::indicator: {
      if (n.var != Node::kAllCoords) return (x[n.var] >= n.lo && x[n.var] <= n.hi) ? 0.0 : kInf;
      for (double c : x) {
        if (c < n.lo || c > n.hi) return kInf;
      }
      return 0.0;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string print_node(const Node& n) {
  auto arg = [&](std::size_t i) { return print_node(*n.args[i]); };
  auto list = [&] {
    std::string s;
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i > 0) s += ",";
      s += arg(i);
    }
    return s;
  };
  switch (n.kind) {
    case Kind::constant:
      return n.value < 0.0 ? "(" + num(n.value) + ")" : num(n.value);
    case Kind::variable:
      return fmt::format("x{}", n.var + 1);
    case Kind::negate:
      return "(-" + arg(0) + ")";
    case Kind::add:
      return "(" + arg(0) + "+" + arg(1) + ")";
    case Kind::sub:
      return "(" + arg(0) + "-" + arg(1) + ")";
    case Kind::mul:
      return "(" + arg(0) + "*" + arg(1) + ")";
    case Kind::div:
      return "(" + arg(0) + "/" + arg(1) + ")";
    case Kind::pow:
      return "(" + arg(0) + ")^" + std::to_string(n.exponent);
    case Kind::abs:
      return "abs(" + arg(0) + ")";
    case Kind::sqrt:
      return "sqrt(" + arg(0) + ")";
    case Kind::min:
      return "min(" + list() + ")";
    case Kind::max:
      return "max(" + list() + ")";
    case Kind::indicator:
      if (n.var == Node::kAllCoords) return "ind(" + num(n.lo) + "," + num(n.hi) + ")";
      return fmt::format("ind(x{},{},{})", n.var + 1, num(n.lo), num(n.hi));
  }
  return {};
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::size_t dim) : root_(std::move(root)), dim_(dim) {}

Expression Expression::parse(std::string_view text, std::size_t dim) {
  if (dim == 0) throw InvalidArgument("expression dimension must be >= 1");
  Parser parser(text, dim);
  return Expression(parser.parse(), dim);
}

double Expression::eval(const Point& x) const {
  if (x.dim() != dim_) throw DimensionMismatch(dim_, x.dim());
  return eval_node(*root_, x);
}

std::string Expression::print() const { return print_node(*root_); }

FunctionSpec parse_function(std::string_view expr, std::size_t dim,
                            std::optional<ProxBoundCertificate> certificate) {
  Expression e = Expression::parse(expr, dim);
  FunctionSpec f;
  f.name = std::string(expr);
  f.dim = dim;
  f.expression = std::string(expr);
  f.evaluator = [e](const Point& x) -> ExtendedReal {
    const double v = e.eval(x);
    if (std::isnan(v) || v == -kInf) {
      throw InvalidValue(fmt::format("expression evaluates to {} at [{}]", v, format_point(x)));
    }
    return ExtendedReal(v);
  };
  const Point anchor = certificate ? certificate->anchor : Point::zeros(dim);
  if (anchor.dim() != dim) throw DimensionMismatch(dim, anchor.dim());
  detail::FeasibleFit fit = detail::fit_certificate_with_point(f.evaluator, dim, anchor);
  f.certificate = certificate ? *certificate : fit.certificate;
  f.feasible_point = fit.feasible_point;
  attach_certificate_cache(f);
  return f;
}

}  // namespace moreau
