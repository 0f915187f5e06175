#include "curveforge/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace curveforge {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  int max_dim;

  explicit Parser(const std::string& s, int dim) : text(s), max_dim(dim) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("expression: " + why + " at position " + std::to_string(pos) +
                                " in \"" + text + "\"");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool consume(char c) {
    if (!peek(c)) return false;
    ++pos;
    return true;
  }

  bool starts_number() {
    skip_ws();
    if (pos >= text.size()) return false;
    const char c = text[pos];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  double parse_number() {
    skip_ws();
    char* end = nullptr;
    const double v = std::strtod(text.c_str() + pos, &end);
    if (end == text.c_str() + pos) fail("expected a number");
    pos = static_cast<std::size_t>(end - text.c_str());
    return v;
  }

  int parse_var() {
    skip_ws();
    if (pos >= text.size()) fail("expected a variable");
    const char c = text[pos];
    int var;
    if (c == 't') {
      var = kTimeVar;
    } else if (c == 'x' || c == 'y' || c == 'z') {
      var = c - 'x';
      if (var >= max_dim) fail(std::string("variable '") + c + "' exceeds spatial dimension");
    } else {
      fail("expected one of x, y, z, t");
    }
    ++pos;
    return var;
  }

  // trig body: [number '*'] var [('+'|'-') number]
  TrigFactor parse_linear(bool is_cos) {
    TrigFactor f;
    if (starts_number() || peek('-')) {
      double sign = 1.0;
      while (consume('-')) sign = -sign;
      f.a = sign * parse_number();
      if (!consume('*')) fail("expected '*' between frequency and variable");
    }
    f.var = parse_var();
    skip_ws();
    if (consume('+')) {
      f.b = parse_number();
    } else if (consume('-')) {
      f.b = -parse_number();
    }
    if (is_cos) f.b += kHalfPi;
    return f;
  }

  std::vector<TrigTerm> parse_expr();

  std::vector<TrigTerm> parse_factor() {
    skip_ws();
    if (consume('(')) {
      auto inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (text.compare(pos, 4, "sin(") == 0 || text.compare(pos, 4, "cos(") == 0) {
      const bool is_cos = text[pos] == 'c';
      pos += 4;
      TrigTerm t;
      t.coef = 1.0;
      t.factors.push_back(parse_linear(is_cos));
      if (!consume(')')) fail("expected ')'");
      return {t};
    }
    if (starts_number()) {
      TrigTerm t;
      t.coef = parse_number();
      return {t};
    }
    fail("expected a number, sin(...), cos(...) or '('");
  }

  static std::vector<TrigTerm> multiply(const std::vector<TrigTerm>& lhs,
                                        const std::vector<TrigTerm>& rhs) {
    std::vector<TrigTerm> out;
    out.reserve(lhs.size() * rhs.size());
    for (const auto& a : lhs)
      for (const auto& b : rhs) {
        TrigTerm t;
        t.coef = a.coef * b.coef;
        t.factors = a.factors;
        t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
        out.push_back(std::move(t));
      }
    return out;
  }

  std::vector<TrigTerm> parse_term() {
    auto acc = parse_factor();
    while (consume('*')) acc = multiply(acc, parse_factor());
    return acc;
  }
};

std::vector<TrigTerm> Parser::parse_expr() {
  std::vector<TrigTerm> acc;
  double sign = consume('-') ? -1.0 : 1.0;
  while (true) {
    auto t = parse_term();
    for (auto& term : t) {
      term.coef *= sign;
      acc.push_back(std::move(term));
    }
    skip_ws();
    if (consume('+')) {
      sign = 1.0;
    } else if (consume('-')) {
      sign = -1.0;
    } else {
      break;
    }
  }
  return acc;
}

}  // namespace

Expression Expression::parse(const std::string& text, int max_spatial_dim) {
  Parser p(text, max_spatial_dim);
  Expression e;
  e.terms_ = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  // Drop exact zero terms (e.g. literal "0").
  std::vector<TrigTerm> kept;
  for (auto& t : e.terms_)
    if (t.coef != 0.0) kept.push_back(std::move(t));
  e.terms_ = std::move(kept);
  return e;
}

Expression Expression::constant(double c) {
  Expression e;
  if (c != 0.0) {
    TrigTerm t;
    t.coef = c;
    e.terms_.push_back(t);
  }
  return e;
}

double Expression::eval(const double* x, double t) const {
  double acc = 0.0;
  for (const auto& term : terms_) {
    double v = term.coef;
    for (const auto& f : term.factors) {
      const double arg = f.a * (f.var == kTimeVar ? t : x[f.var]) + f.b;
      v *= std::sin(arg);
    }
    acc += v;
  }
  return acc;
}

Expression Expression::derivative(int var) const {
  Expression out;
  for (const auto& term : terms_) {
    // Product rule: differentiate each matching factor in turn.
    for (std::size_t i = 0; i < term.factors.size(); ++i) {
      if (term.factors[i].var != var) continue;
      TrigTerm d = term;
      d.coef *= term.factors[i].a;
      d.factors[i].b += kHalfPi;  // sin' = cos
      if (d.coef != 0.0) out.terms_.push_back(std::move(d));
    }
  }
  return out;
}

bool Expression::uses_time() const {
  for (const auto& term : terms_)
    for (const auto& f : term.factors)
      if (f.var == kTimeVar) return true;
  return false;
}

GridField Expression::sample_at(const TorusGrid& g, double t) const {
  return sample(g, [&](const double* x) { return eval(x, t); });
}

SpaceTimeField Expression::sample_spacetime(const TorusGrid& g,
                                            const Eigen::VectorXd& nodes) const {
  return curveforge::sample_spacetime(g, nodes, [&](const double* x, double t) { return eval(x, t); });
}

}  // namespace curveforge
