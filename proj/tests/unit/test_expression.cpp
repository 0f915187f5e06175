// Expression mini-language: parsing, exact evaluation, exact derivatives.
#include "doctest.h"

#include <cmath>

#include "curveforge/expression.hpp"

using namespace curveforge;

TEST_CASE("parse and evaluate the documented forms") {
  const double x[1] = {0.7};

  Expression e1 = Expression::parse("1e-3*sin(x)*sin(t)", 1);
  CHECK(e1.eval(x, 0.3) == doctest::Approx(1e-3 * std::sin(0.7) * std::sin(0.3)).epsilon(1e-15));
  CHECK(e1.uses_time());

  Expression e2 = Expression::parse("0.1*cos(t)", 1);
  CHECK(e2.eval(x, 0.3) == doctest::Approx(0.1 * std::cos(0.3)).epsilon(1e-15));

  Expression e3 = Expression::parse("1+0.2*sin(x)", 1);
  CHECK(e3.eval(x) == doctest::Approx(1.0 + 0.2 * std::sin(0.7)).epsilon(1e-15));
  CHECK_FALSE(e3.uses_time());

  Expression e4 = Expression::parse("0.3*sin(2*x-0.5)*cos(3*t+1)", 1);
  CHECK(e4.eval(x, 0.2) ==
        doctest::Approx(0.3 * std::sin(2 * 0.7 - 0.5) * std::cos(3 * 0.2 + 1)).epsilon(1e-14));

  Expression e5 = Expression::parse("-(0.5*sin(x) - 0.25)", 1);
  CHECK(e5.eval(x) == doctest::Approx(-0.5 * std::sin(0.7) + 0.25).epsilon(1e-15));

  Expression z = Expression::parse("0", 1);
  CHECK(z.is_zero());
}

TEST_CASE("multi-variable expressions respect the dimension bound") {
  const double x[3] = {0.2, 0.4, 0.6};
  Expression e = Expression::parse("sin(x)*cos(y)*sin(z+0.1)", 3);
  CHECK(e.eval(x) ==
        doctest::Approx(std::sin(0.2) * std::cos(0.4) * std::sin(0.7)).epsilon(1e-14));
  CHECK_THROWS_AS(Expression::parse("sin(y)", 1), std::invalid_argument);
}

TEST_CASE("syntax errors are rejected") {
  CHECK_THROWS_AS(Expression::parse("sin(x", 1), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("tan(x)", 1), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("sin(x)+", 1), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("sin(2x)", 1), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("1/2", 1), std::invalid_argument);
}

TEST_CASE("derivatives are exact to rounding") {
  Expression u = Expression::parse("0.2*sin(x)*sin(t)", 1);
  Expression ux = u.derivative(0);
  Expression ut = u.derivative(kTimeVar);
  Expression utt = ut.derivative(kTimeVar);

  for (double xv : {0.0, 0.31, 2.9}) {
    const double x[1] = {xv};
    for (double t : {0.0, 0.5, 1.3}) {
      CHECK(ux.eval(x, t) == doctest::Approx(0.2 * std::cos(xv) * std::sin(t)).epsilon(1e-14));
      CHECK(ut.eval(x, t) == doctest::Approx(0.2 * std::sin(xv) * std::cos(t)).epsilon(1e-14));
      CHECK(utt.eval(x, t) == doctest::Approx(-0.2 * std::sin(xv) * std::sin(t)).epsilon(1e-14));
    }
  }

  // d/dx of a product with two x factors uses the product rule.
  Expression p = Expression::parse("sin(x)*cos(x)", 1);
  Expression px = p.derivative(0);
  const double x[1] = {0.4};
  CHECK(px.eval(x) == doctest::Approx(std::cos(0.8)).epsilon(1e-14));  // (sin cos)' = cos(2x)
}
