// Tiny closed-under-differentiation expression language for field inputs.
//
// Grammar (whitespace ignored):
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := number | trig | '(' expr ')'
//   trig   := ('sin'|'cos') '(' [number '*'] var [('+'|'-') number] ')'
//   var    := 'x' | 'y' | 'z' | 't'
//
// Every expression normalizes to a sum of c * prod sin(a*v + b) terms
// (cos absorbed as a pi/2 phase), so derivatives of any order stay in the
// family and can be evaluated exactly — runs stay reproducible bit-for-bit.
#pragma once

#include <string>
#include <vector>

#include "curveforge/grid_field.hpp"

namespace curveforge {

// The time variable is axis kTimeVar; spatial axes are 0-based.
inline constexpr int kTimeVar = -1;

struct TrigFactor {
  int var = 0;     // kTimeVar or spatial axis index
  double a = 1.0;  // frequency
  double b = 0.0;  // phase; factor value is sin(a*v + b)
};

struct TrigTerm {
  double coef = 0.0;
  std::vector<TrigFactor> factors;
};

class Expression {
public:
  Expression() = default;

  // Throws std::invalid_argument on syntax errors or spatial variables
  // beyond max_spatial_dim.
  static Expression parse(const std::string& text, int max_spatial_dim);
  static Expression constant(double c);

  double eval(const double* x, double t = 0.0) const;
  Expression derivative(int var) const;  // exact d/dvar

  bool uses_time() const;
  bool is_zero() const { return terms_.empty(); }
  const std::vector<TrigTerm>& terms() const { return terms_; }

  GridField sample_at(const TorusGrid& g, double t = 0.0) const;
  SpaceTimeField sample_spacetime(const TorusGrid& g, const Eigen::VectorXd& nodes) const;

private:
  std::vector<TrigTerm> terms_;
};

}  // namespace curveforge
