#pragma once

#include <vector>

namespace jetsec::series {

// Truncated power series in one variable.  A Coeffs of size N+1 holds the
// Taylor coefficients a_0..a_N (derivative/k!).  Every routine truncates its
// result to the requested order; no routine inspects entries past its input's
// size.

using Coeffs = std::vector<double>;

// (a*b) truncated to order n.
Coeffs mul(const Coeffs& a, const Coeffs& b, int n);

// 1/a truncated to order n; requires a[0] != 0.
Coeffs recip(const Coeffs& a, int n);

// a/b truncated to order n; requires b[0] != 0.
Coeffs div(const Coeffs& a, const Coeffs& b, int n);

// outer(inner) truncated to order n; requires inner[0] == 0.
Coeffs compose(const Coeffs& outer, const Coeffs& inner, int n);

// Compositional inverse g with f(g(t)) = t, truncated to order n.
// Requires f[0] == 0 and f[1] != 0.  Newton iteration on truncated series:
// g <- g - (f(g) - t)/f'(g), which doubles the number of correct
// coefficients per step.
Coeffs revert(const Coeffs& f, int n);

// Elementary functions of a series (coefficients of fn(u(t)) where u = a).
Coeffs exp(const Coeffs& a, int n);
Coeffs tanh(const Coeffs& a, int n);
Coeffs atan(const Coeffs& a, int n);
Coeffs sinh(const Coeffs& a, int n);

// a^k for integer k >= 0, truncated to order n.
Coeffs pow_int(const Coeffs& a, int k, int n);

}  // namespace jetsec::series
