#include "jetsec/series.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace jetsec::series {

namespace {
double at(const Coeffs& a, int k) {
  return (k >= 0 && k < static_cast<int>(a.size())) ? a[std::size_t(k)] : 0.0;
}
}  // namespace

Coeffs mul(const Coeffs& a, const Coeffs& b, int n) {
  Coeffs out(std::size_t(n) + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    if (at(a, i) == 0.0) continue;
    for (int j = 0; i + j <= n; ++j) out[std::size_t(i + j)] += at(a, i) * at(b, j);
  }
  return out;
}

Coeffs recip(const Coeffs& a, int n) {
  if (a.empty() || a[0] == 0.0) throw std::domain_error("series::recip: constant term is zero");
  Coeffs out(std::size_t(n) + 1, 0.0);
  out[0] = 1.0 / a[0];
  // (a * out)[k] = 0 for k >= 1  =>  out[k] = -(sum_{j<k} a[k-j] out[j]) / a[0]
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += at(a, k - j) * out[std::size_t(j)];
    out[std::size_t(k)] = -s / a[0];
  }
  return out;
}

Coeffs div(const Coeffs& a, const Coeffs& b, int n) {
  if (b.empty() || b[0] == 0.0) throw std::domain_error("series::div: divisor constant term is zero");
  // Long division, not mul(a, recip(b)): keeps out[0] == a[0]/b[0] as the
  // exact double quotient, which value/jet consistency elsewhere relies on.
  Coeffs out(std::size_t(n) + 1, 0.0);
  for (int m = 0; m <= n; ++m) {
    double s = at(a, m);
    for (int j = 0; j < m; ++j) s -= at(b, m - j) * out[std::size_t(j)];
    out[std::size_t(m)] = s / b[0];
  }
  return out;
}

Coeffs compose(const Coeffs& outer, const Coeffs& inner, int n) {
  if (!inner.empty() && inner[0] != 0.0)
    throw std::domain_error("series::compose: inner constant term must vanish");
  // Horner on the truncated series: r = o_N; r = r*u + o_j.
  Coeffs r(std::size_t(n) + 1, 0.0);
  int top = static_cast<int>(outer.size()) - 1;
  if (top > n) top = n;
  if (top >= 0) r[0] = outer[std::size_t(top)];
  for (int j = top - 1; j >= 0; --j) {
    r = mul(r, inner, n);
    r[0] += outer[std::size_t(j)];
  }
  return r;
}

Coeffs revert(const Coeffs& f, int n) {
  if (f.size() < 2 || f[0] != 0.0 || f[1] == 0.0)
    throw std::domain_error("series::revert: need f[0] == 0 and f[1] != 0");
  Coeffs g(std::size_t(n) + 1, 0.0);
  if (n >= 1) g[1] = 1.0 / f[1];
  if (n <= 1) return g;
  // Each Newton step doubles the valid order, so ceil(log2 n)+1 full-order
  // sweeps are enough; n stays small (jet orders), so no staged truncation.
  int steps = 1;
  while ((1 << steps) < n + 1) ++steps;
  Coeffs fd(f.size() > 1 ? f.size() - 1 : 1, 0.0);  // f'
  for (std::size_t k = 1; k < f.size(); ++k) fd[k - 1] = f[k] * double(k);
  for (int it = 0; it <= steps; ++it) {
    Coeffs fg = compose(f, g, n);
    fg[1] -= 1.0;  // f(g(t)) - t
    Coeffs fdg = compose(fd, g, n);
    Coeffs corr = mul(fg, recip(fdg, n), n);
    for (int k = 0; k <= n; ++k) g[std::size_t(k)] -= corr[std::size_t(k)];
    g[0] = 0.0;
  }
  return g;
}

Coeffs exp(const Coeffs& a, int n) {
  Coeffs v(std::size_t(n) + 1, 0.0);
  v[0] = std::exp(at(a, 0));
  // v' = a' v  =>  n v_n = sum_{k=1..n} k a_k v_{n-k}
  for (int m = 1; m <= n; ++m) {
    double s = 0.0;
    for (int k = 1; k <= m; ++k) s += double(k) * at(a, k) * v[std::size_t(m - k)];
    v[std::size_t(m)] = s / double(m);
  }
  return v;
}

Coeffs tanh(const Coeffs& a, int n) {
  Coeffs t(std::size_t(n) + 1, 0.0), p(std::size_t(n) + 1, 0.0);
  t[0] = std::tanh(at(a, 0));
  p[0] = 1.0 - t[0] * t[0];  // p = 1 - t^2, maintained alongside t
  for (int m = 1; m <= n; ++m) {
    double s = 0.0;
    for (int k = 1; k <= m; ++k) s += double(k) * at(a, k) * p[std::size_t(m - k)];
    t[std::size_t(m)] = s / double(m);
    double q = 0.0;
    for (int j = 0; j <= m; ++j) q += t[std::size_t(j)] * t[std::size_t(m - j)];
    p[std::size_t(m)] = -q;
  }
  return t;
}

Coeffs atan(const Coeffs& a, int n) {
  Coeffs v(std::size_t(n) + 1, 0.0);
  v[0] = std::atan(at(a, 0));
  if (n == 0) return v;
  Coeffs da(std::size_t(n), 0.0);
  for (int k = 1; k <= n; ++k) da[std::size_t(k - 1)] = double(k) * at(a, k);
  Coeffs q = mul(a, a, n);
  q[0] += 1.0;
  Coeffs w = div(da, q, n - 1);  // (atan a)' = a' / (1 + a^2)
  for (int m = 1; m <= n; ++m) v[std::size_t(m)] = w[std::size_t(m - 1)] / double(m);
  return v;
}

Coeffs sinh(const Coeffs& a, int n) {
  Coeffs s(std::size_t(n) + 1, 0.0), c(std::size_t(n) + 1, 0.0);
  s[0] = std::sinh(at(a, 0));
  c[0] = std::cosh(at(a, 0));
  for (int m = 1; m <= n; ++m) {
    double ss = 0.0, cc = 0.0;
    for (int k = 1; k <= m; ++k) {
      ss += double(k) * at(a, k) * c[std::size_t(m - k)];
      cc += double(k) * at(a, k) * s[std::size_t(m - k)];
    }
    s[std::size_t(m)] = ss / double(m);
    c[std::size_t(m)] = cc / double(m);
  }
  return s;
}

Coeffs pow_int(const Coeffs& a, int k, int n) {
  if (k < 0) throw std::domain_error("series::pow_int: negative exponent");
  Coeffs out(std::size_t(n) + 1, 0.0);
  out[0] = 1.0;
  Coeffs base = a;
  base.resize(std::size_t(n) + 1, 0.0);
  while (k > 0) {
    if (k & 1) out = mul(out, base, n);
    k >>= 1;
    if (k > 0) base = mul(base, base, n);
  }
  return out;
}

}  // namespace jetsec::series
