#include "jetsec/bump.hpp"

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "jetsec/errors.hpp"
#include "jetsec/series.hpp"

namespace jetsec {

namespace {

// Coefficient table for p_k with e^(k)(x) = p_k(1/x) e(x):
// p_0 = 1, p_{k+1}(t) = t^2 (p_k(t) - p_k'(t)).  Integer coefficients, exact
// in double for every order used here.
const std::vector<double>& flat_exp_poly(int k) {
  static std::mutex mu;
  static std::vector<std::vector<double>> cache{{1.0}};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= k) {
    const std::vector<double>& p = cache.back();
    std::vector<double> next(p.size() + 2, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i + 2] += p[i];                              // t^2 * p
      if (i >= 1) next[i + 1] -= double(i) * p[i];      // -t^2 * p'
    }
    cache.push_back(std::move(next));
  }
  return cache[std::size_t(k)];
}

double horner(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

}  // namespace

double flat_exp(double x) {
  if (x <= 0.0) return 0.0;
  return std::exp(-1.0 / x);
}

double flat_exp_deriv(double x, int k) {
  if (k < 0) throw validation_error("flat_exp_deriv: negative order");
  if (x <= 0.0) return 0.0;
  if (k == 0) return flat_exp(x);
  // Below this the polynomial factor can overflow while exp underflows, and
  // inf * 0 is NaN; the true value is far below the double floor anyway.
  if (x < 1e-3 / double(k + 1)) return 0.0;
  double e = std::exp(-1.0 / x);
  if (e == 0.0) return 0.0;
  return horner(flat_exp_poly(k), 1.0 / x) * e;
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double u = flat_exp(t);
  double v = flat_exp(1.0 - t);
  return u / (u + v);
}

Jet smooth_step_jet(double t, int order) {
  std::vector<double> d(std::size_t(order) + 1, 0.0);
  if (t <= 0.0) return Jet(t, std::move(d));
  if (t >= 1.0) {
    d[0] = 1.0;
    return Jet(t, std::move(d));
  }
  // u = e(t), v = e(1-t); step = u/(u+v).  Work in Taylor-coefficient space.
  series::Coeffs u(std::size_t(order) + 1), w(std::size_t(order) + 1);
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 1) fact *= double(k);
    double uk = flat_exp_deriv(t, k);
    double vk = (k % 2 == 0 ? 1.0 : -1.0) * flat_exp_deriv(1.0 - t, k);
    u[std::size_t(k)] = uk / fact;
    w[std::size_t(k)] = (uk + vk) / fact;
  }
  series::Coeffs q = series::div(u, w, order);
  return Jet::from_taylor(t, q);
}

double gamma_eval(double x) {
  double ax = std::fabs(x);
  if (ax >= 1.0) return 0.0;
  if (ax <= 0.5) return 1.0;
  return smooth_step(2.0 - 2.0 * ax);
}

Jet gamma_jet(double x, int order) {
  double ax = std::fabs(x);
  std::vector<double> d(std::size_t(order) + 1, 0.0);
  if (ax >= 1.0) return Jet(x, std::move(d));
  if (ax <= 0.5) {
    d[0] = 1.0;
    return Jet(x, std::move(d));
  }
  // gamma(x) = step(2 - 2|x|); the |x| kink is inert because gamma is flat
  // near 0.  gamma^(k)(x) = (-2)^k step^(k)(2-2x) for x > 0, and derivatives
  // at -x flip sign on odd orders.
  Jet s = smooth_step_jet(2.0 - 2.0 * ax, order);
  double scale = 1.0;
  for (int k = 0; k <= order; ++k) {
    d[std::size_t(k)] = scale * s[k];
    scale *= -2.0;
  }
  if (x < 0.0)
    for (int k = 1; k <= order; k += 2) d[std::size_t(k)] = -d[std::size_t(k)];
  return Jet(x, std::move(d));
}

double alpha_eval(double x) { return smooth_step(3.0 * x - 1.0); }

Jet alpha_jet(double x, int order) {
  Jet s = smooth_step_jet(3.0 * x - 1.0, order);
  std::vector<double> d(std::size_t(order) + 1);
  double scale = 1.0;
  for (int k = 0; k <= order; ++k) {
    d[std::size_t(k)] = scale * s[k];
    scale *= 3.0;
  }
  return Jet(x, std::move(d));
}

double beta_eval(double x) { return 1.0 / 3.0 + (1.0 + std::tanh(x)) / 12.0; }

Jet beta_jet(double x, int order) {
  series::Coeffs ident(std::size_t(order) + 1, 0.0);
  ident[0] = x;
  if (order >= 1) ident[1] = 1.0;
  series::Coeffs t = series::tanh(ident, order);
  Jet th = Jet::from_taylor(x, t);
  std::vector<double> d(std::size_t(order) + 1);
  d[0] = 1.0 / 3.0 + (1.0 + th[0]) / 12.0;
  for (int k = 1; k <= order; ++k) d[std::size_t(k)] = th[k] / 12.0;
  return Jet(x, std::move(d));
}

double gamma_norm_bound(int s) {
  if (s < 0) throw validation_error("gamma_norm_bound: negative order");
  if (s == 0) return 1.0;  // gamma has range [0, 1] and attains 1
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto hit = cache.find(s);
  if (hit != cache.end()) return hit->second;
  int known = cache.empty() ? 0 : cache.rbegin()->first;
  double prev = known == 0 ? 1.0 : cache[known];
  for (int level = known + 1; level <= s; ++level) {
    // All derivative sups of gamma live on [1/2, 1] up to sign symmetry.
    const double h = 1e-5;
    double grid_max = 0.0;
    const int n = static_cast<int>(0.5 / h);
    for (int i = 0; i <= n; ++i) {
      double x = 0.5 + double(i) * h;
      Jet j = gamma_jet(x, level);
      for (int k = 0; k <= level; ++k) {
        double v = std::fabs(j[k]);
        if (v > grid_max) grid_max = v;
      }
    }
    // First-order remainder between grid points, using a coarse sup estimate
    // of the next derivative with a factor-2 safety margin.
    const double hc = 1e-3;
    double next_max = 0.0;
    const int nc = static_cast<int>(0.5 / hc);
    for (int i = 0; i <= nc; ++i) {
      double x = 0.5 + double(i) * hc;
      Jet j = gamma_jet(x, level + 1);
      double v = std::fabs(j[level + 1]);
      if (v > next_max) next_max = v;
    }
    double bound = grid_max + h * 2.0 * next_max;
    if (bound < prev) bound = prev;  // keep B nondecreasing in s
    cache[level] = bound;
    prev = bound;
  }
  return cache[s];
}

namespace {

template <class T>
T step_t(T t) {
  if (t <= T(0)) return T(0);
  if (t >= T(1)) return T(1);
  T u = hpmath::m_exp(T(-1) / t);
  T v = hpmath::m_exp(T(-1) / (T(1) - t));
  return u / (u + v);
}

}  // namespace

real_hp smooth_step_hp(real_hp t) { return step_t(t); }

real_hp gamma_hp(real_hp x) {
  real_hp ax = hpmath::m_abs(x);
  if (ax >= real_hp(1)) return real_hp(0);
  if (ax <= real_hp(0.5)) return real_hp(1);
  return step_t(real_hp(2) - real_hp(2) * ax);
}

real_hp alpha_hp(real_hp x) { return step_t(real_hp(3) * x - real_hp(1)); }

real_hp beta_hp(real_hp x) {
  return real_hp(1) / real_hp(3) + (real_hp(1) + hpmath::m_tanh(x)) / real_hp(12);
}

}  // namespace jetsec
