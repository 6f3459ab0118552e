#include "jetsec/jet.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "jetsec/errors.hpp"
#include "jetsec/series.hpp"

namespace jetsec {

namespace {
double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= double(i);
  return f;
}
}  // namespace

Jet::Jet(double base_point, std::vector<double> derivs) : a_(base_point), d_(std::move(derivs)) {
  if (d_.empty()) throw validation_error("Jet: needs at least the value component");
  if (!std::isfinite(a_)) throw validation_error("Jet: base point must be finite");
  for (double v : d_)
    if (!std::isfinite(v)) throw validation_error("Jet: derivative components must be finite");
}

bool Jet::is_identity() const {
  if (d_[0] != a_) return false;
  if (order() >= 1 && d_[1] != 1.0) return false;
  if (order() < 1) return false;  // a bare value cannot witness slope 1
  for (int k = 2; k <= order(); ++k)
    if (d_[std::size_t(k)] != 0.0) return false;
  return true;
}

std::vector<double> Jet::taylor() const {
  std::vector<double> c(d_.size());
  double f = 1.0;
  for (std::size_t k = 0; k < d_.size(); ++k) {
    if (k > 1) f *= double(k);
    c[k] = d_[k] / f;
  }
  return c;
}

Jet Jet::from_taylor(double base_point, const std::vector<double>& coeffs) {
  std::vector<double> d(coeffs.size());
  double f = 1.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (k > 1) f *= double(k);
    d[k] = coeffs[k] * f;
  }
  return Jet(base_point, std::move(d));
}

Jet Jet::truncated(int order) const {
  std::vector<double> d(static_cast<std::size_t>(order) + 1, 0.0);
  for (std::size_t k = 0; k < d.size() && k < d_.size(); ++k) d[k] = d_[k];
  return Jet(a_, std::move(d));
}

Jet identity_jet(double a, int order) {
  std::vector<double> d(static_cast<std::size_t>(order) + 1, 0.0);
  d[0] = a;
  if (order >= 1) d[1] = 1.0;
  return Jet(a, std::move(d));
}

namespace {
int common_order(const Jet& f, const Jet& g) {
  return f.order() < g.order() ? f.order() : g.order();
}
void require_same_base(const Jet& f, const Jet& g, const char* op) {
  if (std::fabs(f.base_point() - g.base_point()) > 1e-12)
    throw validation_error(std::string(op) + ": jets based at different points (" +
                           std::to_string(f.base_point()) + " vs " +
                           std::to_string(g.base_point()) + ")");
}
}  // namespace

Jet jet_add(const Jet& f, const Jet& g) {
  require_same_base(f, g, "jet_add");
  int n = common_order(f, g);
  std::vector<double> d(std::size_t(n) + 1);
  for (int k = 0; k <= n; ++k) d[std::size_t(k)] = f[k] + g[k];
  return Jet(f.base_point(), std::move(d));
}

Jet jet_scale(const Jet& f, double s) {
  std::vector<double> d(f.derivs());
  for (double& v : d) v *= s;
  return Jet(f.base_point(), std::move(d));
}

Jet jet_multiply(const Jet& f, const Jet& g) {
  require_same_base(f, g, "jet_multiply");
  int n = common_order(f, g);
  std::vector<double> d(std::size_t(n) + 1, 0.0);
  // (fg)^(s) = sum_k C(s,k) f^(k) g^(s-k)
  for (int s = 0; s <= n; ++s) {
    double binom = 1.0, acc = 0.0;
    for (int k = 0; k <= s; ++k) {
      acc += binom * f[k] * g[s - k];
      binom = binom * double(s - k) / double(k + 1);
    }
    d[std::size_t(s)] = acc;
  }
  return Jet(f.base_point(), std::move(d));
}

Jet jet_compose(const Jet& outer, const Jet& inner) {
  if (std::fabs(outer.base_point() - inner.value()) > 1e-12)
    throw validation_error("jet_compose: outer based at " + std::to_string(outer.base_point()) +
                           " but inner value is " + std::to_string(inner.value()));
  int n = common_order(outer, inner);
  series::Coeffs oc = outer.truncated(n).taylor();
  series::Coeffs ic = inner.truncated(n).taylor();
  ic[0] = 0.0;  // expand around the inner value
  series::Coeffs rc = series::compose(oc, ic, n);
  Jet out = Jet::from_taylor(inner.base_point(), rc);
  return out;
}

Jet jet_invert(const Jet& f) {
  if (f.order() < 1) throw validation_error("jet_invert: need at least first order");
  if (!(f[1] > 0.0))
    throw validation_error("jet_invert: first derivative must be positive, got " +
                           std::to_string(f[1]));
  int n = f.order();
  series::Coeffs fc = f.taylor();
  double value = fc[0];
  fc[0] = 0.0;
  series::Coeffs gc = series::revert(fc, n);
  Jet out = Jet::from_taylor(value, gc);
  // The inverse maps f's value back to f's base point.
  std::vector<double> d = out.derivs();
  d[0] = f.base_point();
  return Jet(value, std::move(d));
}

}  // namespace jetsec
