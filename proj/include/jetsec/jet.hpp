#pragma once

#include <vector>

namespace jetsec {

// Finite derivative data of a smooth function at one point.  derivs()[k] is
// the raw k-th derivative f^(k)(a), NOT the Taylor coefficient; conversion to
// coefficient form (division by k!) happens only inside composition and
// inversion.  Order = derivs().size() - 1.
class Jet {
 public:
  Jet(double base_point, std::vector<double> derivs);

  double base_point() const { return a_; }
  int order() const { return static_cast<int>(d_.size()) - 1; }
  double operator[](int k) const { return d_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& derivs() const { return d_; }
  double value() const { return d_[0]; }

  // True when this is bitwise the jet of the identity map: value == base,
  // first derivative == 1, everything higher == 0.
  bool is_identity() const;

  // Taylor coefficients derivs[k]/k! and back.
  std::vector<double> taylor() const;
  static Jet from_taylor(double base_point, const std::vector<double>& coeffs);

  // Same data truncated/extended (zero-filled) to the given order.
  Jet truncated(int order) const;

 private:
  double a_;
  std::vector<double> d_;
};

// Jet of the identity map at a: [a, 1, 0, ..., 0].
Jet identity_jet(double a, int order);

// Pointwise sum/scalar multiple (same base point, orders truncated to min).
Jet jet_add(const Jet& f, const Jet& g);
Jet jet_scale(const Jet& f, double s);

// Leibniz product: result[s] = sum_k C(s,k) f[k] g[s-k].
Jet jet_multiply(const Jet& f, const Jet& g);

// Jet of outer∘inner at inner's base point.  Requires outer to be based at
// inner's value, |outer.base - inner.value| <= 1e-12.
Jet jet_compose(const Jet& outer, const Jet& inner);

// Jet of the inverse function at f's value.  Requires f.derivs()[1] > 0.
Jet jet_invert(const Jet& f);

}  // namespace jetsec
