#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

#include "json.hpp"

#include "jetsec/hp.hpp"
#include "jetsec/jet.hpp"

namespace jetsec {

// Open interval with possibly infinite endpoints; used as a sound enclosure
// of an expression's value set and as the admissible-target set for inversion.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double y) const { return y > lo && y < hi; }
};

// Immutable closed-form expression tree for concrete smooth functions.
// Every node evaluates, differentiates to any order, and (when flagged
// increasing) inverts numerically.  Monotonicity flags and ranges are set
// constructively by the extension operators and trusted by InverseOf.
class SmoothExpr {
 public:
  enum class Kind {
    Const,         // c
    Affine,        // a + b x
    MonomialBump,  // (b/n!) x^n gamma(c x); support [-1/c, 1/c]
    Sum,
    Glue,          // (1-A)left + A right with A(x) = alpha((x-t0)/(t1-t0))
    ScaledBeta,    // v0 + (v1-v0) beta(x)
    AffinePre,     // f(a + c x)
    Compose,       // f(g(x))
    InverseOf,
    Identity,
  };

  static SmoothExpr constant(double c);
  static SmoothExpr affine(double a, double b);
  static SmoothExpr identity();
  static SmoothExpr monomial_bump(double b, int n, double c);
  static SmoothExpr sum(std::vector<SmoothExpr> terms);
  static SmoothExpr scaled_beta(double v0, double v1);
  static SmoothExpr affine_pre(SmoothExpr f, double a, double c);
  static SmoothExpr compose(SmoothExpr f, SmoothExpr g);
  static SmoothExpr inverse_of(SmoothExpr f);

  Kind kind() const;
  bool is_increasing() const;
  Interval range() const;

  // Copy with constructively-known flags (used by the extension operators,
  // whose monotonicity facts are sharper than the structural defaults).
  SmoothExpr with_monotonicity(bool increasing, Interval range) const;

  std::size_t child_count() const;
  const SmoothExpr& child(std::size_t i) const;

  double const_value() const;
  double affine_offset() const;  // Affine and AffinePre
  double affine_slope() const;
  double bump_coeff() const;
  int bump_degree() const;
  double bump_cutoff() const;
  double glue_t0() const;
  double glue_t1() const;
  double beta_v0() const;
  double beta_v1() const;

  double eval(double x) const;
  Jet jet(double x, int order) const;

  // Preimage of y.  Requires the increasing flag and y inside range().
  // Bracket expansion from 0, bisection to width 1e-8, then Newton polish
  // (<= 5 steps, derivative from the order-1 jet) with bisection fallback;
  // final residual |eval(x) - y| <= 1e-13 * max(1, |y|).
  double inverse_eval(double y) const;

  real_hp eval_hp(real_hp x) const;

  nlohmann::json to_json() const;
  static SmoothExpr from_json(const nlohmann::json& j);

 private:
  struct Node;
  explicit SmoothExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend SmoothExpr glue(const SmoothExpr& f, const SmoothExpr& g, double t0, double t1);
};

// Monotone blend: left of the window the result IS f (bitwise), right of it
// g; inside, the ramp alpha((x-t0)/(t1-t0)) interpolates.  Flats cover the
// outer thirds of [t0, t1].
SmoothExpr glue(const SmoothExpr& f, const SmoothExpr& g, double t0, double t1);

}  // namespace jetsec
