#pragma once

#include <memory>

#include "json.hpp"

#include "jetsec/expr.hpp"
#include "jetsec/extension.hpp"

namespace jetsec {

// Uniform view over anything the factorizer can consume: an expression tree,
// an assembled piecewise diffeomorphism, a parsed DSL function, or symbolic
// compositions and inverses of those.
class DiffeoBackend {
 public:
  virtual ~DiffeoBackend() = default;
  virtual double eval(double x) const = 0;
  virtual Jet jet(double x, int order) const = 0;
  virtual double inverse_eval(double y) const = 0;
  virtual real_hp eval_hp(real_hp x) const = 0;
  virtual nlohmann::json describe() const = 0;
};

class DiffeoHandle {
 public:
  DiffeoHandle();  // identity
  explicit DiffeoHandle(std::shared_ptr<const DiffeoBackend> impl);

  double eval(double x) const { return impl_->eval(x); }
  Jet jet(double x, int order) const { return impl_->jet(x, order); }
  double inverse_eval(double y) const { return impl_->inverse_eval(y); }
  real_hp eval_hp(real_hp x) const { return impl_->eval_hp(x); }
  nlohmann::json to_json() const { return impl_->describe(); }

  static DiffeoHandle identity();
  static DiffeoHandle from_expr(SmoothExpr e);             // requires the increasing flag
  static DiffeoHandle from_piecewise(PiecewiseDiffeo pd);
  static DiffeoHandle composed(DiffeoHandle outer, DiffeoHandle inner);
  static DiffeoHandle inverse(DiffeoHandle h);

 private:
  std::shared_ptr<const DiffeoBackend> impl_;
};

}  // namespace jetsec
