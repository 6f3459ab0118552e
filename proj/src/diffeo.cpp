#include "jetsec/diffeo.hpp"

#include <utility>

#include "jetsec/errors.hpp"

namespace jetsec {

namespace {

struct IdentityFn final : DiffeoBackend {
  double eval(double x) const override { return x; }
  Jet jet(double x, int order) const override { return identity_jet(x, order); }
  double inverse_eval(double y) const override { return y; }
  real_hp eval_hp(real_hp x) const override { return x; }
  nlohmann::json describe() const override { return {{"kind", "identity"}}; }
};

struct ExprFn final : DiffeoBackend {
  SmoothExpr e;
  explicit ExprFn(SmoothExpr e_) : e(std::move(e_)) {}
  double eval(double x) const override { return e.eval(x); }
  Jet jet(double x, int order) const override { return e.jet(x, order); }
  double inverse_eval(double y) const override { return e.inverse_eval(y); }
  real_hp eval_hp(real_hp x) const override { return e.eval_hp(x); }
  nlohmann::json describe() const override { return {{"kind", "expr"}, {"expr", e.to_json()}}; }
};

struct PiecewiseFn final : DiffeoBackend {
  PiecewiseDiffeo pd;
  explicit PiecewiseFn(PiecewiseDiffeo pd_) : pd(std::move(pd_)) {}
  double eval(double x) const override { return pd.eval(x); }
  Jet jet(double x, int order) const override { return pd.jet(x, order); }
  double inverse_eval(double y) const override { return pd.inverse_eval(y); }
  real_hp eval_hp(real_hp x) const override { return pd.eval_hp(x); }
  nlohmann::json describe() const override {
    return {{"kind", "piecewise"}, {"piecewise", pd.to_json()}};
  }
};

struct ComposeFn final : DiffeoBackend {
  DiffeoHandle outer, inner;
  ComposeFn(DiffeoHandle o, DiffeoHandle i) : outer(std::move(o)), inner(std::move(i)) {}
  double eval(double x) const override { return outer.eval(inner.eval(x)); }
  Jet jet(double x, int order) const override {
    Jet ij = inner.jet(x, order);
    return jet_compose(outer.jet(ij.value(), order), ij);
  }
  double inverse_eval(double y) const override { return inner.inverse_eval(outer.inverse_eval(y)); }
  real_hp eval_hp(real_hp x) const override { return outer.eval_hp(inner.eval_hp(x)); }
  nlohmann::json describe() const override {
    return {{"kind", "compose"}, {"outer", outer.to_json()}, {"inner", inner.to_json()}};
  }
};

struct InverseFn final : DiffeoBackend {
  DiffeoHandle of;
  explicit InverseFn(DiffeoHandle h) : of(std::move(h)) {}
  double eval(double x) const override { return of.inverse_eval(x); }
  Jet jet(double x, int order) const override {
    double p = of.inverse_eval(x);
    if (order == 0) return Jet(x, {p});
    Jet inv = jet_invert(of.jet(p, order));
    return Jet(x, inv.derivs());  // rebase at the query point itself
  }
  double inverse_eval(double y) const override { return of.eval(y); }
  real_hp eval_hp(real_hp x) const override {
    double seed = of.inverse_eval(static_cast<double>(x));
    const DiffeoHandle& h = of;
    return invert_monotone_hp([&h](real_hp t) { return h.eval_hp(t); }, x, seed);
  }
  nlohmann::json describe() const override { return {{"kind", "inverse"}, {"of", of.to_json()}}; }
};

}  // namespace

DiffeoHandle::DiffeoHandle() : impl_(std::make_shared<IdentityFn>()) {}

DiffeoHandle::DiffeoHandle(std::shared_ptr<const DiffeoBackend> impl) : impl_(std::move(impl)) {
  if (!impl_) throw validation_error("diffeo handle needs a backing function");
}

DiffeoHandle DiffeoHandle::identity() { return DiffeoHandle(); }

DiffeoHandle DiffeoHandle::from_expr(SmoothExpr e) {
  if (!e.is_increasing())
    throw validation_error("a diffeo handle needs an expression flagged increasing");
  return DiffeoHandle(std::make_shared<ExprFn>(std::move(e)));
}

DiffeoHandle DiffeoHandle::from_piecewise(PiecewiseDiffeo pd) {
  return DiffeoHandle(std::make_shared<PiecewiseFn>(std::move(pd)));
}

DiffeoHandle DiffeoHandle::composed(DiffeoHandle outer, DiffeoHandle inner) {
  return DiffeoHandle(std::make_shared<ComposeFn>(std::move(outer), std::move(inner)));
}

DiffeoHandle DiffeoHandle::inverse(DiffeoHandle h) {
  return DiffeoHandle(std::make_shared<InverseFn>(std::move(h)));
}

}  // namespace jetsec
