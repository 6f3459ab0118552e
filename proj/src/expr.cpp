#include "jetsec/expr.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "jetsec/bump.hpp"
#include "jetsec/errors.hpp"

namespace jetsec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial_d(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

template <typename Real>
Real ipow(Real x, int n) {
  Real p = Real(1);
  for (int k = 0; k < n; ++k) p *= x;
  return p;
}

// inf-aware a + b for interval arithmetic (never sees inf + -inf)
double iadd(double a, double b) {
  if (std::isinf(a)) return a;
  if (std::isinf(b)) return b;
  return a + b;
}

}  // namespace

struct SmoothExpr::Node {
  Kind kind;
  double a = 0.0;  // Const value / Affine offset / AffinePre offset / Glue t0 / ScaledBeta v0
  double b = 0.0;  // Affine slope / MonomialBump coeff / Glue t1 / ScaledBeta v1
  double c = 0.0;  // MonomialBump cutoff / AffinePre scale
  int n = 0;       // MonomialBump degree
  std::vector<SmoothExpr> kids;
  bool increasing = false;
  Interval rng;
};

// --- factories ---------------------------------------------------------

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw validation_error(std::string(what) + " must be finite");
}

}  // namespace

SmoothExpr SmoothExpr::constant(double c) {
  require_finite(c, "constant value");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->a = c;
  n->increasing = false;
  n->rng = {c, c};  // empty open interval: constants reject every inversion target
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::affine(double a, double b) {
  require_finite(a, "affine offset");
  require_finite(b, "affine slope");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Affine;
  n->a = a;
  n->b = b;
  n->increasing = b > 0.0;
  n->rng = (b == 0.0) ? Interval{a, a} : Interval{-kInf, kInf};
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::identity() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Identity;
  n->increasing = true;
  n->rng = {-kInf, kInf};
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::monomial_bump(double b, int n_, double c) {
  require_finite(b, "bump coefficient");
  require_finite(c, "bump cutoff");
  if (n_ < 0) throw validation_error("bump degree must be >= 0");
  if (!(c > 0.0)) throw validation_error("bump cutoff must be > 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::MonomialBump;
  n->b = b;
  n->c = c;
  n->n = n_;
  n->increasing = false;
  double m = std::fabs(b) / factorial_d(n_) * ipow(1.0 / c, n_);
  n->rng = {-m, m};
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::sum(std::vector<SmoothExpr> terms) {
  if (terms.empty()) throw validation_error("sum needs at least one term");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  double lo = 0.0, hi = 0.0;
  for (const auto& t : terms) {
    lo = iadd(lo, t.range().lo);
    hi = iadd(hi, t.range().hi);
  }
  // Monotonicity of a sum is not structural (bumps can locally fight the
  // affine part); builders that know better override via with_monotonicity.
  n->increasing = false;
  n->rng = {lo, hi};
  n->kids = std::move(terms);
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::scaled_beta(double v0, double v1) {
  require_finite(v0, "beta endpoint");
  require_finite(v1, "beta endpoint");
  auto n = std::make_shared<Node>();
  n->kind = Kind::ScaledBeta;
  n->a = v0;
  n->b = v1;
  double e0 = v0 + (v1 - v0) / 3.0;  // limit at -inf
  double e1 = v0 + (v1 - v0) / 2.0;  // limit at +inf
  n->increasing = v1 > v0;
  n->rng = {std::min(e0, e1), std::max(e0, e1)};
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::affine_pre(SmoothExpr f, double a, double c) {
  require_finite(a, "precompose offset");
  require_finite(c, "precompose scale");
  auto n = std::make_shared<Node>();
  n->kind = Kind::AffinePre;
  n->a = a;
  n->c = c;
  n->increasing = f.is_increasing() && c > 0.0;
  n->rng = f.range();
  n->kids.push_back(std::move(f));
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::compose(SmoothExpr f, SmoothExpr g) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compose;
  n->increasing = f.is_increasing() && g.is_increasing();
  n->rng = f.range();
  n->kids.push_back(std::move(f));
  n->kids.push_back(std::move(g));
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::inverse_of(SmoothExpr f) {
  if (!f.is_increasing())
    throw validation_error("inverse_of requires an increasing operand");
  auto n = std::make_shared<Node>();
  n->kind = Kind::InverseOf;
  n->increasing = true;
  n->rng = {-kInf, kInf};
  n->kids.push_back(std::move(f));
  return SmoothExpr(std::move(n));
}

SmoothExpr glue(const SmoothExpr& f, const SmoothExpr& g, double t0, double t1) {
  if (!(std::isfinite(t0) && std::isfinite(t1) && t0 < t1))
    throw validation_error("glue window must satisfy t0 < t1");
  bool ordered = true;
  for (int i = 0; i <= 64; ++i) {
    double x = t0 + (t1 - t0) * (static_cast<double>(i) / 64.0);
    if (!(f.eval(x) <= g.eval(x))) {
      ordered = false;
      break;
    }
  }
  auto n = std::make_shared<SmoothExpr::Node>();
  n->kind = SmoothExpr::Kind::Glue;
  n->a = t0;
  n->b = t1;
  bool inc = f.is_increasing() && g.is_increasing() && ordered;
  n->increasing = inc;
  if (inc) {
    n->rng = {f.range().lo, g.range().hi};
  } else {
    n->rng = {std::min(f.range().lo, g.range().lo), std::max(f.range().hi, g.range().hi)};
  }
  n->kids.push_back(f);
  n->kids.push_back(g);
  return SmoothExpr(std::move(n));
}

SmoothExpr SmoothExpr::with_monotonicity(bool increasing, Interval range) const {
  auto n = std::make_shared<Node>(*node_);
  n->increasing = increasing;
  n->rng = range;
  return SmoothExpr(std::move(n));
}

// --- accessors ----------------------------------------------------------

SmoothExpr::Kind SmoothExpr::kind() const { return node_->kind; }
bool SmoothExpr::is_increasing() const { return node_->increasing; }
Interval SmoothExpr::range() const { return node_->rng; }
std::size_t SmoothExpr::child_count() const { return node_->kids.size(); }

const SmoothExpr& SmoothExpr::child(std::size_t i) const {
  if (i >= node_->kids.size()) throw validation_error("child index out of range");
  return node_->kids[i];
}

namespace {
[[noreturn]] void wrong_kind(const char* what) {
  throw validation_error(std::string("accessor ") + what + " used on wrong node kind");
}
}  // namespace

double SmoothExpr::const_value() const {
  if (node_->kind != Kind::Const) wrong_kind("const_value");
  return node_->a;
}
double SmoothExpr::affine_offset() const {
  if (node_->kind != Kind::Affine && node_->kind != Kind::AffinePre) wrong_kind("affine_offset");
  return node_->a;
}
double SmoothExpr::affine_slope() const {
  if (node_->kind == Kind::Affine) return node_->b;
  if (node_->kind == Kind::AffinePre) return node_->c;
  wrong_kind("affine_slope");
}
double SmoothExpr::bump_coeff() const {
  if (node_->kind != Kind::MonomialBump) wrong_kind("bump_coeff");
  return node_->b;
}
int SmoothExpr::bump_degree() const {
  if (node_->kind != Kind::MonomialBump) wrong_kind("bump_degree");
  return node_->n;
}
double SmoothExpr::bump_cutoff() const {
  if (node_->kind != Kind::MonomialBump) wrong_kind("bump_cutoff");
  return node_->c;
}
double SmoothExpr::glue_t0() const {
  if (node_->kind != Kind::Glue) wrong_kind("glue_t0");
  return node_->a;
}
double SmoothExpr::glue_t1() const {
  if (node_->kind != Kind::Glue) wrong_kind("glue_t1");
  return node_->b;
}
double SmoothExpr::beta_v0() const {
  if (node_->kind != Kind::ScaledBeta) wrong_kind("beta_v0");
  return node_->a;
}
double SmoothExpr::beta_v1() const {
  if (node_->kind != Kind::ScaledBeta) wrong_kind("beta_v1");
  return node_->b;
}

// --- evaluation ---------------------------------------------------------
//
// jet(x, 0)[0] must equal eval(x) bitwise, so both paths branch identically
// and perform the identical double operations in the identical order.

double SmoothExpr::eval(double x) const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Const:
      return nd.a;
    case Kind::Affine:
      return nd.a + nd.b * x;
    case Kind::Identity:
      return x;
    case Kind::MonomialBump: {
      double t = nd.c * x;
      if (std::fabs(t) >= 1.0) return 0.0;
      double m = nd.b / factorial_d(nd.n) * ipow(x, nd.n);
      if (std::fabs(t) <= 0.5) return m;  // plateau: gamma == 1 exactly
      return m * gamma_eval(t);
    }
    case Kind::Sum: {
      double acc = 0.0;
      for (const auto& k : nd.kids) acc += k.eval(x);
      return acc;
    }
    case Kind::Glue: {
      double u = (x - nd.a) / (nd.b - nd.a);
      if (u <= 1.0 / 3.0) return nd.kids[0].eval(x);
      if (u >= 2.0 / 3.0) return nd.kids[1].eval(x);
      double al = alpha_eval(u);
      return (1.0 - al) * nd.kids[0].eval(x) + al * nd.kids[1].eval(x);
    }
    case Kind::ScaledBeta:
      return nd.a + (nd.b - nd.a) * beta_eval(x);
    case Kind::AffinePre:
      return nd.kids[0].eval(nd.a + nd.c * x);
    case Kind::Compose:
      return nd.kids[0].eval(nd.kids[1].eval(x));
    case Kind::InverseOf:
      return nd.kids[0].inverse_eval(x);
  }
  throw numeric_error("eval: corrupt node");
}

Jet SmoothExpr::jet(double x, int order) const {
  if (order < 0) throw validation_error("jet order must be >= 0");
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Const: {
      std::vector<double> d(order + 1, 0.0);
      d[0] = nd.a;
      return Jet(x, d);
    }
    case Kind::Affine: {
      std::vector<double> d(order + 1, 0.0);
      d[0] = nd.a + nd.b * x;
      if (order >= 1) d[1] = nd.b;
      return Jet(x, d);
    }
    case Kind::Identity:
      return identity_jet(x, order);
    case Kind::MonomialBump: {
      double t = nd.c * x;
      std::vector<double> mono(order + 1, 0.0);
      for (int s = 0; s <= std::min(order, nd.n); ++s)
        mono[s] = nd.b / factorial_d(nd.n - s) * ipow(x, nd.n - s);
      if (std::fabs(t) >= 1.0) return Jet(x, std::vector<double>(order + 1, 0.0));
      if (std::fabs(t) <= 0.5) return Jet(x, mono);  // plateau: exact monomial jet
      Jet gj = gamma_jet(t, order);
      std::vector<double> g(order + 1);
      double scale = 1.0;
      for (int k = 0; k <= order; ++k) {
        g[k] = scale * gj[k];
        scale *= nd.c;
      }
      return jet_multiply(Jet(x, mono), Jet(x, g));
    }
    case Kind::Sum: {
      Jet acc(x, std::vector<double>(order + 1, 0.0));
      for (const auto& k : nd.kids) acc = jet_add(acc, k.jet(x, order));
      return acc;
    }
    case Kind::Glue: {
      double u = (x - nd.a) / (nd.b - nd.a);
      if (u <= 1.0 / 3.0) return nd.kids[0].jet(x, order);
      if (u >= 2.0 / 3.0) return nd.kids[1].jet(x, order);
      Jet aj = alpha_jet(u, order);
      double w = 1.0 / (nd.b - nd.a);
      std::vector<double> av(order + 1), ov(order + 1);
      double scale = 1.0;
      for (int k = 0; k <= order; ++k) {
        av[k] = scale * aj[k];
        ov[k] = -av[k];
        scale *= w;
      }
      ov[0] = 1.0 - av[0];
      Jet fj = nd.kids[0].jet(x, order);
      Jet gj = nd.kids[1].jet(x, order);
      return jet_add(jet_multiply(Jet(x, ov), fj), jet_multiply(Jet(x, av), gj));
    }
    case Kind::ScaledBeta: {
      Jet bj = beta_jet(x, order);
      std::vector<double> d(order + 1);
      d[0] = nd.a + (nd.b - nd.a) * bj[0];
      for (int k = 1; k <= order; ++k) d[k] = (nd.b - nd.a) * bj[k];
      return Jet(x, d);
    }
    case Kind::AffinePre: {
      double y = nd.a + nd.c * x;
      Jet ij = nd.kids[0].jet(y, order);
      std::vector<double> d(order + 1);
      double scale = 1.0;
      for (int k = 0; k <= order; ++k) {
        d[k] = scale * ij[k];
        scale *= nd.c;
      }
      return Jet(x, d);
    }
    case Kind::Compose: {
      Jet inner = nd.kids[1].jet(x, order);
      Jet outer = nd.kids[0].jet(inner.value(), order);
      return jet_compose(outer, inner);
    }
    case Kind::InverseOf: {
      double p = nd.kids[0].inverse_eval(x);
      if (order == 0) return Jet(x, {p});
      Jet fw = nd.kids[0].jet(p, order);
      Jet inv = jet_invert(fw);
      return Jet(x, inv.derivs());  // rebase at the query point itself
    }
  }
  throw numeric_error("jet: corrupt node");
}

double SmoothExpr::inverse_eval(double y) const {
  if (!std::isfinite(y)) throw validation_error("inversion target must be finite");
  if (!is_increasing()) throw validation_error("inverse_eval on a node not flagged increasing");
  if (!range().contains(y))
    throw numeric_error("inversion target outside the expression's range");

  double tol = 1e-13 * std::max(1.0, std::fabs(y));

  // bracket by geometric expansion from 0
  double lo, hi;
  double e0 = eval(0.0);
  if (std::fabs(e0 - y) <= tol) return 0.0;
  if (e0 < y) {
    lo = 0.0;
    hi = 1.0;
    while (eval(hi) < y) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e18) throw numeric_error("inverse_eval: bracket expansion ran away");
    }
  } else {
    hi = 0.0;
    lo = -1.0;
    while (eval(lo) > y) {
      hi = lo;
      lo *= 2.0;
      if (lo < -1e18) throw numeric_error("inverse_eval: bracket expansion ran away");
    }
  }

  while (hi - lo > 1e-8) {
    double mid = 0.5 * (lo + hi);
    if (eval(mid) < y)
      lo = mid;
    else
      hi = mid;
  }

  // Newton polish from the bracket midpoint
  double xc = 0.5 * (lo + hi);
  for (int it = 0; it < 5; ++it) {
    Jet j = jet(xc, 1);
    double r = j[0] - y;
    if (std::fabs(r) <= tol) return xc;
    if (!(j[1] > 0.0)) break;
    double nx = xc - r / j[1];
    if (!(nx >= lo && nx <= hi)) break;
    xc = nx;
  }
  if (std::fabs(eval(xc) - y) <= tol) return xc;

  // fallback: keep bisecting on the residual
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = eval(mid);
    if (std::fabs(v - y) <= tol) return mid;
    if (v < y)
      lo = mid;
    else
      hi = mid;
    if (!(lo < hi)) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(lo)))
      break;  // bracket collapsed to adjacent doubles
  }
  double mid = 0.5 * (lo + hi);
  if (std::fabs(eval(mid) - y) <= 1e4 * tol) return mid;  // best representable preimage
  throw numeric_error("inverse_eval: did not converge to the requested residual");
}

// --- extended-precision evaluation --------------------------------------

real_hp invert_monotone_hp(const std::function<real_hp(real_hp)>& f, real_hp y, double seed) {
  // seed comes from the double solver; expand a tight bracket around it
  real_hp step = real_hp(1e-6) * hpmath::m_abs(real_hp(seed)) + real_hp(1e-6);
  real_hp lo = real_hp(seed) - step;
  real_hp hi = real_hp(seed) + step;
  real_hp flo = f(lo) - y;
  real_hp fhi = f(hi) - y;
  int guard = 0;
  while (flo > 0 || fhi < 0) {
    step *= 2;
    if (flo > 0) {
      lo -= step;
      flo = f(lo) - y;
    }
    if (fhi < 0) {
      hi += step;
      fhi = f(hi) - y;
    }
    if (++guard > 80) throw numeric_error("hp inversion: bracket expansion failed");
  }
  real_hp tol = real_hp(1e-30) * (hpmath::m_abs(y) < 1 ? real_hp(1) : hpmath::m_abs(y));
  // Illinois regula falsi: superlinear near the root, bracket never lost
  int side = 0;
  for (int it = 0; it < 120; ++it) {
    real_hp denom = fhi - flo;
    real_hp mid = (denom == 0) ? (lo + hi) / 2 : (lo * fhi - hi * flo) / denom;
    if (!(mid > lo && mid < hi)) mid = (lo + hi) / 2;
    real_hp fm = f(mid) - y;
    if (hpmath::m_abs(fm) <= tol) return mid;
    if (fm < 0) {
      lo = mid;
      flo = fm;
      if (side == -1) fhi /= 2;
      side = -1;
    } else {
      hi = mid;
      fhi = fm;
      if (side == 1) flo /= 2;
      side = 1;
    }
    if (hi - lo <= real_hp(1e-33) * (hpmath::m_abs(lo) + 1)) return (lo + hi) / 2;
  }
  return (lo + hi) / 2;
}

real_hp SmoothExpr::eval_hp(real_hp x) const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Const:
      return real_hp(nd.a);
    case Kind::Affine:
      return real_hp(nd.a) + real_hp(nd.b) * x;
    case Kind::Identity:
      return x;
    case Kind::MonomialBump: {
      real_hp t = real_hp(nd.c) * x;
      if (hpmath::m_abs(t) >= 1) return real_hp(0);
      real_hp m = real_hp(nd.b) / real_hp(factorial_d(nd.n)) * ipow(x, nd.n);
      if (hpmath::m_abs(t) <= real_hp(0.5)) return m;
      return m * gamma_hp(t);
    }
    case Kind::Sum: {
      real_hp acc = 0;
      for (const auto& k : nd.kids) acc += k.eval_hp(x);
      return acc;
    }
    case Kind::Glue: {
      real_hp u = (x - real_hp(nd.a)) / (real_hp(nd.b) - real_hp(nd.a));
      if (u <= real_hp(1) / 3) return nd.kids[0].eval_hp(x);
      if (u >= real_hp(2) / 3) return nd.kids[1].eval_hp(x);
      real_hp al = alpha_hp(u);
      return (real_hp(1) - al) * nd.kids[0].eval_hp(x) + al * nd.kids[1].eval_hp(x);
    }
    case Kind::ScaledBeta:
      return real_hp(nd.a) + (real_hp(nd.b) - real_hp(nd.a)) * beta_hp(x);
    case Kind::AffinePre:
      return nd.kids[0].eval_hp(real_hp(nd.a) + real_hp(nd.c) * x);
    case Kind::Compose:
      return nd.kids[0].eval_hp(nd.kids[1].eval_hp(x));
    case Kind::InverseOf: {
      double seed = nd.kids[0].inverse_eval(static_cast<double>(x));
      const SmoothExpr& f = nd.kids[0];
      return invert_monotone_hp([&f](real_hp t) { return f.eval_hp(t); }, x, seed);
    }
  }
  throw numeric_error("eval_hp: corrupt node");
}

// --- serialization ------------------------------------------------------

namespace {

nlohmann::json endpoint_to_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double endpoint_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw validation_error("range endpoint string must be \"inf\" or \"-inf\"");
  }
  if (!j.is_number()) throw validation_error("range endpoint must be a number or \"inf\"/\"-inf\"");
  return j.get<double>();
}

const char* kind_name(SmoothExpr::Kind k) {
  switch (k) {
    case SmoothExpr::Kind::Const: return "const";
    case SmoothExpr::Kind::Affine: return "affine";
    case SmoothExpr::Kind::MonomialBump: return "monomial_bump";
    case SmoothExpr::Kind::Sum: return "sum";
    case SmoothExpr::Kind::Glue: return "glue";
    case SmoothExpr::Kind::ScaledBeta: return "scaled_beta";
    case SmoothExpr::Kind::AffinePre: return "affine_pre";
    case SmoothExpr::Kind::Compose: return "compose";
    case SmoothExpr::Kind::InverseOf: return "inverse_of";
    case SmoothExpr::Kind::Identity: return "identity";
  }
  return "?";
}

}  // namespace

nlohmann::json SmoothExpr::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name(kind());
  switch (kind()) {
    case Kind::Const:
      j["value"] = const_value();
      break;
    case Kind::Affine:
      j["offset"] = affine_offset();
      j["slope"] = affine_slope();
      break;
    case Kind::MonomialBump:
      j["coeff"] = bump_coeff();
      j["degree"] = bump_degree();
      j["cutoff"] = bump_cutoff();
      break;
    case Kind::Sum: {
      nlohmann::json terms = nlohmann::json::array();
      for (std::size_t i = 0; i < child_count(); ++i) terms.push_back(child(i).to_json());
      j["terms"] = std::move(terms);
      break;
    }
    case Kind::Glue:
      j["t0"] = glue_t0();
      j["t1"] = glue_t1();
      j["left"] = child(0).to_json();
      j["right"] = child(1).to_json();
      break;
    case Kind::ScaledBeta:
      j["v0"] = beta_v0();
      j["v1"] = beta_v1();
      break;
    case Kind::AffinePre:
      j["offset"] = affine_offset();
      j["scale"] = affine_slope();
      j["inner"] = child(0).to_json();
      break;
    case Kind::Compose:
      j["outer"] = child(0).to_json();
      j["inner"] = child(1).to_json();
      break;
    case Kind::InverseOf:
      j["of"] = child(0).to_json();
      break;
    case Kind::Identity:
      break;
  }
  j["increasing"] = is_increasing();
  j["range"] = nlohmann::json::array({endpoint_to_json(range().lo), endpoint_to_json(range().hi)});
  return j;
}

SmoothExpr SmoothExpr::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw validation_error("expression node must be an object with a \"kind\" string");
  const std::string k = j["kind"].get<std::string>();

  auto num = [&](const char* key) -> double {
    if (!j.contains(key) || !j[key].is_number())
      throw validation_error(std::string("expression node \"") + k + "\" needs numeric \"" + key + "\"");
    return j[key].get<double>();
  };

  SmoothExpr e = SmoothExpr::identity();
  if (k == "const") {
    e = SmoothExpr::constant(num("value"));
  } else if (k == "affine") {
    e = SmoothExpr::affine(num("offset"), num("slope"));
  } else if (k == "identity") {
    e = SmoothExpr::identity();
  } else if (k == "monomial_bump") {
    if (!j.contains("degree") || !j["degree"].is_number_integer())
      throw validation_error("monomial_bump needs integer \"degree\"");
    e = SmoothExpr::monomial_bump(num("coeff"), j["degree"].get<int>(), num("cutoff"));
  } else if (k == "sum") {
    if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
      throw validation_error("sum needs a non-empty \"terms\" array");
    std::vector<SmoothExpr> terms;
    for (const auto& t : j["terms"]) terms.push_back(from_json(t));
    e = SmoothExpr::sum(std::move(terms));
  } else if (k == "glue") {
    if (!j.contains("left") || !j.contains("right"))
      throw validation_error("glue needs \"left\" and \"right\"");
    e = glue(from_json(j["left"]), from_json(j["right"]), num("t0"), num("t1"));
  } else if (k == "scaled_beta") {
    e = SmoothExpr::scaled_beta(num("v0"), num("v1"));
  } else if (k == "affine_pre") {
    if (!j.contains("inner")) throw validation_error("affine_pre needs \"inner\"");
    e = SmoothExpr::affine_pre(from_json(j["inner"]), num("offset"), num("scale"));
  } else if (k == "compose") {
    if (!j.contains("outer") || !j.contains("inner"))
      throw validation_error("compose needs \"outer\" and \"inner\"");
    e = SmoothExpr::compose(from_json(j["outer"]), from_json(j["inner"]));
  } else if (k == "inverse_of") {
    if (!j.contains("of")) throw validation_error("inverse_of needs \"of\"");
    e = SmoothExpr::inverse_of(from_json(j["of"]));
  } else {
    throw validation_error("unknown expression kind \"" + k + "\"");
  }

  if (j.contains("increasing") || j.contains("range")) {
    bool inc = e.is_increasing();
    Interval r = e.range();
    if (j.contains("increasing")) {
      if (!j["increasing"].is_boolean()) throw validation_error("\"increasing\" must be a boolean");
      inc = j["increasing"].get<bool>();
    }
    if (j.contains("range")) {
      const auto& rr = j["range"];
      if (!rr.is_array() || rr.size() != 2) throw validation_error("\"range\" must be a 2-array");
      r.lo = endpoint_from_json(rr[0]);
      r.hi = endpoint_from_json(rr[1]);
      if (!(r.lo <= r.hi)) throw validation_error("\"range\" endpoints out of order");
    }
    e = e.with_monotonicity(inc, r);
  }
  return e;
}

}  // namespace jetsec
