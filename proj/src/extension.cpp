#include "jetsec/extension.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "jetsec/bump.hpp"
#include "jetsec/errors.hpp"

namespace jetsec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_extendable(const Jet& j, const char* who) {
  if (j.order() < 1)
    throw validation_error(std::string(who) + ": jet must carry at least a slope (order >= 1)");
  if (!(j[1] > 0.0))
    throw validation_error(std::string(who) + ": slope " + fmt(j[1]) + " must be > 0");
}

}  // namespace

// --- ZJetFamily ----------------------------------------------------------

ZJetFamily::ZJetFamily(int r, int window_lo, int window_hi, std::map<int, Jet> entries)
    : r_(r), lo_(window_lo), hi_(window_hi), entries_(std::move(entries)) {
  if (r_ < 0) throw validation_error("jet family order must be >= 0");
  if (lo_ > hi_) throw validation_error("jet family window is empty");
  for (const auto& [m, j] : entries_) {
    if (m < lo_ || m > hi_)
      throw validation_error("jet family entry at " + std::to_string(m) + " lies outside the window");
    if (j.base_point() != static_cast<double>(m))
      throw validation_error("jet family entry at " + std::to_string(m) + " has base point " +
                             fmt(j.base_point()) + " (must equal its key)");
    if (j.order() != r_)
      throw validation_error("jet family entry at " + std::to_string(m) + " has order " +
                             std::to_string(j.order()) + " (family order is " + std::to_string(r_) + ")");
    if (r_ >= 1 && !(j[1] > 0.0))
      throw validation_error("f1_{" + std::to_string(m) + "} = " + fmt(j[1]) + " must be > 0");
  }
  auto value_at = [&](int m) -> double {
    auto it = entries_.find(m);
    return it == entries_.end() ? static_cast<double>(m) : it->second[0];
  };
  for (int m = lo_ - 1; m <= hi_; ++m) {
    double a = value_at(m), b = value_at(m + 1);
    if (!(a < b))
      throw validation_error("f0_{" + std::to_string(m) + "} = " + fmt(a) + " must be < f0_{" +
                             std::to_string(m + 1) + "} = " + fmt(b));
  }
}

Jet ZJetFamily::filled_jet(int m) const {
  int ord = std::max(r_, 1);
  auto it = entries_.find(m);
  if (it == entries_.end()) return identity_jet(static_cast<double>(m), ord);
  if (r_ >= 1) return it->second;
  return Jet(static_cast<double>(m), {it->second[0], 1.0});
}

bool ZJetFamily::is_identity() const {
  for (const auto& [m, j] : entries_) {
    (void)j;
    if (!filled_jet(m).is_identity()) return false;
  }
  return true;
}

nlohmann::json ZJetFamily::to_json() const {
  nlohmann::json jets = nlohmann::json::array();
  for (const auto& [m, j] : entries_)
    jets.push_back({{"a", m}, {"values", j.derivs()}});
  return {{"r", r_}, {"window", {lo_, hi_}}, {"jets", std::move(jets)}};
}

ZJetFamily ZJetFamily::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("r") || !j.contains("window") || !j.contains("jets"))
    throw validation_error("jet family document needs \"r\", \"window\", \"jets\"");
  if (!j["r"].is_number_integer()) throw validation_error("\"r\" must be an integer here");
  int r = j["r"].get<int>();
  const auto& w = j["window"];
  if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer())
    throw validation_error("\"window\" must be a pair of integers");
  std::map<int, Jet> entries;
  for (const auto& e : j["jets"]) {
    if (!e.is_object() || !e.contains("a") || !e.contains("values") || !e["a"].is_number_integer() ||
        !e["values"].is_array())
      throw validation_error("each jet entry needs integer \"a\" and array \"values\"");
    int a = e["a"].get<int>();
    std::vector<double> vals;
    for (const auto& v : e["values"]) {
      if (!v.is_number()) throw validation_error("jet values must be numbers");
      vals.push_back(v.get<double>());
    }
    if (static_cast<int>(vals.size()) != r + 1)
      throw validation_error("jet entry at " + std::to_string(a) + " has " +
                             std::to_string(vals.size()) + " values (need r+1 = " +
                             std::to_string(r + 1) + ")");
    if (!entries.emplace(a, Jet(static_cast<double>(a), vals)).second)
      throw validation_error("duplicate jet entry at " + std::to_string(a));
  }
  return ZJetFamily(r, w[0].get<int>(), w[1].get<int>(), std::move(entries));
}

// --- extension operators --------------------------------------------------

SmoothExpr extend_point(const Jet& j) {
  require_extendable(j, "extend_point");
  const double f0 = j[0], f1 = j[1];
  bool any_higher = false;
  for (int n = 2; n <= j.order(); ++n)
    if (j[n] != 0.0) any_higher = true;
  if (!any_higher) return SmoothExpr::affine(f0, f1);

  std::vector<SmoothExpr> terms;
  terms.push_back(SmoothExpr::constant(f0));
  terms.push_back(SmoothExpr::affine(0.0, f1));
  for (int n = 2; n <= j.order(); ++n) {
    if (j[n] == 0.0) continue;
    double cn = n * std::ldexp(1.0, 2 * n) * (std::fabs(j[n]) / f1) * gamma_norm_bound(n) + 3.0;
    terms.push_back(SmoothExpr::monomial_bump(j[n], n, cn));
  }
  return SmoothExpr::sum(std::move(terms))
      .with_monotonicity(true, Interval{-kInf, kInf});
}

namespace {

void require_unit_pair(const Jet& j0, const Jet& j1, const char* who) {
  if (j0.base_point() != 0.0 || j1.base_point() != 1.0)
    throw validation_error(std::string(who) + ": jets must be based at 0 and 1");
  require_extendable(j0, who);
  require_extendable(j1, who);
  if (!(j0[0] < j1[0]))
    throw validation_error(std::string(who) + ": f0_0 = " + fmt(j0[0]) + " must be < f0_1 = " + fmt(j1[0]));
}

Jet reflect_jet(const Jet& j, double new_base) {
  // jets of x -> -f(1-x): component k picks up (-1)^(k+1)
  std::vector<double> d(j.order() + 1);
  double sign = -1.0;
  for (int k = 0; k <= j.order(); ++k) {
    d[k] = sign * j[k];
    sign = -sign;
  }
  return Jet(new_base, d);
}

}  // namespace

SmoothExpr extend_left(const Jet& j0, const Jet& j1) {
  require_unit_pair(j0, j1, "extend_left");
  SmoothExpr e1 = extend_point(j0);
  double mid = (j0[0] + j1[0]) / 2.0;
  double target = (2.0 * j0[0] + j1[0]) / 3.0;
  double cf = e1.inverse_eval(target);
  if (!(cf > 0.0)) throw numeric_error("extend_left: transition width came out non-positive");
  SmoothExpr bf = SmoothExpr::scaled_beta(j0[0], j1[0]);
  return glue(e1, bf, 0.0, cf).with_monotonicity(true, Interval{-kInf, mid});
}

SmoothExpr extend_right(const Jet& j0, const Jet& j1) {
  require_unit_pair(j0, j1, "extend_right");
  SmoothExpr inner = extend_left(reflect_jet(j1, 0.0), reflect_jet(j0, 1.0));
  double mid = (j0[0] + j1[0]) / 2.0;
  return SmoothExpr::compose(SmoothExpr::affine(0.0, -1.0),
                             SmoothExpr::affine_pre(inner, 1.0, -1.0))
      .with_monotonicity(true, Interval{mid, kInf});
}

SmoothExpr extend_unit_pair(const Jet& j0, const Jet& j1) {
  require_unit_pair(j0, j1, "extend_unit_pair");
  return glue(extend_left(j0, j1), extend_right(j0, j1), 0.0, 1.0);
}

namespace {

Jet lambda_scaled(const Jet& j, double c, double new_base) {
  // conjugation by l(x) = a + cx multiplies the n-th derivative by c^n
  std::vector<double> d(j.order() + 1);
  double scale = 1.0;
  for (int k = 0; k <= j.order(); ++k) {
    d[k] = scale * j[k];
    scale *= c;
  }
  return Jet(new_base, d);
}

}  // namespace

SmoothExpr extend_pair(const Jet& ja, const Jet& jb) {
  const double a = ja.base_point();
  const double c = jb.base_point() - a;
  if (!(c > 0.0)) throw validation_error("extend_pair: right base point must exceed the left");
  require_extendable(ja, "extend_pair");
  require_extendable(jb, "extend_pair");
  if (!(ja[0] < jb[0]))
    throw validation_error("extend_pair: f0 at " + fmt(a) + " = " + fmt(ja[0]) +
                           " must be < f0 at " + fmt(jb.base_point()) + " = " + fmt(jb[0]));

  if (ja.is_identity() && jb.is_identity()) return SmoothExpr::identity();

  SmoothExpr etilde = SmoothExpr::affine_pre(
      extend_unit_pair(lambda_scaled(ja, c, 0.0), lambda_scaled(jb, c, 1.0)), -a / c, 1.0 / c);
  SmoothExpr g = SmoothExpr::affine_pre(
      extend_unit_pair(lambda_scaled(identity_jet(a, ja.order()), c, 0.0),
                       lambda_scaled(identity_jet(jb.base_point(), jb.order()), c, 1.0)),
      -a / c, 1.0 / c);
  return SmoothExpr::compose(etilde, SmoothExpr::inverse_of(g));
}

PiecewiseDiffeo extend_integers(const ZJetFamily& fam) {
  std::map<int, SmoothExpr> pieces;
  for (int m = fam.window_lo() - 1; m <= fam.window_hi(); ++m)
    pieces.emplace(m, extend_pair(fam.filled_jet(m), fam.filled_jet(m + 1)));
  return PiecewiseDiffeo(fam.window_lo(), fam.window_hi(), std::move(pieces));
}

// --- PiecewiseDiffeo ------------------------------------------------------

PiecewiseDiffeo::PiecewiseDiffeo(int window_lo, int window_hi, std::map<int, SmoothExpr> pieces)
    : lo_(window_lo), hi_(window_hi), pieces_(std::move(pieces)) {
  if (lo_ > hi_) throw validation_error("piecewise window is empty");
  for (int m = lo_ - 1; m <= hi_; ++m)
    if (pieces_.find(m) == pieces_.end())
      throw validation_error("piecewise map is missing the piece for [" + std::to_string(m) +
                             ", " + std::to_string(m + 1) + "]");
  for (const auto& [m, e] : pieces_) {
    if (m < lo_ - 1 || m > hi_)
      throw validation_error("piecewise map has a stray piece at " + std::to_string(m));
    if (!e.is_increasing())
      throw validation_error("piece for [" + std::to_string(m) + ", " + std::to_string(m + 1) +
                             "] is not increasing");
  }
}

const SmoothExpr& PiecewiseDiffeo::piece(int m) const {
  auto it = pieces_.find(m);
  if (it == pieces_.end())
    throw validation_error("no piece stored for [" + std::to_string(m) + ", " + std::to_string(m + 1) + "]");
  return it->second;
}

double PiecewiseDiffeo::eval(double x) const {
  double fm = std::floor(x);
  if (fm < static_cast<double>(lo_ - 1) || fm > static_cast<double>(hi_)) return x;
  return pieces_.at(static_cast<int>(fm)).eval(x);
}

Jet PiecewiseDiffeo::jet(double x, int order) const {
  double fm = std::floor(x);
  if (fm < static_cast<double>(lo_ - 1) || fm > static_cast<double>(hi_))
    return identity_jet(x, order);
  return pieces_.at(static_cast<int>(fm)).jet(x, order);
}

double PiecewiseDiffeo::inverse_eval(double y) const {
  if (!std::isfinite(y)) throw validation_error("inversion target must be finite");
  if (y <= static_cast<double>(lo_ - 1) || y >= static_cast<double>(hi_ + 1)) return y;
  // piece values at integers are increasing, so scan for the covering piece
  for (int m = lo_ - 1; m <= hi_; ++m) {
    double right = (m == hi_) ? static_cast<double>(hi_ + 1) : eval(static_cast<double>(m + 1));
    if (y <= right || m == hi_) return pieces_.at(m).inverse_eval(y);
  }
  throw numeric_error("piecewise inversion fell through");  // unreachable
}

real_hp PiecewiseDiffeo::eval_hp(real_hp x) const {
  real_hp fm = hpmath::m_floor(x);
  if (fm < real_hp(lo_ - 1) || fm > real_hp(hi_)) return x;
  return pieces_.at(static_cast<int>(static_cast<double>(fm))).eval_hp(x);
}

nlohmann::json PiecewiseDiffeo::to_json() const {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& [m, e] : pieces_)
    pieces.push_back({{"m", m}, {"expr", e.to_json()}});
  return {{"window", {lo_, hi_}}, {"pieces", std::move(pieces)}};
}

PiecewiseDiffeo PiecewiseDiffeo::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("window") || !j.contains("pieces"))
    throw validation_error("piecewise document needs \"window\" and \"pieces\"");
  const auto& w = j["window"];
  if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer())
    throw validation_error("\"window\" must be a pair of integers");
  std::map<int, SmoothExpr> pieces;
  for (const auto& p : j["pieces"]) {
    if (!p.is_object() || !p.contains("m") || !p.contains("expr") || !p["m"].is_number_integer())
      throw validation_error("each piece needs integer \"m\" and \"expr\"");
    if (!pieces.emplace(p["m"].get<int>(), SmoothExpr::from_json(p["expr"])).second)
      throw validation_error("duplicate piece at " + p["m"].dump());
  }
  return PiecewiseDiffeo(w[0].get<int>(), w[1].get<int>(), std::move(pieces));
}

}  // namespace jetsec
