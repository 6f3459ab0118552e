#pragma once

#include <map>
#include <vector>

#include "json.hpp"

#include "jetsec/expr.hpp"
#include "jetsec/jet.hpp"

namespace jetsec {

// Finite presentation of an integer-indexed jet family that is the identity
// outside the window [window_lo, window_hi].  Entries hold raw derivatives
// to order r at their integer base; anything missing is an identity jet.
class ZJetFamily {
 public:
  ZJetFamily(int r, int window_lo, int window_hi, std::map<int, Jet> entries);

  int order() const { return r_; }
  int window_lo() const { return lo_; }
  int window_hi() const { return hi_; }
  const std::map<int, Jet>& entries() const { return entries_; }

  // Entry at m completed by the tail rule: components above r are identity
  // components (slope 1 when r = 0, zeros above order 1).  Result order is
  // max(r, 1) so a slope is always present.
  Jet filled_jet(int m) const;

  bool is_identity() const;

  // Finite presentations always describe families that are the identity off
  // a finite set, so this is identically true; it exists to mirror the
  // classification the decomposition layer reports.
  bool is_compactly_supported() const { return true; }

  nlohmann::json to_json() const;
  static ZJetFamily from_json(const nlohmann::json& j);

 private:
  int r_;
  int lo_, hi_;
  std::map<int, Jet> entries_;
};

// Global diffeomorphism assembled from one expression per unit interval
// [m, m+1], m in [pieces_lo, pieces_hi], identity outside.  Each piece is a
// globally increasing expression; the piecewise reading selects by floor(x).
class PiecewiseDiffeo {
 public:
  PiecewiseDiffeo(int window_lo, int window_hi, std::map<int, SmoothExpr> pieces);

  int window_lo() const { return lo_; }
  int window_hi() const { return hi_; }
  int pieces_lo() const { return lo_ - 1; }
  int pieces_hi() const { return hi_; }
  const SmoothExpr& piece(int m) const;

  double eval(double x) const;
  Jet jet(double x, int order) const;
  double inverse_eval(double y) const;
  real_hp eval_hp(real_hp x) const;

  nlohmann::json to_json() const;
  static PiecewiseDiffeo from_json(const nlohmann::json& j);

 private:
  int lo_, hi_;                      // family window [A, B]; pieces cover [A-1, B+1]
  std::map<int, SmoothExpr> pieces_;
};

// Realizes prescribed derivatives at 0: f0 + f1 x plus one localized
// monomial bump per nonzero higher component.  Output is increasing, equals
// the affine part bit-exactly for |x| >= 1/3, and its derivative never
// drops below f1/2.
SmoothExpr extend_point(const Jet& j);

// Left-ray extension for jets at {0, 1}: the point extension of the left
// jet glued into a bounded plateau curve; range (-inf, (f0_0+f0_1)/2).
SmoothExpr extend_left(const Jet& j0, const Jet& j1);

// Mirror image of extend_left under x -> 1-x with value negation; preserves
// the right jet; range ((f0_0+f0_1)/2, +inf).
SmoothExpr extend_right(const Jet& j0, const Jet& j1);

// Diffeomorphism of the line realizing both jets at {0, 1}.
SmoothExpr extend_unit_pair(const Jet& j0, const Jet& j1);

// General doubleton {a, a+c}: affine conjugation onto {0, 1} with the
// derivative rescaling c^n, then normalization by the conjugated identity
// extension so that identity jets map to the literal identity.
SmoothExpr extend_pair(const Jet& ja, const Jet& jb);

// One extend_pair per unit interval; identity pairs short-circuit, so the
// result is the identity expression outside [window_lo-1, window_hi+1].
PiecewiseDiffeo extend_integers(const ZJetFamily& fam);

}  // namespace jetsec
