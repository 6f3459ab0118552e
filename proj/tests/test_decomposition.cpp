#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"

#include "jetsec/decomposition.hpp"
#include "jetsec/dsl.hpp"
#include "jetsec/errors.hpp"
#include "jetsec/verify.hpp"
#include "test_support.hpp"

using namespace jetsec;
using testsupport::rel_err;

namespace {

DiffeoHandle tanh_handle() {
  return dsl::validate_diffeo("x + 0.25*tanh(x)", -9.0, 9.0, 257).handle;
}

}  // namespace

TEST_CASE("integer jets of a closed-form map") {
  DiffeoHandle h = tanh_handle();
  ZJetFamily fam = jets_at_integers(h, 3, -8, 8);
  CHECK(fam.order() == 3);
  CHECK(fam.window_lo() == -8);
  CHECK(fam.window_hi() == 8);
  for (int m = -8; m <= 8; ++m) {
    const double t = std::tanh(double(m));
    const double s = 1.0 - t * t;
    const Jet& j = fam.entries().at(m);
    CHECK(rel_err(j[0], m + 0.25 * t) < 1e-9);
    CHECK(rel_err(j[1], 1.0 + 0.25 * s) < 1e-9);
    CHECK(std::fabs(j[2] - (-0.5 * t * s)) < 1e-9);
    CHECK(std::fabs(j[3] - 0.5 * s * (3.0 * t * t - 1.0)) < 1e-9);
  }

  // r = 0 records values only; the filled jet completes them with slope 1
  ZJetFamily vals = jets_at_integers(h, 0, -2, 2);
  CHECK(vals.order() == 0);
  CHECK(rel_err(vals.entries().at(1)[0], 1.0 + 0.25 * std::tanh(1.0)) < 1e-12);
  CHECK(vals.filled_jet(1)[1] == 1.0);
}

TEST_CASE("factorization splits off the integer jets") {
  DiffeoHandle h = tanh_handle();
  Factorization fac = factorize(h, 3, -3, 3);

  // the residual fixes every integer of the window and has identity jets
  for (int m = -3; m <= 3; ++m) {
    const double x = double(m);
    CHECK(std::fabs(fac.residual.eval(x) - x) < 1e-9);
    Jet j = fac.residual.jet(x, 3);
    CHECK(std::fabs(j[0] - x) < 1e-6 * std::max(1.0, std::fabs(x)));
    CHECK(std::fabs(j[1] - 1.0) < 1e-6);
    CHECK(std::fabs(j[2]) < 1e-6);
    CHECK(std::fabs(j[3]) < 1e-6);
  }

  // composing back reproduces the map
  DiffeoHandle back = compose_factorization(fac);
  double sup = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double x = -4.0 + 8.0 * double(i) / 600.0;
    sup = std::max(sup, std::fabs(back.eval(x) - h.eval(x)));
  }
  CHECK(sup < 1e-8);

  // same facts through the bundled check helpers
  verify::CheckReport rep;
  verify::append_factorization_checks(rep, "fac", h, fac, 400);
  for (const auto& e : rep.entries()) {
    INFO(e.name, " measured=", e.measured);
    CHECK(e.pass);
  }
}

TEST_CASE("factorizing the identity is exact") {
  Factorization fac = factorize(DiffeoHandle::identity(), 2, 0, 1);
  CHECK(fac.jets.is_identity());
  DiffeoHandle back = compose_factorization(fac);
  for (int i = 0; i <= 80; ++i) {
    const double x = -1.5 + 4.0 * double(i) / 80.0;
    CHECK(std::fabs(back.eval(x) - x) < 1e-12);
    CHECK(std::fabs(fac.residual.eval(x) - x) < 1e-12);
  }
}

TEST_CASE("a perturbation strictly inside one cell stays in the residual") {
  // identity plus a small bump supported in (1/6, 5/6): every integer jet of
  // h is exactly the identity jet, so the extension is literal and the
  // residual carries the whole perturbation
  const double inf = std::numeric_limits<double>::infinity();
  SmoothExpr e = SmoothExpr::sum({SmoothExpr::identity(),
                                  SmoothExpr::affine_pre(
                                      SmoothExpr::monomial_bump(0.05, 2, 3.0), -0.5, 1.0)})
                     .with_monotonicity(true, Interval{-inf, inf});
  DiffeoHandle h = DiffeoHandle::from_expr(e);

  Factorization fac = factorize(h, 2, -2, 3);
  CHECK(fac.jets.is_identity());
  for (int m = -2; m <= 3; ++m) {
    Jet j = fac.residual.jet(double(m), 2);
    CHECK(std::fabs(j[0] - double(m)) < 1e-7 * std::max(1.0, std::fabs(double(m))));
    CHECK(std::fabs(j[1] - 1.0) < 1e-7);
    CHECK(std::fabs(j[2]) < 1e-7);
  }
  // the bump itself is visible in the residual
  CHECK(fac.residual.eval(0.7) > 0.7);
  CHECK(std::fabs(fac.residual.eval(0.7) - h.eval(0.7)) < 1e-12);
}

TEST_CASE("orientation must be preserved across the whole window") {
  // increasing on the validated window, but the formula folds at |x| = 3
  DiffeoHandle h = dsl::validate_diffeo("5*atan(x) - x/2", -2.9, 2.9, 257).handle;
  try {
    (void)factorize(h, 1, -5, 5);
    CHECK(false);
  } catch (const validation_error& ex) {
    CHECK(std::string(ex.what()).find("must be > 0") != std::string::npos);
  }
}

TEST_CASE("handles and factorizations survive serialization") {
  // every describe() kind round-trips and evaluates identically
  DiffeoHandle cases[] = {
      DiffeoHandle::identity(),
      DiffeoHandle::from_expr(SmoothExpr::affine(0.5, 2.0)),
      tanh_handle(),
      DiffeoHandle::from_piecewise(
          extend_integers(ZJetFamily(1, 0, 0, {{0, Jet(0.0, {0.2, 1.5})}}))),
      DiffeoHandle::inverse(DiffeoHandle::from_expr(SmoothExpr::affine(1.0, 4.0))),
      DiffeoHandle::composed(DiffeoHandle::from_expr(SmoothExpr::affine(0.0, 2.0)),
                             tanh_handle()),
  };
  for (const DiffeoHandle& h : cases) {
    DiffeoHandle back = handle_from_json(handle_to_json(h));
    for (int i = 0; i <= 60; ++i) {
      const double x = -2.0 + 4.0 * double(i) / 60.0;
      CHECK(back.eval(x) == h.eval(x));
    }
  }

  // dsl documents re-validate on load
  nlohmann::json doc = handle_to_json(tanh_handle());
  CHECK(doc["kind"] == "dsl");
  doc["source"] = "x*x";
  CHECK_THROWS_AS((void)handle_from_json(doc), validation_error);

  // a factorization document restores both halves
  DiffeoHandle h = tanh_handle();
  Factorization fac = factorize(h, 2, -2, 2);
  Factorization back = factorization_from_json(fac.to_json());
  CHECK(back.order() == 2);
  CHECK(back.window_lo() == -2);
  CHECK(back.window_hi() == 2);
  for (int i = 0; i <= 60; ++i) {
    const double x = -3.0 + 6.0 * double(i) / 60.0;
    CHECK(back.residual.eval(x) == fac.residual.eval(x));
  }
  CHECK(back.jets.entries().at(1)[2] == fac.jets.entries().at(1)[2]);

  CHECK_THROWS_AS((void)handle_from_json(nlohmann::json{{"kind", "mystery"}}),
                  validation_error);
}
