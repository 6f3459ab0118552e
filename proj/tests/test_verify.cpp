#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "jetsec/dsl.hpp"
#include "jetsec/errors.hpp"
#include "jetsec/extension.hpp"
#include "jetsec/verify.hpp"
#include "test_support.hpp"

using namespace jetsec;

namespace {

const verify::CheckEntry& entry(const verify::CheckReport& rep, const std::string& name) {
  for (const auto& e : rep.entries())
    if (e.name == name) return e;
  static verify::CheckEntry missing{"<missing>", false, 0.0, 0.0, ""};
  REQUIRE(false);
  return missing;
}

// replay of the point extension with every cutoff multiplied by `factor`;
// factor = 1 reproduces the construction bitwise
SmoothExpr point_with_scaled_cutoffs(const Jet& j, double factor) {
  std::vector<SmoothExpr> terms;
  terms.push_back(SmoothExpr::constant(j[0]));
  terms.push_back(SmoothExpr::affine(0.0, j[1]));
  for (int n = 2; n <= j.order(); ++n) {
    if (j[n] == 0.0) continue;
    terms.push_back(SmoothExpr::monomial_bump(
        j[n], n, verify::honest_cutoff(n, std::fabs(j[n]), j[1]) * factor));
  }
  return SmoothExpr::sum(std::move(terms)).with_monotonicity(true, Interval{});
}

// replay of the left-ray extension with the glue width multiplied by `factor`
SmoothExpr left_with_scaled_width(const Jet& j0, const Jet& j1, double factor) {
  SmoothExpr e1 = extend_point(j0);
  const double cf = e1.inverse_eval((2.0 * j0[0] + j1[0]) / 3.0);
  SmoothExpr bf = SmoothExpr::scaled_beta(j0[0], j1[0]);
  return glue(e1, bf, 0.0, cf * factor);
}

}  // namespace

TEST_CASE("check report semantics") {
  verify::CheckReport rep;
  rep.add_max("z.second", 1.0, 1.0, "here");   // boundary counts as pass
  rep.add_min("a.first", 2.0, 2.0, "here");
  rep.add("m.middle", true, 0.0, 0.0, "here");
  CHECK(rep.all_pass());
  CHECK(rep.entries().size() == 3);
  CHECK(rep.entries()[0].name == "a.first");   // sorted by name, not insertion
  CHECK(rep.entries()[1].name == "m.middle");
  CHECK(rep.entries()[2].name == "z.second");

  nlohmann::json j = rep.to_json();
  CHECK(j["all_pass"] == true);
  CHECK(j["checks"].size() == 3);
  CHECK(j["checks"][0]["name"] == "a.first");
  CHECK(rep.to_text().find("all checks passed (3 checks)") != std::string::npos);

  rep.add_max("b.too_big", 2.0, 1.0, "here");
  CHECK_FALSE(rep.all_pass());
  CHECK_FALSE(entry(rep, "b.too_big").pass);
  CHECK(rep.to_text().find("all checks passed") == std::string::npos);

  // a NaN measurement can never pass a threshold test
  verify::CheckReport nanrep;
  nanrep.add_max("n", std::nan(""), 1.0, "here");
  CHECK_FALSE(nanrep.all_pass());
}

TEST_CASE("finite-difference oracle") {
  // identity jets anywhere are exact far beyond the tolerance
  Jet id = verify::fd_jet_oracle(DiffeoHandle::identity(), 17.0, 5, 0.05);
  CHECK(std::fabs(id[0] - 17.0) < 1e-8);
  CHECK(std::fabs(id[1] - 1.0) < 1e-8);
  for (int k = 2; k <= 5; ++k) CHECK(std::fabs(id[k]) < 1e-8);

  // cubic with known derivatives; the reported error bound covers the truth
  DiffeoHandle cubic = dsl::validate_diffeo("x + 0.125*pow(x, 3)", -4.0, 4.0, 129).handle;
  const double x = 0.4;
  const double truth[6] = {x + 0.125 * x * x * x, 1.0 + 0.375 * x * x, 0.75 * x, 0.75, 0.0, 0.0};
  std::vector<double> est;
  Jet fd = verify::fd_jet_oracle(cubic, x, 5, 0.02, &est);
  for (int k = 0; k <= 5; ++k) {
    CHECK(std::fabs(fd[k] - truth[k]) < 1e-8);
    CHECK(std::fabs(fd[k] - truth[k]) <= est[std::size_t(k)]);
  }

  // steep sextic: the self-reported bound still covers the truth
  DiffeoHandle sextic = dsl::validate_diffeo("x + pow(x, 6)/100", -1.5, 1.5, 129).handle;
  const double y = 0.3;
  const double p = 0.3;
  const double truth6[7] = {y + std::pow(p, 6) / 100.0, 1.0 + 6.0 * std::pow(p, 5) / 100.0,
                            30.0 * std::pow(p, 4) / 100.0, 120.0 * std::pow(p, 3) / 100.0,
                            360.0 * std::pow(p, 2) / 100.0, 720.0 * p / 100.0, 7.2};
  std::vector<double> est6;
  Jet fd6 = verify::fd_jet_oracle(sextic, y, 6, 0.015, &est6);
  for (int k = 0; k <= 6; ++k) CHECK(std::fabs(fd6[k] - truth6[k]) <= est6[std::size_t(k)]);

  CHECK_THROWS_AS((void)verify::fd_jet_oracle(cubic, 0.0, -1, 0.05), validation_error);
  CHECK_THROWS_AS((void)verify::fd_jet_oracle(cubic, 0.0, 9, 0.05), validation_error);
  CHECK_THROWS_AS((void)verify::fd_jet_oracle(cubic, 0.0, 2, 0.0), validation_error);
  CHECK_THROWS_AS((void)verify::fd_jet_oracle(cubic, 0.0, 2, -0.1), validation_error);
}

TEST_CASE("sup norm estimate") {
  DiffeoHandle aff = DiffeoHandle::from_expr(SmoothExpr::affine(0.0, 2.0));
  CHECK(verify::sup_norm_estimate(aff, 1, -1.0, 3.0, 200) == 2.0);
  CHECK(verify::sup_norm_estimate(aff, 0, -1.0, 3.0, 201) == 6.0);
  CHECK(verify::sup_norm_estimate(aff, 2, -1.0, 3.0, 200) == 0.0);
  CHECK_THROWS_AS((void)verify::sup_norm_estimate(aff, 0, -1.0, 3.0, 99), validation_error);
  CHECK_THROWS_AS((void)verify::sup_norm_estimate(aff, -1, -1.0, 3.0, 200), validation_error);
}

TEST_CASE("replayed constants match the construction") {
  SmoothExpr g = extend_point(Jet(0.0, {0.0, 1.0, 0.0, 6.0}));
  bool checked = false;
  for (std::size_t i = 0; i < g.child_count(); ++i) {
    if (g.child(i).kind() != SmoothExpr::Kind::MonomialBump) continue;
    CHECK(g.child(i).bump_cutoff() == verify::honest_cutoff(3, 6.0, 1.0));
    checked = true;
  }
  CHECK(checked);

  // the faithful replay passes every point check
  const Jet j(0.0, {0.0, 1.0, 0.1});
  verify::CheckReport rep;
  verify::append_point_checks(rep, "replay", point_with_scaled_cutoffs(j, 1.0), j);
  CHECK(rep.all_pass());

  ZJetFamily fam(2, 0, 1, {{0, Jet(0.0, {0.3, 1.0, 0.02})}, {1, Jet(1.0, {0.9, 1.0, 0.0})}});
  const double pr = verify::plateau_radius(fam, 0);
  CHECK(pr > 0.0);
  CHECK(pr <= 1.0 / 9.0);
  CHECK(verify::safe_fd_step(fam, 0, 4) < pr);
}

TEST_CASE("a corrupted cutoff is caught in at least one direction") {
  const Jet j(0.0, {0.0, 1.0, 0.1});

  // shrinking the cutoff widens the bump into the tail region
  {
    verify::CheckReport rep;
    verify::append_point_checks(rep, "mut", point_with_scaled_cutoffs(j, 0.01), j);
    CHECK_FALSE(rep.all_pass());
    CHECK_FALSE(entry(rep, "mut.affine_tails").pass);
  }
  // growing it makes the carried derivative invisible at the honest FD step
  {
    verify::CheckReport rep;
    verify::append_point_checks(rep, "mut", point_with_scaled_cutoffs(j, 100.0), j);
    CHECK_FALSE(rep.all_pass());
    CHECK_FALSE(entry(rep, "mut.fd_jet").pass);
    CHECK(entry(rep, "mut.analytic_jet").pass);  // the lie is invisible analytically
  }
}

TEST_CASE("a corrupted glue width is caught in both directions") {
  const Jet j0(0.0, {0.0, 1.0});
  const Jet j1(1.0, {1.0, 1.0});

  {
    verify::CheckReport rep;
    verify::append_left_checks(rep, "ctl", left_with_scaled_width(j0, j1, 1.0), j0, j1);
    CHECK(rep.all_pass());
  }
  // narrow glue: the blend starts inside the certified-flat region
  {
    verify::CheckReport rep;
    verify::append_left_checks(rep, "mut", left_with_scaled_width(j0, j1, 0.01), j0, j1);
    CHECK_FALSE(entry(rep, "mut.flat_bitexact").pass);
  }
  // wide glue: unbounded left branch leaks past the midpoint ceiling
  {
    verify::CheckReport rep;
    verify::append_left_checks(rep, "mut", left_with_scaled_width(j0, j1, 100.0), j0, j1);
    CHECK_FALSE(entry(rep, "mut.range_upper").pass);
    CHECK(entry(rep, "mut.flat_bitexact").pass);
  }
}

TEST_CASE("property suite is deterministic and passes") {
  verify::CheckReport a = verify::run_paper_property_suite(0);
  CHECK(a.all_pass());
  CHECK(a.entries().size() >= 50);
  verify::CheckReport b = verify::run_paper_property_suite(0);
  CHECK(a.to_json() == b.to_json());
  // a different seed draws different instances but the invariants still hold
  CHECK(verify::run_paper_property_suite(7).all_pass());
}

TEST_CASE("continuity probes") {
  const Jet base(0.0, {0.5, 1.2, 0.0, 2.0});

  // perturbing the value translates the extension exactly
  {
    verify::SlopeReport r =
        verify::continuity_probe(base, 0, {1e-2, 1e-3, 1e-4}, -2.0, 2.0, 400);
    for (std::size_t i = 0; i < r.eps.size(); ++i)
      CHECK(std::fabs(r.sup_distance[i] - r.eps[i]) < 1e-12);
    CHECK(std::fabs(r.loglog_slope - 1.0) < 1e-3);
  }
  // perturbing a component that is zero in the base jet creates a bump whose
  // cutoff sits at its floor, so its support is wide enough to sample; small
  // eps keeps the cutoff drift from bending the fit
  {
    verify::SlopeReport r =
        verify::continuity_probe(base, 2, {1e-5, 1e-6, 1e-7}, -1.0, 1.0, 400);
    CHECK(std::fabs(r.loglog_slope - 1.0) < 0.2);
    CHECK(r.sup_distance[0] > r.sup_distance[2]);
  }
  // pair overload reacts to either end
  {
    verify::SlopeReport r = verify::continuity_probe(
        Jet(0.0, {0.0, 1.0}), Jet(1.0, {1.0, 1.0}), 1, 0, {1e-4, 1e-5, 1e-6}, -0.5, 1.5, 300);
    CHECK(std::fabs(r.loglog_slope - 1.0) < 0.2);
  }
  // family overload: a value perturbation is felt inside its cell
  {
    ZJetFamily fam(1, 0, 1, {{0, Jet(0.0, {0.2, 1.0})}, {1, Jet(1.0, {0.8, 1.0})}});
    verify::SlopeReport r =
        verify::continuity_probe(fam, 0, 0, {1e-4, 1e-5, 1e-6}, -1.0, 2.0, 300);
    CHECK(std::fabs(r.loglog_slope - 1.0) < 0.2);
  }

  CHECK_THROWS_AS((void)verify::continuity_probe(base, 0, {1e-2, 1e-3}, -1.0, 1.0, 100),
                  validation_error);
  CHECK_THROWS_AS((void)verify::continuity_probe(base, 0, {1e-3, 1e-2, 1e-4}, -1.0, 1.0, 100),
                  validation_error);
  CHECK_THROWS_AS((void)verify::continuity_probe(base, 9, {1e-2, 1e-3, 1e-4}, -1.0, 1.0, 100),
                  validation_error);
}

TEST_CASE("perturbing one family entry leaves distant pieces bitwise unchanged") {
  std::map<int, Jet> e1, e2;
  for (int m = -1; m <= 2; ++m) {
    e1.emplace(m, Jet(double(m), {m + 0.1, 1.3}));
    e2.emplace(m, Jet(double(m), {m + 0.1, 1.3}));
  }
  e2.at(-1) = Jet(-1.0, {-0.9 + 1e-4, 1.3});
  PiecewiseDiffeo p1 = extend_integers(ZJetFamily(1, -1, 2, std::move(e1)));
  PiecewiseDiffeo p2 = extend_integers(ZJetFamily(1, -1, 2, std::move(e2)));

  bool near_changed = false;
  for (int i = 0; i <= 400; ++i) {
    const double x = -2.0 + 2.0 * double(i) / 400.0;  // pieces -2 and -1
    if (p1.eval(x) != p2.eval(x)) near_changed = true;
  }
  CHECK(near_changed);
  for (int i = 0; i <= 400; ++i) {
    const double x = 1.0 + 2.0 * double(i) / 400.0;  // pieces 1 and 2: untouched jets
    CHECK(p1.eval(x) == p2.eval(x));
  }
}
