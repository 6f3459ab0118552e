#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "jetsec/decomposition.hpp"
#include "jetsec/diffeo.hpp"
#include "jetsec/extension.hpp"

namespace jetsec::verify {

struct CheckEntry {
  std::string name;
  bool pass;
  double measured;
  double threshold;
  std::string location;
};

// Accumulates named checks; consumers always see entries sorted by name, so
// assembly order (including concurrent assembly upstream) does not matter.
class CheckReport {
 public:
  void add(std::string name, bool pass, double measured, double threshold, std::string location);
  // pass iff measured <= threshold
  void add_max(std::string name, double measured, double threshold, std::string location);
  // pass iff measured >= threshold
  void add_min(std::string name, double measured, double threshold, std::string location);

  const std::vector<CheckEntry>& entries() const;
  bool all_pass() const;
  bool empty() const { return entries_.empty(); }

  nlohmann::json to_json() const;
  std::string to_text() const;

 private:
  mutable std::vector<CheckEntry> entries_;
  mutable bool sorted_ = true;
};

// Central finite differences evaluated in extended precision, with a
// symmetric stencil wide enough to be exact on polynomials of degree
// 2*(order/2 + 2), and two Richardson stages over steps h, h/2, h/4.
// err_estimate (optional) receives a per-component error bound.
Jet fd_jet_oracle(const DiffeoHandle& h, double x, int order, double base_step,
                  std::vector<double>* err_estimate = nullptr);

// Grid max of |h^(k)| over [lo, hi] using analytic jets.
double sup_norm_estimate(const DiffeoHandle& h, int derivative_order, double lo, double hi,
                         int samples);

// The cutoff constant the point extension uses for component n, recomputed
// here from prescribed data so checks do not trust the artifact under test.
double honest_cutoff(int n, double fn_abs, double f1);

// Largest radius around integer m on which both adjacent pieces of the
// extension of fam are exact polynomials; derived by replaying the
// construction from the prescribed jets.
double plateau_radius(const ZJetFamily& fam, int m);

// Step for fd_jet_oracle at integer m keeping the whole stencil (including
// the coarsest level) inside the plateau.
double safe_fd_step(const ZJetFamily& fam, int m, int order);

// --- granular artifact checks ---------------------------------------------
// Each appends entries named "<tag>.<check>".  Thresholds and reference
// values are recomputed from the prescribed jets, never read back from the
// artifact, so a tampered constant makes the artifact disagree with them.

void append_point_checks(CheckReport& rep, const std::string& tag, const SmoothExpr& g,
                         const Jet& prescribed, int samples = 4000, bool with_fd = true);
void append_left_checks(CheckReport& rep, const std::string& tag, const SmoothExpr& g,
                        const Jet& j0, const Jet& j1, int samples = 20000, double span = 50.0);
void append_right_checks(CheckReport& rep, const std::string& tag, const SmoothExpr& g,
                         const Jet& j0, const Jet& j1, int samples = 20000, double span = 50.0);
void append_unit_pair_checks(CheckReport& rep, const std::string& tag, const SmoothExpr& g,
                             const Jet& j0, const Jet& j1, int samples = 2000);
void append_pair_checks(CheckReport& rep, const std::string& tag, const SmoothExpr& g,
                        const Jet& ja, const Jet& jb);
void append_family_checks(CheckReport& rep, const std::string& tag, const PiecewiseDiffeo& g,
                          const ZJetFamily& fam, bool with_fd);
// Section property for an arbitrary handle claiming the family's jets.
void append_section_checks(CheckReport& rep, const std::string& tag, const DiffeoHandle& h,
                           const ZJetFamily& fam, double tol, bool with_fd);
void append_factorization_checks(CheckReport& rep, const std::string& tag, const DiffeoHandle& h,
                                 const Factorization& fac, int samples = 1000);

// Every invariant above exercised on seeded instances; deterministic per seed.
CheckReport run_paper_property_suite(std::uint64_t seed);

// --- empirical continuity diagnostics --------------------------------------

struct SlopeReport {
  std::vector<double> eps;
  std::vector<double> sup_distance;
  double loglog_slope;  // least-squares fit of log sup-distance vs log eps
};

// Perturbs one jet component by each eps and reports the sup distance of the
// rebuilt extension on [lo, hi].  eps_list must be positive, strictly
// decreasing, with at least 3 entries.
SlopeReport continuity_probe(const Jet& base, int component, const std::vector<double>& eps_list,
                             double lo, double hi, int samples);
SlopeReport continuity_probe(const Jet& j0, const Jet& j1, int which, int component,
                             const std::vector<double>& eps_list, double lo, double hi,
                             int samples);
SlopeReport continuity_probe(const ZJetFamily& fam, int at, int component,
                             const std::vector<double>& eps_list, double lo, double hi,
                             int samples);

}  // namespace jetsec::verify
