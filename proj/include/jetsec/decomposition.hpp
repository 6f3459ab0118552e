#pragma once

#include "json.hpp"

#include "jetsec/diffeo.hpp"
#include "jetsec/extension.hpp"

namespace jetsec {

// h = (canonical extension of its integer jets) o residual.  The jets member
// carries the order and window; the residual has identity jets of that order
// at every integer in the window.
struct Factorization {
  ZJetFamily jets;
  DiffeoHandle residual;

  int order() const { return jets.order(); }
  int window_lo() const { return jets.window_lo(); }
  int window_hi() const { return jets.window_hi(); }

  nlohmann::json to_json() const;
};

// Reads the r-jets of h at each integer of [lo, hi].  r = 0 records values
// only.  The family constructor rejects non-increasing data, so an
// orientation-reversing h fails here with a slope or ordering message.
ZJetFamily jets_at_integers(const DiffeoHandle& h, int r, int lo, int hi);

// residual = E(jets)^{-1} o h.
Factorization factorize(const DiffeoHandle& h, int r, int lo, int hi);

// E(jets) o residual; function-level inverse of factorize.
DiffeoHandle compose_factorization(const Factorization& f);

// (De)serialization over the describe() vocabulary: identity, expr,
// piecewise, compose, inverse, dsl.  dsl entries re-validate on load, so a
// document whose formula stopped being increasing on its window is rejected.
nlohmann::json handle_to_json(const DiffeoHandle& h);
DiffeoHandle handle_from_json(const nlohmann::json& j);

Factorization factorization_from_json(const nlohmann::json& j);

}  // namespace jetsec
