#pragma once

#include "jetsec/hp.hpp"
#include "jetsec/jet.hpp"

namespace jetsec {

// Flat-at-zero exponential kernel e(x) = exp(-1/x) for x > 0, 0 otherwise.
// Derivatives follow e^(k)(x) = p_k(1/x) e(x) with p_0 = 1 and
// p_{k+1}(t) = t^2 (p_k(t) - p_k'(t)).
double flat_exp(double x);
double flat_exp_deriv(double x, int k);

// Monotone step: 0 for t <= 0, 1 for t >= 1, e(t)/(e(t)+e(1-t)) between.
// The flat values are exact, not merely approached.
double smooth_step(double t);
Jet smooth_step_jet(double t, int order);

// Even plateau cutoff gamma(x) = smooth_step(2 - 2|x|): identically 1 on
// |x| <= 1/2, identically 0 on |x| >= 1, strictly between elsewhere.
double gamma_eval(double x);
Jet gamma_jet(double x, int order);

// Ramp alpha(x) = smooth_step(3x - 1): 0 on (-inf, 1/3], 1 on [2/3, inf).
double alpha_eval(double x);
Jet alpha_jet(double x, int order);

// Bounded strictly increasing beta(x) = 1/3 + (1 + tanh x)/12, range (1/3, 1/2).
double beta_eval(double x);
Jet beta_jet(double x, int order);

// Certified upper bound B(s) >= max_{k<=s} sup |gamma^(k)|.  Computed once per
// process per s (thread-safe) from a grid max over [1/2, 1] at step 1e-5 plus
// a first-order remainder using a coarse safety-factor-2 estimate of the next
// derivative; B(0) = 1 exactly and B is nondecreasing in s.
double gamma_norm_bound(int s);

// Extended-precision evaluation used by the finite-difference oracle.
real_hp smooth_step_hp(real_hp t);
real_hp gamma_hp(real_hp x);
real_hp alpha_hp(real_hp x);
real_hp beta_hp(real_hp x);

}  // namespace jetsec
