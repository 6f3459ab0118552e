#pragma once

#include <quadmath.h>

#include <cmath>
#include <functional>

namespace jetsec {

// Extended-precision scalar for the finite-difference oracle.  The bump-term
// cutoff constants c_n grow fast with the derivative order, which squeezes the
// region where an extension carries its jet data down to widths around 1e-4.
// Estimating a 5th derivative from samples at that scale in plain double would
// drown in rounding noise, so oracle-side evaluation runs on __float128.
using real_hp = __float128;

namespace hpmath {

inline double m_exp(double x) { return std::exp(x); }
inline double m_tanh(double x) { return std::tanh(x); }
inline double m_atan(double x) { return std::atan(x); }
inline double m_sinh(double x) { return std::sinh(x); }
inline double m_cosh(double x) { return std::cosh(x); }
inline double m_abs(double x) { return std::fabs(x); }
inline double m_floor(double x) { return std::floor(x); }

inline real_hp m_exp(real_hp x) { return expq(x); }
inline real_hp m_tanh(real_hp x) { return tanhq(x); }
inline real_hp m_atan(real_hp x) { return atanq(x); }
inline real_hp m_sinh(real_hp x) { return sinhq(x); }
inline real_hp m_cosh(real_hp x) { return coshq(x); }
inline real_hp m_abs(real_hp x) { return fabsq(x); }
inline real_hp m_floor(real_hp x) { return floorq(x); }

}  // namespace hpmath

// Preimage of y under an increasing f, in extended precision: a tight
// bracket is expanded around the double-precision seed, then Illinois
// regula falsi runs to |f(x) - y| <= 1e-30 * max(1, |y|).
real_hp invert_monotone_hp(const std::function<real_hp(real_hp)>& f, real_hp y, double seed);

}  // namespace jetsec
