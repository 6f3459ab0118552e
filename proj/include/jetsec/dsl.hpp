#pragma once

#include <memory>
#include <string>

#include "jetsec/diffeo.hpp"
#include "jetsec/hp.hpp"
#include "jetsec/jet.hpp"

namespace jetsec::dsl {

// Expression AST over one variable x: literals, unary minus, + - * /,
// calls of exp/tanh/atan/sinh, and pow(e, k) with a nonnegative integer k.
struct AstNode;
using AstPtr = std::shared_ptr<const AstNode>;

struct AstNode {
  enum class Kind { Var, Literal, Neg, Add, Sub, Mul, Div, Call, Pow };
  Kind kind;
  double literal = 0.0;
  std::string func;   // Call only: exp | tanh | atan | sinh
  int exponent = 0;   // Pow only, >= 0
  AstPtr lhs, rhs;    // Neg/Call/Pow use lhs only
};

// Recursive descent with the usual precedence; parse_error carries the byte
// offset of the offending token.
AstPtr parse(const std::string& text);

// Canonical text form; parse(pretty_print(a)) re-parses to an equal tree.
std::string pretty_print(const AstPtr& ast);

double ast_eval(const AstPtr& ast, double x);
real_hp ast_eval_hp(const AstPtr& ast, real_hp x);
Jet ast_jet(const AstPtr& ast, double x, int order);

struct ValidatedFn {
  DiffeoHandle handle;
  // True when an endpoint derivative is under 5% of the sampled maximum: the
  // tails look like they flatten out, so surjectivity onto R is suspect.
  bool saturating_tails;
};

// Samples the derivative at Chebyshev points of [lo, hi] plus the endpoints;
// rejects non-positive values.  The handle's inversion brackets inside the
// window and never trusts Newton outside it.
ValidatedFn validate_diffeo(const AstPtr& ast, const std::string& source, double lo, double hi,
                            int samples);
ValidatedFn validate_diffeo(const std::string& text, double lo, double hi, int samples);

}  // namespace jetsec::dsl
