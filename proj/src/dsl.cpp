#include "jetsec/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jetsec/errors.hpp"
#include "jetsec/series.hpp"

namespace jetsec::dsl {

namespace {

AstPtr make(AstNode n) { return std::make_shared<const AstNode>(std::move(n)); }

bool known_function(const std::string& f) {
  return f == "exp" || f == "tanh" || f == "atan" || f == "sinh";
}

// --- lexer ---------------------------------------------------------------

struct Token {
  enum class Type { Number, Ident, Symbol, End };
  Type type = Type::End;
  double number = 0.0;
  std::string text;  // identifier name or single-char symbol
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    cur_ = Token{};
    cur_.offset = pos_;
    if (pos_ >= s_.size()) {
      cur_.type = Token::Type::End;
      return;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin || !std::isfinite(v))
        throw parse_error("malformed numeric literal", pos_);
      cur_.type = Token::Type::Number;
      cur_.number = v;
      pos_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = pos_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
        ++j;
      cur_.type = Token::Type::Ident;
      cur_.text = s_.substr(pos_, j - pos_);
      pos_ = j;
      return;
    }
    if (std::string("+-*/(),").find(c) != std::string::npos) {
      cur_.type = Token::Type::Symbol;
      cur_.text = std::string(1, c);
      ++pos_;
      return;
    }
    throw parse_error(std::string("unexpected character '") + c + "'", pos_);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  Token cur_;
};

// --- parser ----------------------------------------------------------------
//
// expr   := term (('+'|'-') term)*
// term   := factor (('*'|'/') factor)*
// factor := '-' factor | atom
// atom   := number | 'x' | ident '(' expr ')' | 'pow' '(' expr ',' int ')'
//         | '(' expr ')'

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) {}

  AstPtr run() {
    AstPtr e = expr();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::End)
      throw parse_error("trailing input after a complete expression", t.offset);
    return e;
  }

 private:
  bool at_symbol(const char* sym) const {
    const Token& t = lex_.peek();
    return t.type == Token::Type::Symbol && t.text == sym;
  }

  void expect_symbol(const char* sym, const char* context) {
    const Token& t = lex_.peek();
    if (!at_symbol(sym))
      throw parse_error(std::string("expected '") + sym + "' " + context, t.offset);
    lex_.take();
  }

  AstPtr expr() {
    AstPtr lhs = term();
    while (at_symbol("+") || at_symbol("-")) {
      bool plus = at_symbol("+");
      lex_.take();
      AstPtr rhs = term();
      AstNode n;
      n.kind = plus ? AstNode::Kind::Add : AstNode::Kind::Sub;
      n.lhs = std::move(lhs);
      n.rhs = std::move(rhs);
      lhs = make(std::move(n));
    }
    return lhs;
  }

  AstPtr term() {
    AstPtr lhs = factor();
    while (at_symbol("*") || at_symbol("/")) {
      bool mul = at_symbol("*");
      lex_.take();
      AstPtr rhs = factor();
      AstNode n;
      n.kind = mul ? AstNode::Kind::Mul : AstNode::Kind::Div;
      n.lhs = std::move(lhs);
      n.rhs = std::move(rhs);
      lhs = make(std::move(n));
    }
    return lhs;
  }

  AstPtr factor() {
    if (at_symbol("-")) {
      lex_.take();
      AstNode n;
      n.kind = AstNode::Kind::Neg;
      n.lhs = factor();
      return make(std::move(n));
    }
    return atom();
  }

  AstPtr atom() {
    const Token t = lex_.take();
    switch (t.type) {
      case Token::Type::Number: {
        AstNode n;
        n.kind = AstNode::Kind::Literal;
        n.literal = t.number;
        return make(std::move(n));
      }
      case Token::Type::Ident: {
        if (t.text == "x") {
          AstNode n;
          n.kind = AstNode::Kind::Var;
          return make(std::move(n));
        }
        if (t.text == "pow") {
          expect_symbol("(", "after pow");
          AstPtr base = expr();
          expect_symbol(",", "between pow arguments");
          const Token k = lex_.take();
          double flo = std::floor(k.number);
          if (k.type != Token::Type::Number || flo != k.number || k.number < 0.0)
            throw parse_error("pow exponent must be a nonnegative integer literal", k.offset);
          expect_symbol(")", "closing pow");
          AstNode n;
          n.kind = AstNode::Kind::Pow;
          n.exponent = static_cast<int>(flo);
          n.lhs = std::move(base);
          return make(std::move(n));
        }
        if (known_function(t.text)) {
          expect_symbol("(", ("after " + t.text).c_str());
          AstPtr arg = expr();
          expect_symbol(")", ("closing " + t.text).c_str());
          AstNode n;
          n.kind = AstNode::Kind::Call;
          n.func = t.text;
          n.lhs = std::move(arg);
          return make(std::move(n));
        }
        throw parse_error("unknown function \"" + t.text + "\"", t.offset);
      }
      case Token::Type::Symbol:
        if (t.text == "(") {
          AstPtr inner = expr();
          expect_symbol(")", "to close the group");
          return inner;
        }
        throw parse_error("unexpected '" + t.text + "'", t.offset);
      case Token::Type::End:
        break;
    }
    throw parse_error("unexpected end of input", t.offset);
  }

  Lexer lex_;
};

}  // namespace

AstPtr parse(const std::string& text) { return Parser(text).run(); }

// --- printing --------------------------------------------------------------

namespace {

int precedence(AstNode::Kind k) {
  switch (k) {
    case AstNode::Kind::Add:
    case AstNode::Kind::Sub:
      return 1;
    case AstNode::Kind::Mul:
    case AstNode::Kind::Div:
      return 2;
    case AstNode::Kind::Neg:
      return 3;
    default:
      return 4;
  }
}

void print_node(std::ostringstream& os, const AstPtr& a, int parent_prec) {
  int prec = precedence(a->kind);
  bool parens = prec < parent_prec;
  if (parens) os << '(';
  switch (a->kind) {
    case AstNode::Kind::Var:
      os << 'x';
      break;
    case AstNode::Kind::Literal: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << a->literal;
      os << tmp.str();
      break;
    }
    case AstNode::Kind::Neg:
      os << '-';
      print_node(os, a->lhs, prec + 1);
      break;
    case AstNode::Kind::Add:
      print_node(os, a->lhs, prec);
      os << " + ";
      print_node(os, a->rhs, prec + 1);
      break;
    case AstNode::Kind::Sub:
      print_node(os, a->lhs, prec);
      os << " - ";
      print_node(os, a->rhs, prec + 1);
      break;
    case AstNode::Kind::Mul:
      print_node(os, a->lhs, prec);
      os << "*";
      print_node(os, a->rhs, prec + 1);
      break;
    case AstNode::Kind::Div:
      print_node(os, a->lhs, prec);
      os << "/";
      print_node(os, a->rhs, prec + 1);
      break;
    case AstNode::Kind::Call:
      os << a->func << '(';
      print_node(os, a->lhs, 0);
      os << ')';
      break;
    case AstNode::Kind::Pow:
      os << "pow(";
      print_node(os, a->lhs, 0);
      os << ", " << a->exponent << ')';
      break;
  }
  if (parens) os << ')';
}

}  // namespace

std::string pretty_print(const AstPtr& ast) {
  std::ostringstream os;
  print_node(os, ast, 0);
  return os.str();
}

// --- evaluation --------------------------------------------------------------

namespace {

template <typename Real>
Real eval_t(const AstNode& n, Real x) {
  switch (n.kind) {
    case AstNode::Kind::Var:
      return x;
    case AstNode::Kind::Literal:
      return Real(n.literal);
    case AstNode::Kind::Neg:
      return -eval_t(*n.lhs, x);
    case AstNode::Kind::Add:
      return eval_t(*n.lhs, x) + eval_t(*n.rhs, x);
    case AstNode::Kind::Sub:
      return eval_t(*n.lhs, x) - eval_t(*n.rhs, x);
    case AstNode::Kind::Mul:
      return eval_t(*n.lhs, x) * eval_t(*n.rhs, x);
    case AstNode::Kind::Div: {
      Real d = eval_t(*n.rhs, x);
      if (d == Real(0)) throw numeric_error("division by zero");
      return eval_t(*n.lhs, x) / d;
    }
    case AstNode::Kind::Pow: {
      Real b = eval_t(*n.lhs, x);
      Real p = Real(1);
      for (int i = 0; i < n.exponent; ++i) p *= b;
      return p;
    }
    case AstNode::Kind::Call: {
      Real a = eval_t(*n.lhs, x);
      if (n.func == "exp") return hpmath::m_exp(a);
      if (n.func == "tanh") return hpmath::m_tanh(a);
      if (n.func == "atan") return hpmath::m_atan(a);
      return hpmath::m_sinh(a);
    }
  }
  throw numeric_error("ast evaluation: corrupt node");
}

}  // namespace

double ast_eval(const AstPtr& ast, double x) {
  double v = eval_t(*ast, x);
  if (!std::isfinite(v)) throw numeric_error("expression evaluated to a non-finite value");
  return v;
}

real_hp ast_eval_hp(const AstPtr& ast, real_hp x) { return eval_t(*ast, x); }

namespace {

series::Coeffs jet_coeffs(const AstNode& n, double x, int order) {
  const int sz = order + 1;
  switch (n.kind) {
    case AstNode::Kind::Var: {
      series::Coeffs c(sz, 0.0);
      c[0] = x;
      if (order >= 1) c[1] = 1.0;
      return c;
    }
    case AstNode::Kind::Literal: {
      series::Coeffs c(sz, 0.0);
      c[0] = n.literal;
      return c;
    }
    case AstNode::Kind::Neg: {
      series::Coeffs c = jet_coeffs(*n.lhs, x, order);
      for (double& v : c) v = -v;
      return c;
    }
    case AstNode::Kind::Add:
    case AstNode::Kind::Sub: {
      series::Coeffs a = jet_coeffs(*n.lhs, x, order);
      series::Coeffs b = jet_coeffs(*n.rhs, x, order);
      for (int k = 0; k <= order; ++k) a[k] += (n.kind == AstNode::Kind::Add ? b[k] : -b[k]);
      return a;
    }
    case AstNode::Kind::Mul:
      return series::mul(jet_coeffs(*n.lhs, x, order), jet_coeffs(*n.rhs, x, order), order);
    case AstNode::Kind::Div: {
      series::Coeffs b = jet_coeffs(*n.rhs, x, order);
      if (b[0] == 0.0) throw numeric_error("division by zero while differentiating");
      return series::div(jet_coeffs(*n.lhs, x, order), b, order);
    }
    case AstNode::Kind::Pow:
      return series::pow_int(jet_coeffs(*n.lhs, x, order), n.exponent, order);
    case AstNode::Kind::Call: {
      series::Coeffs a = jet_coeffs(*n.lhs, x, order);
      if (n.func == "exp") return series::exp(a, order);
      if (n.func == "tanh") return series::tanh(a, order);
      if (n.func == "atan") return series::atan(a, order);
      return series::sinh(a, order);
    }
  }
  throw numeric_error("ast differentiation: corrupt node");
}

}  // namespace

Jet ast_jet(const AstPtr& ast, double x, int order) {
  if (order < 0) throw validation_error("jet order must be >= 0");
  Jet j = Jet::from_taylor(x, jet_coeffs(*ast, x, order));
  for (int k = 0; k <= order; ++k)
    if (!std::isfinite(j[k])) throw numeric_error("derivative overflowed to a non-finite value");
  return j;
}

// --- validated handle ------------------------------------------------------

namespace {

struct DslFn final : DiffeoBackend {
  AstPtr ast;
  std::string source;
  double lo, hi;
  int samples;
  bool saturating;

  double eval(double x) const override { return ast_eval(ast, x); }
  Jet jet(double x, int order) const override { return ast_jet(ast, x, order); }
  real_hp eval_hp(real_hp x) const override { return ast_eval_hp(ast, x); }

  double inverse_eval(double y) const override {
    // bracket pinned to the validated window: monotonicity was only sampled,
    // so bisection keeps custody and Newton is just a finisher inside it
    double a = lo, b = hi;
    double fa = eval(a), fb = eval(b);
    if (!(y >= fa && y <= fb))
      throw numeric_error("inversion target outside the validated window image");
    double tol = 1e-13 * std::max(1.0, std::fabs(y));
    while (b - a > 1e-8) {
      double mid = 0.5 * (a + b);
      if (eval(mid) < y)
        a = mid;
      else
        b = mid;
    }
    double xc = 0.5 * (a + b);
    for (int it = 0; it < 5; ++it) {
      Jet j = jet(xc, 1);
      double r = j[0] - y;
      if (std::fabs(r) <= tol) return xc;
      if (!(j[1] > 0.0)) break;
      double nx = xc - r / j[1];
      if (!(nx >= a && nx <= b)) break;
      xc = nx;
    }
    if (std::fabs(eval(xc) - y) <= tol) return xc;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (a + b);
      double v = eval(mid);
      if (std::fabs(v - y) <= tol) return mid;
      if (v < y)
        a = mid;
      else
        b = mid;
      if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(a)))
        break;
    }
    double mid = 0.5 * (a + b);
    if (std::fabs(eval(mid) - y) <= 1e4 * tol) return mid;
    throw numeric_error("inversion did not converge inside the validated window");
  }

  nlohmann::json describe() const override {
    return {{"kind", "dsl"},
            {"source", source},
            {"window", {lo, hi}},
            {"samples", samples},
            {"saturating_tails", saturating}};
  }
};

}  // namespace

ValidatedFn validate_diffeo(const AstPtr& ast, const std::string& source, double lo, double hi,
                            int samples) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    throw validation_error("validation window must satisfy lo < hi");
  if (samples < 2) throw validation_error("validation needs at least 2 samples");

  auto deriv_at = [&](double x) -> double {
    Jet j = ast_jet(ast, x, 1);  // throws numeric_error on NaN/overflow
    if (!(j[1] > 0.0)) {
      std::ostringstream os;
      os << "derivative must be positive; found " << j[1] << " at x = " << x;
      throw validation_error(os.str());
    }
    return j[1];
  };

  double max_deriv = 0.0;
  const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
  for (int i = 0; i < samples; ++i) {
    double theta = M_PI * (2.0 * i + 1.0) / (2.0 * samples);
    max_deriv = std::max(max_deriv, deriv_at(mid + rad * std::cos(theta)));
  }
  double d_lo = deriv_at(lo);
  double d_hi = deriv_at(hi);
  max_deriv = std::max({max_deriv, d_lo, d_hi});

  auto fn = std::make_shared<DslFn>();
  fn->ast = ast;
  fn->source = source;
  fn->lo = lo;
  fn->hi = hi;
  fn->samples = samples;
  fn->saturating = std::min(d_lo, d_hi) < 0.05 * max_deriv;
  bool saturating = fn->saturating;
  return ValidatedFn{DiffeoHandle(std::move(fn)), saturating};
}

ValidatedFn validate_diffeo(const std::string& text, double lo, double hi, int samples) {
  return validate_diffeo(parse(text), text, lo, hi, samples);
}

}  // namespace jetsec::dsl
