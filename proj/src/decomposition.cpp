#include "jetsec/decomposition.hpp"

#include <map>
#include <string>
#include <utility>

#include "jetsec/dsl.hpp"
#include "jetsec/errors.hpp"

namespace jetsec {

nlohmann::json Factorization::to_json() const {
  nlohmann::json out = jets.to_json();
  out["residual"] = residual.to_json();
  return out;
}

ZJetFamily jets_at_integers(const DiffeoHandle& h, int r, int lo, int hi) {
  if (r < 0) throw validation_error("jet order must be >= 0");
  if (lo > hi) throw validation_error("window is empty");
  std::map<int, Jet> entries;
  for (int m = lo; m <= hi; ++m) entries.emplace(m, h.jet(static_cast<double>(m), r));
  return ZJetFamily(r, lo, hi, std::move(entries));
}

Factorization factorize(const DiffeoHandle& h, int r, int lo, int hi) {
  ZJetFamily fam = jets_at_integers(h, r, lo, hi);
  DiffeoHandle ext = DiffeoHandle::from_piecewise(extend_integers(fam));
  DiffeoHandle residual = DiffeoHandle::composed(DiffeoHandle::inverse(ext), h);
  return Factorization{std::move(fam), std::move(residual)};
}

DiffeoHandle compose_factorization(const Factorization& f) {
  DiffeoHandle ext = DiffeoHandle::from_piecewise(extend_integers(f.jets));
  return DiffeoHandle::composed(std::move(ext), f.residual);
}

nlohmann::json handle_to_json(const DiffeoHandle& h) { return h.to_json(); }

DiffeoHandle handle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw validation_error("diffeomorphism document needs a string \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "identity") return DiffeoHandle::identity();
  if (kind == "expr") {
    if (!j.contains("expr")) throw validation_error("expr document needs \"expr\"");
    return DiffeoHandle::from_expr(SmoothExpr::from_json(j["expr"]));
  }
  if (kind == "piecewise") {
    if (!j.contains("piecewise")) throw validation_error("piecewise document needs \"piecewise\"");
    return DiffeoHandle::from_piecewise(PiecewiseDiffeo::from_json(j["piecewise"]));
  }
  if (kind == "compose") {
    if (!j.contains("outer") || !j.contains("inner"))
      throw validation_error("compose document needs \"outer\" and \"inner\"");
    return DiffeoHandle::composed(handle_from_json(j["outer"]), handle_from_json(j["inner"]));
  }
  if (kind == "inverse") {
    if (!j.contains("of")) throw validation_error("inverse document needs \"of\"");
    return DiffeoHandle::inverse(handle_from_json(j["of"]));
  }
  if (kind == "dsl") {
    if (!j.contains("source") || !j["source"].is_string())
      throw validation_error("dsl document needs a string \"source\"");
    const auto& w = j.contains("window") ? j["window"] : nlohmann::json();
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
      throw validation_error("dsl document needs \"window\" as a pair of numbers");
    int samples = 257;
    if (j.contains("samples")) {
      if (!j["samples"].is_number_integer() || j["samples"].get<int>() < 2)
        throw validation_error("\"samples\" must be an integer >= 2");
      samples = j["samples"].get<int>();
    }
    return dsl::validate_diffeo(j["source"].get<std::string>(), w[0].get<double>(),
                                w[1].get<double>(), samples)
        .handle;
  }
  throw validation_error("unknown diffeomorphism kind \"" + kind + "\"");
}

Factorization factorization_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("residual"))
    throw validation_error("factorization document needs \"residual\"");
  ZJetFamily fam = ZJetFamily::from_json(j);
  DiffeoHandle res = handle_from_json(j["residual"]);
  return Factorization{std::move(fam), std::move(res)};
}

}  // namespace jetsec
