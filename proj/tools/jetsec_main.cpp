#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jetsec/decomposition.hpp"
#include "jetsec/diffeo.hpp"
#include "jetsec/dsl.hpp"
#include "jetsec/errors.hpp"
#include "jetsec/extension.hpp"
#include "jetsec/verify.hpp"

namespace {

using nlohmann::json;
using namespace jetsec;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open \"" + path + "\"");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    // e.what() carries the byte position of the syntax error
    throw validation_error(std::string("\"") + path + "\": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write \"" + path + "\"");
  out << doc.dump(2) << "\n";
}

// JetFile: { "r": n | "inf", "truncate": n (required iff r = "inf"),
//            "jets": [ { "a": m, "values": [f0, ..., fr] }, ... ] }
ZJetFamily load_jetfile(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw validation_error(path + ": jet file must be a JSON object");
  if (!doc.contains("r")) throw validation_error(path + ": missing \"r\"");
  if (!doc.contains("jets") || !doc.at("jets").is_array())
    throw validation_error(path + ": missing \"jets\" array");

  int r = 0;
  bool infinite = false;
  const json& rj = doc.at("r");
  if (rj.is_string()) {
    if (rj.get<std::string>() != "inf")
      throw validation_error(path + ": \"r\" must be an integer or \"inf\"");
    infinite = true;
    if (!doc.contains("truncate") || !doc.at("truncate").is_number_integer())
      throw validation_error(path + ": r = \"inf\" requires an integer \"truncate\"");
    r = doc.at("truncate").get<int>();
    if (r < 0) throw validation_error(path + ": \"truncate\" must be >= 0");
  } else if (rj.is_number_integer()) {
    r = rj.get<int>();
    if (r < 0) throw validation_error(path + ": \"r\" must be >= 0");
    if (doc.contains("truncate"))
      throw validation_error(path + ": \"truncate\" is only allowed with r = \"inf\"");
  } else {
    throw validation_error(path + ": \"r\" must be an integer or \"inf\"");
  }

  std::map<int, Jet> entries;
  if (doc.at("jets").empty())
    throw validation_error(path + ": \"jets\" must contain at least one entry");
  for (const json& e : doc.at("jets")) {
    if (!e.is_object() || !e.contains("a") || !e.contains("values"))
      throw validation_error(path + ": each jet entry needs \"a\" and \"values\"");
    if (!e.at("a").is_number_integer())
      throw validation_error(path + ": \"a\" must be an integer");
    const int a = e.at("a").get<int>();
    if (entries.count(a))
      throw validation_error(path + ": duplicate jet entry at a = " + std::to_string(a));
    const json& vals = e.at("values");
    if (!vals.is_array() || vals.size() != std::size_t(r) + 1)
      throw validation_error(path + ": \"values\" at a = " + std::to_string(a) + " must have " +
                             std::to_string(r + 1) + " entries (f0..f" + std::to_string(r) +
                             ")");
    std::vector<double> d;
    d.reserve(vals.size());
    for (const json& v : vals) {
      if (!v.is_number()) throw validation_error(path + ": jet values must be numbers");
      d.push_back(v.get<double>());
    }
    entries.emplace(a, Jet(double(a), std::move(d)));
  }
  (void)infinite;  // an "inf" file is handled as its finite truncation
  const int lo = entries.begin()->first;
  const int hi = entries.rbegin()->first;
  return ZJetFamily(r, lo, hi, std::move(entries));
}

struct LoadedDiffeo {
  DiffeoHandle handle;
  std::optional<PiecewiseDiffeo> piecewise;  // set when the document is piecewise
};

LoadedDiffeo load_diffeo_file(const std::string& path) {
  const json doc = load_json_file(path);
  if (!doc.is_object()) throw validation_error(path + ": diffeomorphism file must be an object");
  if (doc.contains("pieces")) {
    PiecewiseDiffeo pd = PiecewiseDiffeo::from_json(doc);
    DiffeoHandle h = DiffeoHandle::from_piecewise(pd);
    return {std::move(h), std::move(pd)};
  }
  if (doc.contains("kind")) {
    if (doc.at("kind") == "piecewise" && doc.contains("piecewise")) {
      PiecewiseDiffeo pd = PiecewiseDiffeo::from_json(doc.at("piecewise"));
      DiffeoHandle h = DiffeoHandle::from_piecewise(pd);
      return {std::move(h), std::move(pd)};
    }
    return {handle_from_json(doc), std::nullopt};
  }
  throw validation_error(path + ": not a diffeomorphism document (no \"pieces\" or \"kind\")");
}

std::uint64_t suite_seed() {
  const char* env = std::getenv("JETSEC_SEED");
  if (!env || !*env) return 20260818ull;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw validation_error("JETSEC_SEED must be a nonnegative integer");
  return v;
}

int cmd_build(const std::string& jetfile, const std::string& out) {
  const ZJetFamily fam = load_jetfile(load_json_file(jetfile), jetfile);
  const PiecewiseDiffeo pd = extend_integers(fam);
  write_json_file(out, pd.to_json());
  std::cout << "window [" << fam.window_lo() << ", " << fam.window_hi()
            << "] compact_support=" << (fam.is_compactly_supported() ? "true" : "false")
            << "\n";
  return 0;
}

int cmd_eval(const std::string& file, double x, int order, bool inverse) {
  if (!std::isfinite(x)) throw validation_error("--at must be finite");
  const LoadedDiffeo d = load_diffeo_file(file);
  if (inverse) {
    if (order >= 0) throw validation_error("--inverse cannot be combined with --order");
    std::cout << fmt17(d.handle.inverse_eval(x)) << "\n";
    return 0;
  }
  if (order < 0) {
    std::cout << fmt17(d.handle.eval(x)) << "\n";
    return 0;
  }
  const Jet j = d.handle.jet(x, order);
  std::string line;
  for (int k = 0; k <= order; ++k) {
    if (k) line += ' ';
    line += fmt17(j[k]);
  }
  std::cout << line << "\n";
  return 0;
}

int cmd_check(const std::string& file, const std::string& jetfile, double tol) {
  const ZJetFamily fam = load_jetfile(load_json_file(jetfile), jetfile);
  const LoadedDiffeo d = load_diffeo_file(file);

  verify::CheckReport rep;
  if (d.piecewise) {
    const PiecewiseDiffeo& pd = *d.piecewise;
    if (pd.pieces_lo() != fam.window_lo() - 1 || pd.pieces_hi() != fam.window_hi())
      throw validation_error("diffeomorphism window [" + std::to_string(pd.pieces_lo() + 1) +
                             ", " + std::to_string(pd.pieces_hi()) +
                             "] does not match jet file window [" +
                             std::to_string(fam.window_lo()) + ", " +
                             std::to_string(fam.window_hi()) + "]");
    (void)tol;  // piecewise artifacts are held to the built-in thresholds
    verify::append_family_checks(rep, "check", pd, fam, /*with_fd=*/true);
  } else {
    // a generic handle is a single smooth formula, safe to difference anywhere
    verify::append_section_checks(rep, "check", d.handle, fam, tol, /*with_fd=*/true);
  }

  verify::CheckReport suite = verify::run_paper_property_suite(suite_seed());
  std::cout << rep.to_text() << suite.to_text();
  return rep.all_pass() && suite.all_pass() ? 0 : 2;
}

int cmd_factorize(const std::string& fn, const std::string& file, int r, int wlo, int whi,
                  const std::string& out, bool recompose) {
  if (fn.empty() == file.empty())
    throw validation_error("factorize needs exactly one of --fn or a diffeomorphism file");
  if (wlo > whi) throw validation_error("--window bounds must satisfy A <= B");

  DiffeoHandle h = DiffeoHandle::identity();
  if (!fn.empty()) {
    // validate slightly beyond the factorization window: the residual is
    // examined on [A-1, B+1]
    h = dsl::validate_diffeo(fn, double(wlo) - 1.5, double(whi) + 1.5, 257).handle;
  } else {
    h = load_diffeo_file(file).handle;
  }

  const Factorization fac = factorize(h, r, wlo, whi);
  write_json_file(out, fac.to_json());
  if (recompose) {
    const DiffeoHandle rt = compose_factorization(fac);
    double sup = 0.0;
    const double lo = double(wlo) - 1.0, hi = double(whi) + 1.0;
    const int samples = 1000;
    for (int i = 0; i < samples; ++i) {
      const double x = lo + (hi - lo) * (double(i) + 0.5) / double(samples);
      sup = std::max(sup, std::fabs(rt.eval(x) - h.eval(x)));
    }
    std::cout << fmt17(sup) << "\n";
  }
  return 0;
}

int cmd_plot(const std::string& file, double a, double b, int samples, const std::string& csv,
             int derivative) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw validation_error("--range bounds must be finite with a < b");
  if (samples < 2) throw validation_error("--samples must be >= 2");
  if (derivative < 0) throw validation_error("--derivative must be >= 0");
  const LoadedDiffeo d = load_diffeo_file(file);
  std::ofstream out(csv);
  if (!out) throw validation_error("cannot write \"" + csv + "\"");
  for (int i = 0; i < samples; ++i) {
    const double x = a + (b - a) * double(i) / double(samples - 1);
    const double v =
        derivative == 0 ? d.handle.eval(x) : d.handle.jet(x, derivative)[derivative];
    out << fmt17(x) << "," << fmt17(v) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constructive smooth extensions of integer jet data"};
  app.require_subcommand(1);

  std::string build_jets, build_out;
  CLI::App* build = app.add_subcommand("build", "extend a jet file to a diffeomorphism");
  build->add_option("jetfile", build_jets, "jet data JSON")->required();
  build->add_option("-o,--out", build_out, "output diffeomorphism JSON")->required();

  std::string eval_file;
  double eval_at = 0.0;
  int eval_order = -1;
  bool eval_inverse = false;
  CLI::App* ev = app.add_subcommand("eval", "evaluate a diffeomorphism file");
  ev->add_option("diffeo", eval_file, "diffeomorphism JSON")->required();
  ev->add_option("--at", eval_at, "evaluation point")->required();
  ev->add_option("--order", eval_order, "print the jet up to this order");
  ev->add_flag("--inverse", eval_inverse, "evaluate the inverse map");

  std::string check_file, check_jets;
  double check_tol = 1e-9;
  CLI::App* ck = app.add_subcommand("check", "verify a diffeomorphism against a jet file");
  ck->add_option("diffeo", check_file, "diffeomorphism JSON")->required();
  ck->add_option("jetfile", check_jets, "jet data JSON")->required();
  ck->add_option("--tol", check_tol, "jet agreement tolerance for generic formulas");

  std::string fz_fn, fz_file, fz_out;
  int fz_r = 1;
  std::vector<int> fz_window;
  bool fz_recompose = false;
  CLI::App* fz = app.add_subcommand("factorize", "split a diffeomorphism into jets + residual");
  fz->add_option("diffeo", fz_file, "diffeomorphism JSON");
  fz->add_option("--fn", fz_fn, "formula for the map, e.g. \"x + 0.25*tanh(x)\"");
  fz->add_option("--r", fz_r, "jet order")->required();
  fz->add_option("--window", fz_window, "integer window A B")->expected(2)->required();
  fz->add_option("-o,--out", fz_out, "output factorization JSON")->required();
  fz->add_flag("--recompose", fz_recompose, "print the sup round-trip error");

  std::string plot_file, plot_csv;
  std::vector<double> plot_range;
  int plot_samples = 0, plot_deriv = 0;
  CLI::App* pl = app.add_subcommand("plot", "sample a diffeomorphism to CSV");
  pl->add_option("diffeo", plot_file, "diffeomorphism JSON")->required();
  pl->add_option("--range", plot_range, "sampling range a b")->expected(2)->required();
  pl->add_option("--samples", plot_samples, "number of rows")->required();
  pl->add_option("--csv", plot_csv, "output CSV path")->required();
  pl->add_option("--derivative", plot_deriv, "plot this derivative instead of the value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (build->parsed()) return cmd_build(build_jets, build_out);
    if (ev->parsed()) return cmd_eval(eval_file, eval_at, eval_order, eval_inverse);
    if (ck->parsed()) return cmd_check(check_file, check_jets, check_tol);
    if (fz->parsed())
      return cmd_factorize(fz_fn, fz_file, fz_r, fz_window[0], fz_window[1], fz_out,
                           fz_recompose);
    if (pl->parsed())
      return cmd_plot(plot_file, plot_range[0], plot_range[1], plot_samples, plot_csv,
                      plot_deriv);
    std::cerr << "error: no command\n";
    return 1;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
