#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "jetsec/decomposition.hpp"
#include "jetsec/extension.hpp"

using namespace jetsec;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "jetsec_cli_scratch";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

// Runs the CLI through the shell so env-var prefixes and quoting work.
Run cli(const std::string& args, const std::string& env_prefix = "") {
  const fs::path outp = scratch() / "stdout.txt";
  const fs::path errp = scratch() / "stderr.txt";
  std::string cmd = env_prefix + JETSEC_CLI_PATH + " " + args + " > " + outp.string() +
                    " 2> " + errp.string();
  int st = std::system(cmd.c_str());
  int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return {code, slurp(outp), slurp(errp)};
}

fs::path write_file(const std::string& name, const std::string& body) {
  fs::path p = scratch() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

fs::path write_json(const std::string& name, const nlohmann::json& j) {
  return write_file(name, j.dump(2));
}

fs::path worked_jetfile() {
  return write_json("jf.json", {{"r", 1},
                                {"window", {0, 0}},
                                {"jets", {{{"a", 0}, {"values", {0.5, 2.0}}}}}});
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("build and eval on the worked example") {
  fs::path jf = worked_jetfile();
  fs::path art = scratch() / "art.json";

  Run b = cli("build " + jf.string() + " -o " + art.string());
  CHECK(b.code == 0);
  CHECK(trimmed(b.out) == "window [0, 0] compact_support=true");
  CHECK(b.err.empty());

  nlohmann::json doc = nlohmann::json::parse(slurp(art));
  CHECK(doc.contains("pieces"));
  CHECK(doc["window"] == nlohmann::json({0, 0}));

  CHECK(trimmed(cli("eval " + art.string() + " --at 0 --order 1").out) == "0.5 2");
  CHECK(trimmed(cli("eval " + art.string() + " --at 2.5").out) == "2.5");
  CHECK(trimmed(cli("eval " + art.string() + " --inverse --at 0.5").out) == "0");

  // a far target sits in the identity region, so its preimage is itself
  CHECK(trimmed(cli("eval " + art.string() + " --inverse --at 99").out) == "99");

  Run excl = cli("eval " + art.string() + " --inverse --at 0.5 --order 2");
  CHECK(excl.code == 1);
  CHECK(excl.out.empty());
  CHECK(excl.err.find("--inverse cannot be combined with --order") != std::string::npos);
}

TEST_CASE("identity documents take the fast path") {
  fs::path id = write_json("id.json", {{"kind", "identity"}});
  CHECK(trimmed(cli("eval " + id.string() + " --at 2.5").out) == "2.5");

  // an all-identity jet family builds to literal identity pieces
  fs::path jid = write_json("jid.json", {{"r", 1},
                                         {"window", {0, 1}},
                                         {"jets",
                                          {{{"a", 0}, {"values", {0.0, 1.0}}},
                                           {{"a", 1}, {"values", {1.0, 1.0}}}}}});
  fs::path aid = scratch() / "aid.json";
  CHECK(cli("build " + jid.string() + " -o " + aid.string()).code == 0);
  nlohmann::json doc = nlohmann::json::parse(slurp(aid));
  REQUIRE(doc["pieces"].size() == 3);
  for (const auto& p : doc["pieces"]) CHECK(p["expr"]["kind"] == "identity");
}

TEST_CASE("check passes the honest build and fails a tampered jetfile") {
  fs::path jf = worked_jetfile();
  fs::path art = scratch() / "art.json";
  REQUIRE(cli("build " + jf.string() + " -o " + art.string()).code == 0);

  Run ok = cli("check " + art.string() + " " + jf.string());
  CHECK(ok.code == 0);
  CHECK(ok.out.find("all checks passed") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.err.empty());

  // the property suite seed is overridable without changing the verdict
  CHECK(cli("check " + art.string() + " " + jf.string(), "JETSEC_SEED=12345 ").code == 0);
  Run badseed = cli("check " + art.string() + " " + jf.string(), "JETSEC_SEED=abc ");
  CHECK(badseed.code == 1);
  CHECK_FALSE(badseed.err.empty());

  // editing the prescribed value makes the artifact fail the section checks
  nlohmann::json tam = nlohmann::json::parse(slurp(jf));
  tam["jets"][0]["values"][0] = 0.62;
  fs::path jbad = write_json("jf_bad.json", tam);
  Run bad = cli("check " + art.string() + " " + jbad.string());
  CHECK(bad.code == 2);
  CHECK(bad.out.find("section_analytic  FAIL") != std::string::npos);
  CHECK(bad.out.find("SOME CHECKS FAILED") != std::string::npos);
}

TEST_CASE("malformed input is a validation error on stderr only") {
  fs::path broken = write_file("broken.json", "{\"r\": 1,");
  fs::path jf = worked_jetfile();
  Run r = cli("check " + broken.string() + " " + jf.string());
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.err.find("parse error") != std::string::npos);

  Run missing = cli("eval " + (scratch() / "no_such.json").string() + " --at 0");
  CHECK(missing.code == 1);
  CHECK(missing.out.empty());
}

TEST_CASE("factorize writes a loadable document and reports the round trip") {
  fs::path fac = scratch() / "fac.json";
  Run r = cli("factorize --fn 'x + 0.25*tanh(x)' --r 3 --window -3 3 -o " + fac.string() +
              " --recompose");
  CHECK(r.code == 0);
  const double sup = std::stod(trimmed(r.out));
  CHECK(sup <= 1e-8);

  nlohmann::json doc = nlohmann::json::parse(slurp(fac));
  CHECK(doc["residual"]["kind"] == "compose");
  Factorization loaded = factorization_from_json(doc);
  CHECK(loaded.order() == 3);
  CHECK(loaded.window_lo() == -3);
  CHECK(loaded.window_hi() == 3);
  const double recomposed = compose_factorization(loaded).eval(0.5);
  CHECK(std::fabs(recomposed - (0.5 + 0.25 * std::tanh(0.5))) < 1e-8);

  // factorizing a built artifact file works the same way
  fs::path jf = worked_jetfile();
  fs::path art = scratch() / "art.json";
  REQUIRE(cli("build " + jf.string() + " -o " + art.string()).code == 0);
  Run r2 = cli("factorize " + art.string() + " --r 1 --window 0 0 -o " +
               (scratch() / "fac2.json").string() + " --recompose");
  CHECK(r2.code == 0);
  CHECK(std::stod(trimmed(r2.out)) <= 1e-8);

  Run fold = cli("factorize --fn 'x*x' --r 2 --window -2 2 -o " + (scratch() / "no.json").string());
  CHECK(fold.code == 1);
  CHECK(fold.err.find("derivative must be positive") != std::string::npos);

  Run syntax = cli("factorize --fn 'x +' --r 2 --window -2 2 -o " + (scratch() / "no.json").string());
  CHECK(syntax.code == 3);
  CHECK(syntax.err.find("at byte 3") != std::string::npos);

  Run both = cli("factorize " + art.string() + " --fn 'x' --r 1 --window 0 1 -o " +
                 (scratch() / "no.json").string());
  CHECK(both.code == 1);
  CHECK(both.err.find("exactly one") != std::string::npos);
}

TEST_CASE("plot emits bare CSV rows") {
  fs::path jf = worked_jetfile();
  fs::path art = scratch() / "art.json";
  REQUIRE(cli("build " + jf.string() + " -o " + art.string()).code == 0);

  fs::path csv = scratch() / "two.csv";
  Run r = cli("plot " + art.string() + " --range 0 1 --samples 2 --csv " + csv.string());
  CHECK(r.code == 0);
  std::vector<std::string> rows = lines_of(slurp(csv));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "0,0.5");
  CHECK(rows[1] == "1,1");

  Run badrange = cli("plot " + art.string() + " --range 1 0 --samples 5 --csv " + csv.string());
  CHECK(badrange.code == 1);
  CHECK(badrange.err.find("a < b") != std::string::npos);
}

TEST_CASE("derivative plot of a point extension respects the floor") {
  // f1 = 1, so the construction guarantees derivative >= 1/2 everywhere
  SmoothExpr g = extend_point(Jet(0.0, {0.0, 1.0, 0.0, 6.0}));
  fs::path doc = write_json("point.json", handle_to_json(DiffeoHandle::from_expr(g)));

  fs::path csv = scratch() / "deriv.csv";
  Run r = cli("plot " + doc.string() + " --range -2 2 --samples 401 --csv " + csv.string() +
              " --derivative 1");
  CHECK(r.code == 0);
  std::vector<std::string> rows = lines_of(slurp(csv));
  REQUIRE(rows.size() == 401);
  double mind = 1e300;
  for (const std::string& row : rows) {
    const auto comma = row.find(',');
    REQUIRE(comma != std::string::npos);
    mind = std::min(mind, std::stod(row.substr(comma + 1)));
  }
  CHECK(mind >= 0.5 - 1e-12);
}

TEST_CASE("bounded-range inversion fails with the numeric exit code") {
  fs::path doc = write_json("atan.json",
                            {{"kind", "dsl"}, {"source", "atan(x)"}, {"window", {-8, 8}}});
  Run r = cli("eval " + doc.string() + " --inverse --at 3");
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("inversion target outside") != std::string::npos);

  // in-range inversion works through the same document
  Run ok = cli("eval " + doc.string() + " --inverse --at 0.9");
  CHECK(ok.code == 0);
  CHECK(std::fabs(std::atan(std::stod(trimmed(ok.out))) - 0.9) < 1e-12);
}
