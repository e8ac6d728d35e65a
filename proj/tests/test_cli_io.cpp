// Exercises the JSON/CSV layer directly and the installed command line tool as
// a subprocess. The tool's path arrives as a trailing positional argument (the
// build wires in the built binary) or through the RPQ_CLI environment variable.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rpq/extended.hpp"
#include "rpq/oracles.hpp"
#include "rpq/table_io.hpp"

using namespace rpq;

namespace {

std::string g_cli;

std::filesystem::path temp_file(const char* tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path();
  return dir / ("rpq_cli_test_" + std::to_string(::getpid()) + "_" + tag + "_" +
                std::to_string(counter++));
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  REQUIRE_MESSAGE(!g_cli.empty(),
                  "tool path missing: pass it as the last argument or set RPQ_CLI");
  auto out = temp_file("out");
  auto err = temp_file("err");
  std::string cmd = "\"" + g_cli + "\" " + args + " > " + out.string() + " 2> " +
                    err.string();
  int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  std::filesystem::remove(out);
  std::filesystem::remove(err);
  return r;
}

DeformationAlgebra<double> js() {
  return make_preset_algebra<double>("jagannathan-srinivasa", 0.9, 0.5);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<char*> pass{argv, argv + argc};
  if (argc > 1 && pass.back()[0] != '-') {
    g_cli = pass.back();
    pass.pop_back();
  } else if (const char* env = std::getenv("RPQ_CLI")) {
    g_cli = env;
  }
  doctest::Context ctx(static_cast<int>(pass.size()), pass.data());
  return ctx.run();
}

TEST_CASE("table json round trip is bit exact") {
  auto d = make_distribution(Kind::second_kind, js(), 3, std::vector<double>{0.3, 0.2});
  auto t = pmf_table(d);
  auto back = read_table_json(table_to_json(t));
  REQUIRE(back.entries.size() == t.entries.size());
  for (size_t i = 0; i < t.entries.size(); ++i) {
    CHECK(back.entries[i].first == t.entries[i].first);
    CHECK(back.entries[i].second == t.entries[i].second);
  }
  CHECK(back.normalization_defect == t.normalization_defect);
  CHECK(back.truncated == t.truncated);
  CHECK(back.spec.kind == t.spec.kind);

  auto da = make_distribution(Kind::absorption_second_kind, js(), 3,
                              std::vector<double>{3.0});
  auto ta = pmf_table(da);
  auto ja = table_to_json(ta);
  CHECK(ja.at("meta").contains("m_abs"));
  auto backa = read_table_json(ja);
  for (size_t i = 0; i < ta.entries.size(); ++i)
    CHECK(backa.entries[i].second == ta.entries[i].second);
}

TEST_CASE("csv layout and extended tables") {
  auto d = make_distribution(Kind::first_kind, js(), 2, std::vector<double>{0.3, 0.2});
  auto t = pmf_table(d);
  std::ostringstream csv;
  write_csv(csv, t);
  std::string s = csv.str();
  CHECK(s.rfind("r_1,r_2,probability\n", 0) == 0);
  CHECK(s.find("# normalization_defect = ") != std::string::npos);
  CHECK(s.find("# truncated = false") != std::string::npos);
  CHECK(s.find("-0") == std::string::npos);

  auto ealg = make_preset_algebra<extended_real>("jagannathan-srinivasa",
                                                 extended_real("0.9"),
                                                 extended_real("0.5"));
  CHECK(ealg.number(5) == extended_real("1.3981"));
  auto ed = make_distribution(Kind::second_kind, ealg, 2,
                              std::vector<extended_real>{extended_real("0.3")});
  auto et = pmf_table_serial(ed);
  auto ej = table_to_json(et);
  CHECK(ej.at("meta").at("precision") == "extended");
  CHECK_THROWS_AS(read_table_json(ej), domain_error);
  // values survive with more than double digits
  CHECK(format_extended(et.entries[0].second).size() > 20);
  double dd = static_cast<double>(et.entries[0].second);
  auto ddist = make_distribution(Kind::second_kind, js(), 2, std::vector<double>{0.3});
  // q-independent spot check against the double path
  CHECK(dd == doctest::Approx(pmf(ddist, {0})).epsilon(1e-14));
}

TEST_CASE("cli: coefficient evaluation") {
  auto r = run_cli("coeff --algebra q-standard --q 0.5 --x 3 --r 1,1");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("2.625") != std::string::npos);
  auto rx = run_cli("coeff --algebra q-standard --q 0.5 --x 3 --r 1,1 "
                    "--precision extended");
  CHECK(rx.exit_code == 0);
  CHECK(rx.out.find("2.625") != std::string::npos);
}

TEST_CASE("cli: tables in both formats") {
  auto r = run_cli("table --kind first-kind --algebra q-standard --q 0.5 --n 2 "
                   "--theta 0.3 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("r_1,probability\n", 0) == 0);
  CHECK(r.out.find("0.66889632107023411") != std::string::npos);

  auto out = temp_file("tbl");
  auto rj = run_cli("table --kind second-kind --algebra jagannathan-srinivasa "
                    "--p 0.9 --q 0.5 --n 3 --theta 0.3,0.2 --format json --out " +
                    out.string());
  CHECK(rj.exit_code == 0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  auto back = read_table_json(j);
  auto want = pmf_table(make_distribution(Kind::second_kind, js(), 3,
                                          std::vector<double>{0.3, 0.2}));
  REQUIRE(back.entries.size() == want.entries.size());
  for (size_t i = 0; i < want.entries.size(); ++i)
    CHECK(back.entries[i].second == want.entries[i].second);
  std::filesystem::remove(out);

  // a truncated unbounded table warns on stderr but still succeeds
  auto rt = run_cli("table --kind negative-first-kind --algebra q-standard --q 0.5 "
                    "--n 2 --theta 0.3 --max-index 3 --format csv");
  CHECK(rt.exit_code == 0);
  CHECK(rt.err.find("truncated") != std::string::npos);
  CHECK(rt.out.find("# truncated = true") != std::string::npos);
}

TEST_CASE("cli: sampling is seed reproducible") {
  std::string args = "sample --kind first-kind --algebra q-standard --q 0.5 --n 2 "
                     "--theta 0.3 --seed 11 --m 200 --format csv";
  auto a = run_cli(args);
  auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  auto c = run_cli("sample --kind first-kind --algebra q-standard --q 0.5 --n 2 "
                   "--theta 0.3 --seed 12 --m 200 --format csv");
  CHECK(a.out != c.out);

  auto j = run_cli("sample --kind multiple-heine --algebra q-standard --q 0.5 "
                   "--theta 0.3 --seed 11 --m 50 --format json");
  CHECK(j.exit_code == 0);
  auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed.at("meta").at("seed") == 11);
  CHECK(parsed.at("draws").size() == 50);
}

TEST_CASE("cli: verification run emits one json line per check") {
  auto r = run_cli("verify");
  CHECK(r.exit_code == 0);
  int lines = 0, fails = 0;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("identity"));
    CHECK(j.contains("verdict"));
    if (j.at("verdict") == "fail") ++fails;
    ++lines;
  }
  CHECK(lines > 150);
  CHECK(fails == 0);
  CHECK(r.err.find("fail") != std::string::npos);  // summary line

  auto rd = run_cli("verify --with-constructor-demo");
  CHECK(rd.exit_code == 1);
}

TEST_CASE("cli: limit distances decrease") {
  auto r = run_cli("limits --family heine --algebra q-standard --q 0.5 --theta 0.3 "
                   "--n 5,10,20");
  CHECK(r.exit_code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,distance");
  double prev = 1e9;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    double dist = std::stod(line.substr(comma + 1));
    CHECK(dist < prev);
    prev = dist;
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("cli: domain failures exit with code 2") {
  auto r = run_cli("table --kind second-kind --algebra biedenharn-macfarlane --q 0.7 "
                   "--n 12 --theta 0.3 --format csv");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("failure probability exceeds 1") != std::string::npos);

  CHECK(run_cli("table --kind ninth-kind --q 0.5 --n 2 --theta 0.3").exit_code == 2);
  CHECK(run_cli("coeff --algebra q-standard --q 1.5 --x 3 --r 1,1").exit_code == 2);
  // malformed flags are a usage error, also nonzero
  CHECK(run_cli("table --kind first-kind --q 0.5 --n 2").exit_code != 0);
}
