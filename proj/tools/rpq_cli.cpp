#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rpq/extended.hpp"
#include "rpq/oracles.hpp"
#include "rpq/suite.hpp"
#include "rpq/table_io.hpp"

namespace {

using namespace rpq;

template <class Real>
Real parse_real(const std::string& s, const char* what) {
  try {
    if constexpr (std::is_same_v<Real, double>) {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } else {
      return Real(s);
    }
  } catch (const domain_error&) {
    throw;
  } catch (const std::exception&) {
    throw domain_error(std::string(what) + ": cannot parse '" + s +
                       "' as a number");
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (const auto& item : out)
    if (item.empty()) throw domain_error("empty entry in list '" + s + "'");
  return out;
}

template <class Real>
std::vector<Real> parse_real_list(const std::string& s, const char* what) {
  std::vector<Real> out;
  for (const auto& item : split_list(s)) out.push_back(parse_real<Real>(item, what));
  return out;
}

std::vector<long long> parse_int_list(const std::string& s, const char* what) {
  std::vector<long long> out;
  for (const auto& item : split_list(s)) {
    try {
      size_t pos = 0;
      out.push_back(std::stoll(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw domain_error(std::string(what) + ": cannot parse '" + item +
                         "' as an integer");
    }
  }
  return out;
}

// shared options of the subcommands that describe a distribution
struct DistOpts {
  std::string kind;
  std::string algebra = "q-standard";
  std::string p = "1.0";
  std::string q;
  std::string theta;
  std::string m_abs;
  long long n = 0;
  int k = -1;
  std::string eps_tail;
  long long max_index = -1;
  bool relax_theta = false;
};

void add_dist_options(CLI::App* cmd, DistOpts& o, bool with_truncation) {
  cmd->add_option("--kind", o.kind, "distribution kind id")->required();
  cmd->add_option("--algebra", o.algebra,
                  "preset: q-standard, biedenharn-macfarlane, "
                  "jagannathan-srinivasa, chakrabarty-jagannathan, quesne");
  cmd->add_option("--p", o.p, "first deformation parameter (ignored by the "
                              "one-parameter presets)");
  cmd->add_option("--q", o.q, "second deformation parameter")->required();
  cmd->add_option("--n", o.n, "trial or target count (ignored by the limit kinds)");
  cmd->add_option("--theta", o.theta, "comma separated odds/probabilities, one "
                                      "per kind of outcome");
  cmd->add_option("--m-abs", o.m_abs,
                  "comma separated absorption levels (absorption kinds only)");
  cmd->add_option("--k", o.k, "expected number of coordinates; checked against "
                              "the parameter list");
  if (with_truncation) {
    cmd->add_option("--eps-tail", o.eps_tail,
                    "stop once the unaccounted tail is below this");
    cmd->add_option("--max-index", o.max_index,
                    "hard cap per coordinate for unbounded supports");
  }
  cmd->add_flag("--relax-theta", o.relax_theta,
                "allow theta >= 1 where the trial model permits it");
}

template <class Real>
DistributionSpec<Real> build_spec(const DistOpts& o) {
  Kind kind = kind_from_string(o.kind);
  auto alg = make_preset_algebra<Real>(o.algebra, parse_real<Real>(o.p, "--p"),
                                       parse_real<Real>(o.q, "--q"));
  std::vector<Real> params;
  if (kind_uses_absorption(kind)) {
    if (o.m_abs.empty())
      throw domain_error("absorption kinds take --m-abs, not --theta");
    params = parse_real_list<Real>(o.m_abs, "--m-abs");
  } else {
    if (o.theta.empty()) throw domain_error("--theta is required for this kind");
    params = parse_real_list<Real>(o.theta, "--theta");
  }
  Truncation<Real> trunc;
  if (!o.eps_tail.empty()) trunc.eps_tail = parse_real<Real>(o.eps_tail, "--eps-tail");
  if (o.max_index >= 0) trunc.max_index = o.max_index;
  auto d = make_distribution(kind, alg, o.n, params, trunc, o.relax_theta);
  if (o.k >= 0 && o.k != d.k)
    throw domain_error("--k=" + std::to_string(o.k) + " but " +
                       std::to_string(d.k) + " parameters were given");
  return d;
}

std::ostream& open_sink(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw domain_error("cannot open output file '" + path + "'");
  return file;
}

template <class Real>
int run_coeff(const std::string& algebra, const std::string& p,
              const std::string& q, long long x, const std::string& r_list) {
  auto alg = make_preset_algebra<Real>(algebra, parse_real<Real>(p, "--p"),
                                       parse_real<Real>(q, "--q"));
  MultiIndex r = parse_int_list(r_list, "--r");
  Real v = multinomial(alg, x, r);
  if constexpr (std::is_same_v<Real, double>)
    std::cout << format_full(v) << "\n";
  else
    std::cout << format_extended(v) << "\n";
  return 0;
}

template <class Real>
int run_table(const DistOpts& o, const std::string& format,
              const std::string& out, bool serial) {
  auto d = build_spec<Real>(o);
  auto table = serial ? pmf_table_serial(d) : pmf_table(d);
  std::ofstream file;
  std::ostream& os = open_sink(out, file);
  if (format == "csv")
    write_csv(os, table);
  else if (format == "json")
    os << table_to_json(table).dump(2) << "\n";
  else
    throw domain_error("--format must be csv or json");
  if (table.truncated)
    std::cerr << "warning: table truncated before the tail closed; "
                 "normalization defect "
              << detail::real_to_text(table.normalization_defect) << "\n";
  return 0;
}

int run_sample(const DistOpts& o, long long m, uint64_t seed,
               const std::string& format, const std::string& out) {
  if (m < 1) throw domain_error("--m must be at least 1");
  auto d = build_spec<double>(o);
  auto draws = sample(d, seed, m);
  std::ofstream file;
  std::ostream& os = open_sink(out, file);
  if (format == "csv") {
    write_draws_csv<double>(os, d.k, draws);
  } else if (format == "json") {
    nlohmann::json j;
    j["meta"] = spec_meta(d);
    j["meta"]["seed"] = seed;
    j["meta"]["draw_count"] = m;
    j["draws"] = draws;
    os << j.dump(2) << "\n";
  } else {
    throw domain_error("--format must be csv or json");
  }
  return 0;
}

int run_verify(const std::string& out, bool with_demo) {
  SuiteConfig cfg;
  cfg.include_constructor_demo = with_demo;
  auto reports = run_suite(cfg);
  std::ofstream file;
  std::ostream& os = open_sink(out, file);
  write_report_lines(os, reports);
  size_t pass = 0, fail = 0, report_only = 0;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::pass) ++pass;
    else if (r.verdict == Verdict::fail) ++fail;
    else ++report_only;
  }
  std::cerr << reports.size() << " checks: " << pass << " pass, " << report_only
            << " report-only, " << fail << " fail\n";
  return fail == 0 ? 0 : 1;
}

int run_limits(const std::string& family, const std::string& algebra,
               const std::string& p, const std::string& q,
               const std::string& theta, const std::string& n_list) {
  Kind kind;
  if (family == "heine")
    kind = Kind::multiple_heine;
  else if (family == "euler")
    kind = Kind::multiple_euler;
  else
    throw domain_error("--family must be heine or euler");
  auto alg = make_preset_algebra<double>(algebra, parse_real<double>(p, "--p"),
                                         parse_real<double>(q, "--q"));
  auto th = parse_real_list<double>(theta, "--theta");
  auto ns = parse_int_list(n_list, "--n");
  std::cout << "n,distance\n";
  for (long long n : ns) {
    double dist = limit_distance(alg, th, n, kind);
    std::cout << n << "," << format_full(dist) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deformed multinomial coefficients, distributions and their "
               "verification suite"};
  app.require_subcommand(0, 1);
  // let --precision appear after the subcommand too
  app.fallthrough();

  std::string precision = "standard";
  app.add_option("--precision", precision, "standard (double) or extended "
                                           "(50 decimal digit floats)")
      ->envname("RPQ_PRECISION")
      ->check(CLI::IsMember({"standard", "extended"}));

  std::function<int()> action;

  // coeff
  auto* coeff = app.add_subcommand("coeff", "print one deformed multinomial "
                                            "coefficient");
  {
    static std::string algebra = "q-standard", p = "1.0", q, r_list;
    static long long x = 0;
    coeff->add_option("--algebra", algebra, "preset name");
    coeff->add_option("--p", p, "first deformation parameter");
    coeff->add_option("--q", q, "second deformation parameter")->required();
    coeff->add_option("--x", x, "upper argument")->required();
    coeff->add_option("--r", r_list, "comma separated lower index")->required();
    coeff->callback([&] {
      action = [&] {
        return precision == "extended"
                   ? run_coeff<extended_real>(algebra, p, q, x, r_list)
                   : run_coeff<double>(algebra, p, q, x, r_list);
      };
    });
  }

  // table
  auto* table = app.add_subcommand("table", "tabulate a distribution");
  {
    static DistOpts o;
    static std::string format = "csv", out;
    static bool serial = false;
    add_dist_options(table, o, true);
    table->add_option("--format", format, "csv or json");
    table->add_option("--out", out, "write here instead of stdout");
    table->add_flag("--serial", serial, "use the single threaded kernel");
    table->callback([&] {
      action = [&] {
        return precision == "extended"
                   ? run_table<extended_real>(o, format, out, serial)
                   : run_table<double>(o, format, out, serial);
      };
    });
  }

  // sample
  auto* samp = app.add_subcommand("sample", "draw from a distribution");
  {
    static DistOpts o;
    static std::string format = "csv", out;
    static long long m = 1;
    static uint64_t seed = 0;
    add_dist_options(samp, o, true);
    samp->add_option("--m", m, "number of draws")->required();
    samp->add_option("--seed", seed, "random seed; same seed, same draws");
    samp->add_option("--format", format, "csv or json");
    samp->add_option("--out", out, "write here instead of stdout");
    samp->callback([&] {
      action = [&] { return run_sample(o, m, seed, format, out); };
    });
  }

  // verify
  auto* verify = app.add_subcommand("verify", "run the identity suite; one "
                                              "JSON line per check");
  {
    static std::string out;
    static bool with_demo = false;
    verify->add_option("--out", out, "write here instead of stdout");
    verify->add_flag("--with-constructor-demo", with_demo,
                     "include the deliberately failing construction check");
    verify->callback([&] {
      action = [&] { return run_verify(out, with_demo); };
    });
  }

  // limits
  auto* limits = app.add_subcommand("limits", "distance between a bounded kind "
                                              "and its unbounded limit");
  {
    static std::string family, algebra = "q-standard", p = "1.0", q, theta, ns;
    limits->add_option("--family", family, "heine or euler")->required();
    limits->add_option("--algebra", algebra, "preset name");
    limits->add_option("--p", p, "first deformation parameter");
    limits->add_option("--q", q, "second deformation parameter")->required();
    limits->add_option("--theta", theta, "comma separated parameters")->required();
    limits->add_option("--n", ns, "comma separated trial counts")->required();
    limits->callback([&] {
      action = [&] { return run_limits(family, algebra, p, q, theta, ns); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!action) {
    std::cout << app.help();
    return 0;
  }
  try {
    return action();
  } catch (const rpq::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
