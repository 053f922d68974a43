// beckner-verify: run verification suites and write JSON or CSV reports.
//
//   beckner-verify --suite cauchy --d 1,2 --b 3 --out report.json
//   beckner-verify --config ci.conf --format csv
//   beckner-verify --explain beckner-cauchy
//
// Exit status: 0 all pass, 1 any fail, 2 configuration error, 3 inconclusive
// (numerical non-convergence) without failures.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "beckner/errors.hpp"
#include "beckner/suite.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification suites for Beckner-type inequalities"};
  std::string config_path, suite, d, b, m, p, t, seed, tol, out, format, explain;
  bool deterministic = false, list = false, quiet = false;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--suite", suite, "measures, qtm, bessel, gamma2, cauchy, sphere or all");
  app.add_option("--d", d, "comma separated dimensions");
  app.add_option("--b", b, "comma separated Cauchy exponents");
  app.add_option("--m", m, "comma separated indices m");
  app.add_option("--p", p, "comma separated Beckner exponents");
  app.add_option("--t", t, "comma separated times");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--tol", tol, "quadrature tolerance");
  app.add_option("--out", out, "report path (stdout when absent)");
  app.add_option("--format", format, "json or csv");
  app.add_flag("--deterministic-timestamps", deterministic, "zero timings and a fixed timestamp");
  app.add_option("--explain", explain, "describe a check and exit");
  app.add_flag("--list", list, "list check ids and exit");
  app.add_flag("--quiet", quiet, "no summary on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (list) {
      for (const auto& id : beckner::check_ids()) std::cout << id << "\n";
      return 0;
    }
    if (!explain.empty()) {
      std::cout << beckner::explain_check(explain);
      return 0;
    }

    beckner::SuiteConfig cfg = config_path.empty() ? beckner::SuiteConfig{} : beckner::load_config(config_path);
    const std::pair<const char*, const std::string*> flags[] = {{"suite", &suite}, {"d", &d},       {"b", &b},
                                                                {"m", &m},         {"p", &p},       {"t", &t},
                                                                {"seed", &seed},   {"tol", &tol},   {"out", &out},
                                                                {"format", &format}};
    for (const auto& [key, value] : flags)
      if (!value->empty()) beckner::apply_setting(cfg, "", key, *value);
    if (deterministic) cfg.deterministic_timestamps = true;
    cfg.validate();

    const beckner::RunReport rep = beckner::run_suite(cfg);
    beckner::write_report(rep);
    if (!quiet)
      std::cerr << "pass " << rep.n_pass << "  saturated " << rep.n_saturated << "  fail " << rep.n_fail
                << "  inconclusive " << rep.n_inconclusive << "\n";
    return rep.exit_code();
  } catch (const beckner::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const beckner::UnknownCheck& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const beckner::NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const beckner::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
