#include <iostream>

#include <CLI11.hpp>

#include "recap/cli.hpp"

int main(int argc, char** argv) {
  recap::RunConfig cfg;
  CLI::App app{"Exact verification of matrix Capelli identities for Reflection Equation algebras"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--rmatrix", cfg.rmatrix, "dj, flip or file:<path>")->capture_default_str();
    sub->add_option("--N", cfg.N, "base dimension")->capture_default_str();
    sub->add_option("--q", cfg.q, "sample values of q, or 'symbolic'")->delimiter(',');
    sub->add_option("--max-degree", cfg.max_degree, "completion degree cap")->capture_default_str();
    sub->add_option("--rule-cap", cfg.rule_cap, "rewriting rule cap")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "parallelism width")->capture_default_str();
    sub->add_option("--format", cfg.format, "text or json")->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify", "verify one identity");
  common(verify);
  verify->add_option("--identity", cfg.identity, "th, th-s, cap-as, cap-s, cap1, mre, re-ideal, consum, h-copy, "
                                                 "exchange-general, shift-scan, classical")
      ->capture_default_str();
  verify->add_option("--k", cfg.k, "level k")->capture_default_str();
  verify->add_option("--p", cfg.p, "copy index p")->capture_default_str();
  verify->add_option("--alpha", cfg.alpha, "last shift for shift-scan")->capture_default_str();
  verify->add_flag("--rigor", cfg.rigor, "certify over Q(q) by enough sample points");
  verify->add_flag("--lazy", cfg.lazy, "reduce once at the end instead of after every product");

  auto* validate = app.add_subcommand("validate", "validate an R-matrix");
  common(validate);

  auto* suite = app.add_subcommand("suite", "run a verification suite");
  common(suite);
  suite->add_option("name", cfg.suite, "smoke or full")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : recap::kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return recap::run(cfg, std::cout, std::cerr);
}
