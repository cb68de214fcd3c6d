// sdde_logem: simulate, converge, audit and validate delay-jump scenarios.
#include <iostream>

#include <CLI11.hpp>

#include "logem/cli.hpp"
#include "logem/errors.hpp"

namespace {

void add_common(CLI::App* sub, logem::cli::CommandOptions& o, std::string& format) {
  sub->add_option("--config", o.config, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option_function<std::uint64_t>("--seed", [&o](const std::uint64_t& s) { o.seed = s; },
                                          "override run.seed");
  sub->add_option_function<std::string>("--out", [&o](const std::string& s) { o.out = s; },
                                        "output file (default: stdout)");
  sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", o.threads, "worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logarithmic Euler-Maruyama for delay equations with compound-Poisson jumps"};
  app.require_subcommand(1);

  logem::cli::CommandOptions opts;
  std::string format;

  auto* simulate = app.add_subcommand("simulate", "simulate one path and write it as CSV/JSON");
  add_common(simulate, opts, format);
  simulate->add_flag("--check-oracle", opts.check_oracle,
                     "compare against the closed-form solution (constant coefficients only)");
  simulate->add_flag("--allow-unvalidated", opts.allow_unvalidated,
                     "run despite failed assumptions (positivity_mode=false only)");

  auto* converge = app.add_subcommand("converge", "coupled coarse/fine strong-error study");
  add_common(converge, opts, format);
  converge->add_flag("--allow-unvalidated", opts.allow_unvalidated,
                     "run despite failed assumptions (positivity_mode=false only)");

  auto* audit = app.add_subcommand("audit", "positivity audit over many paths");
  add_common(audit, opts, format);

  auto* validate = app.add_subcommand("validate", "check the scenario against the assumptions");
  add_common(validate, opts, format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : logem::cli::kConfigError;
  }

  if (!format.empty()) opts.format = logem::parse_format(format);
  if (opts.threads == 0) opts.threads = logem::cli::threads_from_environment();

  if (simulate->parsed()) return logem::cli::cmd_simulate(opts, std::cout, std::cerr);
  if (converge->parsed()) return logem::cli::cmd_converge(opts, std::cout, std::cerr);
  if (audit->parsed()) return logem::cli::cmd_audit(opts, std::cout, std::cerr);
  return logem::cli::cmd_validate(opts, std::cout, std::cerr);
}
