#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "varlab/app/config.hpp"
#include "varlab/app/experiments.hpp"
#include "varlab/app/record.hpp"
#include "varlab/errors.hpp"

namespace {

using namespace varlab;
using namespace varlab::app;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool trace = false;
  std::string out;
};

void add_common(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "Flat key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", flags.seed, "Run seed (overrides the config)");
  sub->add_flag("--trace", flags.trace, "Write CSV traces next to the result store");
  sub->add_option("--out", flags.out, "Append JSON-lines records to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Variational multiplicity experiments: growth constants, three-solution search, finite minimax audits, "
               "decomposable no-minimum checks."};
  cli.require_subcommand(1);
  Flags flags;
  for (const std::string& name : experiment_names()) {
    add_common(cli.add_subcommand(name, "Run the " + name + " experiment"), flags);
  }
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  const std::string experiment = cli.get_subcommands().front()->get_name();

  try {
    Config config = flags.config.empty() ? Config{} : Config::load(flags.config);
    if (config.has("experiment") && config.get_string("experiment", "") != experiment) {
      std::cerr << "error: config selects experiment '" << config.get_string("experiment", "")
                << "' but the subcommand is '" << experiment << "'\n";
      return kExitUsage;
    }
    config.set("experiment", experiment);
    if (flags.seed) config.set("seed", std::to_string(*flags.seed));

    RunOptions options;
    options.trace = flags.trace;
    if (!flags.out.empty()) options.out = flags.out;
    const RunResult result = run(config, options);
    for (const ResultRecord& r : result.records) std::cout << r.to_json().dump() << '\n';
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    return exit_code(result.status);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    if (e.code() == ErrorCode::parse) return kExitUsage;
    if (e.is_refusal()) return kExitRefused;
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
