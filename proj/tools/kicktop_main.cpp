// Command-line front end: one subcommand per experiment family, each driven
// by a [section] config file with optional --set overrides.

#include <exception>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <kicktop/errors.hpp>
#include <kicktop/runner/config.hpp>
#include <kicktop/runner/experiments.hpp>

namespace {

struct Subcommand {
  std::string name;
  std::string description;
  std::set<std::string> kinds;
  std::string default_kind;
};

const std::vector<Subcommand> kSubcommands = {
    {"evolve", "entropy growth over kicks (entropy-time | revival-scan)",
     {"entropy-time", "revival-scan"}, "entropy-time"},
    {"chi", "overlap with the symmetric subspace (chi-time | chi-vs-w)",
     {"chi-time", "chi-vs-w"}, "chi-time"},
    {"deff", "effective dimension vs disorder strength", {"deff-vs-w"}, "deff-vs-w"},
    {"phase-space", "time-averaged entropy over a grid of initial states",
     {"phase-space"}, "phase-space"},
    {"spacing", "quasienergy spacing statistics of the positive parity block",
     {"spacing-stats"}, "spacing-stats"},
    {"classical", "clean quantum vs classical-ensemble entropy",
     {"classical-compare"}, "classical-compare"},
    {"fit", "least-squares model fit to a result table", {"fit"}, "fit"},
};

struct Request {
  const Subcommand* sub = nullptr;
  std::string config_path;
  std::string kind_override;
  std::string output_override;
  std::vector<std::string> overrides;
};

int run(const Request& req) {
  kicktop::RawConfig raw;
  if (!req.config_path.empty()) {
    raw = kicktop::parse_config_file(req.config_path);
  } else {
    raw.kind = req.kind_override.empty() ? req.sub->default_kind : req.kind_override;
  }
  if (!req.kind_override.empty()) raw.kind = req.kind_override;
  if (!req.sub->kinds.contains(raw.kind))
    throw kicktop::ConfigError("experiment kind [" + raw.kind + "] does not belong to '" +
                               req.sub->name + "'");
  for (const std::string& kv : req.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw kicktop::ConfigError("--set expects key=value, got '" + kv + "'");
    raw.values[kicktop::detail::trim(kv.substr(0, eq))] =
        kicktop::detail::trim(kv.substr(eq + 1));
  }
  if (!req.output_override.empty()) raw.values["output"] = req.output_override;

  const kicktop::ExperimentOutput out = kicktop::run_experiment(raw);
  if (raw.values.contains("output")) {
    kicktop::write_experiment_output(out, raw.values.at("output"));
    std::cerr << "wrote " << raw.values.at("output") << "\n";
  } else {
    out.table.write(std::cout);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"kicktop: numerical laboratory for the clean and disordered quantum kicked top"};
  app.require_subcommand(1);

  std::vector<Request> requests(kSubcommands.size());
  for (std::size_t i = 0; i < kSubcommands.size(); ++i) {
    const Subcommand& sc = kSubcommands[i];
    CLI::App* sub = app.add_subcommand(sc.name, sc.description);
    requests[i].sub = &sc;
    sub->add_option("-c,--config", requests[i].config_path,
                    "config file with one [" + sc.default_kind + "]-style section");
    if (sc.kinds.size() > 1)
      sub->add_option("-k,--kind", requests[i].kind_override,
                      "experiment kind when no config file names one");
    sub->add_option("-o,--output", requests[i].output_override, "output table path");
    sub->add_option("-s,--set", requests[i].overrides,
                    "override or add a config key, key=value")
        ->take_all();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    for (std::size_t i = 0; i < kSubcommands.size(); ++i)
      if (app.get_subcommand(kSubcommands[i].name)->parsed()) return run(requests[i]);
    return 2;
  } catch (const kicktop::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const kicktop::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const kicktop::ValidationError& e) {
    std::cerr << "numerical validation error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
