// popstat: command-line front end for PoPDivergence / PoPStat-COVID19.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "popstat/error.hpp"
#include "popstat/pipeline.hpp"

namespace {

struct Flags {
  popstat::CliOverrides overrides;
  std::optional<std::string> reference;
};

void add_common(CLI::App& cmd, Flags& f) {
  auto& o = f.overrides;
  cmd.add_option("--config", o.config_file, "TOML-style config file ([run], [population], ...)");
  cmd.add_option("--population", o.population, "Population prospects CSV");
  cmd.add_option("--outcomes", o.outcomes, "OWID-format COVID-19 CSV");
  cmd.add_option("--indicators-dir", o.indicators_dir, "Directory of <indicator>.csv files");
  cmd.add_option("--cutoff", o.cutoff, "Last outcome date, YYYY-MM-DD (default 2023-05-05)");
  cmd.add_option("--year", o.year, "Population year (default 2019)");
  cmd.add_option("--epsilon", o.epsilon, "Reference smoothing floor (default 1e-10)");
  cmd.add_option("--bins", o.bins, "Bin schema: joint_42 | per_sex_21 | age_only_21")
      ->check(CLI::IsMember({"joint_42", "per_sex_21", "age_only_21"}));
  cmd.add_option("--candidates", o.candidates, "Comma-separated candidate reference codes");
  cmd.add_option("--threads", o.threads, "Worker threads for the reference search");
  cmd.add_option("--out", o.output_dir, "Output directory (default popstat-out)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PoPDivergence and PoPStat-COVID19 from population pyramids and COVID-19 burden"};
  app.require_subcommand(1);

  Flags flags;
  std::function<int(const popstat::RunConfig&)> action;

  auto* divergence = app.add_subcommand("divergence", "Divergence of every country from one reference");
  add_common(*divergence, flags);
  divergence->add_option("--reference", flags.reference, "Reference country (ISO-3 code or name)")
      ->required();
  divergence->callback([&] {
    action = [&](const popstat::RunConfig& cfg) {
      popstat::cmd_divergence(cfg, *flags.reference, std::cout);
      return 0;
    };
  });

  auto* tune = app.add_subcommand("tune", "Search the reference maximizing |PoPStat| per outcome");
  add_common(*tune, flags);
  tune->callback([&] {
    action = [&](const popstat::RunConfig& cfg) {
      popstat::cmd_tune(cfg, std::cout);
      return 0;
    };
  });

  auto* popstat_cmd = app.add_subcommand("popstat", "PoPStat for a fixed or tuned reference");
  add_common(*popstat_cmd, flags);
  popstat_cmd->add_option("--reference", flags.reference, "Reference country (default: tuned)");
  popstat_cmd->callback([&] {
    action = [&](const popstat::RunConfig& cfg) {
      popstat::cmd_popstat(cfg, flags.reference, std::cout);
      return 0;
    };
  });

  auto* robustness = app.add_subcommand("robustness", "Most negative / positive references by deaths");
  add_common(*robustness, flags);
  robustness->add_option("-k", flags.overrides.k, "References per group (default 10)");
  robustness->callback([&] {
    action = [&](const popstat::RunConfig& cfg) {
      popstat::cmd_robustness(cfg, std::cout);
      return 0;
    };
  });

  auto* bench = app.add_subcommand("benchmark", "Correlate conventional indicators with burden");
  add_common(*bench, flags);
  bench->add_option("--reference", flags.reference, "PoPStat reference (default: tuned)");
  bench->callback([&] {
    action = [&](const popstat::RunConfig& cfg) {
      popstat::cmd_benchmark(cfg, flags.reference, std::cout);
      return 0;
    };
  });

  auto* run = app.add_subcommand("run", "Full pipeline: tune, popstat, robustness, benchmark, report");
  add_common(*run, flags);
  run->add_option("-k", flags.overrides.k, "References per robustness group (default 10)");
  run->add_option("--expected", flags.overrides.expected,
                  "CSV of expected values (row,outcome,r,ci_low,ci_high,tolerance) to flag mismatches");
  run->callback([&] {
    action = [&](const popstat::RunConfig& cfg) { return popstat::cmd_run(cfg, std::cout); };
  });

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = popstat::resolve_config(flags.overrides);
    return action(config);
  } catch (const std::exception& e) {
    std::cerr << "popstat: " << e.what() << '\n';
    return 1;
  }
}
