#include "popstat/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json_io.hpp"
#include "popstat/csv.hpp"
#include "popstat/error.hpp"

namespace popstat {
namespace fs = std::filesystem;
namespace {

std::ifstream open_input(const fs::path& path, std::string_view what) {
  if (path.empty()) throw Error(fmt::format("no {} file given", what));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {} file {}", what, path.string()));
  return in;
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<CountryCode> parse_code_list(const std::vector<std::string>& items) {
  std::vector<CountryCode> out;
  for (const auto& item : items) {
    auto code = CountryCode::parse(item);
    if (!code) code = code_for_name(item);
    if (!code) throw Error(fmt::format("candidate '{}' is not an ISO-3 code or known country", item));
    out.push_back(*code);
  }
  return out;
}

std::vector<std::string> split_list(std::string_view text) {
  KeyValueConfig tmp;
  tmp.set("", "v", std::string(text));
  return tmp.get_list("", "v");
}

template <typename T>
T parse_number(const std::string& text, std::string_view what) {
  T v{};
  auto t = csv::trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw Error(fmt::format("{}: '{}' is not a valid number", what, text));
  }
  return v;
}

std::vector<CountryCode> keys(const PyramidMap& pyramids) {
  std::vector<CountryCode> out;
  for (const auto& [code, _] : pyramids) out.push_back(code);
  return out;
}

std::string fmt_r(const CorrelationResult& c) {
  return fmt::format("r={} p={} CI=({}, {}) R2={} n={}", format_fixed(c.r, 3), format_p(c.p_value),
                     format_fixed(c.ci_low, 2), format_fixed(c.ci_high, 2),
                     format_fixed(c.r_squared, 2), c.n);
}

std::string benchmark_to_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << "indicator,outcome,r,p_value,ci_low,ci_high,r_squared,n\n";
  auto line = [&](const std::string& name, std::string_view outcome,
                  const std::optional<CorrelationResult>& c) {
    if (!c) {
      os << name << ',' << outcome << ",NA,NA,NA,NA,NA,0\n";
      return;
    }
    os << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", name, outcome, c->r,
                      c->p_value, c->ci_low, c->ci_high, c->r_squared, c->n);
  };
  for (const auto& r : rows) {
    line(r.indicator_name, "cases", r.cases);
    line(r.indicator_name, "deaths", r.deaths);
  }
  return os.str();
}

}  // namespace

Date RunConfig::cutoff_date() const {
  auto d = parse_date(cutoff);
  if (!d) throw Error(fmt::format("cutoff '{}' is not an ISO-8601 date (YYYY-MM-DD)", cutoff));
  return *d;
}

TuningOptions RunConfig::tuning_options() const {
  return TuningOptions{epsilon, bins, candidates, threads};
}

std::map<std::string, std::string> RunConfig::echo() const {
  std::string cands;
  for (const auto& c : candidates) cands += (cands.empty() ? "" : ",") + c.str();
  return {{"population", population.string()},
          {"outcomes", outcomes.string()},
          {"indicators_dir", indicators_dir.string()},
          {"expected", expected.string()},
          {"output_dir", output_dir.string()},
          {"cutoff", cutoff},
          {"year", std::to_string(year)},
          {"epsilon", fmt::format("{:g}", epsilon)},
          {"bins", std::string(to_string(bins))},
          {"candidates", cands.empty() ? "all" : cands},
          {"k", std::to_string(k)},
          {"threads", std::to_string(threads)}};
}

void RunConfig::validate() const {
  (void)cutoff_date();
  if (!(epsilon > 0.0)) throw Error(fmt::format("epsilon must be positive, got {}", epsilon));
  if (k == 0) throw Error("k must be at least 1");
}

RunConfig resolve_config(const CliOverrides& cli) {
  KeyValueConfig file;
  if (cli.config_file) file = KeyValueConfig::load(*cli.config_file);
  return resolve_config(file, cli);
}

RunConfig resolve_config(const KeyValueConfig& file, const CliOverrides& cli) {
  RunConfig cfg;
  cfg.file = file;
  constexpr std::string_view run = "run";
  auto path = [&](const std::optional<fs::path>& flag, std::string_view key, fs::path& target) {
    if (flag) {
      target = *flag;
    } else if (auto v = file.get(run, key)) {
      target = *v;
    }
  };
  path(cli.population, "population", cfg.population);
  path(cli.outcomes, "outcomes", cfg.outcomes);
  path(cli.indicators_dir, "indicators_dir", cfg.indicators_dir);
  path(cli.expected, "expected", cfg.expected);
  path(cli.output_dir, "out", cfg.output_dir);

  if (cli.cutoff) {
    cfg.cutoff = *cli.cutoff;
  } else if (auto v = file.get(run, "cutoff")) {
    cfg.cutoff = *v;
  }
  if (cli.year) {
    cfg.year = *cli.year;
  } else if (auto v = file.get(run, "year")) {
    cfg.year = parse_number<int>(*v, "year");
  }
  if (cli.epsilon) {
    cfg.epsilon = *cli.epsilon;
  } else if (auto v = file.get(run, "epsilon")) {
    cfg.epsilon = parse_number<double>(*v, "epsilon");
  }
  std::optional<std::string> bins = cli.bins ? cli.bins : file.get(run, "bins");
  if (bins) {
    auto schema = parse_bin_schema(*bins);
    if (!schema) {
      throw Error(fmt::format("unknown bin schema '{}' (joint_42, per_sex_21, age_only_21)", *bins));
    }
    cfg.bins = *schema;
  }
  if (cli.candidates) {
    cfg.candidates = parse_code_list(split_list(*cli.candidates));
  } else {
    cfg.candidates = parse_code_list(file.get_list(run, "candidates"));
  }
  if (cli.k) {
    cfg.k = *cli.k;
  } else if (auto v = file.get(run, "k")) {
    cfg.k = parse_number<std::size_t>(*v, "k");
  }
  if (cli.threads) {
    cfg.threads = *cli.threads;
  } else if (auto v = file.get(run, "threads")) {
    cfg.threads = parse_number<unsigned>(*v, "threads");
  }
  cfg.validate();
  return cfg;
}

PyramidBuild load_pyramids(const RunConfig& config, std::vector<std::string>* warnings) {
  auto in = open_input(config.population, "population");
  auto extract = parse_population(in, config.year, PopulationColumns::from_config(config.file));
  if (extract.rows.empty()) {
    throw DegenerateInput(fmt::format("population file {} has no country rows for year {}",
                                      config.population.string(), config.year));
  }
  auto build = build_pyramids(extract.rows);
  if (warnings && !extract.skipped_locations.empty()) {
    warnings->push_back(fmt::format("{} non-country or unresolved locations skipped in population file",
                                    extract.skipped_locations.size()));
  }
  return build;
}

std::vector<IndicatorTable> load_indicators(const RunConfig& config,
                                            std::vector<std::string>& warnings) {
  std::vector<IndicatorTable> out;
  if (config.indicators_dir.empty()) {
    warnings.push_back("no indicators directory given; benchmark skipped");
    return out;
  }
  std::vector<std::string> names = standard_indicator_names();
  for (const auto& section : config.file.sections_with_prefix("indicator.")) {
    auto name = section.substr(std::string_view("indicator.").size());
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
  for (const auto& name : names) {
    const auto file_name = config.file.get_or("indicator." + name, "file", name + ".csv");
    const fs::path path = config.indicators_dir / file_name;
    if (!fs::exists(path)) {
      warnings.push_back(fmt::format("indicator file {} not found; '{}' skipped", path.string(), name));
      continue;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open indicator file " + path.string());
    out.push_back(parse_indicator(in, name, IndicatorColumns::from_config(config.file, name)));
  }
  if (out.empty()) warnings.push_back("no indicator files found; benchmark skipped");
  return out;
}

LoadedData load_data(const RunConfig& config, bool with_indicators) {
  LoadedData data;
  auto build = load_pyramids(config, &data.warnings);
  data.warnings.push_back(
      fmt::format("population variant: estimates for {} (no projection variant is used)", config.year));

  auto in = open_input(config.outcomes, "outcomes");
  auto outcomes = parse_outcomes(in, config.cutoff_date(), OutcomeColumns::from_config(config.file));
  if (outcomes.non_monotone_steps > 0) {
    data.warnings.push_back(fmt::format(
        "{} downward revisions found in cumulative outcome series", outcomes.non_monotone_steps));
  }

  std::vector<IndicatorTable> indicators;
  if (with_indicators) indicators = load_indicators(config, data.warnings);

  data.joined = join(build.pyramids, outcomes.records, std::move(indicators));
  auto& ex = data.joined.exclusions;
  ex.insert(ex.end(), build.exclusions.begin(), build.exclusions.end());
  ex.insert(ex.end(), outcomes.exclusions.begin(), outcomes.exclusions.end());
  std::stable_sort(ex.begin(), ex.end(),
                   [](const Exclusion& a, const Exclusion& b) { return a.code < b.code; });

  std::map<CountryCode, double> cases, deaths;
  for (const auto& [code, rec] : data.joined.outcomes) {
    cases.emplace(code, rec.cases_per_million);
    deaths.emplace(code, rec.deaths_per_million);
  }
  data.log_cases = log_outcomes(cases, data.joined.countries);
  data.log_deaths = log_outcomes(deaths, data.joined.countries);
  return data;
}

CountryCode resolve_reference(std::string_view text, const std::vector<CountryCode>& known) {
  auto code = CountryCode::parse(csv::trim(text));
  if (!code) code = code_for_name(text);
  if (code && std::find(known.begin(), known.end(), *code) != known.end()) return *code;

  std::string suggestions;
  for (const auto& c : near_matches(text, known)) {
    suggestions += fmt::format("{}{} ({})", suggestions.empty() ? "" : ", ", c.str(), display_name(c));
  }
  throw Error(fmt::format("unknown reference '{}'; did you mean: {}", text,
                          suggestions.empty() ? "(no countries loaded)" : suggestions));
}

std::string divergence_to_csv(const DivergenceVector& dv) {
  std::vector<std::pair<double, CountryCode>> rows;
  for (const auto& [code, v] : dv.values) rows.emplace_back(v, code);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out = "code,divergence\n";
  for (const auto& [v, code] : rows) out += fmt::format("{},{:.17g}\n", code.str(), v);
  return out;
}

DivergenceVector cmd_divergence(const RunConfig& config, std::string_view reference,
                                std::ostream& log) {
  auto build = load_pyramids(config);
  const auto ref = resolve_reference(reference, keys(build.pyramids));
  auto dv = divergence_vector(build.pyramids.at(ref), build.pyramids, config.epsilon, config.bins,
                              config.threads);
  const auto path = config.output_dir / fmt::format("divergence_{}.csv", ref.str());
  write_file(path, divergence_to_csv(dv));
  log << fmt::format("reference={} countries={} schema={} -> {}\n", ref.str(), dv.values.size(),
                     to_string(config.bins), path.string());
  return dv;
}

TuningResult cmd_tune(const RunConfig& config, std::ostream& log) {
  auto data = load_data(config, false);
  auto result = tune(data.joined.pyramids, data.log_cases, data.log_deaths, config.tuning_options());
  write_file(config.output_dir / "tuning.csv", tuning_to_csv(result));
  write_file(config.output_dir / "tuning.json", tuning_to_json(result));
  write_file(config.output_dir / "exclusions.tsv", exclusions_to_tsv(data.joined.exclusions));
  auto code = [](const std::optional<CountryCode>& c) { return c ? c->str() : std::string("undefined"); };
  log << fmt::format("best_cases={} best_deaths={}\n", code(result.best_cases), code(result.best_deaths));
  return result;
}

namespace {

PopStatOutcome compute_popstat(const RunConfig& config, const LoadedData& data,
                               std::optional<std::string> reference,
                               const std::optional<TuningResult>& tuned) {
  const auto& pyramids = data.joined.pyramids;
  std::optional<CountryCode> ref_cases, ref_deaths;
  if (reference) {
    ref_cases = ref_deaths = resolve_reference(*reference, keys(pyramids));
  } else {
    TuningResult t = tuned ? *tuned : tune(pyramids, data.log_cases, data.log_deaths, config.tuning_options());
    ref_cases = t.best_cases;
    ref_deaths = t.best_deaths;
    if (!ref_cases || !ref_deaths) throw DegenerateInput("tuning found no defined reference");
  }
  return PopStatOutcome{
      *ref_cases, *ref_deaths,
      popstat(*ref_cases, pyramids, data.log_cases, config.epsilon, config.bins),
      popstat(*ref_deaths, pyramids, data.log_deaths, config.epsilon, config.bins)};
}

nlohmann::json popstat_json(const PopStatOutcome& p) {
  auto cases = detail::to_json(p.cases);
  cases["reference"] = p.reference_cases.str();
  auto deaths = detail::to_json(p.deaths);
  deaths["reference"] = p.reference_deaths.str();
  return {{"cases", cases}, {"deaths", deaths}};
}

}  // namespace

PopStatOutcome cmd_popstat(const RunConfig& config, std::optional<std::string> reference,
                           std::ostream& log) {
  auto data = load_data(config, false);
  auto result = compute_popstat(config, data, std::move(reference), std::nullopt);
  write_file(config.output_dir / "popstat.json", popstat_json(result).dump(2) + "\n");
  log << fmt::format("cases  reference={} {}\n", result.reference_cases.str(), fmt_r(result.cases));
  log << fmt::format("deaths reference={} {}\n", result.reference_deaths.str(), fmt_r(result.deaths));
  return result;
}

RobustnessTable cmd_robustness(const RunConfig& config, std::ostream& log) {
  auto data = load_data(config, false);
  auto table = robustness_sweep(data.joined.pyramids, data.log_cases, data.log_deaths, config.k,
                                config.tuning_options());
  write_file(config.output_dir / "robustness.csv", robustness_to_csv(table));
  write_file(config.output_dir / "robustness.json", robustness_to_json(table));
  for (const auto* group : {&table.regressive, &table.progressive}) {
    for (const auto& e : *group) {
      log << fmt::format("{} {} cases r={} deaths r={}\n",
                         group == &table.regressive ? "regressive " : "progressive", e.reference.str(),
                         format_fixed(e.cases.r, 3), format_fixed(e.deaths.r, 3));
    }
  }
  return table;
}

std::vector<BenchmarkRow> cmd_benchmark(const RunConfig& config, std::optional<std::string> reference,
                                        std::ostream& log) {
  auto data = load_data(config, true);
  if (data.joined.indicators.empty()) throw Error("no indicator files found under " + config.indicators_dir.string());
  auto ps = compute_popstat(config, data, std::move(reference), std::nullopt);
  auto rows = benchmark(data.joined.indicators, data.log_cases, data.log_deaths, ps.cases, ps.deaths);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    arr.push_back({{"indicator", row.indicator_name},
                   {"cases", row.cases ? detail::to_json(*row.cases) : nlohmann::json(nullptr)},
                   {"deaths", row.deaths ? detail::to_json(*row.deaths) : nlohmann::json(nullptr)}});
  }
  write_file(config.output_dir / "benchmark.json", arr.dump(2) + "\n");
  write_file(config.output_dir / "benchmark.csv", benchmark_to_csv(rows));
  for (const auto& row : rows) {
    log << fmt::format("{:<20} cases {}  deaths {}\n", row.indicator_name,
                       row.cases ? fmt_r(*row.cases) : "n/a", row.deaths ? fmt_r(*row.deaths) : "n/a");
  }
  for (const auto& w : data.warnings) log << "warning: " << w << '\n';
  return rows;
}

int cmd_run(const RunConfig& config, std::ostream& log) {
  std::string stage = "ingest";
  const fs::path status_path = config.output_dir / "run_status.json";
  auto status = [&](std::string_view state, std::string_view error) {
    nlohmann::json j = {{"stage", stage}, {"status", state}};
    if (!error.empty()) j["error"] = error;
    write_file(status_path, j.dump(2) + "\n");
  };

  try {
    fs::create_directories(config.output_dir);
    status("running", "");

    ReportInputs inputs;
    auto data = load_data(config, true);
    inputs.metadata = RunMetadata{config.cutoff,         config.year,
                                  config.epsilon,        config.bins,
                                  data.joined.countries.size(), "estimates",
                                  data.warnings,         config.echo()};
    inputs.exclusions = data.joined.exclusions;
    inputs.dropped_cases = data.log_cases.dropped;
    inputs.dropped_deaths = data.log_deaths.dropped;
    write_file(config.output_dir / "exclusions.tsv", exclusions_to_tsv(data.joined.exclusions));
    if (!config.expected.empty()) {
      auto in = open_input(config.expected, "expected values");
      inputs.expected = parse_expected_cells(in);
    }

    stage = "tune";
    const auto& pyramids = data.joined.pyramids;
    inputs.tuning = tune(pyramids, data.log_cases, data.log_deaths, config.tuning_options());
    write_file(config.output_dir / "tuning.csv", tuning_to_csv(*inputs.tuning));

    stage = "popstat";
    auto ps = compute_popstat(config, data, std::nullopt, inputs.tuning);
    inputs.popstat_reference_cases = ps.reference_cases;
    inputs.popstat_reference_deaths = ps.reference_deaths;
    inputs.popstat_cases = ps.cases;
    inputs.popstat_deaths = ps.deaths;
    log << fmt::format("best_cases={} best_deaths={}\n", ps.reference_cases.str(),
                       ps.reference_deaths.str());
    log << fmt::format("PoPStat cases  {}\n", fmt_r(ps.cases));
    log << fmt::format("PoPStat deaths {}\n", fmt_r(ps.deaths));

    stage = "robustness";
    {
      std::size_t defined = 0;
      for (const auto& s : inputs.tuning->per_reference) defined += std::isnan(s.r_deaths) ? 0 : 1;
      const std::size_t k = std::min(config.k, defined);
      if (k > 0) {
        inputs.robustness = robustness_sweep(*inputs.tuning, pyramids, data.log_cases,
                                             data.log_deaths, k, config.tuning_options());
        write_file(config.output_dir / "robustness.csv", robustness_to_csv(*inputs.robustness));
      }
      if (k < config.k) {
        inputs.metadata.warnings.push_back(
            fmt::format("robustness sweep limited to k = {} (requested {})", k, config.k));
      }
    }

    stage = "benchmark";
    if (data.joined.has_indicators()) {
      inputs.benchmark = benchmark(data.joined.indicators, data.log_cases, data.log_deaths,
                                   ps.cases, ps.deaths);
    } else {
      log << "warning: no indicator data; report renders without benchmark section\n";
    }

    stage = "scatter";
    const fs::path scatter_dir = config.output_dir / "scatter";
    fs::create_directories(scatter_dir);
    auto panel = [&](const std::string& file, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const AlignedSeries& series) {
      if (series.size() < 2) return;
      emit_scatter(make_scatter(title, x_label, y_label, series), scatter_dir / file);
    };
    const auto div_cases = popstat_series(ps.reference_cases, pyramids, data.log_cases,
                                          config.epsilon, config.bins);
    const auto div_deaths = popstat_series(ps.reference_deaths, pyramids, data.log_deaths,
                                           config.epsilon, config.bins);
    panel("popstat_cases.json",
          fmt::format("PoPStat-COVID19 cases (reference {})", ps.reference_cases.str()),
          "PoPDivergence", "ln(cases per million)", div_cases);
    panel("popstat_deaths.json",
          fmt::format("PoPStat-COVID19 deaths (reference {})", ps.reference_deaths.str()),
          "PoPDivergence", "ln(deaths per million)", div_deaths);
    for (const auto& ind : data.joined.indicators) {
      panel(fmt::format("{}_cases.json", ind.indicator_name), ind.indicator_name + " vs log cases",
            ind.indicator_name, "ln(cases per million)", align(ind.values, data.log_cases.values));
      panel(fmt::format("{}_deaths.json", ind.indicator_name), ind.indicator_name + " vs log deaths",
            ind.indicator_name, "ln(deaths per million)", align(ind.values, data.log_deaths.values));
    }
    const auto ladder = divergence_vector(pyramids.at(ps.reference_cases), pyramids, config.epsilon,
                                          config.bins, config.threads);
    write_file(config.output_dir / fmt::format("divergence_{}.csv", ps.reference_cases.str()),
               divergence_to_csv(ladder));

    stage = "render";
    write_file(config.output_dir / "results.json", results_json(inputs));
    write_file(config.output_dir / "report.md", render_report(inputs));
    for (const auto& c : check_expected(inputs)) {
      if (!c.within_tolerance) {
        log << fmt::format("warning: {} {} differs from expected r={} beyond {}\n", c.expected.row,
                           c.expected.outcome, c.expected.r, c.expected.tolerance);
      }
    }
    for (const auto& w : inputs.metadata.warnings) log << "warning: " << w << '\n';
    log << "report written to " << (config.output_dir / "report.md").string() << '\n';
    stage = "done";
    status("complete", "");
    return 0;
  } catch (const std::exception& e) {
    log << fmt::format("error in stage '{}': {}\n", stage, e.what());
    try {
      status("failed", e.what());
    } catch (...) {
    }
    return 1;
  }
}

}  // namespace popstat
