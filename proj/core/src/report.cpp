#include "popstat/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json_io.hpp"
#include "popstat/csv.hpp"
#include "popstat/error.hpp"

namespace popstat {
namespace {

std::optional<CorrelationResult> try_correlate(const IndicatorTable& indicator,
                                               const LogOutcomeVector& outcome) {
  const auto series = align(indicator.values, outcome.values);
  if (series.size() < 3) return std::nullopt;
  try {
    return correlate(series.x, series.y);
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

std::string ci_text(const CorrelationResult& c, int digits) {
  return fmt::format("({}, {})", format_fixed(c.ci_low, digits), format_fixed(c.ci_high, digits));
}

std::string reference_label(const CountryCode& code) {
  return fmt::format("{} ({})", display_name(code), code.str());
}

void table_header(std::ostringstream& os, const std::vector<std::string>& cols) {
  os << '|';
  for (const auto& c : cols) os << ' ' << c << " |";
  os << "\n|";
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i == 0 ? " --- |" : " ---: |");
  os << '\n';
}

void table_row(std::ostringstream& os, const std::vector<std::string>& cells) {
  os << '|';
  for (const auto& c : cells) os << ' ' << c << " |";
  os << '\n';
}

void render_robustness(std::ostringstream& os, const std::optional<RobustnessTable>& table) {
  os << "## Robustness across reference pyramids\n\n";
  if (!table || table->empty()) {
    os << "_not computed_\n\n";
    return;
  }
  table_header(os, {"Reference", "Cases PoPStat", "p", "95% CI", "n", "Deaths PoPStat", "p",
                    "95% CI", "n"});
  auto group = [&](std::string_view title, const std::vector<RobustnessEntry>& entries) {
    table_row(os, {fmt::format("**{}**", title), "", "", "", "", "", "", "", ""});
    for (const auto& e : entries) {
      table_row(os, {reference_label(e.reference), format_fixed(e.cases.r, 3),
                     format_p(e.cases.p_value), ci_text(e.cases, 2), std::to_string(e.cases.n),
                     format_fixed(e.deaths.r, 3), format_p(e.deaths.p_value), ci_text(e.deaths, 2),
                     std::to_string(e.deaths.n)});
    }
  };
  group("Regressive (old-skewed) references", table->regressive);
  group("Progressive (young-skewed) references", table->progressive);
  os << '\n';
}

void render_benchmark(std::ostringstream& os, const std::optional<std::vector<BenchmarkRow>>& rows) {
  os << "## Benchmark against conventional indicators\n\n";
  if (!rows) {
    os << "_not computed (no indicator files)_\n\n";
    return;
  }
  table_header(os, {"Indicator", "Cases r", "p", "95% CI", "R²", "n", "Deaths r", "p", "95% CI",
                    "R²", "n"});
  auto cells = [](const std::optional<CorrelationResult>& c) -> std::vector<std::string> {
    if (!c) return {"n/a", "n/a", "n/a", "n/a", "0"};
    return {format_fixed(c->r, 2), format_p(c->p_value), ci_text(*c, 2),
            format_fixed(c->r_squared, 2), std::to_string(c->n)};
  };
  for (const auto& row : *rows) {
    std::vector<std::string> line{row.indicator_name};
    for (auto& s : cells(row.cases)) line.push_back(std::move(s));
    for (auto& s : cells(row.deaths)) line.push_back(std::move(s));
    table_row(os, line);
  }
  os << '\n';
}

const CorrelationResult* find_actual(const ReportInputs& in, const std::string& row,
                                     const std::string& outcome) {
  const bool cases = outcome == "cases";
  if (in.benchmark) {
    for (const auto& b : *in.benchmark) {
      if (b.indicator_name == row) {
        const auto& cell = cases ? b.cases : b.deaths;
        return cell ? &*cell : nullptr;
      }
    }
  }
  if (row == kPopStatRowName) {
    const auto& cell = cases ? in.popstat_cases : in.popstat_deaths;
    return cell ? &*cell : nullptr;
  }
  if (in.robustness) {
    for (const auto* list : {&in.robustness->regressive, &in.robustness->progressive}) {
      for (const auto& e : *list) {
        if (e.reference.str() == row) return cases ? &e.cases : &e.deaths;
      }
    }
  }
  return nullptr;
}

nlohmann::json exclusions_json(const std::vector<Exclusion>& list) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : list) arr.push_back({{"code", e.code.str()}, {"reason", e.reason}});
  return arr;
}

}  // namespace

std::vector<BenchmarkRow> benchmark(const std::vector<IndicatorTable>& indicators,
                                    const LogOutcomeVector& log_cases,
                                    const LogOutcomeVector& log_deaths,
                                    const std::optional<CorrelationResult>& popstat_cases,
                                    const std::optional<CorrelationResult>& popstat_deaths) {
  if (indicators.empty()) throw Error("benchmark needs at least one indicator table");
  std::vector<BenchmarkRow> rows;
  for (const auto& indicator : indicators) {
    rows.push_back({indicator.indicator_name, try_correlate(indicator, log_cases),
                    try_correlate(indicator, log_deaths)});
  }
  rows.push_back({std::string(kPopStatRowName), popstat_cases, popstat_deaths});
  return rows;
}

ScatterSeries make_scatter(std::string title, std::string x_label, std::string y_label,
                           const AlignedSeries& series) {
  if (series.size() == 0) throw DegenerateInput("scatter '" + title + "': no aligned points");
  ScatterSeries out{std::move(title), std::move(x_label), std::move(y_label), {}, {}};
  out.fit = ols_fit(series.x, series.y);
  out.points.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    out.points.push_back({series.codes[i], series.x[i], series.y[i]});
  }
  return out;
}

std::string scatter_to_json(const ScatterSeries& s) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : s.points) {
    points.push_back({{"code", p.code.str()}, {"x", detail::number(p.x)}, {"y", detail::number(p.y)}});
  }
  nlohmann::json doc = {
      {"kind", "scatter"},
      {"title", s.title},
      {"x_label", s.x_label},
      {"y_label", s.y_label},
      {"n", s.points.size()},
      {"points", std::move(points)},
      {"fit",
       {{"kind", "ols"},
        {"slope", detail::number(s.fit.slope)},
        {"intercept", detail::number(s.fit.intercept)},
        {"r_squared", detail::number(s.fit.r_squared)}}}};
  return doc.dump(2) + "\n";
}

void emit_scatter(const ScatterSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << scatter_to_json(series);
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<ExpectedCell> parse_expected_cells(std::istream& in) {
  csv::Reader reader(in);
  const auto row_col = reader.require_column("row", "expected");
  const auto outcome_col = reader.require_column("outcome", "expected");
  const auto r_col = reader.require_column("r", "expected");
  const auto lo_col = reader.find_column("ci_low");
  const auto hi_col = reader.find_column("ci_high");
  const auto tol_col = reader.find_column("tolerance");
  std::vector<ExpectedCell> out;
  while (auto rec = reader.next()) {
    auto field = [&](std::optional<std::size_t> idx) -> std::optional<double> {
      if (!idx || *idx >= rec->fields.size()) return std::nullopt;
      return csv::parse_double(rec->fields[*idx]);
    };
    ExpectedCell cell;
    cell.row = std::string(csv::trim(rec->fields.at(row_col)));
    cell.outcome = std::string(csv::trim(rec->fields.at(outcome_col)));
    if (cell.outcome != "cases" && cell.outcome != "deaths") {
      throw ParseError(rec->line, "outcome must be 'cases' or 'deaths'");
    }
    auto r = field(r_col);
    if (!r) throw ParseError(rec->line, "missing r");
    cell.r = *r;
    cell.ci_low = field(lo_col);
    cell.ci_high = field(hi_col);
    if (auto tol = field(tol_col)) cell.tolerance = *tol;
    out.push_back(std::move(cell));
  }
  return out;
}

std::vector<ExpectedCheck> check_expected(const ReportInputs& inputs) {
  std::vector<ExpectedCheck> out;
  for (const auto& cell : inputs.expected) {
    ExpectedCheck check{cell, std::nullopt, false};
    if (const auto* actual = find_actual(inputs, cell.row, cell.outcome)) {
      check.actual = *actual;
      bool ok = std::fabs(actual->r - cell.r) <= cell.tolerance;
      if (cell.ci_low) ok = ok && std::fabs(actual->ci_low - *cell.ci_low) <= cell.tolerance;
      if (cell.ci_high) ok = ok && std::fabs(actual->ci_high - *cell.ci_high) <= cell.tolerance;
      check.within_tolerance = ok;
    }
    out.push_back(std::move(check));
  }
  return out;
}

std::string format_fixed(double v, int digits) {
  if (!std::isfinite(v)) return "n/a";
  std::string s = fmt::format("{:.{}f}", v, digits);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_p(double p) {
  if (!std::isfinite(p)) return "n/a";
  if (p < 0.001) return "<0.001";
  if (p < 0.01) return format_fixed(p, 3);
  return format_fixed(p, 2);
}

std::string render_report(const ReportInputs& in) {
  std::ostringstream os;
  const auto& m = in.metadata;
  os << "# PoPStat-COVID19 run report\n\n";

  os << "## Run metadata\n\n";
  table_header(os, {"Setting", "Value"});
  table_row(os, {"Outcome cutoff date", m.cutoff});
  table_row(os, {"Population year", std::to_string(m.year)});
  table_row(os, {"Population variant", m.population_variant});
  table_row(os, {"Bin schema", std::string(to_string(m.schema))});
  table_row(os, {"Epsilon", fmt::format("{:g}", m.epsilon)});
  table_row(os, {"Countries joined", std::to_string(m.n_countries)});
  table_row(os, {"Confidence intervals", "95%, Fisher z-transform"});
  table_row(os, {"p-values", "two-sided, Student t with n-2 df"});
  os << '\n';
  for (const auto& w : m.warnings) os << "> warning: " << w << '\n';
  if (!m.warnings.empty()) os << '\n';

  os << "## Reference tuning\n\n";
  if (!in.tuning) {
    os << "_not computed_\n\n";
  } else {
    const auto& t = *in.tuning;
    auto best = [&](const std::optional<CountryCode>& code, bool cases) {
      if (!code) return std::string("undefined");
      const auto* s = t.find(*code);
      const double rho = s ? (cases ? s->rho_cases() : s->rho_deaths()) : NAN;
      return fmt::format("{} (abs r = {})", reference_label(*code), format_fixed(rho, 3));
    };
    table_header(os, {"Outcome", "Optimal reference", "Candidates"});
    table_row(os, {"cases", best(t.best_cases, true), std::to_string(t.per_reference.size())});
    table_row(os, {"deaths", best(t.best_deaths, false), std::to_string(t.per_reference.size())});
    os << '\n';
  }

  os << "## PoPStat-COVID19\n\n";
  if (!in.popstat_cases && !in.popstat_deaths) {
    os << "_not computed_\n\n";
  } else {
    table_header(os, {"Outcome", "Reference", "PoPStat", "p", "95% CI", "R²", "n"});
    auto row = [&](std::string_view outcome, const std::optional<CountryCode>& ref,
                   const std::optional<CorrelationResult>& c) {
      if (!c) return;
      table_row(os, {std::string(outcome), ref ? reference_label(*ref) : "n/a",
                     format_fixed(c->r, 3), format_p(c->p_value), ci_text(*c, 2),
                     format_fixed(c->r_squared, 2), std::to_string(c->n)});
    };
    row("cases", in.popstat_reference_cases, in.popstat_cases);
    row("deaths", in.popstat_reference_deaths, in.popstat_deaths);
    os << '\n';
  }

  render_robustness(os, in.robustness);
  render_benchmark(os, in.benchmark);

  if (!in.expected.empty()) {
    os << "## Comparison with expected values\n\n";
    table_header(os, {"Row", "Outcome", "Expected r", "Actual r", "Expected CI", "Actual CI",
                      "Tolerance", "Status"});
    for (const auto& c : check_expected(in)) {
      const auto& e = c.expected;
      std::string exp_ci = e.ci_low && e.ci_high
                               ? fmt::format("({}, {})", format_fixed(*e.ci_low, 2),
                                             format_fixed(*e.ci_high, 2))
                               : "-";
      table_row(os, {e.row, e.outcome, format_fixed(e.r, 3),
                     c.actual ? format_fixed(c.actual->r, 3) : "n/a", exp_ci,
                     c.actual ? ci_text(*c.actual, 2) : "n/a", format_fixed(e.tolerance, 3),
                     c.within_tolerance ? "ok" : "**MISMATCH**"});
    }
    os << '\n';
  }

  os << "## Excluded countries\n\n";
  auto list = [&](std::string_view title, const std::vector<Exclusion>& items) {
    os << "### " << title << "\n\n";
    if (items.empty()) {
      os << "_none_\n\n";
      return;
    }
    for (const auto& e : items) os << "- " << e.code.str() << ": " << e.reason << '\n';
    os << '\n';
  };
  list("Join", in.exclusions);
  list("Dropped from log cases", in.dropped_cases);
  list("Dropped from log deaths", in.dropped_deaths);
  return os.str();
}

std::string results_json(const ReportInputs& in) {
  const auto& m = in.metadata;
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : m.config) config[k] = v;

  nlohmann::json metadata = {
      {"cutoff", m.cutoff},
      {"year", m.year},
      {"epsilon", m.epsilon},
      {"bin_schema", std::string(to_string(m.schema))},
      {"population_variant", m.population_variant},
      {"n_countries", m.n_countries},
      {"ci_method", "fisher_z"},
      {"ci_level", 0.95},
      {"p_value_method", "student_t_two_sided"},
      {"warnings", m.warnings},
      {"config", std::move(config)},
      {"exclusions", exclusions_json(in.exclusions)},
      {"dropped_cases", exclusions_json(in.dropped_cases)},
      {"dropped_deaths", exclusions_json(in.dropped_deaths)}};

  nlohmann::json tuning = nullptr;
  if (in.tuning) tuning = detail::to_json(*in.tuning);
  auto popstat_json = [](const std::optional<CountryCode>& ref,
                         const std::optional<CorrelationResult>& c) -> nlohmann::json {
    if (!c) return nullptr;
    auto j = detail::to_json(*c);
    j["reference"] = ref ? nlohmann::json(ref->str()) : nlohmann::json(nullptr);
    return j;
  };
  if (in.popstat_cases || in.popstat_deaths) {
    if (tuning.is_null()) tuning = nlohmann::json::object();
    tuning["popstat"] = {{"cases", popstat_json(in.popstat_reference_cases, in.popstat_cases)},
                         {"deaths", popstat_json(in.popstat_reference_deaths, in.popstat_deaths)}};
  }

  nlohmann::json robustness = nullptr;
  if (in.robustness) robustness = detail::to_json(*in.robustness);

  nlohmann::json bench = nullptr;
  if (in.benchmark) {
    bench = nlohmann::json::array();
    for (const auto& row : *in.benchmark) {
      auto cell = [](const std::optional<CorrelationResult>& c) {
        return c ? detail::to_json(*c) : nlohmann::json(nullptr);
      };
      bench.push_back({{"indicator", row.indicator_name},
                       {"cases", cell(row.cases)},
                       {"deaths", cell(row.deaths)}});
    }
  }

  nlohmann::json doc = {{"metadata", std::move(metadata)},
                        {"tuning", std::move(tuning)},
                        {"robustness", std::move(robustness)},
                        {"benchmark", std::move(bench)}};
  if (!in.expected.empty()) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : check_expected(in)) {
      checks.push_back({{"row", c.expected.row},
                        {"outcome", c.expected.outcome},
                        {"expected_r", c.expected.r},
                        {"actual_r", c.actual ? detail::number(c.actual->r) : nlohmann::json(nullptr)},
                        {"tolerance", c.expected.tolerance},
                        {"within_tolerance", c.within_tolerance}});
    }
    doc["metadata"]["expected_checks"] = std::move(checks);
  }
  return doc.dump(2) + "\n";
}

}  // namespace popstat
