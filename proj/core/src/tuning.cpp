#include "popstat/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "json_io.hpp"
#include "parallel.hpp"
#include "popstat/error.hpp"

namespace popstat {
namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// Outcome values re-indexed by position in the pyramid map.
struct IndexedOutcome {
  std::vector<std::size_t> index;
  std::vector<double> y;
};

IndexedOutcome index_outcome(const std::vector<CountryCode>& codes, const LogOutcomeVector& v) {
  IndexedOutcome out;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    auto it = v.values.find(codes[i]);
    if (it != v.values.end() && std::isfinite(it->second)) {
      out.index.push_back(i);
      out.y.push_back(it->second);
    }
  }
  return out;
}

double signed_correlation(const std::vector<double>& divergence, const IndexedOutcome& outcome) {
  std::vector<double> x(outcome.index.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = divergence[outcome.index[j]];
  try {
    return pearson(x, outcome.y);
  } catch (const DegenerateInput&) {
    return kUndefined;
  }
}

std::vector<CountryCode> candidate_list(const PyramidMap& pyramids, const TuningOptions& options) {
  std::vector<CountryCode> out;
  if (options.candidates.empty()) {
    for (const auto& [code, _] : pyramids) out.push_back(code);
    return out;
  }
  out = options.candidates;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (const auto& code : out) {
    if (!pyramids.contains(code)) {
      throw Error(fmt::format("candidate reference {} has no pyramid", code.str()));
    }
  }
  return out;
}

std::optional<CountryCode> argmax(const std::vector<ReferenceScore>& scores,
                                  double (ReferenceScore::*rho)() const) {
  std::optional<CountryCode> best;
  double best_rho = -1.0;
  // Scores are in ascending code order, so strict '>' keeps the smaller code on ties.
  for (const auto& s : scores) {
    const double v = (s.*rho)();
    if (std::isnan(v)) continue;
    if (v > best_rho) {
      best_rho = v;
      best = s.reference;
    }
  }
  return best;
}

const AgeSexPyramid& lookup(const PyramidMap& pyramids, const CountryCode& code) {
  auto it = pyramids.find(code);
  if (it == pyramids.end()) {
    throw Error(fmt::format("reference {} has no pyramid", code.str()));
  }
  return it->second;
}

std::vector<std::optional<std::size_t>> ranks(const std::vector<ReferenceScore>& scores,
                                              double (ReferenceScore::*rho)() const) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isnan((scores[i].*rho)())) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (scores[a].*rho)() > (scores[b].*rho)();
  });
  std::vector<std::optional<std::size_t>> out(scores.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) out[order[pos]] = pos + 1;
  return out;
}

std::string fmt_num(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : "NA"; }

}  // namespace

double ReferenceScore::rho_cases() const { return std::fabs(r_cases); }
double ReferenceScore::rho_deaths() const { return std::fabs(r_deaths); }

const ReferenceScore* TuningResult::find(const CountryCode& code) const {
  auto it = std::lower_bound(per_reference.begin(), per_reference.end(), code,
                             [](const ReferenceScore& s, const CountryCode& c) { return s.reference < c; });
  return it != per_reference.end() && it->reference == code ? &*it : nullptr;
}

TuningResult tune(const PyramidMap& pyramids, const LogOutcomeVector& log_cases,
                  const LogOutcomeVector& log_deaths, const TuningOptions& options) {
  if (pyramids.size() < 2) {
    throw DegenerateInput(fmt::format("tune needs at least 2 countries, got {}", pyramids.size()));
  }
  std::vector<CountryCode> codes;
  std::vector<std::vector<double>> dists;
  for (const auto& [code, pyramid] : pyramids) {
    codes.push_back(code);
    dists.push_back(distribution(pyramid, options.schema));
  }
  const auto cases = index_outcome(codes, log_cases);
  const auto deaths = index_outcome(codes, log_deaths);
  const auto candidates = candidate_list(pyramids, options);

  TuningResult result;
  result.n_countries = pyramids.size();
  result.per_reference.reserve(candidates.size());
  for (const auto& code : candidates) result.per_reference.push_back(ReferenceScore{code});

  detail::parallel_for(candidates.size(), options.threads, [&](std::size_t c) {
    const auto& ref = lookup(pyramids, candidates[c]);
    const SmoothedReference q(distribution(ref, options.schema), options.epsilon);
    std::vector<double> divergence(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i) divergence[i] = kl_divergence(dists[i], q);

    ReferenceScore& score = result.per_reference[c];
    score.r_cases = signed_correlation(divergence, cases);
    score.r_deaths = signed_correlation(divergence, deaths);
    score.n_cases = cases.index.size();
    score.n_deaths = deaths.index.size();
  });

  result.best_cases = argmax(result.per_reference, &ReferenceScore::rho_cases);
  result.best_deaths = argmax(result.per_reference, &ReferenceScore::rho_deaths);
  return result;
}

AlignedSeries popstat_series(const CountryCode& reference_code, const PyramidMap& pyramids,
                             const LogOutcomeVector& log_outcome, double epsilon,
                             BinSchema schema) {
  const auto dv = divergence_vector(lookup(pyramids, reference_code), pyramids, epsilon, schema);
  return align(dv.values, log_outcome.values);
}

CorrelationResult popstat(const CountryCode& reference_code, const PyramidMap& pyramids,
                          const LogOutcomeVector& log_outcome, double epsilon, BinSchema schema) {
  const auto series = popstat_series(reference_code, pyramids, log_outcome, epsilon, schema);
  if (series.size() < 2) {
    throw DegenerateInput(fmt::format("popstat with reference {}: zero variance (n = {})",
                                      reference_code.str(), series.size()));
  }
  return correlate(series.x, series.y);
}

RobustnessTable robustness_sweep(const TuningResult& tuning, const PyramidMap& pyramids,
                                 const LogOutcomeVector& log_cases,
                                 const LogOutcomeVector& log_deaths, std::size_t k,
                                 const TuningOptions& options) {
  std::vector<const ReferenceScore*> defined;
  for (const auto& s : tuning.per_reference) {
    if (!std::isnan(s.r_deaths)) defined.push_back(&s);
  }
  if (k == 0 || k > defined.size()) {
    throw Error(fmt::format("robustness k = {} but only {} candidates have a defined correlation",
                            k, defined.size()));
  }
  // Ascending signed deaths r; stable so equal values keep code order.
  std::stable_sort(defined.begin(), defined.end(),
                   [](const ReferenceScore* a, const ReferenceScore* b) { return a->r_deaths < b->r_deaths; });

  auto entry = [&](const ReferenceScore& s) {
    return RobustnessEntry{s.reference,
                           popstat(s.reference, pyramids, log_cases, options.epsilon, options.schema),
                           popstat(s.reference, pyramids, log_deaths, options.epsilon, options.schema)};
  };

  RobustnessTable table;
  for (std::size_t i = 0; i < defined.size() && table.regressive.size() < k; ++i) {
    if (!(defined[i]->r_deaths < 0.0)) break;
    table.regressive.push_back(entry(*defined[i]));
  }
  for (std::size_t i = defined.size(); i-- > 0 && table.progressive.size() < k;) {
    if (!(defined[i]->r_deaths > 0.0)) break;
    table.progressive.push_back(entry(*defined[i]));
  }
  return table;
}

RobustnessTable robustness_sweep(const PyramidMap& pyramids, const LogOutcomeVector& log_cases,
                                 const LogOutcomeVector& log_deaths, std::size_t k,
                                 const TuningOptions& options) {
  return robustness_sweep(tune(pyramids, log_cases, log_deaths, options), pyramids, log_cases,
                          log_deaths, k, options);
}

std::string tuning_to_csv(const TuningResult& tuning) {
  const auto rank_cases = ranks(tuning.per_reference, &ReferenceScore::rho_cases);
  const auto rank_deaths = ranks(tuning.per_reference, &ReferenceScore::rho_deaths);
  std::ostringstream os;
  os << "reference,r_cases,r_deaths,rho_cases,rho_deaths,n_cases,n_deaths,rank,rank_deaths\n";
  for (std::size_t i = 0; i < tuning.per_reference.size(); ++i) {
    const auto& s = tuning.per_reference[i];
    auto rank_str = [](const std::optional<std::size_t>& r) {
      return r ? std::to_string(*r) : std::string("NA");
    };
    os << s.reference.str() << ',' << fmt_num(s.r_cases) << ',' << fmt_num(s.r_deaths) << ','
       << fmt_num(s.rho_cases()) << ',' << fmt_num(s.rho_deaths()) << ',' << s.n_cases << ','
       << s.n_deaths << ',' << rank_str(rank_cases[i]) << ',' << rank_str(rank_deaths[i]) << '\n';
  }
  return os.str();
}

std::string tuning_to_json(const TuningResult& tuning) { return detail::to_json(tuning).dump(2); }

std::string robustness_to_csv(const RobustnessTable& table) {
  std::ostringstream os;
  os << "group,rank,reference,r_cases,p_cases,ci_low_cases,ci_high_cases,n_cases,"
        "r_deaths,p_deaths,ci_low_deaths,ci_high_deaths,n_deaths\n";
  auto rows = [&](std::string_view group, const std::vector<RobustnessEntry>& entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      os << group << ',' << i + 1 << ',' << e.reference.str() << ',' << fmt_num(e.cases.r) << ','
         << fmt_num(e.cases.p_value) << ',' << fmt_num(e.cases.ci_low) << ','
         << fmt_num(e.cases.ci_high) << ',' << e.cases.n << ',' << fmt_num(e.deaths.r) << ','
         << fmt_num(e.deaths.p_value) << ',' << fmt_num(e.deaths.ci_low) << ','
         << fmt_num(e.deaths.ci_high) << ',' << e.deaths.n << '\n';
    }
  };
  rows("regressive", table.regressive);
  rows("progressive", table.progressive);
  return os.str();
}

std::string robustness_to_json(const RobustnessTable& table) {
  return detail::to_json(table).dump(2);
}

namespace detail {

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const CorrelationResult& r) {
  return {{"r", number(r.r)},         {"p_value", number(r.p_value)},
          {"ci_low", number(r.ci_low)}, {"ci_high", number(r.ci_high)},
          {"n", r.n},                 {"r_squared", number(r.r_squared)}};
}

nlohmann::json to_json(const TuningResult& t) {
  const auto rank_cases = ranks(t.per_reference, &ReferenceScore::rho_cases);
  const auto rank_deaths = ranks(t.per_reference, &ReferenceScore::rho_deaths);
  auto rank_json = [](const std::optional<std::size_t>& r) {
    return r ? nlohmann::json(*r) : nlohmann::json(nullptr);
  };
  nlohmann::json refs = nlohmann::json::array();
  for (std::size_t i = 0; i < t.per_reference.size(); ++i) {
    const auto& s = t.per_reference[i];
    refs.push_back({{"reference", s.reference.str()},
                    {"rho_cases", number(s.rho_cases())},
                    {"rho_deaths", number(s.rho_deaths())},
                    {"r_cases", number(s.r_cases)},
                    {"r_deaths", number(s.r_deaths)},
                    {"n_cases", s.n_cases},
                    {"n_deaths", s.n_deaths},
                    {"rank", rank_json(rank_cases[i])},
                    {"rank_deaths", rank_json(rank_deaths[i])}});
  }
  auto code_json = [](const std::optional<CountryCode>& c) {
    return c ? nlohmann::json(c->str()) : nlohmann::json(nullptr);
  };
  return {{"n_countries", t.n_countries},
          {"best_cases", code_json(t.best_cases)},
          {"best_deaths", code_json(t.best_deaths)},
          {"per_reference", std::move(refs)}};
}

nlohmann::json to_json(const RobustnessTable& t) {
  auto list = [](const std::vector<RobustnessEntry>& entries) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      arr.push_back({{"rank", i + 1},
                     {"reference", entries[i].reference.str()},
                     {"cases", to_json(entries[i].cases)},
                     {"deaths", to_json(entries[i].deaths)}});
    }
    return arr;
  };
  return {{"regressive", list(t.regressive)}, {"progressive", list(t.progressive)}};
}

}  // namespace detail
}  // namespace popstat
