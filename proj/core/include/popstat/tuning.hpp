#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "popstat/pyramid.hpp"
#include "popstat/stats.hpp"

namespace popstat {

struct TuningOptions {
  double epsilon = kDefaultEpsilon;
  BinSchema schema = BinSchema::joint_42;
  /// Restricts the candidate references. Empty means every pyramid.
  std::vector<CountryCode> candidates;
  unsigned threads = 1;
};

/// Correlations obtained with one candidate reference. Signed r is kept;
/// NaN marks an undefined correlation (degenerate variance or n < 2).
struct ReferenceScore {
  CountryCode reference;
  double r_cases = 0.0;
  double r_deaths = 0.0;
  std::size_t n_cases = 0;
  std::size_t n_deaths = 0;

  double rho_cases() const;   // |r_cases|
  double rho_deaths() const;  // |r_deaths|
};

struct TuningResult {
  std::vector<ReferenceScore> per_reference;  // candidate code order
  std::optional<CountryCode> best_cases;
  std::optional<CountryCode> best_deaths;
  std::size_t n_countries = 0;

  const ReferenceScore* find(const CountryCode& code) const;
};

/// Exhaustive reference search: for every candidate, divergence of all
/// countries, then |pearson| against each log outcome over the countries
/// present in both. Argmax per outcome, ties to the smaller code.
TuningResult tune(const PyramidMap& pyramids, const LogOutcomeVector& log_cases,
                  const LogOutcomeVector& log_deaths, const TuningOptions& options = {});

/// Divergence from `reference_code` aligned with `log_outcome`.
AlignedSeries popstat_series(const CountryCode& reference_code, const PyramidMap& pyramids,
                             const LogOutcomeVector& log_outcome,
                             double epsilon = kDefaultEpsilon,
                             BinSchema schema = BinSchema::joint_42);

/// Signed correlation of divergence from `reference_code` with the log
/// outcome, with p, CI and R^2.
CorrelationResult popstat(const CountryCode& reference_code, const PyramidMap& pyramids,
                          const LogOutcomeVector& log_outcome, double epsilon = kDefaultEpsilon,
                          BinSchema schema = BinSchema::joint_42);

struct RobustnessEntry {
  CountryCode reference;
  CorrelationResult cases;
  CorrelationResult deaths;
};

struct RobustnessTable {
  std::vector<RobustnessEntry> regressive;   // most negative deaths r first
  std::vector<RobustnessEntry> progressive;  // most positive deaths r first

  bool empty() const noexcept { return regressive.empty() && progressive.empty(); }
};

/// Ranks candidates by signed deaths correlation and recomputes full
/// inference for the k most negative and k most positive. Throws when k is 0
/// or exceeds the number of candidates with a defined correlation.
RobustnessTable robustness_sweep(const TuningResult& tuning, const PyramidMap& pyramids,
                                 const LogOutcomeVector& log_cases,
                                 const LogOutcomeVector& log_deaths, std::size_t k,
                                 const TuningOptions& options = {});

RobustnessTable robustness_sweep(const PyramidMap& pyramids, const LogOutcomeVector& log_cases,
                                 const LogOutcomeVector& log_deaths, std::size_t k = 10,
                                 const TuningOptions& options = {});

/// reference,r_cases,r_deaths,rho_cases,rho_deaths,n_cases,n_deaths,rank,rank_deaths
std::string tuning_to_csv(const TuningResult& tuning);
std::string tuning_to_json(const TuningResult& tuning);

std::string robustness_to_csv(const RobustnessTable& table);
std::string robustness_to_json(const RobustnessTable& table);

}  // namespace popstat
