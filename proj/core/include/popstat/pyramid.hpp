#pragma once

#include <array>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "popstat/types.hpp"

namespace popstat {

inline constexpr double kDefaultEpsilon = 1e-10;

/// Normalized age-sex distribution of one country-year.
///
/// Bin k = sex * 21 + age_group; all 42 proportions are non-negative and sum
/// to one jointly over both sexes.
class AgeSexPyramid {
 public:
  using Proportions = std::array<double, kPyramidBins>;

  /// Normalizes raw counts (any unit). Throws on negative or non-finite
  /// counts and on a zero total.
  static AgeSexPyramid from_counts(CountryCode code, int year,
                                   std::span<const double, kPyramidBins> counts);

  const CountryCode& code() const noexcept { return code_; }
  int year() const noexcept { return year_; }
  const Proportions& proportions() const noexcept { return proportions_; }
  double at(Sex sex, std::size_t age_group) const {
    return proportions_.at(pyramid_bin(sex, age_group));
  }

  friend bool operator==(const AgeSexPyramid&, const AgeSexPyramid&) = default;

 private:
  AgeSexPyramid(CountryCode code, int year, Proportions p)
      : code_(std::move(code)), year_(year), proportions_(p) {}

  CountryCode code_;
  int year_;
  Proportions proportions_;
};

using PyramidMap = std::map<CountryCode, AgeSexPyramid>;

/// How a pyramid is turned into the distribution that enters the divergence.
enum class BinSchema {
  joint_42,     // 42 bins, both sexes jointly sum to one
  per_sex_21,   // each sex renormalized on its own; mean of the two per-sex divergences
  age_only_21,  // sexes pooled into 21 age bins
};

std::string_view to_string(BinSchema schema);
std::optional<BinSchema> parse_bin_schema(std::string_view text);

/// Proportions as a probability vector under `schema`.
///
/// per_sex_21 yields a 42-vector with each sex scaled to 1/2, so that KL over
/// it equals the average of the two per-sex KL divergences.
std::vector<double> distribution(const AgeSexPyramid& pyramid, BinSchema schema);

/// Divides every count by the total. Works for any bin count.
std::vector<double> normalize_counts(std::span<const double> counts);

/// Groups rows for ONE country into a pyramid. Every (sex, age group) cell
/// must appear exactly once.
AgeSexPyramid normalize(std::span<const RawPopulationRow> rows);

struct PyramidBuild {
  PyramidMap pyramids;
  std::vector<Exclusion> exclusions;
};

/// normalize() per country over a mixed row list. Countries that fail
/// (missing cell, zero total) become exclusions instead of errors.
PyramidBuild build_pyramids(std::span<const RawPopulationRow> rows);

/// Reference distribution with the epsilon floor applied and renormalized.
/// Precomputing it lets one reference be reused across many countries.
class SmoothedReference {
 public:
  SmoothedReference(std::span<const double> q, double epsilon);

  std::span<const double> values() const noexcept { return q_; }
  std::span<const double> log_values() const noexcept { return log_q_; }

 private:
  std::vector<double> q_;
  std::vector<double> log_q_;
};

/// KL(p || q') with q' = (q + epsilon) renormalized and 0 * ln 0 = 0.
/// Throws DimensionMismatch when sizes differ, Error when epsilon <= 0.
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double epsilon = kDefaultEpsilon);
double kl_divergence(std::span<const double> p, const SmoothedReference& q);

/// PoPDivergence of `country` from `reference`, in nats.
double pop_divergence(const AgeSexPyramid& country, const AgeSexPyramid& reference,
                      double epsilon = kDefaultEpsilon,
                      BinSchema schema = BinSchema::joint_42);

struct DivergenceVector {
  CountryCode reference_code;
  std::map<CountryCode, double> values;
};

/// PoPDivergence of every pyramid in `all` from `reference`. Iterates `all`
/// in key order; `threads` > 1 fans out over contiguous chunks.
DivergenceVector divergence_vector(const AgeSexPyramid& reference, const PyramidMap& all,
                                   double epsilon = kDefaultEpsilon,
                                   BinSchema schema = BinSchema::joint_42,
                                   unsigned threads = 1);

/// Audit dump: code,sex,age_group,proportion.
std::string pyramids_to_csv(const PyramidMap& pyramids);

}  // namespace popstat
