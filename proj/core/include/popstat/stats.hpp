#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "popstat/types.hpp"

namespace popstat {

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

/// Inference summary for one (x, y) pairing.
struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;
  double ci_low = -1.0;
  double ci_high = 1.0;
  std::size_t n = 0;
  double r_squared = 0.0;
};

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Sample Pearson correlation, clamped to [-1, 1]. Two points give exactly
/// +/-1. Throws DimensionMismatch on unequal lengths and DegenerateInput when
/// either vector has zero variance (which includes n < 2).
double pearson(std::span<const double> x, std::span<const double> y);

/// Two-sided p-value of r under H0: rho = 0, using Student's t with n - 2
/// degrees of freedom. |r| = 1 gives 0. Requires n >= 3.
double p_value(double r, std::size_t n);

/// Fisher z interval: tanh(atanh(r) -/+ z_crit / sqrt(n - 3)). Requires
/// n >= 4 and level in (0, 1); |r| = 1 returns the degenerate (r, r).
ConfidenceInterval fisher_ci(double r, std::size_t n, double level = 0.95);

/// Least-squares line y = slope * x + intercept.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

/// r, p, CI and R^2 together. Requires n >= 3; at n == 3 the Fisher interval
/// has infinite width and (-1, 1) is reported.
CorrelationResult correlate(std::span<const double> x, std::span<const double> y,
                            double level = 0.95);

/// ln of per-million outcomes with the non-usable entries set aside.
struct LogOutcomeVector {
  std::map<CountryCode, double> values;
  std::vector<Exclusion> dropped;
};

/// ln(v) for v > 0. NaN entries are dropped as "missing", v <= 0 as
/// "nonpositive".
LogOutcomeVector log_outcomes(const std::map<CountryCode, double>& outcomes);

/// Same, plus every code of `universe` absent from `outcomes` is dropped as
/// "missing".
LogOutcomeVector log_outcomes(const std::map<CountryCode, double>& outcomes,
                              std::span<const CountryCode> universe);

/// Pairwise-complete alignment of two keyed series, in key order.
struct AlignedSeries {
  std::vector<CountryCode> codes;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return codes.size(); }
};

AlignedSeries align(const std::map<CountryCode, double>& x, const std::map<CountryCode, double>& y);

}  // namespace popstat
