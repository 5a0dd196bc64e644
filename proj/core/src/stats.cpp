#include "popstat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "compensated_sum.hpp"
#include "popstat/error.hpp"
#include "popstat/special_functions.hpp"

namespace popstat {
namespace {

struct Moments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

double mean(std::span<const double> v) {
  detail::CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

// Two-pass centered sums.
Moments centered_moments(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch(fmt::format("series lengths differ: {} vs {}", x.size(), y.size()));
  }
  Moments m;
  if (x.empty()) return m;
  m.mean_x = mean(x);
  m.mean_y = mean(y);
  detail::CompensatedSum sxx, syy, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    sxx.add(dx * dx);
    syy.add(dy * dy);
    sxy.add(dx * dy);
  }
  m.sxx = sxx.value();
  m.syy = syy.value();
  m.sxy = sxy.value();
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  const Moments m = centered_moments(x, y);
  if (!all_finite(x) || !all_finite(y)) throw DegenerateInput("pearson: non-finite input");
  if (!(m.sxx > 0.0) || !(m.syy > 0.0)) {
    throw DegenerateInput(fmt::format("pearson: zero variance (n = {})", x.size()));
  }
  if (x.size() == 2) {
    return (x[1] - x[0]) * (y[1] - y[0]) > 0.0 ? 1.0 : -1.0;
  }
  const double r = m.sxy / std::sqrt(m.sxx * m.syy);
  return std::clamp(r, -1.0, 1.0);
}

double p_value(double r, std::size_t n) {
  if (n < 3) throw DegenerateInput(fmt::format("p_value needs n >= 3, got {}", n));
  if (std::isnan(r) || std::fabs(r) > 1.0) throw Error(fmt::format("p_value: invalid r {}", r));
  if (std::fabs(r) == 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = r * std::sqrt(df / (1.0 - r * r));
  return std::clamp(special::student_t_two_sided(t, df), 0.0, 1.0);
}

ConfidenceInterval fisher_ci(double r, std::size_t n, double level) {
  if (n < 4) throw DegenerateInput(fmt::format("fisher_ci needs n >= 4, got {}", n));
  if (!(level > 0.0 && level < 1.0)) throw Error(fmt::format("fisher_ci: invalid level {}", level));
  if (std::isnan(r) || std::fabs(r) > 1.0) throw Error(fmt::format("fisher_ci: invalid r {}", r));
  if (std::fabs(r) == 1.0) return {r, r};
  const double z = std::atanh(r);
  const double z_crit = special::normal_quantile(0.5 + 0.5 * level);
  const double half_width = z_crit / std::sqrt(static_cast<double>(n - 3));
  return {std::tanh(z - half_width), std::tanh(z + half_width)};
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  const Moments m = centered_moments(x, y);
  if (!all_finite(x) || !all_finite(y)) throw DegenerateInput("ols_fit: non-finite input");
  if (!(m.sxx > 0.0)) throw DegenerateInput(fmt::format("ols_fit: zero variance in x (n = {})", x.size()));
  OlsFit fit;
  fit.slope = m.sxy / m.sxx;
  fit.intercept = m.mean_y - fit.slope * m.mean_x;
  if (m.syy > 0.0) {
    const double r = pearson(x, y);
    fit.r_squared = r * r;
  }
  return fit;
}

CorrelationResult correlate(std::span<const double> x, std::span<const double> y, double level) {
  if (x.size() != y.size()) {
    throw DimensionMismatch(fmt::format("series lengths differ: {} vs {}", x.size(), y.size()));
  }
  if (x.size() < 3) throw DegenerateInput(fmt::format("correlate needs n >= 3, got {}", x.size()));
  CorrelationResult out;
  out.n = x.size();
  out.r = pearson(x, y);
  out.r_squared = out.r * out.r;
  out.p_value = p_value(out.r, out.n);
  if (out.n >= 4) {
    const auto ci = fisher_ci(out.r, out.n, level);
    out.ci_low = ci.low;
    out.ci_high = ci.high;
  } else {
    out.ci_low = std::fabs(out.r) == 1.0 ? out.r : -1.0;
    out.ci_high = std::fabs(out.r) == 1.0 ? out.r : 1.0;
  }
  return out;
}

LogOutcomeVector log_outcomes(const std::map<CountryCode, double>& outcomes) {
  LogOutcomeVector out;
  for (const auto& [code, v] : outcomes) {
    if (std::isnan(v)) {
      out.dropped.push_back({code, "missing"});
    } else if (!(v > 0.0)) {
      out.dropped.push_back({code, "nonpositive"});
    } else {
      out.values.emplace(code, std::log(v));
    }
  }
  return out;
}

LogOutcomeVector log_outcomes(const std::map<CountryCode, double>& outcomes,
                              std::span<const CountryCode> universe) {
  LogOutcomeVector out = log_outcomes(outcomes);
  for (const auto& code : universe) {
    if (!outcomes.contains(code)) out.dropped.push_back({code, "missing"});
  }
  std::sort(out.dropped.begin(), out.dropped.end(),
            [](const Exclusion& a, const Exclusion& b) { return a.code < b.code; });
  return out;
}

AlignedSeries align(const std::map<CountryCode, double>& x,
                    const std::map<CountryCode, double>& y) {
  AlignedSeries out;
  auto xi = x.begin();
  auto yi = y.begin();
  while (xi != x.end() && yi != y.end()) {
    if (xi->first < yi->first) {
      ++xi;
    } else if (yi->first < xi->first) {
      ++yi;
    } else {
      if (std::isfinite(xi->second) && std::isfinite(yi->second)) {
        out.codes.push_back(xi->first);
        out.x.push_back(xi->second);
        out.y.push_back(yi->second);
      }
      ++xi;
      ++yi;
    }
  }
  return out;
}

}  // namespace popstat
