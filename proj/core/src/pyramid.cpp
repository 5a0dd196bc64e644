#include "popstat/pyramid.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "compensated_sum.hpp"
#include "parallel.hpp"
#include "popstat/error.hpp"

namespace popstat {

AgeSexPyramid AgeSexPyramid::from_counts(CountryCode code, int year,
                                         std::span<const double, kPyramidBins> counts) {
  detail::CompensatedSum total;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double c = counts[k];
    if (!std::isfinite(c) || c < 0.0) {
      throw Error(fmt::format("{}: invalid count {} in bin {}", code.str(), c, k));
    }
    total.add(c);
  }
  const double sum = total.value();
  if (!(sum > 0.0)) {
    throw DegenerateInput(code.str() + ": population total is zero");
  }
  Proportions p{};
  for (std::size_t k = 0; k < counts.size(); ++k) p[k] = counts[k] / sum;
  return AgeSexPyramid(std::move(code), year, p);
}

std::string_view to_string(BinSchema schema) {
  switch (schema) {
    case BinSchema::joint_42: return "joint_42";
    case BinSchema::per_sex_21: return "per_sex_21";
    case BinSchema::age_only_21: return "age_only_21";
  }
  return "unknown";
}

std::optional<BinSchema> parse_bin_schema(std::string_view text) {
  if (text == "joint_42") return BinSchema::joint_42;
  if (text == "per_sex_21") return BinSchema::per_sex_21;
  if (text == "age_only_21") return BinSchema::age_only_21;
  return std::nullopt;
}

std::vector<double> distribution(const AgeSexPyramid& pyramid, BinSchema schema) {
  const auto& p = pyramid.proportions();
  switch (schema) {
    case BinSchema::joint_42:
      return {p.begin(), p.end()};
    case BinSchema::age_only_21: {
      std::vector<double> out(kAgeGroupCount);
      for (std::size_t a = 0; a < kAgeGroupCount; ++a) {
        out[a] = p[pyramid_bin(Sex::male, a)] + p[pyramid_bin(Sex::female, a)];
      }
      return out;
    }
    case BinSchema::per_sex_21: {
      std::vector<double> out(kPyramidBins, 0.0);
      for (Sex sex : {Sex::male, Sex::female}) {
        detail::CompensatedSum share;
        for (std::size_t a = 0; a < kAgeGroupCount; ++a) share.add(p[pyramid_bin(sex, a)]);
        const double total = share.value();
        if (!(total > 0.0)) {
          throw DegenerateInput(fmt::format("{}: no {} population for per-sex schema",
                                            pyramid.code().str(), to_string(sex)));
        }
        for (std::size_t a = 0; a < kAgeGroupCount; ++a) {
          out[pyramid_bin(sex, a)] = 0.5 * p[pyramid_bin(sex, a)] / total;
        }
      }
      return out;
    }
  }
  throw Error("unknown bin schema");
}

std::vector<double> normalize_counts(std::span<const double> counts) {
  detail::CompensatedSum total;
  for (double c : counts) {
    if (!std::isfinite(c) || c < 0.0) throw Error(fmt::format("invalid count {}", c));
    total.add(c);
  }
  const double sum = total.value();
  if (!(sum > 0.0)) throw DegenerateInput("total count is zero");
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / sum;
  return out;
}

AgeSexPyramid normalize(std::span<const RawPopulationRow> rows) {
  if (rows.empty()) throw DegenerateInput("no population rows");
  const CountryCode& code = rows.front().country_code;
  const int year = rows.front().year;

  std::array<double, kPyramidBins> counts{};
  std::array<bool, kPyramidBins> seen{};
  for (const auto& row : rows) {
    if (row.country_code != code || row.year != year) {
      throw Error(fmt::format("normalize: rows mix {}/{} with {}/{}", code.str(), year,
                              row.country_code.str(), row.year));
    }
    if (row.age_group >= kAgeGroupCount) {
      throw Error(fmt::format("{}: age group index {} out of range", code.str(), row.age_group));
    }
    const auto bin = pyramid_bin(row.sex, row.age_group);
    if (seen[bin]) {
      throw Error(fmt::format("{}: duplicate cell ({}, {})", code.str(), to_string(row.sex),
                              kAgeGroupLabels[row.age_group]));
    }
    seen[bin] = true;
    counts[bin] = row.count;
  }
  for (Sex sex : {Sex::male, Sex::female}) {
    for (std::size_t a = 0; a < kAgeGroupCount; ++a) {
      if (!seen[pyramid_bin(sex, a)]) {
        throw Error(fmt::format("{}: missing cell ({}, {})", code.str(), to_string(sex),
                                kAgeGroupLabels[a]));
      }
    }
  }
  return AgeSexPyramid::from_counts(code, year, counts);
}

PyramidBuild build_pyramids(std::span<const RawPopulationRow> rows) {
  std::map<CountryCode, std::vector<RawPopulationRow>> grouped;
  for (const auto& row : rows) grouped[row.country_code].push_back(row);

  PyramidBuild out;
  for (const auto& [code, group] : grouped) {
    try {
      out.pyramids.emplace(code, normalize(group));
    } catch (const Error& e) {
      out.exclusions.push_back({code, std::string("invalid pyramid: ") + e.what()});
    }
  }
  return out;
}

SmoothedReference::SmoothedReference(std::span<const double> q, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(fmt::format("epsilon must be positive, got {}", epsilon));
  }
  detail::CompensatedSum total;
  q_.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] >= 0.0) || !std::isfinite(q[i])) {
      throw Error(fmt::format("reference bin {} is not a valid proportion: {}", i, q[i]));
    }
    q_[i] = q[i] + epsilon;
    total.add(q_[i]);
  }
  const double sum = total.value();
  log_q_.resize(q_.size());
  for (std::size_t i = 0; i < q_.size(); ++i) {
    q_[i] /= sum;
    log_q_[i] = std::log(q_[i]);
  }
}

double kl_divergence(std::span<const double> p, const SmoothedReference& q) {
  const auto log_q = q.log_values();
  if (p.size() != log_q.size()) {
    throw DimensionMismatch(
        fmt::format("distribution sizes differ: {} vs {}", p.size(), log_q.size()));
  }
  detail::CompensatedSum sum;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] > 0.0) sum.add(p[a] * (std::log(p[a]) - log_q[a]));
  }
  return sum.value();
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon) {
  if (p.size() != q.size()) {
    throw DimensionMismatch(fmt::format("distribution sizes differ: {} vs {}", p.size(), q.size()));
  }
  return kl_divergence(p, SmoothedReference(q, epsilon));
}

double pop_divergence(const AgeSexPyramid& country, const AgeSexPyramid& reference,
                      double epsilon, BinSchema schema) {
  return kl_divergence(distribution(country, schema), distribution(reference, schema), epsilon);
}

DivergenceVector divergence_vector(const AgeSexPyramid& reference, const PyramidMap& all,
                                   double epsilon, BinSchema schema, unsigned threads) {
  const SmoothedReference q(distribution(reference, schema), epsilon);

  std::vector<const AgeSexPyramid*> order;
  order.reserve(all.size());
  for (const auto& [_, pyramid] : all) order.push_back(&pyramid);

  std::vector<double> values(order.size());
  detail::parallel_for(order.size(), threads, [&](std::size_t i) {
    try {
      values[i] = kl_divergence(distribution(*order[i], schema), q);
    } catch (const Error& e) {
      throw Error(fmt::format("divergence of {} from {}: {}", order[i]->code().str(),
                              reference.code().str(), e.what()));
    }
  });

  DivergenceVector out{reference.code(), {}};
  for (std::size_t i = 0; i < order.size(); ++i) out.values.emplace(order[i]->code(), values[i]);
  return out;
}

std::string pyramids_to_csv(const PyramidMap& pyramids) {
  std::ostringstream os;
  os << "code,sex,age_group,proportion\n";
  for (const auto& [code, pyramid] : pyramids) {
    for (Sex sex : {Sex::male, Sex::female}) {
      for (std::size_t a = 0; a < kAgeGroupCount; ++a) {
        os << fmt::format("{},{},{},{:.17g}\n", code.str(), to_string(sex), kAgeGroupLabels[a],
                          pyramid.at(sex, a));
      }
    }
  }
  return os.str();
}

}  // namespace popstat
