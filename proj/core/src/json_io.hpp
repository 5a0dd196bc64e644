#pragma once

#include <json.hpp>

#include "popstat/stats.hpp"
#include "popstat/tuning.hpp"

namespace popstat::detail {

// NaN and infinities become null.
nlohmann::json number(double v);

nlohmann::json to_json(const CorrelationResult& r);
nlohmann::json to_json(const TuningResult& t);
nlohmann::json to_json(const RobustnessTable& t);

}  // namespace popstat::detail
