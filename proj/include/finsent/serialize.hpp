#pragma once

#include <json.hpp>

#include "finsent/model.hpp"
#include "finsent/trainer_config.hpp"
#include "finsent/vader.hpp"

// JSON mappings for the config structs. nlohmann keeps object keys sorted,
// so dumps are byte-stable, which the resolved-config snapshots rely on.

namespace finsent::model {
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
}  // namespace finsent::model

namespace finsent::trainer {
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
}  // namespace finsent::trainer

namespace finsent::vader {
void to_json(nlohmann::json& j, const RuleConfig& c);
void from_json(const nlohmann::json& j, RuleConfig& c);
}  // namespace finsent::vader
