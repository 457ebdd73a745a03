#pragma once

// JSON views of the training configurations. Used for the config echo in
// checkpoints; apply_json overlays only the keys present.

#include <json.hpp>

#include "aeot/autoencoder.hpp"
#include "aeot/potential.hpp"

namespace aeot::config {

nlohmann::json to_json(const potential::TrainConfig& cfg);
nlohmann::json to_json(const ae::AeConfig& cfg);

// Unknown keys and wrongly typed values throw std::invalid_argument.
void apply_json(potential::TrainConfig& cfg, const nlohmann::json& j);
void apply_json(ae::AeConfig& cfg, const nlohmann::json& j);

}  // namespace aeot::config
