#pragma once

#include <json.hpp>

#include "mekbrec/encoder.hpp"
#include "mekbrec/eval.hpp"
#include "mekbrec/mekb.hpp"
#include "mekbrec/training.hpp"

namespace mekb {

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const MeKBConfig& c);
void from_json(const nlohmann::json& j, MeKBConfig& c);
void to_json(nlohmann::json& j, const SplitSpec& c);
void from_json(const nlohmann::json& j, SplitSpec& c);
void to_json(nlohmann::json& j, const EvalSettings& c);
void from_json(const nlohmann::json& j, EvalSettings& c);

}  // namespace mekb
