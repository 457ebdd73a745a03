#include "aeot/config.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "aeot/checkpoint.hpp"

namespace aeot::config {

using nlohmann::json;

namespace {

using Setter = std::function<void(const json&)>;

void apply(const json& j, const std::map<std::string, Setter>& setters, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument(std::string("unknown ") + what + " config key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string(what) + " config key '" + key + "': " + e.what());
    }
  }
}

std::vector<Eigen::Index> widths(const json& j) { return j.get<std::vector<Eigen::Index>>(); }

}  // namespace

json to_json(const potential::TrainConfig& cfg) {
  return {{"iterations", cfg.iterations},
          {"batch_size", cfg.batch_size},
          {"lambda", cfg.lambda},
          {"lr", cfg.adam.lr},
          {"beta1", cfg.adam.beta1},
          {"beta2", cfg.adam.beta2},
          {"eps", cfg.adam.eps},
          {"seed", cfg.seed},
          {"checkpoint_every", cfg.checkpoint_every},
          {"latent_dim", cfg.latent_dim},
          {"hidden", cfg.hidden},
          {"activation", ckpt::activation_to_string(cfg.activation)},
          {"noise", potential::noise_name(cfg.noise)}};
}

json to_json(const ae::AeConfig& cfg) {
  return {{"input_dim", cfg.input_dim},
          {"latent_dim", cfg.latent_dim},
          {"hidden", cfg.hidden},
          {"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"lr", cfg.adam.lr},
          {"beta1", cfg.adam.beta1},
          {"beta2", cfg.adam.beta2},
          {"eps", cfg.adam.eps},
          {"seed", cfg.seed},
          {"hidden_activation", ckpt::activation_to_string(cfg.hidden_activation)},
          {"code_activation", ckpt::activation_to_string(cfg.code_activation)},
          {"output_activation", ckpt::activation_to_string(cfg.output_activation)}};
}

void apply_json(potential::TrainConfig& cfg, const json& j) {
  apply(j,
        {{"iterations", [&](const json& v) { cfg.iterations = v.get<std::int64_t>(); }},
         {"batch_size", [&](const json& v) { cfg.batch_size = v.get<Eigen::Index>(); }},
         {"lambda", [&](const json& v) { cfg.lambda = v.get<double>(); }},
         {"lr", [&](const json& v) { cfg.adam.lr = v.get<double>(); }},
         {"beta1", [&](const json& v) { cfg.adam.beta1 = v.get<double>(); }},
         {"beta2", [&](const json& v) { cfg.adam.beta2 = v.get<double>(); }},
         {"eps", [&](const json& v) { cfg.adam.eps = v.get<double>(); }},
         {"seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); }},
         {"checkpoint_every", [&](const json& v) { cfg.checkpoint_every = v.get<std::int64_t>(); }},
         {"latent_dim", [&](const json& v) { cfg.latent_dim = v.get<Eigen::Index>(); }},
         {"hidden", [&](const json& v) { cfg.hidden = widths(v); }},
         {"activation", [&](const json& v) { cfg.activation = ckpt::activation_from_string(v.get<std::string>()); }},
         {"noise", [&](const json& v) { cfg.noise = potential::noise_kind_from_name(v.get<std::string>()); }}},
        "potential");
}

void apply_json(ae::AeConfig& cfg, const json& j) {
  apply(j,
        {{"input_dim", [&](const json& v) { cfg.input_dim = v.get<Eigen::Index>(); }},
         {"latent_dim", [&](const json& v) { cfg.latent_dim = v.get<Eigen::Index>(); }},
         {"hidden", [&](const json& v) { cfg.hidden = widths(v); }},
         {"epochs", [&](const json& v) { cfg.epochs = v.get<int>(); }},
         {"batch_size", [&](const json& v) { cfg.batch_size = v.get<Eigen::Index>(); }},
         {"lr", [&](const json& v) { cfg.adam.lr = v.get<double>(); }},
         {"beta1", [&](const json& v) { cfg.adam.beta1 = v.get<double>(); }},
         {"beta2", [&](const json& v) { cfg.adam.beta2 = v.get<double>(); }},
         {"eps", [&](const json& v) { cfg.adam.eps = v.get<double>(); }},
         {"seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); }},
         {"hidden_activation",
          [&](const json& v) { cfg.hidden_activation = ckpt::activation_from_string(v.get<std::string>()); }},
         {"code_activation",
          [&](const json& v) { cfg.code_activation = ckpt::activation_from_string(v.get<std::string>()); }},
         {"output_activation",
          [&](const json& v) { cfg.output_activation = ckpt::activation_from_string(v.get<std::string>()); }}},
        "autoencoder");
}

}  // namespace aeot::config
