#pragma once

// Versioned JSON checkpoints. Every double is written as the shortest decimal
// that reads back to the same bits, so load(save(x)) == x exactly.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "aeot/mlp.hpp"
#include "aeot/rng.hpp"

namespace aeot::ckpt {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kFormatName = "aeot-checkpoint";

enum class Role { potential, encoder, decoder };

std::string role_name(Role role);
Role role_from_name(const std::string& name);

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  Role role = Role::potential;
  nn::Mlp net;
  std::optional<nn::Adam> adam;
  std::optional<Rng> rng;
  std::int64_t iteration = 0;
  nlohmann::json config = nlohmann::json::object();
  // Free-form, e.g. the reason for a diagnostic dump.
  nlohmann::json notes = nlohmann::json::object();
};

nlohmann::json to_json(const Checkpoint& ckpt);
// Throws CheckpointError on a wrong format name, a version mismatch or a
// malformed body.
Checkpoint from_json(const nlohmann::json& doc);

std::string serialize(const Checkpoint& ckpt);
Checkpoint parse(const std::string& text);

// Atomic (temporary file + rename).
void save(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load(const std::filesystem::path& path);

// Activation as text: identity, relu, sigmoid, leaky_relu(0.2).
std::string activation_to_string(const nn::Activation& a);
nn::Activation activation_from_string(const std::string& text);

}  // namespace aeot::ckpt
