#include "aeot/checkpoint.hpp"

#include <cmath>
#include <limits>

#include "aeot/io.hpp"

namespace aeot::ckpt {

using nlohmann::json;

std::string role_name(Role role) {
  switch (role) {
    case Role::potential: return "potential";
    case Role::encoder: return "encoder";
    case Role::decoder: return "decoder";
  }
  return "potential";
}

Role role_from_name(const std::string& name) {
  if (name == "potential") return Role::potential;
  if (name == "encoder") return Role::encoder;
  if (name == "decoder") return Role::decoder;
  throw CheckpointError("unknown checkpoint role '" + name + "'");
}

std::string activation_to_string(const nn::Activation& a) {
  if (a.kind == nn::ActivationKind::leaky_relu) return "leaky_relu(" + io::format_double(a.slope) + ")";
  return nn::activation_name(a.kind);
}

nn::Activation activation_from_string(const std::string& text) {
  const std::string prefix = "leaky_relu(";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size() + 1 && text.back() == ')') {
    const std::string inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    std::size_t used = 0;
    double slope = 0.0;
    try {
      slope = std::stod(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != inner.size()) throw std::invalid_argument("bad leaky_relu slope in '" + text + "'");
    return nn::Activation::leaky_relu(slope);
  }
  if (text == "leaky_relu") return nn::Activation::leaky_relu(0.2);
  const nn::ActivationKind kind = nn::activation_kind_from_name(text);
  return nn::Activation{kind, 0.0};
}

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw CheckpointError("expected a number, got " + j.dump());
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  out.get_ref<json::array_t&>().reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(number(m(r, c)));
  return out;
}

Eigen::MatrixXd read_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw CheckpointError(std::string("checkpoint: ") + what + " has the wrong number of entries");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = read_number(j[k++]);
  return m;
}

json grads_json(const nn::ParamGrads& g) {
  json out = json::array();
  for (std::size_t l = 0; l < g.weight.size(); ++l)
    out.push_back({{"weight", matrix_json(g.weight[l])}, {"bias", matrix_json(g.bias[l])}});
  return out;
}

nn::ParamGrads read_grads(const json& j, const nn::Mlp& net) {
  nn::ParamGrads g = nn::ParamGrads::zeros_like(net);
  if (!j.is_array() || j.size() != net.depth()) throw CheckpointError("checkpoint: Adam moments do not match the layers");
  for (std::size_t l = 0; l < net.depth(); ++l) {
    g.weight[l] = read_matrix(j[l].at("weight"), g.weight[l].rows(), g.weight[l].cols(), "Adam moment");
    g.bias[l] = read_matrix(j[l].at("bias"), g.bias[l].rows(), 1, "Adam moment");
  }
  return g;
}

}  // namespace

json to_json(const Checkpoint& ckpt) {
  json doc;
  doc["format"] = kFormatName;
  doc["format_version"] = kFormatVersion;
  doc["role"] = role_name(ckpt.role);
  doc["iteration"] = ckpt.iteration;
  json layers = json::array();
  for (const nn::Layer& layer : ckpt.net.layers()) {
    layers.push_back({{"in", layer.weight.cols()},
                      {"out", layer.weight.rows()},
                      {"activation", activation_to_string(layer.activation)},
                      {"weight", matrix_json(layer.weight)},
                      {"bias", matrix_json(layer.bias)}});
  }
  doc["layers"] = std::move(layers);
  if (ckpt.adam) {
    const nn::Adam& a = *ckpt.adam;
    doc["adam"] = {{"lr", a.config().lr},
                   {"beta1", a.config().beta1},
                   {"beta2", a.config().beta2},
                   {"eps", a.config().eps},
                   {"step", a.steps()},
                   {"m", grads_json(a.first_moment())},
                   {"v", grads_json(a.second_moment())}};
  } else {
    doc["adam"] = nullptr;
  }
  doc["rng"] = ckpt.rng ? json(ckpt.rng->state()) : json(nullptr);
  doc["config"] = ckpt.config;
  doc["notes"] = ckpt.notes;
  return doc;
}

Checkpoint from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", std::string()) != kFormatName)
      throw CheckpointError("not an aeot checkpoint");
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw CheckpointError("checkpoint format version " + std::to_string(version) +
                            " is not supported (expected " + std::to_string(kFormatVersion) + ")");
    }
    Checkpoint ckpt;
    ckpt.role = role_from_name(doc.at("role").get<std::string>());
    ckpt.iteration = doc.at("iteration").get<std::int64_t>();

    std::vector<nn::Layer> layers;
    for (const json& l : doc.at("layers")) {
      const auto in = l.at("in").get<Eigen::Index>();
      const auto out = l.at("out").get<Eigen::Index>();
      if (in < 1 || out < 1) throw CheckpointError("checkpoint: layer dimensions must be positive");
      nn::Layer layer;
      layer.weight = read_matrix(l.at("weight"), out, in, "weight");
      layer.bias = read_matrix(l.at("bias"), out, 1, "bias");
      layer.activation = activation_from_string(l.at("activation").get<std::string>());
      layers.push_back(std::move(layer));
    }
    ckpt.net = nn::Mlp(std::move(layers));

    // Optimizer and RNG state are optional: absent and null mean the same.
    const json adam = doc.value("adam", json(nullptr));
    if (!adam.is_null()) {
      const nn::AdamConfig cfg{read_number(adam.at("lr")), read_number(adam.at("beta1")),
                               read_number(adam.at("beta2")), read_number(adam.at("eps"))};
      ckpt.adam = nn::Adam(cfg, read_grads(adam.at("m"), ckpt.net), read_grads(adam.at("v"), ckpt.net),
                           adam.at("step").get<std::int64_t>());
    }
    const json rng = doc.value("rng", json(nullptr));
    if (!rng.is_null()) ckpt.rng = Rng::from_state(rng.get<std::string>());
    ckpt.config = doc.value("config", json::object());
    ckpt.notes = doc.value("notes", json::object());
    return ckpt;
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

std::string serialize(const Checkpoint& ckpt) { return to_json(ckpt).dump() + "\n"; }

Checkpoint parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  return from_json(doc);
}

void save(const std::filesystem::path& path, const Checkpoint& ckpt) {
  io::write_file_atomic(path, serialize(ckpt));
}

Checkpoint load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const std::exception& e) {
    throw CheckpointError(e.what());
  }
  return parse(text);
}

}  // namespace aeot::ckpt
