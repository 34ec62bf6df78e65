#include "cosmos/config.h"

#include <yaml-cpp/yaml.h>

#include <set>

#include "cosmos/io.h"

namespace cosmos {
namespace {

void Check(bool ok, const std::string& what) {
  if (!ok) throw InputError("invalid model config: " + what);
}

nlohmann::json YamlToJson(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json j = nlohmann::json::object();
      for (const auto& kv : node) j[kv.first.as<std::string>()] = YamlToJson(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& item : node) j.push_back(YamlToJson(item));
      return j;
    }
    case YAML::NodeType::Scalar: {
      const std::string s = node.Scalar();
      if (s == "true" || s == "True") return true;
      if (s == "false" || s == "False") return false;
      try {
        size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used == s.size()) return v;
      } catch (...) {
      }
      try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return v;
      } catch (...) {
      }
      return s;
    }
    default:
      return nullptr;
  }
}

}  // namespace

void ModelConfig::Validate() const {
  Check(d > 0 && k1 > 0 && k2 > 0 && k3 > 0, "dimensions must be positive");
  Check(k1 >= 4, "k1 must cover the tallest convolution kernel (4)");
  Check(conv_channels > 0 && cnn_hidden >= 0, "conv_channels/cnn_hidden");
  Check(transformer_layers >= 0 && transformer_heads > 0 && transformer_ffn > 0,
        "transformer sizes");
  Check(d % transformer_heads == 0, "d must be divisible by transformer_heads");
  Check(vocab_buckets > 3 && max_seq_len >= 8, "vocab_buckets/max_seq_len");
  Check(embedder_window >= 0, "embedder_window");
  Check(lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
  Check(tau > 0.0, "tau must be positive");
  Check(c1 >= 0.0 && c1 < c2 && c2 <= 1.0, "need 0 <= c1 < c2 <= 1");
  Check(gamma >= 0.0, "gamma must be non-negative");
  Check(lr > 0.0, "lr must be positive");
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"d", d},
          {"k1", k1},
          {"k2", k2},
          {"k3", k3},
          {"conv_channels", conv_channels},
          {"cnn_hidden", cnn_hidden},
          {"transformer_layers", transformer_layers},
          {"transformer_heads", transformer_heads},
          {"transformer_ffn", transformer_ffn},
          {"vocab_buckets", vocab_buckets},
          {"max_seq_len", max_seq_len},
          {"embedder_window", embedder_window},
          {"embedder_seed", embedder_seed},
          {"lambda", lambda},
          {"tau", tau},
          {"c1", c1},
          {"c2", c2},
          {"gamma", gamma},
          {"lr", lr},
          {"seed", seed},
          {"use_scl", use_scl},
          {"use_ssl", use_ssl}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j) { return FromJson(j, ModelConfig{}); }

ModelConfig ModelConfig::FromJson(const nlohmann::json& j, const ModelConfig& base) {
  if (!j.is_object()) throw InputError("model config must be an object");
  ModelConfig c = base;
  const nlohmann::json known = c.ToJson();
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw InputError("unknown model config key: " + key);
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("d", c.d);
    get("k1", c.k1);
    get("k2", c.k2);
    get("k3", c.k3);
    get("conv_channels", c.conv_channels);
    get("cnn_hidden", c.cnn_hidden);
    get("transformer_layers", c.transformer_layers);
    get("transformer_heads", c.transformer_heads);
    get("transformer_ffn", c.transformer_ffn);
    get("vocab_buckets", c.vocab_buckets);
    get("max_seq_len", c.max_seq_len);
    get("embedder_window", c.embedder_window);
    get("embedder_seed", c.embedder_seed);
    get("lambda", c.lambda);
    get("tau", c.tau);
    get("c1", c.c1);
    get("c2", c.c2);
    get("gamma", c.gamma);
    get("lr", c.lr);
    get("seed", c.seed);
    get("use_scl", c.use_scl);
    get("use_ssl", c.use_ssl);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad model config value: ") + e.what());
  }
  return c;
}

nlohmann::json LoadConfigDocument(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  const std::string body = ReadFile(path);
  try {
    if (ext == ".yaml" || ext == ".yml") return YamlToJson(YAML::Load(body));
    return nlohmann::json::parse(body);
  } catch (const std::exception& e) {
    throw InputError("cannot parse config " + path.string() + ": " + e.what());
  }
}

}  // namespace cosmos
