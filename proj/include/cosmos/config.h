#ifndef COSMOS_CONFIG_H_
#define COSMOS_CONFIG_H_

#include <cstdint>
#include <filesystem>

#include "json.hpp"

namespace cosmos {

// Architecture, loss and optimizer hyperparameters. Defaults are the
// published COSMOS settings where those exist.
struct ModelConfig {
  // Embedding width shared by the frozen context embedder and the
  // transformer branch.
  int d = 768;
  // Context rows seen by the convolutional branch (pad/truncate).
  int k1 = 100;
  // Width of each branch's classification projection; h_ce has 2 * k2.
  int k2 = 2;
  // Width of the contrastive projection.
  int k3 = 32;
  int conv_channels = 100;
  // Width of h_cnn; 0 means d.
  int cnn_hidden = 0;

  int transformer_layers = 2;
  int transformer_heads = 12;
  int transformer_ffn = 3072;
  int vocab_buckets = 8192;
  int max_seq_len = 512;

  int embedder_window = 1;
  uint64_t embedder_seed = 42;

  double lambda = 0.2;
  double tau = 0.1;
  double c1 = 0.1;
  double c2 = 0.9;
  double gamma = 0.8;
  double lr = 5e-5;
  uint64_t seed = 42;

  bool use_scl = true;
  bool use_ssl = true;

  int cnn_width() const { return cnn_hidden > 0 ? cnn_hidden : d; }

  // Throws InputError naming the first violated constraint.
  void Validate() const;

  nlohmann::json ToJson() const;
  // Starts from `base` and overrides the keys present in `j`. Unknown keys
  // are rejected.
  static ModelConfig FromJson(const nlohmann::json& j, const ModelConfig& base);
  static ModelConfig FromJson(const nlohmann::json& j);
};

// Reads a JSON or YAML (by extension .yaml/.yml) object. The "model" key, if
// present, holds ModelConfig fields; otherwise the whole object does.
nlohmann::json LoadConfigDocument(const std::filesystem::path& path);

}  // namespace cosmos

#endif  // COSMOS_CONFIG_H_
