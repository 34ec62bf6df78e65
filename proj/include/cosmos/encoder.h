#ifndef COSMOS_ENCODER_H_
#define COSMOS_ENCODER_H_

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cosmos/autograd.h"
#include "cosmos/config.h"
#include "cosmos/context.h"
#include "cosmos/embedding.h"
#include "cosmos/random.h"

namespace cosmos {

struct NamedParameter {
  std::string name;
  ag::Var var;
};

// Affine map x -> x W + b over rows, W is in x out.
class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, Rng& rng, bool bias = true);
  ag::Var Forward(const ag::Var& x) const;
  void Collect(const std::string& prefix, std::vector<NamedParameter>& out) const;
  const ag::Var& weight() const { return w_; }
  const ag::Var& bias() const { return b_; }

 private:
  ag::Var w_;
  ag::Var b_;
};

// Three full-width convolutions (heights 2, 3, 4) over H_c and one of height
// 3 over H_t, each max-pooled over positions to `conv_channels` values; the
// concatenation goes through a linear layer to h_cnn.
class CnnBranch {
 public:
  static constexpr int kContextKernelHeights[3] = {2, 3, 4};
  static constexpr int kTripletKernelHeight = 3;

  CnnBranch(const ModelConfig& config, Rng& rng);
  // Concatenated pooled features h_c1 + h_c2 + h_c3 + h_t (before the linear
  // layer), 4 * conv_channels wide.
  ag::Var Features(const ag::Var& hc, const ag::Var& ht) const;
  ag::Var Forward(const ag::Var& hc, const ag::Var& ht) const;
  void Collect(std::vector<NamedParameter>& out) const;

  const ag::Var& kernel(int i) const { return kernels_[i]; }
  const ag::Var& kernel_bias(int i) const { return kernel_bias_[i]; }
  const Linear& output() const { return output_; }

 private:
  int d_;
  ag::Var kernels_[4];  // (height * d) x channels; index 3 is the H_t kernel
  ag::Var kernel_bias_[4];
  Linear output_;
};

// BERT-style encoder: hashed token + learned position embeddings, post-norm
// self-attention blocks, and a tanh pooler over the leading [CLS] position.
class TransformerBranch {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kClsId = 1;
  static constexpr int kSepId = 2;

  TransformerBranch(const ModelConfig& config, Rng& rng);
  // `ids` starts with kClsId. Returns 1 x d.
  ag::Var Forward(std::span<const int> ids) const;
  void Collect(std::vector<NamedParameter>& out) const;

  // [CLS] followed by the hashed ids of `sequence`; [SEP] maps to kSepId.
  std::vector<int> TokenIds(std::span<const std::string> sequence) const;

 private:
  struct Block {
    Linear q, k, v, o, ffn_in, ffn_out;
    ag::Var ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;
  };
  int d_, heads_, vocab_, max_positions_;
  ag::Var token_embedding_, position_embedding_, ln_gamma_, ln_beta_;
  std::vector<Block> blocks_;
  Linear pooler_;
};

struct FusionOutput {
  ag::Var h_ce;    // 1 x 2*k2
  ag::Var y_pred;  // 1 x 2, softmax
};

// h_cnn' and h_bert' (k2 each) are concatenated into h_ce; a final 2*k2 -> 2
// map feeds the softmax so the output is a binary distribution.
class FusionHead {
 public:
  FusionHead(const ModelConfig& config, Rng& rng);
  FusionOutput Forward(const ag::Var& h_cnn, const ag::Var& h_bert) const;
  void Collect(std::vector<NamedParameter>& out) const;
  const Linear& cnn_proj() const { return cnn_proj_; }
  const Linear& bert_proj() const { return bert_proj_; }
  const Linear& classifier() const { return classifier_; }

 private:
  Linear cnn_proj_, bert_proj_, classifier_;
};

// Projects both branch outputs to k3, attends over the two projected
// vectors (learned query/key maps, values are the vectors themselves),
// mean-pools and L2-normalizes.
class SclProjection {
 public:
  SclProjection(const ModelConfig& config, Rng& rng);
  // Mean-pooled attention output before normalization.
  ag::Var Attend(const ag::Var& h_cnn, const ag::Var& h_bert) const;
  ag::Var Forward(const ag::Var& h_cnn, const ag::Var& h_bert) const;
  void Collect(std::vector<NamedParameter>& out) const;
  const Linear& cnn_proj() const { return cnn_proj_; }
  const Linear& bert_proj() const { return bert_proj_; }
  const ag::Var& query() const { return query_; }
  const ag::Var& key() const { return key_; }

 private:
  int k3_;
  Linear cnn_proj_, bert_proj_;
  ag::Var query_, key_;
};

// Per-example model input, independent of trainable parameters.
struct EncodedExample {
  Tensor hc;             // k1 x d
  Tensor ht;             // 3 x d
  std::vector<int> ids;  // transformer ids, [CLS] first
};

struct Representations {
  ag::Var h_cnn, h_bert, h_ce, y_pred, h_scl;
};

class CosmosModel {
 public:
  explicit CosmosModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  const TokenEmbedder& embedder() const { return *embedder_; }

  EncodedExample Encode(const Example& example) const;
  Representations Forward(const EncodedExample& input) const;
  // P(y = 1) without building a gradient graph worth keeping.
  double PredictPositive(const EncodedExample& input) const;

  const CnnBranch& cnn() const { return cnn_; }
  const TransformerBranch& transformer() const { return transformer_; }
  const FusionHead& fusion() const { return fusion_; }
  const SclProjection& scl() const { return scl_; }

  // Stable order; names are unique.
  const std::vector<NamedParameter>& parameters() const { return parameters_; }
  std::vector<Tensor> SnapshotParameters() const;
  void RestoreParameters(const std::vector<Tensor>& values);

  void Save(const std::filesystem::path& path) const;
  static std::unique_ptr<CosmosModel> Load(const std::filesystem::path& path);

 private:
  ModelConfig config_;
  std::shared_ptr<const TokenEmbedder> embedder_;
  Rng rng_;
  CnnBranch cnn_;
  TransformerBranch transformer_;
  FusionHead fusion_;
  SclProjection scl_;
  std::vector<NamedParameter> parameters_;
};

}  // namespace cosmos

#endif  // COSMOS_ENCODER_H_
