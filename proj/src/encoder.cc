#include "cosmos/encoder.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "cosmos/io.h"
#include "cosmos/text.h"

namespace cosmos {
namespace {

ag::Var XavierLeaf(int in, int out, Rng& rng) {
  Tensor t(in, out);
  const double limit = std::sqrt(6.0 / (in + out));
  for (size_t i = 0; i < t.size(); ++i) t[i] = rng.Uniform(-limit, limit);
  return ag::Leaf(std::move(t));
}

ag::Var NormalLeaf(int rows, int cols, double stddev, Rng& rng) {
  Tensor t(rows, cols);
  for (size_t i = 0; i < t.size(); ++i) t[i] = rng.Normal() * stddev;
  return ag::Leaf(std::move(t));
}

ag::Var FilledLeaf(int rows, int cols, double v) { return ag::Leaf(Tensor(rows, cols, v)); }

}  // namespace

Linear::Linear(int in, int out, Rng& rng, bool bias) : w_(XavierLeaf(in, out, rng)) {
  if (bias) b_ = FilledLeaf(1, out, 0.0);
}

ag::Var Linear::Forward(const ag::Var& x) const {
  ag::Var y = ag::MatMul(x, w_);
  return b_ ? ag::AddBias(y, b_) : y;
}

void Linear::Collect(const std::string& prefix, std::vector<NamedParameter>& out) const {
  out.push_back({prefix + ".weight", w_});
  if (b_) out.push_back({prefix + ".bias", b_});
}

CnnBranch::CnnBranch(const ModelConfig& config, Rng& rng) : d_(config.d) {
  const int heights[4] = {kContextKernelHeights[0], kContextKernelHeights[1],
                          kContextKernelHeights[2], kTripletKernelHeight};
  for (int i = 0; i < 4; ++i) {
    kernels_[i] = XavierLeaf(heights[i] * d_, config.conv_channels, rng);
    kernel_bias_[i] = FilledLeaf(1, config.conv_channels, 0.0);
  }
  output_ = Linear(4 * config.conv_channels, config.cnn_width(), rng);
}

ag::Var CnnBranch::Features(const ag::Var& hc, const ag::Var& ht) const {
  if (hc->value.cols() != static_cast<size_t>(d_) || ht->value.cols() != static_cast<size_t>(d_) ||
      ht->value.rows() != 3) {
    throw std::invalid_argument("CnnBranch: H_c must be k1 x d and H_t 3 x d");
  }
  std::vector<ag::Var> pooled;
  for (int i = 0; i < 4; ++i) {
    const ag::Var& input = i < 3 ? hc : ht;
    const int height = i < 3 ? kContextKernelHeights[i] : kTripletKernelHeight;
    ag::Var conv = ag::AddBias(ag::MatMul(ag::Windows(input, height), kernels_[i]), kernel_bias_[i]);
    pooled.push_back(ag::MaxOverRows(conv));
  }
  return ag::ConcatCols(pooled);
}

ag::Var CnnBranch::Forward(const ag::Var& hc, const ag::Var& ht) const {
  return output_.Forward(Features(hc, ht));
}

void CnnBranch::Collect(std::vector<NamedParameter>& out) const {
  const char* names[4] = {"cnn.conv_h2", "cnn.conv_h3", "cnn.conv_h4", "cnn.conv_triplet"};
  for (int i = 0; i < 4; ++i) {
    out.push_back({std::string(names[i]) + ".weight", kernels_[i]});
    out.push_back({std::string(names[i]) + ".bias", kernel_bias_[i]});
  }
  output_.Collect("cnn.output", out);
}

TransformerBranch::TransformerBranch(const ModelConfig& config, Rng& rng)
    : d_(config.d),
      heads_(config.transformer_heads),
      vocab_(config.vocab_buckets),
      max_positions_(config.max_seq_len + 1) {
  token_embedding_ = NormalLeaf(vocab_, d_, 0.02, rng);
  position_embedding_ = NormalLeaf(max_positions_, d_, 0.02, rng);
  ln_gamma_ = FilledLeaf(1, d_, 1.0);
  ln_beta_ = FilledLeaf(1, d_, 0.0);
  for (int l = 0; l < config.transformer_layers; ++l) {
    Block b;
    b.q = Linear(d_, d_, rng);
    b.k = Linear(d_, d_, rng);
    b.v = Linear(d_, d_, rng);
    b.o = Linear(d_, d_, rng);
    b.ffn_in = Linear(d_, config.transformer_ffn, rng);
    b.ffn_out = Linear(config.transformer_ffn, d_, rng);
    b.ln1_gamma = FilledLeaf(1, d_, 1.0);
    b.ln1_beta = FilledLeaf(1, d_, 0.0);
    b.ln2_gamma = FilledLeaf(1, d_, 1.0);
    b.ln2_beta = FilledLeaf(1, d_, 0.0);
    blocks_.push_back(std::move(b));
  }
  pooler_ = Linear(d_, d_, rng);
}

std::vector<int> TransformerBranch::TokenIds(std::span<const std::string> sequence) const {
  std::vector<int> ids{kClsId};
  for (const auto& tok : sequence) {
    if (tok == kSeparatorToken) {
      ids.push_back(kSepId);
    } else {
      ids.push_back(3 + static_cast<int>(HashToken(tok) % static_cast<uint64_t>(vocab_ - 3)));
    }
  }
  if (static_cast<int>(ids.size()) > max_positions_) ids.resize(max_positions_);
  return ids;
}

ag::Var TransformerBranch::Forward(std::span<const int> ids) const {
  if (ids.empty() || static_cast<int>(ids.size()) > max_positions_) {
    throw std::invalid_argument("TransformerBranch: sequence length outside [1, max_seq_len + 1]");
  }
  std::vector<int> positions(ids.size());
  for (size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);
  ag::Var x = ag::Add(ag::GatherRows(token_embedding_, ids),
                      ag::GatherRows(position_embedding_, positions));
  x = ag::LayerNormRows(x, ln_gamma_, ln_beta_);
  const int head_dim = d_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  for (const Block& b : blocks_) {
    ag::Var q = b.q.Forward(x), k = b.k.Forward(x), v = b.v.Forward(x);
    std::vector<ag::Var> head_out;
    for (int h = 0; h < heads_; ++h) {
      const size_t c0 = h * head_dim, c1 = c0 + head_dim;
      ag::Var scores = ag::Scale(ag::MatMulNT(ag::SliceCols(q, c0, c1), ag::SliceCols(k, c0, c1)), scale);
      head_out.push_back(ag::MatMul(ag::SoftmaxRows(scores), ag::SliceCols(v, c0, c1)));
    }
    ag::Var attn = b.o.Forward(ag::ConcatCols(head_out));
    x = ag::LayerNormRows(ag::Add(x, attn), b.ln1_gamma, b.ln1_beta);
    ag::Var ffn = b.ffn_out.Forward(ag::Gelu(b.ffn_in.Forward(x)));
    x = ag::LayerNormRows(ag::Add(x, ffn), b.ln2_gamma, b.ln2_beta);
  }
  return ag::Tanh(pooler_.Forward(ag::SliceRows(x, 0, 1)));
}

void TransformerBranch::Collect(std::vector<NamedParameter>& out) const {
  out.push_back({"bert.token_embedding", token_embedding_});
  out.push_back({"bert.position_embedding", position_embedding_});
  out.push_back({"bert.embedding_ln.gamma", ln_gamma_});
  out.push_back({"bert.embedding_ln.beta", ln_beta_});
  for (size_t l = 0; l < blocks_.size(); ++l) {
    const std::string p = "bert.layer" + std::to_string(l);
    const Block& b = blocks_[l];
    b.q.Collect(p + ".query", out);
    b.k.Collect(p + ".key", out);
    b.v.Collect(p + ".value", out);
    b.o.Collect(p + ".attn_out", out);
    out.push_back({p + ".ln1.gamma", b.ln1_gamma});
    out.push_back({p + ".ln1.beta", b.ln1_beta});
    b.ffn_in.Collect(p + ".ffn_in", out);
    b.ffn_out.Collect(p + ".ffn_out", out);
    out.push_back({p + ".ln2.gamma", b.ln2_gamma});
    out.push_back({p + ".ln2.beta", b.ln2_beta});
  }
  pooler_.Collect("bert.pooler", out);
}

FusionHead::FusionHead(const ModelConfig& config, Rng& rng)
    : cnn_proj_(config.cnn_width(), config.k2, rng),
      bert_proj_(config.d, config.k2, rng),
      classifier_(2 * config.k2, 2, rng) {}

FusionOutput FusionHead::Forward(const ag::Var& h_cnn, const ag::Var& h_bert) const {
  const ag::Var parts[] = {cnn_proj_.Forward(h_cnn), bert_proj_.Forward(h_bert)};
  ag::Var h_ce = ag::ConcatCols(parts);
  return {h_ce, ag::SoftmaxRows(classifier_.Forward(h_ce))};
}

void FusionHead::Collect(std::vector<NamedParameter>& out) const {
  cnn_proj_.Collect("fusion.cnn_proj", out);
  bert_proj_.Collect("fusion.bert_proj", out);
  classifier_.Collect("fusion.classifier", out);
}

SclProjection::SclProjection(const ModelConfig& config, Rng& rng)
    : k3_(config.k3),
      cnn_proj_(config.cnn_width(), config.k3, rng),
      bert_proj_(config.d, config.k3, rng),
      query_(XavierLeaf(config.k3, config.k3, rng)),
      key_(XavierLeaf(config.k3, config.k3, rng)) {}

ag::Var SclProjection::Attend(const ag::Var& h_cnn, const ag::Var& h_bert) const {
  const ag::Var rows[] = {cnn_proj_.Forward(h_cnn), bert_proj_.Forward(h_bert)};
  ag::Var x = ag::ConcatRows(rows);  // 2 x k3
  ag::Var scores = ag::Scale(ag::MatMulNT(ag::MatMul(x, query_), ag::MatMul(x, key_)),
                             1.0 / std::sqrt(static_cast<double>(k3_)));
  return ag::MeanOverRows(ag::MatMul(ag::SoftmaxRows(scores), x));
}

ag::Var SclProjection::Forward(const ag::Var& h_cnn, const ag::Var& h_bert) const {
  return ag::L2NormalizeRows(Attend(h_cnn, h_bert));
}

void SclProjection::Collect(std::vector<NamedParameter>& out) const {
  cnn_proj_.Collect("scl.cnn_proj", out);
  bert_proj_.Collect("scl.bert_proj", out);
  out.push_back({"scl.attn_query", query_});
  out.push_back({"scl.attn_key", key_});
}

CosmosModel::CosmosModel(const ModelConfig& config)
    : config_((config.Validate(), config)),
      embedder_(std::make_shared<HashedContextEmbedder>(config.d, config.embedder_seed,
                                                        config.embedder_window)),
      rng_(config.seed),
      cnn_(config_, rng_),
      transformer_(config_, rng_),
      fusion_(config_, rng_),
      scl_(config_, rng_) {
  cnn_.Collect(parameters_);
  transformer_.Collect(parameters_);
  fusion_.Collect(parameters_);
  scl_.Collect(parameters_);
}

EncodedExample CosmosModel::Encode(const Example& example) const {
  ContextEmbedding ctx = EmbedContext(example.context, *embedder_, config_.k1);
  EncodedExample e;
  e.ht = BuildHt(example.triplet, example.context, ctx.x);
  e.hc = std::move(ctx.hc);
  auto sequence = BuildInputSequence(example.triplet, example.context,
                                     static_cast<size_t>(config_.max_seq_len));
  e.ids = transformer_.TokenIds(sequence);
  return e;
}

Representations CosmosModel::Forward(const EncodedExample& input) const {
  Representations r;
  r.h_cnn = cnn_.Forward(ag::Constant(input.hc), ag::Constant(input.ht));
  r.h_bert = transformer_.Forward(input.ids);
  FusionOutput f = fusion_.Forward(r.h_cnn, r.h_bert);
  r.h_ce = f.h_ce;
  r.y_pred = f.y_pred;
  r.h_scl = scl_.Forward(r.h_cnn, r.h_bert);
  return r;
}

double CosmosModel::PredictPositive(const EncodedExample& input) const {
  ag::Var h_cnn = cnn_.Forward(ag::Constant(input.hc), ag::Constant(input.ht));
  ag::Var h_bert = transformer_.Forward(input.ids);
  return fusion_.Forward(h_cnn, h_bert).y_pred->value[1];
}

std::vector<Tensor> CosmosModel::SnapshotParameters() const {
  std::vector<Tensor> out;
  out.reserve(parameters_.size());
  for (const auto& p : parameters_) out.push_back(p.var->value);
  return out;
}

void CosmosModel::RestoreParameters(const std::vector<Tensor>& values) {
  if (values.size() != parameters_.size()) throw std::invalid_argument("parameter count mismatch");
  for (size_t i = 0; i < values.size(); ++i) {
    if (!values[i].SameShape(parameters_[i].var->value)) {
      throw std::invalid_argument("parameter shape mismatch for " + parameters_[i].name);
    }
    parameters_[i].var->value = values[i];
  }
}

namespace {
constexpr char kMagic[8] = {'C', 'O', 'S', 'M', 'O', 'S', 'C', '1'};
}

// Layout: 8-byte magic, uint64 header length, JSON header {config,
// parameters: [{name, rows, cols}]}, then the parameters' doubles in header
// order, little-endian.
void CosmosModel::Save(const std::filesystem::path& path) const {
  nlohmann::json header;
  header["config"] = config_.ToJson();
  header["parameters"] = nlohmann::json::array();
  for (const auto& p : parameters_) {
    header["parameters"].push_back(
        {{"name", p.name}, {"rows", p.var->value.rows()}, {"cols", p.var->value.cols()}});
  }
  const std::string head = header.dump();
  std::string blob(kMagic, sizeof(kMagic));
  const uint64_t len = head.size();
  blob.append(reinterpret_cast<const char*>(&len), sizeof(len));
  blob += head;
  for (const auto& p : parameters_) {
    blob.append(reinterpret_cast<const char*>(p.var->value.data()),
                p.var->value.size() * sizeof(double));
  }
  AtomicWriteFile(path, blob);
}

std::unique_ptr<CosmosModel> CosmosModel::Load(const std::filesystem::path& path) {
  const std::string blob = ReadFile(path);
  if (blob.size() < 16 || std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0) {
    throw InputError("not a COSMOS checkpoint: " + path.string());
  }
  uint64_t len = 0;
  std::memcpy(&len, blob.data() + 8, sizeof(len));
  if (16 + len > blob.size()) throw InputError("truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(16, len));
  } catch (const std::exception& e) {
    throw InputError(std::string("corrupt checkpoint header: ") + e.what());
  }
  auto model = std::make_unique<CosmosModel>(ModelConfig::FromJson(header.at("config")));
  std::map<std::string, const nlohmann::json*> index;
  for (const auto& p : header.at("parameters")) index[p.at("name").get<std::string>()] = &p;
  size_t offset = 16 + len;
  for (const auto& spec : header.at("parameters")) {
    const size_t rows = spec.at("rows").get<size_t>(), cols = spec.at("cols").get<size_t>();
    const size_t bytes = rows * cols * sizeof(double);
    if (offset + bytes > blob.size()) throw InputError("truncated checkpoint data");
    const std::string name = spec.at("name").get<std::string>();
    bool placed = false;
    for (auto& p : model->parameters_) {
      if (p.name != name) continue;
      if (p.var->value.rows() != rows || p.var->value.cols() != cols) {
        throw InputError("checkpoint shape mismatch for " + name);
      }
      std::memcpy(p.var->value.data(), blob.data() + offset, bytes);
      placed = true;
    }
    if (!placed) throw InputError("unknown parameter in checkpoint: " + name);
    offset += bytes;
  }
  if (index.size() != model->parameters_.size()) throw InputError("checkpoint parameter count mismatch");
  return model;
}

}  // namespace cosmos
