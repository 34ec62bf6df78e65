#include "cosmos/embedding.h"

#include <cmath>

#include "cosmos/io.h"
#include "cosmos/kernels.h"
#include "cosmos/random.h"
#include "cosmos/text.h"

namespace cosmos {

uint64_t HashToken(std::string_view token) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text::AsciiLower(token)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

HashedContextEmbedder::HashedContextEmbedder(int dim, uint64_t seed, int window)
    : dim_(dim), seed_(seed), window_(window) {
  if (dim <= 0) throw InputError("embedding dim must be positive");
}

std::vector<double> HashedContextEmbedder::TokenVector(const std::string& token) const {
  Rng rng(HashToken(token) ^ (seed_ * 0x9E3779B97F4A7C15ULL));
  std::vector<double> v(dim_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
  for (double& x : v) x = rng.Normal() * scale;
  return v;
}

Tensor HashedContextEmbedder::Embed(std::span<const std::string> tokens) const {
  const size_t n = tokens.size();
  std::vector<std::vector<double>> base;
  base.reserve(n);
  for (const auto& t : tokens) base.push_back(TokenVector(t));
  Tensor out(n, dim_);
  for (size_t i = 0; i < n; ++i) {
    kernels::Axpy(1.0, base[i].data(), out.row(i).data(), dim_);
    double w = 0.5;
    for (int off = 1; off <= window_; ++off, w *= 0.5) {
      if (i >= static_cast<size_t>(off)) kernels::Axpy(w / 2.0, base[i - off].data(), out.row(i).data(), dim_);
      if (i + off < n) kernels::Axpy(w / 2.0, base[i + off].data(), out.row(i).data(), dim_);
    }
  }
  return out;
}

ContextEmbedding EmbedContext(std::span<const std::string> context, const TokenEmbedder& embedder,
                              int k1) {
  if (context.empty()) throw InputError("cannot embed an empty context");
  ContextEmbedding e;
  e.x = embedder.Embed(context);
  const size_t d = e.x.cols();
  e.hc = Tensor(k1, d);
  const size_t rows = std::min<size_t>(k1, e.x.rows());
  std::copy(e.x.data(), e.x.data() + rows * d, e.hc.data());
  return e;
}

Tensor BuildHt(const CandidateTriplet& triplet, std::span<const std::string> context,
               const Tensor& x) {
  Tensor ht(3, x.cols());
  const EntitySpan* elements[] = {&triplet.person, &triplet.time, &triplet.location};
  for (size_t r = 0; r < 3; ++r) {
    auto tokens = text::Tokenize(elements[r]->text);
    const int at = text::FindTokenRun(context, tokens);
    if (at < 0) {
      throw InputError("triplet element \"" + elements[r]->text + "\" not found in context");
    }
    const double w = 1.0 / tokens.size();
    for (size_t k = 0; k < tokens.size(); ++k) {
      kernels::Axpy(w, x.row(at + k).data(), ht.row(r).data(), x.cols());
    }
  }
  return ht;
}

}  // namespace cosmos
