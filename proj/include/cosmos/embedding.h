#ifndef COSMOS_EMBEDDING_H_
#define COSMOS_EMBEDDING_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cosmos/context.h"
#include "cosmos/tensor.h"

namespace cosmos {

// Frozen word-embedding extractor for the convolutional branch.
// Implementations must be deterministic and safe to call concurrently.
class TokenEmbedder {
 public:
  virtual ~TokenEmbedder() = default;
  virtual int dim() const = 0;
  // One row per token.
  virtual Tensor Embed(std::span<const std::string> tokens) const = 0;
};

// Each (lower-cased) token gets a fixed pseudo-random vector derived from its
// hash and the seed; row i mixes in its neighbours within `window` with
// weight 0.5^|offset| / 2, so identical words in different contexts differ.
class HashedContextEmbedder : public TokenEmbedder {
 public:
  HashedContextEmbedder(int dim, uint64_t seed, int window = 1);
  int dim() const override { return dim_; }
  Tensor Embed(std::span<const std::string> tokens) const override;
  std::vector<double> TokenVector(const std::string& token) const;

 private:
  int dim_;
  uint64_t seed_;
  int window_;
};

uint64_t HashToken(std::string_view token);

struct ContextEmbedding {
  Tensor x;   // n x d, one row per context token
  Tensor hc;  // k1 x d, x truncated or zero-padded
};

// Throws InputError for an empty context.
ContextEmbedding EmbedContext(std::span<const std::string> context, const TokenEmbedder& embedder,
                              int k1);

// Rows: person, time, location. Each row is the mean of the embedding rows
// of the element's tokens at their first occurrence in `context`. Throws
// InputError if an element does not occur.
Tensor BuildHt(const CandidateTriplet& triplet, std::span<const std::string> context,
               const Tensor& x);

}  // namespace cosmos

#endif  // COSMOS_EMBEDDING_H_
