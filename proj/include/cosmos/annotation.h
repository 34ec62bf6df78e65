#ifndef COSMOS_ANNOTATION_H_
#define COSMOS_ANNOTATION_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <regex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosmos/context.h"

namespace cosmos {

class ChatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChatRequest {
  std::string prompt;
  double temperature = 0.0;
};

// One-shot chat completion. Implementations must be safe to call from
// several threads at once. Throws ChatError on failure.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string Complete(const ChatRequest& request) = 0;
};

// OpenAI-style POST {"model", "temperature", "messages": [{"role": "user",
// "content": prompt}]} -> choices[0].message.content. The bearer token is
// read from `api_key_env` at construction (empty variable: no header).
class HttpChatClient : public ChatClient {
 public:
  HttpChatClient(std::string endpoint, std::string model,
                 std::string api_key_env = "COSMOS_LLM_API_KEY",
                 std::chrono::milliseconds timeout = std::chrono::seconds(60));
  std::string Complete(const ChatRequest& request) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

// Prompt file: lines starting with "#!key: value" are directives, the rest
// is the body. "{{name}}" placeholders are substituted by Render.
//   extraction prompts: triplet_pattern (regex with three capture groups:
//                       person, time, location), empty_pattern (optional)
//   verification prompts: accept_pattern, reject_pattern (case-insensitive)
class PromptTemplate {
 public:
  static PromptTemplate Parse(const std::string& text);
  static PromptTemplate Load(const std::filesystem::path& path);

  const std::string& body() const { return body_; }
  // Throws InputError if the directive is absent.
  const std::string& directive(const std::string& key) const;
  bool has_directive(const std::string& key) const { return directives_.count(key) > 0; }
  // Throws InputError on an unknown placeholder.
  std::string Render(const std::map<std::string, std::string>& values) const;

 private:
  std::string body_;
  std::map<std::string, std::string> directives_;
};

struct LlmTriplet {
  std::string person, time, location;
  auto operator<=>(const LlmTriplet&) const = default;
};

// All matches of `pattern` in `response`, whitespace-collapsed, in order.
std::vector<LlmTriplet> ParseTriplets(const std::string& response, const std::regex& pattern);

enum class Verdict { kAccept, kReject, kUnparseable };
Verdict ParseVerdict(const std::string& response, const std::regex& accept, const std::regex& reject);

// A target sentence with the paragraph it came from.
struct AnnotationInput {
  Sentence sentence;
  std::string paragraph;
  std::string title;
};

struct AnnotationOptions {
  int trials = 3;
  double extraction_temperature = 0.8;
  double verification_temperature = 0.0;
  int max_attempts = 3;
  std::chrono::milliseconds backoff{500};  // doubled after each failed attempt
  size_t concurrency = 4;
  // Injectable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct AnnotationStats {
  size_t sentences = 0;
  size_t extracted = 0;  // distinct triplets after the union of trials
  size_t verified = 0;
  size_t emitted = 0;
  size_t failed_sentences = 0;
};

struct AnnotationResult {
  std::vector<Example> examples;  // label 1, source llm, input order
  std::vector<std::string> warnings;
  std::vector<std::string> errors;  // one per failed sentence
  AnnotationStats stats;
};

// Two-stage protocol: `trials` sampled extraction calls per sentence whose
// parsed triplets are merged by union, then one deterministic verification
// call per triplet; only accepted triplets become examples.
AnnotationResult Annotate(std::span<const AnnotationInput> inputs, ChatClient& client,
                          const PromptTemplate& extraction, const PromptTemplate& verification,
                          const AnnotationOptions& options = {});

}  // namespace cosmos

#endif  // COSMOS_ANNOTATION_H_
