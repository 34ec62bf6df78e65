#include "cosmos/annotation.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

#include "cosmos/http.h"
#include "cosmos/io.h"
#include "cosmos/text.h"

namespace cosmos {

HttpChatClient::HttpChatClient(std::string endpoint, std::string model, std::string api_key_env,
                               std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_(timeout) {
  http::ParseUrl(endpoint_);
  if (const char* key = std::getenv(api_key_env.c_str())) api_key_ = key;
}

std::string HttpChatClient::Complete(const ChatRequest& request) {
  nlohmann::json body = {{"model", model_},
                         {"temperature", request.temperature},
                         {"messages", {{{"role", "user"}, {"content", request.prompt}}}}};
  http::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  http::Response r;
  try {
    r = http::PostJson(http::ParseUrl(endpoint_), body.dump(), headers, timeout_);
  } catch (const IoError& e) {
    throw ChatError(e.what());
  }
  if (r.status != 200) throw ChatError("chat endpoint returned HTTP " + std::to_string(r.status));
  try {
    return nlohmann::json::parse(r.body).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception& e) {
    throw ChatError(std::string("malformed chat response: ") + e.what());
  }
}

PromptTemplate PromptTemplate::Parse(const std::string& text) {
  PromptTemplate t;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    if (line.rfind("#!", 0) == 0) {
      const size_t colon = line.find(':');
      if (colon == std::string::npos) throw InputError("prompt directive without ':': " + line);
      t.directives_[text::Trim(line.substr(2, colon - 2))] = text::Trim(line.substr(colon + 1));
    } else {
      t.body_ += line;
      if (end < text.size()) t.body_ += '\n';
    }
    pos = end + 1;
  }
  return t;
}

PromptTemplate PromptTemplate::Load(const std::filesystem::path& path) {
  try {
    return Parse(ReadFile(path));
  } catch (const IoError& e) {
    throw InputError(e.what());
  }
}

const std::string& PromptTemplate::directive(const std::string& key) const {
  auto it = directives_.find(key);
  if (it == directives_.end()) throw InputError("prompt template lacks the #!" + key + " directive");
  return it->second;
}

std::string PromptTemplate::Render(const std::map<std::string, std::string>& values) const {
  std::string out;
  size_t pos = 0;
  while (true) {
    const size_t open = body_.find("{{", pos);
    if (open == std::string::npos) break;
    const size_t close = body_.find("}}", open);
    if (close == std::string::npos) break;
    out += body_.substr(pos, open - pos);
    const std::string name = text::Trim(body_.substr(open + 2, close - open - 2));
    auto it = values.find(name);
    if (it == values.end()) throw InputError("prompt placeholder {{" + name + "}} has no value");
    out += it->second;
    pos = close + 2;
  }
  return out + body_.substr(pos);
}

std::vector<LlmTriplet> ParseTriplets(const std::string& response, const std::regex& pattern) {
  if (pattern.mark_count() < 3) throw InputError("triplet_pattern needs three capture groups");
  std::vector<LlmTriplet> out;
  for (std::sregex_iterator it(response.begin(), response.end(), pattern), end; it != end; ++it) {
    LlmTriplet t{text::CollapseWhitespace((*it)[1].str()), text::CollapseWhitespace((*it)[2].str()),
                 text::CollapseWhitespace((*it)[3].str())};
    if (!t.person.empty() && !t.time.empty() && !t.location.empty()) out.push_back(std::move(t));
  }
  return out;
}

Verdict ParseVerdict(const std::string& response, const std::regex& accept, const std::regex& reject) {
  const bool yes = std::regex_search(response, accept);
  const bool no = std::regex_search(response, reject);
  if (yes == no) return Verdict::kUnparseable;
  return yes ? Verdict::kAccept : Verdict::kReject;
}

namespace {

struct SentenceOutcome {
  std::vector<Example> examples;
  std::vector<std::string> warnings;
  std::string error;
  size_t extracted = 0, verified = 0;
};

class Retrier {
 public:
  Retrier(ChatClient& client, const AnnotationOptions& options)
      : client_(client), options_(options) {}

  std::string Call(const ChatRequest& request) {
    auto backoff = options_.backoff;
    for (int attempt = 1;; ++attempt) {
      try {
        return client_.Complete(request);
      } catch (const ChatError&) {
        if (attempt >= options_.max_attempts) throw;
      }
      if (options_.sleep) {
        options_.sleep(backoff);
      } else {
        std::this_thread::sleep_for(backoff);
      }
      backoff *= 2;
    }
  }

 private:
  ChatClient& client_;
  const AnnotationOptions& options_;
};

SentenceOutcome AnnotateOne(const AnnotationInput& in, Retrier& retrier,
                            const PromptTemplate& extraction, const PromptTemplate& verification,
                            const std::regex& triplet_re, const std::regex* empty_re,
                            const std::regex& accept_re, const std::regex& reject_re,
                            const AnnotationOptions& options) {
  SentenceOutcome out;
  const Sentence& s = in.sentence;
  const std::string where =
      s.page_id + ":" + std::to_string(s.paragraph_index) + ":" + std::to_string(s.sentence_index);
  try {
    std::vector<LlmTriplet> merged;
    std::set<LlmTriplet> seen;
    const std::string prompt = extraction.Render({{"sentence", s.text}, {"title", in.title}});
    for (int trial = 0; trial < options.trials; ++trial) {
      const std::string response = retrier.Call({prompt, options.extraction_temperature});
      auto found = ParseTriplets(response, triplet_re);
      if (found.empty() && !text::Trim(response).empty() &&
          !(empty_re && std::regex_search(response, *empty_re))) {
        out.warnings.push_back(where + ": extraction trial " + std::to_string(trial + 1) +
                               " gave no parseable triplet");
      }
      for (auto& t : found) {
        if (seen.insert(t).second) merged.push_back(t);
      }
    }
    out.extracted = merged.size();
    for (const auto& t : merged) {
      const std::string vprompt = verification.Render({{"sentence", s.text},
                                                       {"title", in.title},
                                                       {"person", t.person},
                                                       {"time", t.time},
                                                       {"location", t.location}});
      const std::string response = retrier.Call({vprompt, options.verification_temperature});
      const Verdict v = ParseVerdict(response, accept_re, reject_re);
      if (v == Verdict::kUnparseable) {
        out.warnings.push_back(where + ": unparseable verification for (" + t.person + ", " +
                               t.time + ", " + t.location + ") discarded");
        continue;
      }
      if (v == Verdict::kReject) continue;
      ++out.verified;
      nlohmann::json record = {{"person", t.person},       {"time", t.time},
                               {"location", t.location},   {"label", 1},
                               {"source", "llm"},          {"paragraph", in.paragraph},
                               {"page_id", s.page_id},     {"paragraph_index", s.paragraph_index},
                               {"sentence_index", s.sentence_index}};
      if (!in.title.empty()) record["title"] = in.title;
      try {
        out.examples.push_back(ExampleFromRecord(record));
      } catch (const InputError& e) {
        out.warnings.push_back(where + ": verified triplet dropped: " + e.what());
      }
    }
  } catch (const ChatError& e) {
    out.examples.clear();
    out.error = where + ": " + e.what();
  }
  return out;
}

}  // namespace

AnnotationResult Annotate(std::span<const AnnotationInput> inputs, ChatClient& client,
                          const PromptTemplate& extraction, const PromptTemplate& verification,
                          const AnnotationOptions& options) {
  if (options.trials < 1 || options.max_attempts < 1) {
    throw InputError("trials and max_attempts must be at least 1");
  }
  std::regex triplet_re, accept_re, reject_re, empty_re;
  try {
    triplet_re = std::regex(extraction.directive("triplet_pattern"));
    accept_re = std::regex(verification.directive("accept_pattern"), std::regex::icase);
    reject_re = std::regex(verification.directive("reject_pattern"), std::regex::icase);
    if (extraction.has_directive("empty_pattern")) {
      empty_re = std::regex(extraction.directive("empty_pattern"), std::regex::icase);
    }
  } catch (const std::regex_error& e) {
    throw InputError(std::string("bad prompt pattern: ") + e.what());
  }
  if (triplet_re.mark_count() < 3) throw InputError("triplet_pattern needs three capture groups");
  const std::regex* empty_ptr = extraction.has_directive("empty_pattern") ? &empty_re : nullptr;

  std::vector<SentenceOutcome> outcomes(inputs.size());
  Retrier retrier(client, options);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < inputs.size(); i = next++) {
      outcomes[i] = AnnotateOne(inputs[i], retrier, extraction, verification, triplet_re, empty_ptr,
                                accept_re, reject_re, options);
    }
  };
  const size_t workers = std::max<size_t>(1, std::min(options.concurrency, inputs.size()));
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  AnnotationResult result;
  result.stats.sentences = inputs.size();
  for (auto& o : outcomes) {
    result.stats.extracted += o.extracted;
    result.stats.verified += o.verified;
    result.warnings.insert(result.warnings.end(), o.warnings.begin(), o.warnings.end());
    if (!o.error.empty()) {
      result.errors.push_back(o.error);
      ++result.stats.failed_sentences;
      continue;
    }
    for (auto& e : o.examples) result.examples.push_back(std::move(e));
  }
  result.stats.emitted = result.examples.size();
  return result;
}

}  // namespace cosmos
