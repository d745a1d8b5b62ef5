#pragma once

#include <string>
#include <string_view>

#include "hardneg/encoder.hpp"
#include "hardneg/generation.hpp"

namespace hardneg {

// HTTP endpoint configuration shared by the remote LLM and encoder.
struct RemoteEndpoint {
  std::string url;  // http(s)://host[:port]/path
  std::string model;
  std::string api_key;  // sent as a bearer token when non-empty
  int timeout_seconds = 60;
};

// Reads LLM_API_KEY from the environment.
std::string api_key_from_env();

// OpenAI-style chat completion request. Decoding is pinned to temperature 0
// so regeneration is reproducible.
std::string chat_request_body(const PromptMessages& prompt, std::string_view model);

// Extracts choices[0].message.content; throws BackendError on any other shape.
std::string parse_chat_response(std::string_view body);

class RemoteLlmBackend final : public GenerationBackend {
 public:
  explicit RemoteLlmBackend(RemoteEndpoint endpoint);
  std::string complete(const PromptMessages& prompt) override;

 private:
  RemoteEndpoint endpoint_;
};

// Embeddings over HTTP. Request: {"model", "input": [strings]}; response:
// {"data": [{"embedding": [...]}, ...]} in input order. Token rows come from
// embedding each whitespace token as its own input; the sentence vector from
// embedding the whole text.
class RemoteEncoder final : public EncoderBackend {
 public:
  RemoteEncoder(RemoteEndpoint endpoint, Eigen::Index dim);

  TokenMatrix embed_tokens(std::string_view text) const override;
  SentenceVector embed_sentence(std::string_view text) const override;
  Eigen::Index dim() const override { return dim_; }

 private:
  Matrix embed_batch(const std::vector<std::string>& inputs) const;

  RemoteEndpoint endpoint_;
  Eigen::Index dim_;
};

// POSTs a JSON body and returns the response body; non-2xx or transport
// failure -> BackendError.
std::string post_json(const RemoteEndpoint& endpoint, const std::string& body);

}  // namespace hardneg
