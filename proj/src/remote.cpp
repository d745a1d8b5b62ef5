#include "hardneg/remote.hpp"

#include <cstdlib>
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace hardneg {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigurationError("endpoint URL lacks a scheme: '" + url + "'");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigurationError("unsupported URL scheme '" + scheme + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string api_key_from_env() {
  const char* key = std::getenv("LLM_API_KEY");
  return key ? std::string(key) : std::string();
}

std::string post_json(const RemoteEndpoint& endpoint, const std::string& body) {
  const ParsedUrl url = parse_url(endpoint.url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(endpoint.timeout_seconds);
  client.set_read_timeout(endpoint.timeout_seconds);
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  auto res = client.Post(url.path, headers, body, "application/json");
  if (!res) throw BackendError("request to " + endpoint.url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("request to " + endpoint.url + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

std::string chat_request_body(const PromptMessages& prompt, std::string_view model) {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["temperature"] = 0;
  j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : prompt.messages()) {
    j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  return j.dump();
}

std::string parse_chat_response(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat response: ") + e.what());
  }
}

RemoteLlmBackend::RemoteLlmBackend(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  parse_url(endpoint_.url);
}

std::string RemoteLlmBackend::complete(const PromptMessages& prompt) {
  return parse_chat_response(post_json(endpoint_, chat_request_body(prompt, endpoint_.model)));
}

RemoteEncoder::RemoteEncoder(RemoteEndpoint endpoint, Eigen::Index dim) : endpoint_(std::move(endpoint)), dim_(dim) {
  parse_url(endpoint_.url);
  if (dim < 1) throw ParameterError("encoder dim must be at least 1");
}

Matrix RemoteEncoder::embed_batch(const std::vector<std::string>& inputs) const {
  nlohmann::json req;
  req["model"] = endpoint_.model;
  req["input"] = inputs;
  const std::string body = post_json(endpoint_, req.dump());
  Matrix out(static_cast<Eigen::Index>(inputs.size()), dim_);
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& data = j.at("data");
    if (data.size() != inputs.size()) throw BackendError("embedding response has the wrong number of entries");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto v = data.at(i).at("embedding").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(v.size()) != dim_) throw BackendError("embedding has unexpected dimension");
      out.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), dim_);
    }
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed embedding response: ") + e.what());
  }
  return out;
}

TokenMatrix RemoteEncoder::embed_tokens(std::string_view text) const {
  auto tokens = whitespace_tokens(text);
  if (tokens.empty()) throw InvalidInputError("cannot embed empty text");
  TokenMatrix m;
  m.rows = embed_batch(tokens);
  m.tokens = std::move(tokens);
  return m;
}

SentenceVector RemoteEncoder::embed_sentence(std::string_view text) const {
  if (whitespace_tokens(text).empty()) throw InvalidInputError("cannot embed empty text");
  const Matrix m = embed_batch({std::string(text)});
  return SentenceVector{m.row(0).transpose()};
}

}  // namespace hardneg
