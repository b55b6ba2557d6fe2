#include "navscore/remote_backend.hpp"

#include <cmath>
#include <mutex>
#include <optional>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "navscore/error.hpp"

namespace navscore {

namespace {

using nlohmann::json;

constexpr double kUnitNormTolerance = 1e-3;

class RemoteBackend final : public EmbeddingBackend {
 public:
  RemoteBackend(std::string endpoint, RemoteBackendOptions options)
      : endpoint_(std::move(endpoint)), options_(options), client_(base_url(endpoint_)) {
    if (options_.batch_size == 0) options_.batch_size = 1;
    const auto secs = options_.timeout.count() / 1000;
    const auto usecs = (options_.timeout.count() % 1000) * 1000;
    client_.set_connection_timeout(secs, usecs);
    client_.set_read_timeout(secs, usecs);
    client_.set_write_timeout(secs, usecs);
    client_.set_keep_alive(true);
  }

  std::vector<TokenEmbedding> embed(std::span<const std::string> texts) const override {
    std::lock_guard lock(mutex_);
    std::vector<TokenEmbedding> out;
    out.reserve(texts.size());
    for (std::size_t begin = 0; begin < texts.size(); begin += options_.batch_size) {
      const auto count = std::min(options_.batch_size, texts.size() - begin);
      auto batch = post_batch(texts.subspan(begin, count));
      for (auto& e : batch) out.push_back(std::move(e));
    }
    return out;
  }

  BackendInfo info() const override {
    std::lock_guard lock(mutex_);
    if (!model_) {
      const auto body = get_json("/v1/health");
      if (!body.contains("status") || body["status"] != "ok") {
        throw BackendUnavailable(fmt::format("{}: sidecar not ready", endpoint_));
      }
      record_model(body);
    }
    return {"remote", *model_, *dim_};
  }

 private:
  static std::string base_url(const std::string& endpoint) {
    if (endpoint.starts_with("https://")) {
      throw BackendUnavailable(fmt::format("{}: https endpoints are not supported", endpoint));
    }
    std::string url = endpoint.starts_with("http://") ? endpoint : "http://" + endpoint;
    while (url.size() > 7 && url.back() == '/') url.pop_back();
    return url;
  }

  static std::string describe(const httplib::Result& res) {
    if (!res) return httplib::to_string(res.error());
    std::string msg = fmt::format("HTTP {}", res->status);
    try {
      const auto body = json::parse(res->body);
      if (body.contains("error") && body["error"].is_string()) {
        msg += ": " + body["error"].get<std::string>();
      }
    } catch (const json::exception&) {
    }
    return msg;
  }

  json parse_body(const httplib::Result& res, const char* path) const {
    if (!res || res->status != 200) {
      throw BackendUnavailable(fmt::format("{}{}: {}", endpoint_, path, describe(res)));
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw ProtocolError(fmt::format("{}{}: invalid JSON: {}", endpoint_, path, e.what()));
    }
  }

  json get_json(const char* path) const { return parse_body(client_.Get(path), path); }

  // Caller holds mutex_.
  void record_model(const json& body) const {
    if (!body.contains("model") || !body["model"].is_string() || !body.contains("dim") ||
        !body["dim"].is_number_unsigned() || body["dim"].get<std::size_t>() == 0) {
      throw ProtocolError(fmt::format("{}: response lacks 'model' or positive 'dim'", endpoint_));
    }
    const auto dim = body["dim"].get<std::size_t>();
    if (dim_ && *dim_ != dim) {
      throw ProtocolError(
          fmt::format("{}: dimension changed between responses ({} vs {})", endpoint_, *dim_, dim));
    }
    dim_ = dim;
    model_ = body["model"].get<std::string>();
  }

  std::vector<TokenEmbedding> post_batch(std::span<const std::string> texts) const {
    constexpr const char* kPath = "/v1/token_embeddings";
    json request = {{"texts", json::array()}};
    for (const auto& t : texts) request["texts"].push_back(t);
    const auto body =
        parse_body(client_.Post(kPath, request.dump(), "application/json"), kPath);

    record_model(body);
    if (!body.contains("items") || !body["items"].is_array() ||
        body["items"].size() != texts.size()) {
      throw ProtocolError(fmt::format("{}: 'items' must align with the {} request texts",
                                      endpoint_, texts.size()));
    }

    std::vector<TokenEmbedding> out;
    out.reserve(texts.size());
    try {
      for (const auto& item : body["items"]) {
        TokenEmbedding e;
        e.tokens = item.at("tokens").get<std::vector<std::string>>();
        e.vectors = item.at("vectors").get<std::vector<std::vector<double>>>();
        if (e.tokens.size() != e.vectors.size()) {
          throw ProtocolError(fmt::format("{}: item has {} tokens but {} vectors", endpoint_,
                                          e.tokens.size(), e.vectors.size()));
        }
        for (const auto& v : e.vectors) check_vector(v);
        out.push_back(std::move(e));
      }
    } catch (const json::exception& e) {
      throw ProtocolError(fmt::format("{}: malformed item: {}", endpoint_, e.what()));
    }
    return out;
  }

  void check_vector(const std::vector<double>& v) const {
    if (v.size() != *dim_) {
      throw ProtocolError(fmt::format("{}: vector of length {} in a dim={} response", endpoint_,
                                      v.size(), *dim_));
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (std::abs(std::sqrt(norm) - 1.0) > kUnitNormTolerance) {
      throw ProtocolError(fmt::format("{}: vector is not unit-norm (|v| = {})", endpoint_,
                                      std::sqrt(norm)));
    }
  }

  std::string endpoint_;
  RemoteBackendOptions options_;
  mutable std::mutex mutex_;
  mutable httplib::Client client_;
  mutable std::optional<std::string> model_;
  mutable std::optional<std::size_t> dim_;
};

}  // namespace

std::shared_ptr<const EmbeddingBackend> remote_backend(const std::string& endpoint,
                                                       RemoteBackendOptions options) {
  return std::make_shared<const RemoteBackend>(endpoint, options);
}

}  // namespace navscore
