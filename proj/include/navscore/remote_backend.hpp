#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include "navscore/similarity.hpp"

namespace navscore {

struct RemoteBackendOptions {
  std::chrono::milliseconds timeout{5000};
  // Maximum number of texts per POST /v1/token_embeddings request.
  std::size_t batch_size = 32;
};

// Client for the token-embedding sidecar:
//   POST /v1/token_embeddings  {"texts": [...]}
//     -> {"model": str, "dim": int, "items": [{"tokens": [...], "vectors": [[...], ...]}, ...]}
//   GET  /v1/health -> {"status": "ok", "model": str, "dim": int}
// Requests are serialized internally. Transport failures, timeouts and
// malformed or inconsistent responses raise BackendUnavailable (ProtocolError
// for the latter two). `endpoint` is "http://host:port" (scheme optional).
std::shared_ptr<const EmbeddingBackend> remote_backend(const std::string& endpoint,
                                                       RemoteBackendOptions options = {});

}  // namespace navscore
