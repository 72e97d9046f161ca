#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "srb/harness/manifest.hpp"

namespace srb::harness {

/// An external recognizer spoken to over stdin/stdout.
///
/// Requests are lines {"id": ..., "audio": <path>}; responses are lines
/// {"id": ..., "text": ...} in any order. stderr is passed through.
struct ModelAdapter {
  std::string id;
  std::vector<std::string> command;  // argv; a single string runs through /bin/sh -c
  double timeout_seconds = 60.0;
  int protocol_version = 1;
  std::size_t max_in_flight = 16;
};

// Cache namespace for an adapter: its id plus a hash of its command line.
std::string adapter_cache_key(const ModelAdapter& adapter);

/// Transcripts keyed by (adapter, audio content hash), optionally backed by
/// an append-only JSONL file. Safe for concurrent use.
class TranscriptCache {
 public:
  TranscriptCache() = default;  // in memory only
  explicit TranscriptCache(std::string path);

  std::optional<std::string> lookup(const std::string& adapter_key, std::uint64_t audio_hash) const;
  void store(const std::string& adapter_key, std::uint64_t audio_hash, const std::string& text);
  std::size_t size() const;

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::uint64_t>, std::string> entries_;
};

struct AdapterRequest {
  std::string id;
  std::string audio_path;
};

using ResponseHandler = std::function<void(const std::string& id, const std::string& text)>;

// Spawns the adapter, streams the requests with at most max_in_flight
// outstanding, and calls on_response as each answer arrives. Throws
// AdapterError carrying the unanswered ids when the child exits early,
// times out, or answers with an unknown or repeated id.
void run_adapter(const ModelAdapter& adapter, const std::vector<AdapterRequest>& requests,
                 const ResponseHandler& on_response);

struct TranscribeStats {
  std::size_t requests = 0;
  std::size_t cache_hits = 0;
};

// Hypothesis per utterance id. Cached transcripts are reused; fresh ones are
// stored as they arrive, so a failed run keeps its completed work. The child
// is not spawned when everything is cached.
std::unordered_map<std::string, std::string> transcribe(const ModelAdapter& adapter,
                                                        const Manifest& manifest,
                                                        TranscriptCache& cache,
                                                        TranscribeStats* stats = nullptr);

}  // namespace srb::harness
