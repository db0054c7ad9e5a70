#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "leakaudit/corpus.hpp"

namespace leakaudit {

// Template with exactly one {text} placeholder, e.g. `Simplify "{text}"`.
struct PromptTemplate {
  std::string name;
  std::string text;

  static PromptTemplate make(std::string name, std::string text);
};

// Placeholder replaced with the raw review text; no escaping is added.
std::string render(const PromptTemplate& tmpl, std::string_view text);

// FNV-1a 64-bit; stable across runs and platforms, used for cache keys and
// config hashes.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

// Cache key over everything that determines a backend response.
std::string request_hash(std::string_view backend_id, std::string_view model,
                         std::string_view rendered_prompt);

struct TransformRecord {
  std::string hash;
  std::string doc_id;
  std::string original;
  std::string transformed;  // non-empty
  std::string backend;
  std::string model;
  std::string template_name;
  std::string timestamp;  // ISO 8601 UTC

  nlohmann::json to_json() const;
  static TransformRecord from_json(const nlohmann::json& j);
};

// Append-only JSON-lines cache keyed by request hash. Loading tolerates a
// truncated final line (interrupted runs); appends flush line-by-line so a
// partial run keeps everything completed so far.
class TransformCache {
 public:
  TransformCache() = default;  // in-memory only
  explicit TransformCache(std::string path);

  const TransformRecord* lookup(const std::string& hash) const;
  void append(const TransformRecord& record);
  std::size_t size() const { return records_.size(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unordered_map<std::string, TransformRecord> records_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual std::string model() const = 0;
  virtual bool offline() const { return true; }
  // Returns the transformed text; throws backend_error on failure. An empty
  // return marks the document as flagged (recorded, excluded downstream).
  virtual std::string transform(const std::string& doc_id,
                                const std::string& text,
                                const std::string& rendered_prompt) = 0;
};

// Word-boundary rewrite table applied after lowercasing; used both as the
// offline simplification backend and to pre-generate reference data. Rules
// are validated acyclic (no replacement token is itself a rule source), so
// the rewrite is idempotent.
struct RewriteRules {
  std::vector<std::pair<std::string, std::string>> rules;
  std::string version = "unversioned";

  static RewriteRules from_tsv(std::istream& in, std::string fallback_version);
  static RewriteRules from_file(const std::string& path);
  static const RewriteRules& builtin();
};

// Lowercase, expand/normalize via the rule table, collapse whitespace.
std::string offline_simplify(std::string_view text, const RewriteRules& rules);

std::unique_ptr<Backend> make_identity_backend();
std::unique_ptr<Backend> make_rules_backend(const RewriteRules& rules);
// CSV of (id, simplified text) pairs, e.g. a published simplification set.
std::unique_ptr<Backend> make_lookup_backend(const std::string& csv_path,
                                             std::string model_name);

struct BackendConfig {
  std::string endpoint = "http://localhost:8080/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;  // deterministic by default
  int max_retries = 3;
  double backoff_base_s = 0.5;
  double rate_limit_per_min = 60.0;
  std::string credential_env = "LEAKAUDIT_API_KEY";
  int timeout_s = 60;
};

// JSON-over-HTTP chat-completion backend: one user message carrying the
// rendered prompt; the first choice's content is the transformed text.
// Retries with exponential backoff on transport errors, 429 and 5xx.
std::unique_ptr<Backend> make_http_backend(const BackendConfig& config);

// Strips response framing: surrounding quotes and "Simplified:"-style
// prefixes (documented rule list).
std::string strip_response_framing(std::string text);

struct TransformOutcome {
  Corpus transformed;                    // ids/labels preserved, input order
  std::vector<TransformRecord> new_records;
  std::vector<std::string> flagged_ids;  // empty responses, excluded
  std::size_t cache_hits = 0;
  std::size_t backend_calls = 0;
};

// Cache-first corpus transformation. parallelism > 1 issues backend calls
// from a bounded worker pool (only useful for remote backends); results are
// ordered by input order regardless of completion order. On a hard backend
// failure the completed records stay persisted and backend_error propagates.
// The progress hook (if any) fires after every completed backend call.
using ProgressHook = std::function<void(std::size_t done, std::size_t total)>;

TransformOutcome transform_corpus(const Corpus& corpus, Backend& backend,
                                  const PromptTemplate& tmpl,
                                  TransformCache& cache, int parallelism = 1,
                                  const ProgressHook& progress = {});

std::string utc_timestamp();

}  // namespace leakaudit
