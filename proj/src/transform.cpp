#include "leakaudit/transform.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>

#include "leakaudit/errors.hpp"
#include "leakaudit/csv.hpp"
#include "leakaudit/text.hpp"
#include "leakaudit_embedded.hpp"

namespace leakaudit {

PromptTemplate PromptTemplate::make(std::string name, std::string text) {
  std::size_t first = text.find("{text}");
  if (first == std::string::npos)
    throw config_error("prompt template '" + name + "' lacks a {text} placeholder");
  if (text.find("{text}", first + 1) != std::string::npos)
    throw config_error("prompt template '" + name +
                       "' has more than one {text} placeholder");
  return PromptTemplate{std::move(name), std::move(text)};
}

std::string render(const PromptTemplate& tmpl, std::string_view text) {
  std::string out = tmpl.text;
  std::size_t pos = out.find("{text}");
  out.replace(pos, 6, text);
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string request_hash(std::string_view backend_id, std::string_view model,
                         std::string_view rendered_prompt) {
  std::string key;
  key.reserve(backend_id.size() + model.size() + rendered_prompt.size() + 2);
  key.append(backend_id);
  key.push_back('\x1f');
  key.append(model);
  key.push_back('\x1f');
  key.append(rendered_prompt);
  return hex64(fnv1a64(key));
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json TransformRecord::to_json() const {
  return {{"hash", hash},
          {"doc_id", doc_id},
          {"original", original},
          {"transformed", transformed},
          {"backend", backend},
          {"model", model},
          {"template", template_name},
          {"timestamp", timestamp}};
}

TransformRecord TransformRecord::from_json(const nlohmann::json& j) {
  TransformRecord r;
  r.hash = j.at("hash").get<std::string>();
  r.doc_id = j.at("doc_id").get<std::string>();
  r.original = j.at("original").get<std::string>();
  r.transformed = j.at("transformed").get<std::string>();
  r.backend = j.at("backend").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.template_name = j.at("template").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  return r;
}

TransformCache::TransformCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // cold cache
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // truncated tail from an interrupted run
    TransformRecord r = TransformRecord::from_json(j);
    records_[r.hash] = std::move(r);
  }
}

const TransformRecord* TransformCache::lookup(const std::string& hash) const {
  auto it = records_.find(hash);
  return it == records_.end() ? nullptr : &it->second;
}

void TransformCache::append(const TransformRecord& record) {
  if (record.transformed.empty())
    throw data_error("cache record for doc " + record.doc_id +
                     " has empty transformed text");
  records_[record.hash] = record;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw data_error("cannot append to cache file: " + path_);
  out << record.to_json().dump() << '\n';
}

// --- rewrite rules -------------------------------------------------------

namespace {

bool is_rule_word_char(char32_t cp) { return is_word_letter(cp) || cp == '\''; }

std::vector<std::string> rule_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = utf8_next(text, i);
    if (cp == 0x2019) cp = '\'';
    if (is_rule_word_char(cp)) {
      utf8_append(current, fold_lower(cp));
    } else if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

}  // namespace

RewriteRules RewriteRules::from_tsv(std::istream& in,
                                    std::string fallback_version) {
  RewriteRules rules;
  rules.version = std::move(fallback_version);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("version:");
      if (pos != std::string::npos) {
        std::string v = line.substr(pos + 8);
        std::size_t b = v.find_first_not_of(" \t");
        if (b != std::string::npos) rules.version = v.substr(b);
      }
      continue;
    }
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw data_error("rules line " + std::to_string(line_no) +
                       ": expected source<TAB>replacement");
    std::string source = line.substr(0, tab);
    std::string replacement = line.substr(tab + 1);
    if (rule_tokens(source).size() != 1)
      throw data_error("rules line " + std::to_string(line_no) +
                       ": source must be a single token");
    rules.rules.emplace_back(std::move(source), std::move(replacement));
  }

  // reject cyclic rewrites so the table is idempotent
  std::unordered_set<std::string> sources;
  for (const auto& [src, _] : rules.rules) sources.insert(src);
  for (const auto& [src, repl] : rules.rules)
    for (const std::string& t : rule_tokens(repl))
      if (sources.count(t))
        throw data_error("rules: replacement for '" + src +
                         "' contains rule source '" + t + "'");
  return rules;
}

RewriteRules RewriteRules::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open rules file: " + path);
  return from_tsv(in, path);
}

const RewriteRules& RewriteRules::builtin() {
  static RewriteRules rules = [] {
    std::istringstream in(embedded::kSimplifyRules);
    return from_tsv(in, "builtin");
  }();
  return rules;
}

std::string offline_simplify(std::string_view text, const RewriteRules& rules) {
  std::unordered_map<std::string, std::string> map(rules.rules.begin(),
                                                   rules.rules.end());
  std::string out;
  out.reserve(text.size());
  std::string word;
  bool pending_space = false;

  auto emit = [&](const std::string& s) {
    for (std::size_t i = 0; i < s.size();) {
      char32_t cp = utf8_next(s, i);
      if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r') {
        pending_space = true;
      } else {
        if (pending_space && !out.empty()) out += ' ';
        pending_space = false;
        utf8_append(out, cp);
      }
    }
  };
  auto flush_word = [&] {
    if (word.empty()) return;
    auto it = map.find(word);
    emit(it != map.end() ? it->second : word);
    word.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = utf8_next(text, i);
    if (cp == 0x2019) cp = '\'';
    if (is_rule_word_char(cp)) {
      utf8_append(word, fold_lower(cp));
    } else {
      flush_word();
      std::string sep;
      utf8_append(sep, cp);
      emit(sep);
    }
  }
  flush_word();
  return out;
}

// --- backends ------------------------------------------------------------

namespace {

class IdentityBackend : public Backend {
 public:
  std::string id() const override { return "identity"; }
  std::string model() const override { return "identity"; }
  std::string transform(const std::string&, const std::string& text,
                        const std::string&) override {
    return text;
  }
};

class RulesBackend : public Backend {
 public:
  explicit RulesBackend(RewriteRules rules) : rules_(std::move(rules)) {}
  std::string id() const override { return "rules"; }
  std::string model() const override { return rules_.version; }
  std::string transform(const std::string&, const std::string& text,
                        const std::string&) override {
    return offline_simplify(text, rules_);
  }

 private:
  RewriteRules rules_;
};

class LookupBackend : public Backend {
 public:
  LookupBackend(const std::string& csv_path, std::string model_name)
      : model_(std::move(model_name)), source_(csv_path) {
    CsvTable table = read_csv_file(csv_path);
    if (table.header.size() < 2)
      throw data_error(csv_path + ": lookup table needs (id, text) columns");
    int id_col = table.column("Review_ID");
    if (id_col < 0) id_col = 0;
    int text_col = table.column("Simplified_Text");
    if (text_col < 0) text_col = 1;
    for (const auto& row : table.rows) {
      if (static_cast<int>(row.size()) <= std::max(id_col, text_col)) continue;
      map_[row[id_col]] = row[text_col];
    }
  }
  std::string id() const override { return "lookup"; }
  std::string model() const override { return model_; }
  std::string transform(const std::string& doc_id, const std::string&,
                        const std::string&) override {
    auto it = map_.find(doc_id);
    if (it == map_.end())
      throw backend_error("lookup backend (" + source_ +
                          ") has no entry for doc id " + doc_id);
    return it->second;
  }

 private:
  std::string model_;
  std::string source_;
  std::unordered_map<std::string, std::string> map_;
};

// Enforces a minimum interval between request starts.
class RateLimiter {
 public:
  explicit RateLimiter(double per_minute)
      : interval_(std::chrono::duration<double>(60.0 / per_minute)) {}

  void acquire() {
    std::chrono::steady_clock::time_point wake;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto now = std::chrono::steady_clock::now();
      if (next_ < now) next_ = now;
      wake = next_;
      next_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          interval_);
    }
    std::this_thread::sleep_until(wake);
  }

 private:
  std::mutex mutex_;
  std::chrono::duration<double> interval_;
  std::chrono::steady_clock::time_point next_{};
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(const BackendConfig& config)
      : config_(config), limiter_(config.rate_limit_per_min) {
    if (config.rate_limit_per_min <= 0.0)
      throw config_error("http backend: rate limit must be positive");
    if (config.max_retries < 0)
      throw config_error("http backend: max retries must be >= 0");
    split_endpoint(config.endpoint, base_, path_);
  }

  std::string id() const override { return "http"; }
  std::string model() const override { return config_.model; }
  bool offline() const override { return false; }

  std::string transform(const std::string& doc_id, const std::string&,
                        const std::string& rendered_prompt) override {
    nlohmann::json payload = {
        {"model", config_.model},
        {"messages",
         nlohmann::json::array(
             {{{"role", "user"}, {"content", rendered_prompt}}})},
        {"temperature", config_.temperature}};
    std::string body = payload.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        double delay = config_.backoff_base_s * std::pow(2.0, attempt - 1);
        std::this_thread::sleep_for(
            std::chrono::duration<double>(std::min(delay, 30.0)));
      }
      limiter_.acquire();

      httplib::Client client(base_);
      client.set_read_timeout(config_.timeout_s, 0);
      client.set_connection_timeout(config_.timeout_s, 0);
      httplib::Headers headers;
      const char* key = config_.credential_env.empty()
                            ? nullptr
                            : std::getenv(config_.credential_env.c_str());
      if (key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

      auto res = client.Post(path_, headers, body, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw backend_error("doc " + doc_id + ": HTTP " +
                            std::to_string(res->status) + ": " +
                            res->body.substr(0, 200));
      nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
      if (reply.is_discarded())
        throw backend_error("doc " + doc_id + ": response is not JSON");
      try {
        std::string content =
            reply.at("choices").at(0).at("message").at("content")
                .get<std::string>();
        return strip_response_framing(std::move(content));
      } catch (const nlohmann::json::exception& e) {
        throw backend_error("doc " + doc_id +
                            ": unexpected response shape: " + e.what());
      }
    }
    throw backend_error("doc " + doc_id + ": giving up after " +
                        std::to_string(config_.max_retries + 1) +
                        " attempts (" + last_error + ")");
  }

 private:
  static void split_endpoint(const std::string& url, std::string& base,
                             std::string& path) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos)
      throw config_error("http backend: endpoint must include a scheme: " + url);
    std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) {
      base = url;
      path = "/";
    } else {
      base = url.substr(0, slash);
      path = url.substr(slash);
    }
  }

  BackendConfig config_;
  RateLimiter limiter_;
  std::string base_;
  std::string path_;
};

}  // namespace

std::string strip_response_framing(std::string text) {
  auto trim = [](std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
      s.clear();
      return;
    }
    std::size_t e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);
  };
  trim(text);
  // documented prefix list observed in copied chat outputs
  static const char* kPrefixes[] = {"simplified text:", "simplified:",
                                    "simplification:", "here is the simplified text:"};
  std::string lower = lowercase_utf8(text);
  for (const char* prefix : kPrefixes) {
    std::size_t len = std::string(prefix).size();
    if (lower.size() >= len && lower.compare(0, len, prefix) == 0) {
      text = text.substr(len);
      trim(text);
      break;
    }
  }
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    text = text.substr(1, text.size() - 2);
    trim(text);
  }
  return text;
}

std::unique_ptr<Backend> make_identity_backend() {
  return std::make_unique<IdentityBackend>();
}

std::unique_ptr<Backend> make_rules_backend(const RewriteRules& rules) {
  return std::make_unique<RulesBackend>(rules);
}

std::unique_ptr<Backend> make_lookup_backend(const std::string& csv_path,
                                             std::string model_name) {
  return std::make_unique<LookupBackend>(csv_path, std::move(model_name));
}

std::unique_ptr<Backend> make_http_backend(const BackendConfig& config) {
  return std::make_unique<HttpBackend>(config);
}

TransformOutcome transform_corpus(const Corpus& corpus, Backend& backend,
                                  const PromptTemplate& tmpl,
                                  TransformCache& cache, int parallelism) {
  struct Slot {
    std::string text;
    bool from_cache = false;
    bool flagged = false;
  };
  std::vector<Slot> slots(corpus.size());
  std::vector<std::size_t> pending;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Document& doc = corpus.docs()[i];
    std::string prompt = render(tmpl, doc.text);
    const TransformRecord* hit =
        cache.lookup(request_hash(backend.id(), backend.model(), prompt));
    if (hit) {
      slots[i].text = hit->transformed;
      slots[i].from_cache = true;
    } else {
      pending.push_back(i);
    }
  }

  TransformOutcome outcome;
  outcome.cache_hits = corpus.size() - pending.size();

  std::mutex mutex;
  std::atomic<bool> abort{false};
  std::atomic<std::size_t> cursor{0};
  std::string first_error;
  std::vector<TransformRecord> completed(corpus.size());

  auto work = [&] {
    while (!abort.load()) {
      std::size_t slot_pos = cursor.fetch_add(1);
      if (slot_pos >= pending.size()) break;
      std::size_t i = pending[slot_pos];
      const Document& doc = corpus.docs()[i];
      std::string prompt = render(tmpl, doc.text);
      try {
        std::string result = backend.transform(doc.id, doc.text, prompt);
        if (result.empty()) {
          slots[i].flagged = true;
          continue;
        }
        TransformRecord record;
        record.hash = request_hash(backend.id(), backend.model(), prompt);
        record.doc_id = doc.id;
        record.original = doc.text;
        record.transformed = result;
        record.backend = backend.id();
        record.model = backend.model();
        record.template_name = tmpl.name;
        record.timestamp = utc_timestamp();
        slots[i].text = result;
        std::lock_guard<std::mutex> lock(mutex);
        cache.append(record);  // persisted immediately; survives aborts
        completed[i] = std::move(record);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mutex);
        if (first_error.empty()) first_error = e.what();
        abort.store(true);
      }
    }
  };

  int n_workers = backend.offline() ? 1 : std::max(1, parallelism);
  if (n_workers == 1 || pending.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < n_workers; ++w) workers.emplace_back(work);
    for (std::thread& t : workers) t.join();
  }
  if (!first_error.empty())
    throw backend_error("transform aborted (completed work is cached): " +
                        first_error);

  std::vector<Document> docs;
  docs.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (slots[i].flagged) {
      outcome.flagged_ids.push_back(corpus.docs()[i].id);
      continue;
    }
    Document d = corpus.docs()[i];
    d.text = slots[i].text;
    docs.push_back(std::move(d));
    if (!slots[i].from_cache) {
      outcome.new_records.push_back(std::move(completed[i]));
      ++outcome.backend_calls;
    }
  }
  // flagged calls still hit the backend
  outcome.backend_calls += outcome.flagged_ids.size();

  Provenance prov = corpus.provenance();
  prov.filters.push_back("transform: backend " + backend.id() + ", model " +
                         backend.model() + ", template " + tmpl.name);
  std::optional<GroupNames> groups =
      corpus.is_binary() ? std::optional<GroupNames>(corpus.groups())
                         : std::nullopt;
  outcome.transformed =
      Corpus::from_documents(std::move(docs), std::move(prov), groups);
  return outcome;
}

}  // namespace leakaudit
