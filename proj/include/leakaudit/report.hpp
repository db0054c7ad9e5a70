#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "leakaudit/config.hpp"
#include "leakaudit/features.hpp"
#include "leakaudit/sentiment.hpp"
#include "leakaudit/stats.hpp"

namespace leakaudit {

// Everything one audit run produces. Serialized as report.json (schema
// versioned); report.md is rendered from the stored JSON without
// recomputation. Timestamps live only in the manifest block so the rest of
// the document is bit-reproducible given the same config and cache.
struct AuditReport {
  static constexpr int kSchemaVersion = 1;

  nlohmann::json config;  // normalized RunConfig
  std::string config_hash;
  nlohmann::json provenance;
  std::size_t n_sample = 0;
  std::vector<std::uint64_t> seeds;

  SeedSweepSummary nb_original, rf_original, nb_simplified, rf_simplified;
  double nb_delta = 0.0;  // mean original accuracy - mean simplified accuracy
  double rf_delta = 0.0;

  std::vector<McNemarResult> nb_mcnemar, rf_mcnemar;  // per seed
  double nb_significant_fraction = 0.0;
  double rf_significant_fraction = 0.0;
  double significance = 0.05;

  PreservationReport sentiment;
  bool sentiment_ok = true;

  std::vector<ImportanceRanking> rankings;

  // manifest
  std::string created_at;
  std::string lexicon_version;
  std::string backend_id, backend_model, template_name;
  std::string cache_path;
  std::size_t cache_entries = 0;
  std::vector<std::string> flagged_ids;

  nlohmann::json to_json() const;
  static AuditReport from_json(const nlohmann::json& j);

  // Invariant checks used before rendering stored reports: metrics and
  // p-values in range, deltas equal to the contained accuracy difference.
  void validate() const;

  std::string to_markdown() const;
};

// Writes report.json, report.md, rankings.csv, sentiment.csv, manifest.json
// under run_dir (created if needed).
void write_run_artifacts(const std::string& run_dir, const AuditReport& report);

// Loads report.json from a run directory; throws data_error when missing or
// invalid.
AuditReport load_report(const std::string& run_dir);

}  // namespace leakaudit
