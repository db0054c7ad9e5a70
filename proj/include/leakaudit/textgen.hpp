#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leakaudit/transform.hpp"

namespace leakaudit {

// Deterministic synthetic review corpus mirroring the shape of the scraped
// Disneyland data: binary reviewer locations (United Kingdom / United
// States), a branch column, dialect-marker vocabulary that the builtin
// rewrite rules standardize away, and residual style words that survive it.
// Serves as an offline stand-in when the published review dataset is not on
// disk; point the pipeline at the real CSVs to audit those instead.
struct TextGenConfig {
  std::size_t per_group = 1500;
  std::uint64_t seed = 20240615;
  std::size_t other_location_rows = 60;  // dropped by the binary filter
  std::size_t other_branch_rows = 40;    // dropped by the branch filter
  std::size_t empty_rows = 6;            // skipped at ingest
  // chance a paired dialect marker uses the other group's spelling
  double cross_talk = 0.15;
  // scales every marker probability; the leakage signal knob
  double marker_strength = 1.0;
};

struct GeneratedReview {
  std::string id;
  std::string text;  // empty for skip-exercise rows
  std::string location;
  std::string branch;
  int rating = 5;
};

std::vector<GeneratedReview> generate_reviews(const TextGenConfig& config);

// reviews.csv: Review_ID,Review_Text,Reviewer_Location,Disneyland_Branch,Rating
void write_reviews_csv(const std::string& path,
                       const std::vector<GeneratedReview>& reviews);

// simplified.csv: Review_ID,Simplified_Text for every non-empty review,
// produced with the given rewrite rules (stands in for published
// simplifications).
void write_simplified_csv(const std::string& path,
                          const std::vector<GeneratedReview>& reviews,
                          const RewriteRules& rules);

}  // namespace leakaudit
