#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace leakaudit {

// Binary sensitive-attribute label. Display names live in GroupNames.
enum class Group : std::uint8_t { A = 0, B = 1 };

struct GroupNames {
  std::string a;
  std::string b;
  const std::string& display(Group g) const { return g == Group::A ? a : b; }
};

struct Document {
  std::string id;     // unique within a corpus
  std::string text;   // non-empty after trimming
  std::string group;  // raw sensitive-attribute value, e.g. "United Kingdom"
  std::map<std::string, std::string> meta;
};

struct Provenance {
  std::string source;
  std::vector<std::string> filters;
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
  nlohmann::json to_json() const;
};

// Immutable ordered document collection. All transformations return new
// corpora; iteration order is insertion order.
class Corpus {
 public:
  Corpus() = default;
  static Corpus from_documents(std::vector<Document> docs, Provenance prov,
                               std::optional<GroupNames> groups = {});

  const std::vector<Document>& docs() const { return docs_; }
  std::size_t size() const { return docs_.size(); }
  const Provenance& provenance() const { return provenance_; }

  bool is_binary() const { return groups_.has_value(); }
  const GroupNames& groups() const;
  Group group_of(const Document& doc) const;
  std::size_t count(Group g) const;

  const Document* find(const std::string& id) const;

 private:
  std::vector<Document> docs_;
  Provenance provenance_;
  std::optional<GroupNames> groups_;
};

struct CsvSchema {
  std::string text_column = "Review_Text";
  std::string group_column = "Reviewer_Location";
  std::string id_column;  // empty: ids synthesized as row<N>
  // logical meta key -> CSV column name
  std::map<std::string, std::string> meta_columns = {
      {"branch", "Disneyland_Branch"}};
};

// One Document per usable row; rows with empty text or group are counted and
// skipped. Throws data_error on a missing file, missing mapped column, or
// zero usable rows.
Corpus ingest_csv(const std::string& path, const CsvSchema& schema = {});

// Keeps documents whose group value is one of {group_a, group_b} (mapped to
// labels A/B) and, when given, whose meta[key] equals the wanted value.
// Throws data_error if the two values coincide or either group ends empty.
Corpus filter_binary(
    const Corpus& corpus, const std::string& group_a, const std::string& group_b,
    const std::optional<std::pair<std::string, std::string>>& meta_equals = {});

// Exactly per_group documents of each label, drawn without replacement by a
// seeded PRNG (see rng.hpp for the stability contract). Same seed, same
// sample.
Corpus balanced_sample(const Corpus& corpus, std::size_t per_group,
                       std::uint64_t seed);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Disjoint train/test cover. Stratified mode draws floor(n_g * fraction)
// test documents per group; if that leaves the test side empty, one document
// moves over so both sides are non-empty (smallest-case rule). Document
// order within each side follows the input corpus.
std::pair<Corpus, Corpus> split(const Corpus& corpus, const SplitSpec& spec);

// Labels in document order; requires a binary corpus.
std::vector<Group> labels_of(const Corpus& corpus);

}  // namespace leakaudit
