#include "leakaudit/corpus.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "leakaudit/csv.hpp"
#include "leakaudit/errors.hpp"
#include "leakaudit/rng.hpp"

namespace leakaudit {

nlohmann::json Provenance::to_json() const {
  return {{"source", source},
          {"filters", filters},
          {"rows_read", rows_read},
          {"rows_skipped", rows_skipped}};
}

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Corpus Corpus::from_documents(std::vector<Document> docs, Provenance prov,
                              std::optional<GroupNames> groups) {
  std::unordered_set<std::string> seen;
  seen.reserve(docs.size());
  for (const Document& d : docs) {
    if (d.id.empty()) throw data_error("document with empty id");
    if (trimmed(d.text).empty())
      throw data_error("document " + d.id + " has empty text");
    if (!seen.insert(d.id).second)
      throw data_error("duplicate document id: " + d.id);
    if (groups && d.group != groups->a && d.group != groups->b)
      throw data_error("document " + d.id + " has group '" + d.group +
                       "' outside the binary pair");
  }
  Corpus c;
  c.docs_ = std::move(docs);
  c.provenance_ = std::move(prov);
  c.groups_ = std::move(groups);
  return c;
}

const GroupNames& Corpus::groups() const {
  if (!groups_) throw data_error("corpus has no binary group labels yet");
  return *groups_;
}

Group Corpus::group_of(const Document& doc) const {
  const GroupNames& g = groups();
  return doc.group == g.a ? Group::A : Group::B;
}

std::size_t Corpus::count(Group g) const {
  const std::string& want = groups().display(g);
  std::size_t n = 0;
  for (const Document& d : docs_)
    if (d.group == want) ++n;
  return n;
}

const Document* Corpus::find(const std::string& id) const {
  for (const Document& d : docs_)
    if (d.id == id) return &d;
  return nullptr;
}

Corpus ingest_csv(const std::string& path, const CsvSchema& schema) {
  CsvTable table = read_csv_file(path);

  int text_col = table.column(schema.text_column);
  if (text_col < 0)
    throw data_error(path + ": missing mapped column '" + schema.text_column +
                     "'");
  int group_col = table.column(schema.group_column);
  if (group_col < 0)
    throw data_error(path + ": missing mapped column '" + schema.group_column +
                     "'");
  int id_col = -1;
  if (!schema.id_column.empty()) {
    id_col = table.column(schema.id_column);
    if (id_col < 0)
      throw data_error(path + ": missing mapped column '" + schema.id_column +
                       "'");
  }
  std::vector<std::pair<std::string, int>> meta_cols;
  for (const auto& [key, col] : schema.meta_columns) {
    int idx = table.column(col);
    // meta columns are optional context; skip ones the file lacks
    if (idx >= 0) meta_cols.emplace_back(key, idx);
  }

  Provenance prov;
  prov.source = path;
  prov.rows_read = table.rows.size();

  std::vector<Document> docs;
  docs.reserve(table.rows.size());
  std::size_t row_no = 0;
  for (const auto& row : table.rows) {
    ++row_no;
    auto field = [&](int col) -> std::string {
      return col >= 0 && col < static_cast<int>(row.size()) ? row[col] : "";
    };
    Document d;
    d.text = field(text_col);
    d.group = trimmed(field(group_col));
    if (trimmed(d.text).empty() || d.group.empty()) {
      ++prov.rows_skipped;
      continue;
    }
    d.id = id_col >= 0 ? trimmed(field(id_col)) : "";
    if (d.id.empty()) d.id = "row" + std::to_string(row_no);
    for (const auto& [key, idx] : meta_cols) d.meta[key] = field(idx);
    docs.push_back(std::move(d));
  }
  if (docs.empty()) throw data_error(path + ": no usable rows");
  return Corpus::from_documents(std::move(docs), std::move(prov));
}

Corpus filter_binary(
    const Corpus& corpus, const std::string& group_a, const std::string& group_b,
    const std::optional<std::pair<std::string, std::string>>& meta_equals) {
  if (group_a == group_b)
    throw data_error("binary group values must be distinct: '" + group_a + "'");

  std::vector<Document> kept;
  for (const Document& d : corpus.docs()) {
    if (d.group != group_a && d.group != group_b) continue;
    if (meta_equals) {
      auto it = d.meta.find(meta_equals->first);
      if (it == d.meta.end() || it->second != meta_equals->second) continue;
    }
    kept.push_back(d);
  }

  Provenance prov = corpus.provenance();
  prov.filters.push_back("group in {" + group_a + ", " + group_b + "}");
  if (meta_equals)
    prov.filters.push_back(meta_equals->first + " == " + meta_equals->second);

  GroupNames names{group_a, group_b};
  std::size_t n_a = 0, n_b = 0;
  for (const Document& d : kept) (d.group == group_a ? n_a : n_b) += 1;
  if (n_a == 0 || n_b == 0)
    throw data_error("group '" + (n_a == 0 ? group_a : group_b) +
                     "' is empty after filtering");
  prov.filters.push_back("counts: " + group_a + "=" + std::to_string(n_a) +
                         ", " + group_b + "=" + std::to_string(n_b));
  return Corpus::from_documents(std::move(kept), std::move(prov), names);
}

Corpus balanced_sample(const Corpus& corpus, std::size_t per_group,
                       std::uint64_t seed) {
  const GroupNames& names = corpus.groups();
  std::vector<std::size_t> idx_a, idx_b;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (corpus.docs()[i].group == names.a ? idx_a : idx_b).push_back(i);
  if (idx_a.size() < per_group || idx_b.size() < per_group)
    throw data_error("balanced_sample: need " + std::to_string(per_group) +
                     " per group, have " + std::to_string(idx_a.size()) + "/" +
                     std::to_string(idx_b.size()));

  Rng rng(seed);
  auto draw = [&](const std::vector<std::size_t>& pool) {
    std::vector<std::size_t> picked = rng.sample_indices(pool.size(), per_group);
    for (std::size_t& p : picked) p = pool[p];
    return picked;
  };
  std::vector<std::size_t> chosen = draw(idx_a);
  std::vector<std::size_t> from_b = draw(idx_b);
  chosen.insert(chosen.end(), from_b.begin(), from_b.end());
  rng.shuffle(chosen);

  std::vector<Document> docs;
  docs.reserve(chosen.size());
  for (std::size_t i : chosen) docs.push_back(corpus.docs()[i]);

  Provenance prov = corpus.provenance();
  prov.filters.push_back("balanced_sample: " + std::to_string(per_group) +
                         " per group, seed " + std::to_string(seed));
  return Corpus::from_documents(std::move(docs), std::move(prov),
                                corpus.groups());
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw data_error("split: test_fraction must lie in (0,1)");
  if (corpus.size() < 2)
    throw data_error("split: need at least 2 documents");

  Rng rng(spec.seed);
  std::vector<bool> in_test(corpus.size(), false);
  std::size_t n_test = 0;

  auto mark = [&](const std::vector<std::size_t>& pool, std::size_t k) {
    std::vector<std::size_t> picked = rng.sample_indices(pool.size(), k);
    for (std::size_t p : picked) in_test[pool[p]] = true;
    n_test += k;
  };

  if (spec.stratified) {
    const GroupNames& names = corpus.groups();
    std::vector<std::size_t> idx_a, idx_b;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      (corpus.docs()[i].group == names.a ? idx_a : idx_b).push_back(i);
    mark(idx_a, static_cast<std::size_t>(
                    static_cast<double>(idx_a.size()) * spec.test_fraction));
    mark(idx_b, static_cast<std::size_t>(
                    static_cast<double>(idx_b.size()) * spec.test_fraction));
    if (n_test == 0) {
      // floors rounded everything into train; move one group-A document over
      in_test[idx_a[rng.below(idx_a.size())]] = true;
      n_test = 1;
    }
  } else {
    std::vector<std::size_t> all(corpus.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::size_t k = static_cast<std::size_t>(
        static_cast<double>(all.size()) * spec.test_fraction);
    if (k == 0) k = 1;
    mark(all, k);
  }
  if (n_test >= corpus.size())
    throw data_error("split: test fraction leaves no training documents");

  std::vector<Document> train_docs, test_docs;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (in_test[i] ? test_docs : train_docs).push_back(corpus.docs()[i]);

  auto prov_for = [&](const char* side) {
    Provenance p = corpus.provenance();
    p.filters.push_back(std::string("split ") + side + ": test_fraction " +
                        std::to_string(spec.test_fraction) + ", seed " +
                        std::to_string(spec.seed) +
                        (spec.stratified ? ", stratified" : ""));
    return p;
  };
  std::optional<GroupNames> groups =
      corpus.is_binary() ? std::optional<GroupNames>(corpus.groups())
                         : std::nullopt;
  return {Corpus::from_documents(std::move(train_docs), prov_for("train"), groups),
          Corpus::from_documents(std::move(test_docs), prov_for("test"), groups)};
}

std::vector<Group> labels_of(const Corpus& corpus) {
  std::vector<Group> labels;
  labels.reserve(corpus.size());
  for (const Document& d : corpus.docs()) labels.push_back(corpus.group_of(d));
  return labels;
}

}  // namespace leakaudit
