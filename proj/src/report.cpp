#include "leakaudit/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "leakaudit/errors.hpp"
#include "leakaudit/evaluation.hpp"

namespace leakaudit {

namespace {

SeedSweepSummary summary_from_json(const nlohmann::json& j) {
  SeedSweepSummary s;
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& r : j.at("per_seed")) s.reports.push_back(EvalReport::from_json(r));
  auto ms = [&](const char* key) {
    MetricStats m;
    m.mean = j.at(key).at("mean").get<double>();
    m.stddev = j.at(key).at("stddev").get<double>();
    return m;
  };
  s.accuracy = ms("accuracy");
  s.f1 = ms("f1");
  s.precision = ms("precision");
  s.recall = ms("recall");
  return s;
}

McNemarResult mcnemar_from_json(const nlohmann::json& j) {
  McNemarResult r;
  r.b = j.at("b").get<std::size_t>();
  r.c = j.at("c").get<std::size_t>();
  r.statistic = j.at("statistic").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.correction = j.at("correction").get<bool>();
  return r;
}

nlohmann::json mcnemar_list(const std::vector<McNemarResult>& list) {
  nlohmann::json out = nlohmann::json::array();
  for (const McNemarResult& r : list) out.push_back(r.to_json());
  return out;
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw data_error(std::string("report validation: ") + what +
                     " outside [0,1]: " + std::to_string(v));
}

}  // namespace

nlohmann::json AuditReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config;
  j["dataset"] = {{"provenance", provenance}, {"n_sample", n_sample}};
  j["seeds"] = seeds;
  j["models"] = {
      {"original",
       {{"naive_bayes", nb_original.to_json()},
        {"random_forest", rf_original.to_json()}}},
      {"simplified",
       {{"naive_bayes", nb_simplified.to_json()},
        {"random_forest", rf_simplified.to_json()}}}};
  j["deltas"] = {{"naive_bayes", nb_delta}, {"random_forest", rf_delta}};
  j["mcnemar"] = {{"naive_bayes",
                   {{"per_seed", mcnemar_list(nb_mcnemar)},
                    {"significant_fraction", nb_significant_fraction}}},
                  {"random_forest",
                   {{"per_seed", mcnemar_list(rf_mcnemar)},
                    {"significant_fraction", rf_significant_fraction}}},
                  {"significance", significance}};
  j["sentiment"] = sentiment.to_json();
  j["sentiment_ok"] = sentiment_ok;
  j["rankings"] = rankings_to_json(rankings);
  j["manifest"] = {{"created_at", created_at},
                   {"config_hash", config_hash},
                   {"lexicon_version", lexicon_version},
                   {"backend", backend_id},
                   {"model", backend_model},
                   {"template", template_name},
                   {"cache_path", cache_path},
                   {"cache_entries", cache_entries},
                   {"flagged_ids", flagged_ids}};
  return j;
}

AuditReport AuditReport::from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion)
    throw data_error("report schema version mismatch");
  AuditReport r;
  r.config = j.at("config");
  r.provenance = j.at("dataset").at("provenance");
  r.n_sample = j.at("dataset").at("n_sample").get<std::size_t>();
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  const auto& models = j.at("models");
  r.nb_original = summary_from_json(models.at("original").at("naive_bayes"));
  r.rf_original = summary_from_json(models.at("original").at("random_forest"));
  r.nb_simplified = summary_from_json(models.at("simplified").at("naive_bayes"));
  r.rf_simplified =
      summary_from_json(models.at("simplified").at("random_forest"));
  r.nb_delta = j.at("deltas").at("naive_bayes").get<double>();
  r.rf_delta = j.at("deltas").at("random_forest").get<double>();
  const auto& mc = j.at("mcnemar");
  for (const auto& m : mc.at("naive_bayes").at("per_seed"))
    r.nb_mcnemar.push_back(mcnemar_from_json(m));
  for (const auto& m : mc.at("random_forest").at("per_seed"))
    r.rf_mcnemar.push_back(mcnemar_from_json(m));
  r.nb_significant_fraction =
      mc.at("naive_bayes").at("significant_fraction").get<double>();
  r.rf_significant_fraction =
      mc.at("random_forest").at("significant_fraction").get<double>();
  r.significance = mc.at("significance").get<double>();

  const auto& s = j.at("sentiment");
  r.sentiment.n_docs = s.at("n_docs").get<std::size_t>();
  r.sentiment.agreement = s.at("agreement").get<double>();
  r.sentiment.flips = s.at("flips").get<std::size_t>();
  r.sentiment.flip_rate = s.at("flip_rate").get<double>();
  r.sentiment.mean_abs_delta = s.at("mean_abs_delta").get<double>();
  r.sentiment.lexicon_version = s.at("lexicon_version").get<std::string>();
  for (const auto& e : s.at("engines")) {
    EnginePreservation ep;
    ep.engine = e.at("engine").get<std::string>() == "lex_mean"
                    ? SentimentEngine::lex_mean
                    : SentimentEngine::lex_shift;
    ep.agreement = e.at("agreement").get<double>();
    ep.flips = e.at("flips").get<std::size_t>();
    ep.mean_abs_delta = e.at("mean_abs_delta").get<double>();
    ep.original_counts = e.at("original_counts").get<std::array<std::size_t, 3>>();
    ep.transformed_counts =
        e.at("transformed_counts").get<std::array<std::size_t, 3>>();
    r.sentiment.engines.push_back(ep);
  }
  r.sentiment_ok = j.at("sentiment_ok").get<bool>();

  for (const auto& rank : j.at("rankings")) {
    ImportanceRanking ir;
    ir.scope = rank.at("scope").get<std::string>();
    for (const auto& e : rank.at("entries"))
      ir.entries.push_back(
          {e.at("term").get<std::string>(), e.at("score").get<double>()});
    r.rankings.push_back(std::move(ir));
  }

  const auto& manifest = j.at("manifest");
  r.created_at = manifest.at("created_at").get<std::string>();
  r.config_hash = manifest.at("config_hash").get<std::string>();
  r.lexicon_version = manifest.at("lexicon_version").get<std::string>();
  r.backend_id = manifest.at("backend").get<std::string>();
  r.backend_model = manifest.at("model").get<std::string>();
  r.template_name = manifest.at("template").get<std::string>();
  r.cache_path = manifest.at("cache_path").get<std::string>();
  r.cache_entries = manifest.at("cache_entries").get<std::size_t>();
  r.flagged_ids = manifest.at("flagged_ids").get<std::vector<std::string>>();
  return r;
}

void AuditReport::validate() const {
  for (const SeedSweepSummary* s :
       {&nb_original, &rf_original, &nb_simplified, &rf_simplified}) {
    check_unit(s->accuracy.mean, "mean accuracy");
    check_unit(s->f1.mean, "mean f1");
    check_unit(s->precision.mean, "mean precision");
    check_unit(s->recall.mean, "mean recall");
    for (const EvalReport& r : s->reports) {
      check_unit(r.accuracy, "accuracy");
      check_unit(r.f1, "f1");
      check_unit(r.precision, "precision");
      check_unit(r.recall, "recall");
    }
  }
  if (std::abs(nb_delta - (nb_original.accuracy.mean -
                           nb_simplified.accuracy.mean)) > 1e-12)
    throw data_error("report validation: naive_bayes delta mismatch");
  if (std::abs(rf_delta - (rf_original.accuracy.mean -
                           rf_simplified.accuracy.mean)) > 1e-12)
    throw data_error("report validation: random_forest delta mismatch");
  for (const std::vector<McNemarResult>* list : {&nb_mcnemar, &rf_mcnemar})
    for (const McNemarResult& m : *list) check_unit(m.p_value, "p-value");
  check_unit(sentiment.agreement, "sentiment agreement");
}

namespace {

std::string fixed(double v, int places = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

}  // namespace

std::string AuditReport::to_markdown() const {
  std::ostringstream md;
  md << "# Leakage audit report\n\n";
  md << "- sample: " << n_sample << " documents, " << seeds.size()
     << " seed(s)\n";
  md << "- backend: " << backend_id << " (" << backend_model << "), template "
     << template_name << "\n";
  md << "- config hash: `" << config_hash << "`\n\n";

  md << "## Proxy classifier results (mean over seeds)\n\n";
  md << "| Dataset | Model | Accuracy | F1-score | Precision | Recall |\n";
  md << "|---|---|---|---|---|---|\n";
  auto row = [&](const char* dataset, const char* model,
                 const SeedSweepSummary& s) {
    md << "| " << dataset << " | " << model << " | " << fixed(s.accuracy.mean)
       << " | " << fixed(s.f1.mean) << " | " << fixed(s.precision.mean) << " | "
       << fixed(s.recall.mean) << " |\n";
  };
  row("Original", "Naive Bayes", nb_original);
  row("Original", "Random Forest", rf_original);
  row("Simplified", "Naive Bayes", nb_simplified);
  row("Simplified", "Random Forest", rf_simplified);

  md << "\n## Leakage change\n\n";
  md << "- Naive Bayes accuracy drop: " << fixed(nb_delta, 3) << "\n";
  md << "- Random Forest accuracy drop: " << fixed(rf_delta, 3) << "\n";
  md << "- McNemar (alpha = " << significance << "): Naive Bayes significant in "
     << fixed(nb_significant_fraction * 100, 0) << "% of seeds, Random Forest in "
     << fixed(rf_significant_fraction * 100, 0) << "%\n";

  md << "\n## Sentiment preservation\n\n";
  md << "- label agreement: " << fixed(sentiment.agreement, 3)
     << ", positive/negative flips: " << sentiment.flips << " ("
     << fixed(sentiment.flip_rate * 100, 1) << "%), mean |d polarity|: "
     << fixed(sentiment.mean_abs_delta, 3) << "\n";
  md << "- verdict: " << (sentiment_ok ? "preserved" : "NOT preserved")
     << " (lexicon " << sentiment.lexicon_version << ")\n";

  for (const ImportanceRanking& r : rankings) {
    md << "\n## Top words: " << r.scope << "\n\n";
    md << "| rank | term | score |\n|---|---|---|\n";
    for (std::size_t i = 0; i < r.entries.size() && i < 10; ++i)
      md << "| " << (i + 1) << " | " << r.entries[i].term << " | "
         << fixed(r.entries[i].score, 4) << " |\n";
  }

  if (!flagged_ids.empty()) {
    md << "\n## Flagged documents (empty transform responses)\n\n";
    for (const std::string& id : flagged_ids) md << "- " << id << "\n";
  }
  md << "\n_generated " << created_at << "_\n";
  return md.str();
}

void write_run_artifacts(const std::string& run_dir, const AuditReport& report) {
  std::filesystem::create_directories(run_dir);
  auto write_file = [&](const char* name, const std::string& content) {
    std::string path = run_dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path);
    out << content;
  };
  nlohmann::json j = report.to_json();
  write_file("report.json", j.dump(2) + "\n");
  write_file("report.md", report.to_markdown());
  write_file("manifest.json", j.at("manifest").dump(2) + "\n");

  std::ostringstream rankings_csv;
  write_rankings_csv(rankings_csv, report.rankings);
  write_file("rankings.csv", rankings_csv.str());

  std::ostringstream sentiment_csv;
  write_sentiment_csv(sentiment_csv, report.sentiment);
  write_file("sentiment.csv", sentiment_csv.str());
}

AuditReport load_report(const std::string& run_dir) {
  std::string path = run_dir + "/report.json";
  std::ifstream in(path);
  if (!in) throw data_error("no run found: missing " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw data_error("corrupt report.json in " + run_dir);
  AuditReport report;
  try {
    report = AuditReport::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw data_error("corrupt report.json in " + run_dir + ": " + e.what());
  }
  report.validate();
  return report;
}

}  // namespace leakaudit
