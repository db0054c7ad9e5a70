#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "leakaudit/evaluation.hpp"

namespace leakaudit {

// Regularized upper incomplete gamma Q(a, x), evaluated by the classic
// series (x < a+1) / continued-fraction (x >= a+1) pair, iterated to
// absolute error below 1e-12.
double regularized_gamma_q(double a, double x);

// Chi-square survival function: P(X >= x) for df degrees of freedom.
double chi2_sf(double x, int df);

struct McNemarResult {
  std::size_t b = 0;  // model 1 correct, model 2 wrong
  std::size_t c = 0;  // model 1 wrong, model 2 correct
  double statistic = 0.0;
  double p_value = 1.0;
  bool correction = true;

  nlohmann::json to_json() const;
};

// Paired test over per-document correctness vectors. Corrected statistic is
// (|b-c|-1)^2/(b+c) (|b-c|-1 is not clamped at b=c, matching the standard
// corrected form); uncorrected is (b-c)^2/(b+c). b+c = 0 gives statistic 0,
// p = 1. p-values come from the chi-square survival function with 1 df.
McNemarResult mcnemar(const std::vector<std::uint8_t>& correct1,
                      const std::vector<std::uint8_t>& correct2,
                      bool correction = true);

// Exact binomial variant for small discordant counts (b+c < 25 is where the
// chi-square approximation is weak). mid-p halves the point probability.
McNemarResult mcnemar_exact(const std::vector<std::uint8_t>& correct1,
                            const std::vector<std::uint8_t>& correct2,
                            bool mid_p = true);

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample stddev; 0 for a single run
};

struct SeedSweepSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<EvalReport> reports;  // ordered as the seed list
  MetricStats accuracy, f1, precision, recall;

  nlohmann::json to_json() const;
};

// Runs the supplied pipeline once per seed (in parallel; results ordered by
// the seed list) and aggregates per-metric mean/std. The runner must be
// thread-safe. A failing seed propagates data_error tagged with the seed.
SeedSweepSummary seed_sweep(
    const std::function<EvalReport(std::uint64_t)>& runner,
    const std::vector<std::uint64_t>& seeds, bool parallel = true);

// Aggregates already-computed per-seed reports into the same summary shape.
SeedSweepSummary summarize_reports(const std::vector<std::uint64_t>& seeds,
                                   std::vector<EvalReport> reports);

}  // namespace leakaudit
