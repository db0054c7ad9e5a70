#include "leakaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "leakaudit/errors.hpp"

namespace leakaudit {

namespace {

// Series expansion of P(a,x); converges for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a,x); converges for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("regularized_gamma_q: a <= 0");
  if (x < 0.0) throw std::invalid_argument("regularized_gamma_q: x < 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi2_sf: df < 1");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(df / 2.0, x / 2.0);
}

namespace {

std::pair<std::size_t, std::size_t> discordant_counts(
    const std::vector<std::uint8_t>& correct1,
    const std::vector<std::uint8_t>& correct2) {
  if (correct1.size() != correct2.size())
    throw data_error("mcnemar: correctness vectors differ in length");
  std::size_t b = 0, c = 0;
  for (std::size_t i = 0; i < correct1.size(); ++i) {
    if (correct1[i] && !correct2[i]) ++b;
    if (!correct1[i] && correct2[i]) ++c;
  }
  return {b, c};
}

}  // namespace

McNemarResult mcnemar(const std::vector<std::uint8_t>& correct1,
                      const std::vector<std::uint8_t>& correct2,
                      bool correction) {
  auto [b, c] = discordant_counts(correct1, correct2);
  McNemarResult r;
  r.b = b;
  r.c = c;
  r.correction = correction;
  if (b + c == 0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  double diff = std::abs(static_cast<double>(b) - static_cast<double>(c));
  double num = correction ? (diff - 1.0) * (diff - 1.0) : diff * diff;
  r.statistic = num / static_cast<double>(b + c);
  r.p_value = chi2_sf(r.statistic, 1);
  return r;
}

McNemarResult mcnemar_exact(const std::vector<std::uint8_t>& correct1,
                            const std::vector<std::uint8_t>& correct2,
                            bool mid_p) {
  auto [b, c] = discordant_counts(correct1, correct2);
  McNemarResult r;
  r.b = b;
  r.c = c;
  r.correction = false;
  r.statistic = 0.0;
  std::size_t n = b + c;
  if (n == 0) {
    r.p_value = 1.0;
    return r;
  }
  std::size_t k = std::min(b, c);
  // Binomial(n, 1/2) tail in log space for numerical range.
  auto log_pmf = [n](std::size_t i) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(i) + 1.0) -
           std::lgamma(static_cast<double>(n - i) + 1.0) -
           static_cast<double>(n) * std::log(2.0);
  };
  double tail = 0.0;
  for (std::size_t i = 0; i <= k; ++i) tail += std::exp(log_pmf(i));
  double p = 2.0 * tail;
  if (mid_p) p -= std::exp(log_pmf(k));
  r.p_value = std::clamp(p, 0.0, 1.0);
  return r;
}

nlohmann::json McNemarResult::to_json() const {
  return {{"b", b},
          {"c", c},
          {"statistic", statistic},
          {"p_value", p_value},
          {"correction", correction}};
}

namespace {

MetricStats stats_of(const std::vector<double>& values) {
  MetricStats s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace

SeedSweepSummary summarize_reports(const std::vector<std::uint64_t>& seeds,
                                   std::vector<EvalReport> reports) {
  if (seeds.size() != reports.size())
    throw data_error("summarize_reports: seed/report count mismatch");
  SeedSweepSummary summary;
  summary.seeds = seeds;
  summary.reports = std::move(reports);
  std::vector<double> acc, f1, prec, rec;
  for (const EvalReport& r : summary.reports) {
    acc.push_back(r.accuracy);
    f1.push_back(r.f1);
    prec.push_back(r.precision);
    rec.push_back(r.recall);
  }
  summary.accuracy = stats_of(acc);
  summary.f1 = stats_of(f1);
  summary.precision = stats_of(prec);
  summary.recall = stats_of(rec);
  return summary;
}

SeedSweepSummary seed_sweep(
    const std::function<EvalReport(std::uint64_t)>& runner,
    const std::vector<std::uint64_t>& seeds, bool parallel) {
  if (seeds.empty()) throw config_error("seed_sweep: need at least one seed");
  std::vector<EvalReport> reports(seeds.size());
  std::vector<std::string> failures(seeds.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(seeds.size()); ++i) {
      try {
        reports[i] = runner(seeds[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  } else {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      try {
        reports[i] = runner(seeds[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  }
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (!failures[i].empty())
      throw data_error("seed_sweep: seed " + std::to_string(seeds[i]) +
                       " failed: " + failures[i]);
  return summarize_reports(seeds, std::move(reports));
}

nlohmann::json SeedSweepSummary::to_json() const {
  nlohmann::json per_seed = nlohmann::json::array();
  for (const EvalReport& r : reports) per_seed.push_back(r.to_json());
  auto ms = [](const MetricStats& m) {
    return nlohmann::json{{"mean", m.mean}, {"stddev", m.stddev}};
  };
  return {{"seeds", seeds},
          {"per_seed", per_seed},
          {"accuracy", ms(accuracy)},
          {"f1", ms(f1)},
          {"precision", ms(precision)},
          {"recall", ms(recall)}};
}

}  // namespace leakaudit
