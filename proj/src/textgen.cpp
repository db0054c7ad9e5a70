#include "leakaudit/textgen.hpp"

#include <algorithm>
#include <fstream>

#include "leakaudit/csv.hpp"
#include "leakaudit/errors.hpp"
#include "leakaudit/rng.hpp"

namespace leakaudit {

namespace {

struct WeightedWord {
  const char* word;
  int weight;
};

// Park vocabulary shared by both groups; weights are zipf-ish so the most
// frequent words dominate both groups' importance rankings.
const WeightedWord kShared[] = {
    {"disney", 10},    {"park", 9},        {"disneyland", 8}, {"rides", 8},
    {"ride", 5},       {"day", 6},         {"time", 5},       {"kids", 4},
    {"children", 3},   {"food", 4},        {"staff", 4},      {"parade", 3},
    {"fireworks", 3},  {"castle", 3},      {"mickey", 3},     {"mountain", 2},
    {"hotel", 3},      {"tickets", 3},     {"ticket", 2},     {"visit", 3},
    {"place", 4},      {"people", 3},      {"show", 3},       {"characters", 3},
    {"restaurant", 2}, {"world", 2},       {"experience", 3}, {"family", 3},
    {"trip", 3},       {"attractions", 2}, {"weather", 2},    {"crowds", 2},
    {"morning", 2},    {"evening", 2},     {"entrance", 2},   {"price", 2},
    {"prices", 2},     {"shops", 2},       {"photos", 2},     {"walk", 2},
    {"area", 2},       {"main", 2},        {"street", 1},     {"water", 1},
    {"train", 2},      {"small", 2},       {"big", 2},        {"early", 2},
    {"busy", 2},       {"hours", 2},       {"minutes", 2},    {"night", 2},
    {"magic", 2},      {"adults", 1},      {"toddler", 1},    {"souvenirs", 1}};

const char* kPositive[] = {"great",     "good",      "amazing",  "wonderful",
                           "fun",       "loved",     "love",     "enjoyed",
                           "excellent", "beautiful", "magical",  "fantastic",
                           "happy",     "friendly",  "helpful",  "worth",
                           "recommend", "delicious", "perfect",  "best"};

const char* kNegative[] = {"terrible", "awful",     "disappointing",
                           "horrible", "worst",     "rude",
                           "dirty",    "boring",    "waste",
                           "bad",      "poor",      "overpriced",
                           "expensive", "disappointed", "crowded"};

// Paired dialect markers: a UK spelling and the US spelling the builtin
// rewrite rules map it onto. Both sides fire with the same probability, so
// standardization merges their distributions and the leakage signal drops
// out; the original spellings are what the proxy classifier can exploit.
struct PairedMarker {
  const char* uk;
  const char* us;
  double p;
  int max_extra;     // occurrences = 1 + below(max_extra+1)
  int polarity;      // 0 any, +1 positive docs only, -1 negative docs only
};

const PairedMarker kPaired[] = {
    {"queues", "lines", 0.55, 2, 0},
    {"queue", "line", 0.30, 1, 0},
    {"queued", "waited", 0.15, 0, 0},
    {"brilliant", "great", 0.35, 1, +1},
    {"whilst", "while", 0.30, 1, 0},
    {"colour", "color", 0.25, 1, 0},
    {"favourite", "favorite", 0.30, 0, 0},
    {"centre", "center", 0.20, 0, 0},
    {"organised", "organized", 0.10, 0, 0},
    {"realise", "realize", 0.10, 0, 0},
    {"holiday", "vacation", 0.35, 1, 0},
    {"autumn", "fall", 0.08, 0, 0},
    {"sweets", "candy", 0.15, 0, 0},
    {"mum", "mom", 0.18, 0, 0},
    {"trousers", "pants", 0.06, 0, 0},
    {"rubbish", "garbage", 0.12, 0, -1},
    {"film", "movie", 0.12, 0, 0},
    {"lift", "elevator", 0.05, 0, 0},
    {"biscuits", "cookies", 0.08, 0, 0},
    {"crisps", "chips", 0.06, 0, 0},
    {"pushchair", "stroller", 0.06, 0, 0},
};

// Residual style markers with no rewrite rule; they survive simplification
// and keep the post-transform task above chance.
struct ResidualMarker {
  const char* word;
  double p;
  int max_extra;
  int polarity;
};

const ResidualMarker kUkResidual[] = {
    {"lovely", 0.30, 1, +1}, {"quite", 0.35, 1, 0},  {"rather", 0.25, 0, 0},
    {"fairly", 0.15, 0, 0},  {"keen", 0.10, 0, 0},   {"proper", 0.10, 0, 0},
    {"bit", 0.25, 0, 0}};

const ResidualMarker kUsResidual[] = {
    {"awesome", 0.30, 1, +1}, {"like", 0.40, 2, 0},   {"totally", 0.20, 0, 0},
    {"super", 0.25, 1, 0},    {"gotten", 0.12, 0, 0}, {"bunch", 0.15, 0, 0},
    {"soda", 0.10, 0, 0}};

const char* kContractions[] = {"it's",  "we've", "that's", "didn't",
                               "don't", "can't", "you'll"};

const char* kOtherLocations[] = {"Australia", "Canada", "India",
                                 "Philippines", "Singapore"};
const char* kOtherBranches[] = {"Disneyland_Paris", "Disneyland_California"};

class ReviewWriter {
 public:
  explicit ReviewWriter(const TextGenConfig& config) : config_(config) {
    for (const WeightedWord& w : kShared)
      for (int i = 0; i < w.weight; ++i) shared_pool_.push_back(w.word);
  }

  GeneratedReview make(std::size_t index, bool uk, Rng& rng) const {
    bool positive = rng.unit() < 0.7;
    std::vector<std::string> tokens;

    std::size_t base_len = 24 + rng.below(40);
    for (std::size_t i = 0; i < base_len; ++i)
      tokens.push_back(shared_pool_[rng.below(shared_pool_.size())]);

    std::size_t n_sentiment = 3 + rng.below(4);
    for (std::size_t i = 0; i < n_sentiment; ++i)
      tokens.push_back(positive
                           ? kPositive[rng.below(std::size(kPositive))]
                           : kNegative[rng.below(std::size(kNegative))]);

    for (const PairedMarker& m : kPaired) {
      if (m.polarity == +1 && !positive) continue;
      if (m.polarity == -1 && positive) continue;
      if (rng.unit() >= m.p * config_.marker_strength) continue;
      std::size_t reps = 1 + rng.below(static_cast<std::uint64_t>(m.max_extra) + 1);
      for (std::size_t r = 0; r < reps; ++r) {
        bool own = rng.unit() >= config_.cross_talk;
        tokens.push_back((uk == own) ? m.uk : m.us);
      }
    }
    auto residuals = [&](const ResidualMarker* table, std::size_t n, bool own) {
      for (std::size_t j = 0; j < n; ++j) {
        const ResidualMarker& m = table[j];
        if (m.polarity == +1 && !positive) continue;
        if (m.polarity == -1 && positive) continue;
        double p = m.p * config_.marker_strength;
        if (!own) p *= config_.cross_talk;
        if (rng.unit() >= p) continue;
        std::size_t reps = 1 + rng.below(static_cast<std::uint64_t>(m.max_extra) + 1);
        for (std::size_t r = 0; r < reps; ++r) tokens.push_back(m.word);
      }
    };
    residuals(kUkResidual, std::size(kUkResidual), uk);
    residuals(kUsResidual, std::size(kUsResidual), !uk);

    if (rng.unit() < 0.35)
      tokens.push_back(kContractions[rng.below(std::size(kContractions))]);

    rng.shuffle(tokens);

    GeneratedReview review;
    review.id = "r" + std::to_string(100000 + index);
    review.location = uk ? "United Kingdom" : "United States";
    review.branch = "Disneyland_HongKong";
    review.rating = positive ? 4 + static_cast<int>(rng.below(2))
                             : 1 + static_cast<int>(rng.below(3));
    review.text = assemble(tokens, rng);
    return review;
  }

 private:
  std::string assemble(const std::vector<std::string>& tokens, Rng& rng) const {
    std::string text;
    std::size_t i = 0;
    while (i < tokens.size()) {
      std::size_t len = std::min<std::size_t>(6 + rng.below(7),
                                              tokens.size() - i);
      for (std::size_t j = 0; j < len; ++j) {
        std::string word = tokens[i + j];
        if (j == 0) {
          word[0] = static_cast<char>(std::toupper(
              static_cast<unsigned char>(word[0])));
        } else if (rng.unit() < 0.02) {
          for (char& c : word)
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        if (j > 0) text += rng.unit() < 0.06 ? ", " : " ";
        text += word;
      }
      i += len;
      text += rng.unit() < 0.1 ? "! " : ". ";
    }
    if (!text.empty() && text.back() == ' ') text.pop_back();
    return text;
  }

  TextGenConfig config_;
  std::vector<const char*> shared_pool_;
};

}  // namespace

std::vector<GeneratedReview> generate_reviews(const TextGenConfig& config) {
  Rng rng(config.seed);
  ReviewWriter writer(config);
  std::vector<GeneratedReview> reviews;
  std::size_t index = 0;

  for (std::size_t g = 0; g < 2; ++g)
    for (std::size_t i = 0; i < config.per_group; ++i)
      reviews.push_back(writer.make(index++, g == 0, rng));

  for (std::size_t i = 0; i < config.other_location_rows; ++i) {
    GeneratedReview r = writer.make(index++, rng.unit() < 0.5, rng);
    r.location = kOtherLocations[rng.below(std::size(kOtherLocations))];
    reviews.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < config.other_branch_rows; ++i) {
    GeneratedReview r = writer.make(index++, rng.unit() < 0.5, rng);
    r.branch = kOtherBranches[rng.below(std::size(kOtherBranches))];
    reviews.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < config.empty_rows; ++i) {
    GeneratedReview r;
    r.id = "r" + std::to_string(100000 + index++);
    r.location = rng.unit() < 0.5 ? "United Kingdom" : "United States";
    r.branch = "Disneyland_HongKong";
    reviews.push_back(std::move(r));
  }

  rng.shuffle(reviews);
  return reviews;
}

void write_reviews_csv(const std::string& path,
                       const std::vector<GeneratedReview>& reviews) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  write_csv_row(out, {"Review_ID", "Review_Text", "Reviewer_Location",
                      "Disneyland_Branch", "Rating"});
  for (const GeneratedReview& r : reviews)
    write_csv_row(out, {r.id, r.text, r.location, r.branch,
                        std::to_string(r.rating)});
}

void write_simplified_csv(const std::string& path,
                          const std::vector<GeneratedReview>& reviews,
                          const RewriteRules& rules) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  write_csv_row(out, {"Review_ID", "Simplified_Text"});
  for (const GeneratedReview& r : reviews) {
    if (r.text.empty()) continue;
    write_csv_row(out, {r.id, offline_simplify(r.text, rules)});
  }
}

}  // namespace leakaudit
