#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace leakaudit {

// Decodes the UTF-8 code point starting at in[i]; advances i. Invalid bytes
// decode as U+FFFD and advance by one.
char32_t utf8_next(std::string_view in, std::size_t& i);
void utf8_append(std::string& out, char32_t cp);

// Case folding covers ASCII and Latin-1 letters; other code points pass
// through unchanged (the corpus is scraped English reviews).
char32_t fold_lower(char32_t cp);
bool is_word_letter(char32_t cp);

// Lowercases text, preserving punctuation and spacing.
std::string lowercase_utf8(std::string_view text);

struct TokenizerOptions {
  bool remove_stopwords = true;
  // 1 keeps single-letter tokens; the pipeline default drops them.
  std::size_t min_token_len = 2;
  // nullptr selects the builtin list.
  const std::unordered_set<std::string>* stopwords = nullptr;
};

// Lowercased alphabetic tokens, split on non-letters. Deterministic; empty
// text yields an empty list.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& opts = {});

// Bundled English stopword list (versioned data file, embedded at build).
const std::unordered_set<std::string>& builtin_stopwords();
const std::string& builtin_stopwords_version();

}  // namespace leakaudit
